"""Rule-language front end: lexer, parser, validator, and pretty-printer.

The language is a small s-expression dialect with three top-level forms:

    (deftemplate NAME (slot NAME) ...)
    (defquestion NAME "prompt")
    (defrule NAME [(declare ...)] PATTERN ... => ACTION ...)

Files are UTF-8; `;` starts a comment running to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union


class NmxError(Exception):
    """Base class for errors raised by this package."""


class LexError(NmxError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ParseError(NmxError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

class TokenType(Enum):
    OPEN = "OPEN"
    CLOSE = "CLOSE"
    SYMBOL = "SYMBOL"
    STRING = "STRING"
    INT = "INT"
    VAR = "VAR"
    ARROW = "ARROW"


@dataclass(frozen=True)
class Token:
    type: TokenType
    value: Union[str, int, None]
    line: int
    column: int


_SYMBOL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
_VAR_NAME_RE = re.compile(r"[A-Za-z0-9_-]+")
_INT_RE = re.compile(r"-?[0-9]+")


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, attaching 1-based (line, column) positions."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(text: str) -> None:
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(ch)
            i += 1
            continue
        if ch == ";":
            end = source.find("\n", i)
            if end == -1:
                end = n
            advance(source[i:end])
            i = end
            continue
        start_line, start_col = line, col
        if ch == "(":
            tokens.append(Token(TokenType.OPEN, None, start_line, start_col))
            advance(ch)
            i += 1
            continue
        if ch == ")":
            tokens.append(Token(TokenType.CLOSE, None, start_line, start_col))
            advance(ch)
            i += 1
            continue
        if source.startswith("=>", i):
            tokens.append(Token(TokenType.ARROW, None, start_line, start_col))
            advance("=>")
            i += 2
            continue
        if ch == '"':
            advance(ch)
            i += 1
            parts: list[str] = []
            while True:
                if i >= n:
                    raise LexError("unterminated string", start_line, start_col)
                c = source[i]
                if c == '"':
                    advance(c)
                    i += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string", start_line, start_col)
                    esc = source[i + 1]
                    if esc == '"':
                        parts.append('"')
                    elif esc == "\\":
                        parts.append("\\")
                    else:
                        raise LexError(f"invalid escape '\\{esc}' in string", line, col)
                    advance(source[i:i + 2])
                    i += 2
                    continue
                parts.append(c)
                advance(c)
                i += 1
            tokens.append(Token(TokenType.STRING, "".join(parts), start_line, start_col))
            continue
        if ch == "?":
            m = _VAR_NAME_RE.match(source, i + 1)
            if not m:
                raise LexError("'?' must be followed by a variable name", start_line, start_col)
            name = m.group(0)
            tokens.append(Token(TokenType.VAR, name, start_line, start_col))
            advance(source[i:m.end()])
            i = m.end()
            continue
        m = _INT_RE.match(source, i)
        if m and (ch.isdigit() or (ch == "-" and m.end() > i + 1)):
            text = m.group(0)
            tokens.append(Token(TokenType.INT, int(text), start_line, start_col))
            advance(text)
            i = m.end()
            continue
        m = _SYMBOL_RE.match(source, i)
        if m:
            text = m.group(0)
            tokens.append(Token(TokenType.SYMBOL, text, start_line, start_col))
            advance(text)
            i = m.end()
            continue
        raise LexError(f"illegal character {ch!r}", start_line, start_col)
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Symbol:
    text: str


@dataclass(frozen=True)
class Str:
    text: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


Atom = Union[Symbol, Str, Int, Var]


def atom_value(atom: Atom) -> Union[str, int]:
    """Unwrap an atom to the plain value used for fact slots and match tests.

    Symbols and strings collapse to str here; the distinction only matters
    to the printer.
    """
    if isinstance(atom, Symbol):
        return atom.text
    if isinstance(atom, Str):
        return atom.text
    if isinstance(atom, Int):
        return atom.value
    raise TypeError(f"variable ?{atom.name} has no constant value")


@dataclass(frozen=True)
class SlotTest:
    slot: str
    test: Atom  # constant atom, or Var for a binding


@dataclass(frozen=True)
class Pattern:
    template: str
    slot_tests: tuple[SlotTest, ...]

    def constant_tests(self) -> dict[str, Union[str, int]]:
        return {t.slot: atom_value(t.test) for t in self.slot_tests
                if not isinstance(t.test, Var)}

    def variable_slots(self) -> dict[str, str]:
        return {t.slot: t.test.name for t in self.slot_tests
                if isinstance(t.test, Var)}

    def signature(self) -> tuple:
        """Order-insensitive identity used for node sharing and shadow detection."""
        return (self.template, frozenset((t.slot, t.test) for t in self.slot_tests))


@dataclass(frozen=True)
class ActionCall:
    verb: str
    args: tuple[Atom, ...]
    # Original verb when spelling was fixed up; provenance only, excluded from
    # structural equality so normalization survives a print/parse round trip.
    normalized_from: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class TemplateDef:
    name: str
    slots: tuple[str, ...]


@dataclass(frozen=True)
class QuestionDef:
    ident: str
    prompt: str


@dataclass(frozen=True)
class RuleDef:
    name: str
    patterns: tuple[Pattern, ...]
    actions: tuple[ActionCall, ...]
    auto_focus: bool = False
    salience: int = 0


@dataclass(frozen=True)
class KnowledgeBase:
    templates: tuple[TemplateDef, ...]
    questions: tuple[QuestionDef, ...]
    rules: tuple[RuleDef, ...]

    def template(self, name: str) -> TemplateDef:
        for t in self.templates:
            if t.name == name:
                return t
        raise KeyError(name)

    def question_prompts(self) -> dict[str, str]:
        return {q.ident: q.prompt for q in self.questions}


RECOGNIZED_VERBS = ("recommend-action", "recommend-tests", "recommend-treatment")

# Legacy misspellings that still load, flagged W001 by the validator.
_VERB_FIXUPS = {"recommended-" + v[len("recommend-"):]: v for v in RECOGNIZED_VERBS}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.column if last else 1
            raise ParseError("unexpected end of input", line, col)
        self.pos += 1
        return tok

    def expect(self, type_: TokenType, what: str) -> Token:
        tok = self.next()
        if tok.type is not type_:
            raise ParseError(f"expected {what}", tok.line, tok.column)
        return tok


def parse(source: str) -> KnowledgeBase:
    """Parse KB source text into a structurally validated KnowledgeBase.

    Raises ParseError for syntax errors, duplicate rule/question/template
    names, references to undeclared templates or slots, and action variables
    unbound by any pattern. Soft issues (W/E diagnostic codes) are reported
    by validate(), not raised here.
    """
    stream = _TokenStream(tokenize(source))
    templates: list[TemplateDef] = []
    questions: list[QuestionDef] = []
    rules: list[RuleDef] = []
    rule_positions: dict[str, Token] = {}

    while stream.peek() is not None:
        open_tok = stream.expect(TokenType.OPEN, "'('")
        head = stream.expect(TokenType.SYMBOL, "form name")
        if head.value == "deftemplate":
            templates.append(_parse_deftemplate(stream, templates, head))
        elif head.value == "defquestion":
            questions.append(_parse_defquestion(stream, questions))
        elif head.value == "defrule":
            rule = _parse_defrule(stream)
            if rule.name in rule_positions:
                raise ParseError(f"duplicate rule name '{rule.name}'", open_tok.line, open_tok.column)
            rule_positions[rule.name] = open_tok
            rules.append(rule)
        else:
            raise ParseError(f"unknown top-level form '{head.value}'", head.line, head.column)

    kb = KnowledgeBase(tuple(templates), tuple(questions), tuple(rules))
    _check_references(kb, rule_positions)
    return kb


def parse_file(path) -> KnowledgeBase:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _parse_deftemplate(stream: _TokenStream, seen: list[TemplateDef], head: Token) -> TemplateDef:
    name = stream.expect(TokenType.SYMBOL, "template name")
    if any(t.name == name.value for t in seen):
        raise ParseError(f"duplicate template name '{name.value}'", name.line, name.column)
    slots: list[str] = []
    while True:
        tok = stream.next()
        if tok.type is TokenType.CLOSE:
            break
        if tok.type is not TokenType.OPEN:
            raise ParseError("expected '(slot NAME)' or ')'", tok.line, tok.column)
        kw = stream.expect(TokenType.SYMBOL, "'slot'")
        if kw.value != "slot":
            raise ParseError("expected 'slot'", kw.line, kw.column)
        slot_name = stream.expect(TokenType.SYMBOL, "slot name")
        if slot_name.value in slots:
            raise ParseError(f"duplicate slot '{slot_name.value}'", slot_name.line, slot_name.column)
        slots.append(slot_name.value)
        stream.expect(TokenType.CLOSE, "')'")
    if not slots:
        raise ParseError(f"template '{name.value}' has no slots", name.line, name.column)
    return TemplateDef(name.value, tuple(slots))


def _parse_defquestion(stream: _TokenStream, seen: list[QuestionDef]) -> QuestionDef:
    ident = stream.expect(TokenType.SYMBOL, "question ident")
    if any(q.ident == ident.value for q in seen):
        raise ParseError(f"duplicate question ident '{ident.value}'", ident.line, ident.column)
    prompt = stream.expect(TokenType.STRING, "prompt string")
    if not prompt.value:
        raise ParseError("question prompt must be nonempty", prompt.line, prompt.column)
    stream.expect(TokenType.CLOSE, "')'")
    return QuestionDef(ident.value, prompt.value)


def _parse_defrule(stream: _TokenStream) -> RuleDef:
    name = stream.expect(TokenType.SYMBOL, "rule name")
    auto_focus = False
    salience = 0
    patterns: list[Pattern] = []
    actions: list[ActionCall] = []

    first = True
    while True:
        tok = stream.next()
        if tok.type is TokenType.ARROW:
            break
        if tok.type is not TokenType.OPEN:
            raise ParseError("expected pattern, declare, or '=>'", tok.line, tok.column)
        head = stream.expect(TokenType.SYMBOL, "template or 'declare'")
        if head.value == "declare":
            if not first:
                raise ParseError("declare must be the first form in a rule",
                                 head.line, head.column)
            auto_focus, salience = _parse_declare(stream)
        else:
            patterns.append(_parse_pattern(stream, head))
        first = False

    if not patterns:
        raise ParseError(f"rule '{name.value}' has no patterns", name.line, name.column)

    while True:
        tok = stream.next()
        if tok.type is TokenType.CLOSE:
            break
        if tok.type is not TokenType.OPEN:
            raise ParseError("expected action or ')'", tok.line, tok.column)
        actions.append(_parse_action(stream))
    if not actions:
        raise ParseError(f"rule '{name.value}' has no actions", name.line, name.column)

    bound = {v for p in patterns for v in p.variable_slots().values()}
    for act in actions:
        for arg in act.args:
            if isinstance(arg, Var) and arg.name not in bound:
                raise ParseError(
                    f"action variable ?{arg.name} is not bound by any pattern",
                    name.line, name.column)

    return RuleDef(name.value, tuple(patterns), tuple(actions),
                   auto_focus=auto_focus, salience=salience)


def _parse_declare(stream: _TokenStream) -> tuple[bool, int]:
    auto_focus = False
    salience = 0
    seen: set[str] = set()
    while True:
        tok = stream.next()
        if tok.type is TokenType.CLOSE:
            return auto_focus, salience
        if tok.type is not TokenType.OPEN:
            raise ParseError("expected declare property or ')'", tok.line, tok.column)
        prop = stream.expect(TokenType.SYMBOL, "'auto-focus' or 'salience'")
        if prop.value in seen:
            raise ParseError(f"duplicate declare property '{prop.value}'", prop.line, prop.column)
        seen.add(prop.value)
        if prop.value == "auto-focus":
            val = stream.expect(TokenType.SYMBOL, "TRUE or FALSE")
            if val.value.upper() == "TRUE":
                auto_focus = True
            elif val.value.upper() == "FALSE":
                auto_focus = False
            else:
                raise ParseError("auto-focus takes TRUE or FALSE", val.line, val.column)
        elif prop.value == "salience":
            val = stream.expect(TokenType.INT, "integer salience")
            salience = val.value
        else:
            raise ParseError(f"unknown declare property '{prop.value}'", prop.line, prop.column)
        stream.expect(TokenType.CLOSE, "')'")


def _parse_pattern(stream: _TokenStream, template_tok: Token) -> Pattern:
    tests: list[SlotTest] = []
    seen_slots: set[str] = set()
    while True:
        tok = stream.next()
        if tok.type is TokenType.CLOSE:
            break
        if tok.type is not TokenType.OPEN:
            raise ParseError("expected '(SLOT VALUE)' or ')'", tok.line, tok.column)
        slot = stream.expect(TokenType.SYMBOL, "slot name")
        if slot.value in seen_slots:
            raise ParseError(f"slot '{slot.value}' tested twice in one pattern", slot.line, slot.column)
        seen_slots.add(slot.value)
        value = stream.next()
        tests.append(SlotTest(slot.value, _token_atom(value)))
        stream.expect(TokenType.CLOSE, "')'")
    return Pattern(template_tok.value, tuple(tests))


def _parse_action(stream: _TokenStream) -> ActionCall:
    verb_tok = stream.expect(TokenType.SYMBOL, "action verb")
    args: list[Atom] = []
    while True:
        tok = stream.next()
        if tok.type is TokenType.CLOSE:
            break
        args.append(_token_atom(tok))
    verb = verb_tok.value
    normalized_from = None
    if verb in _VERB_FIXUPS:
        normalized_from = verb
        verb = _VERB_FIXUPS[verb]
    if verb in RECOGNIZED_VERBS:
        if len(args) != 1 or not isinstance(args[0], Str):
            raise ParseError(f"{verb} takes exactly one string argument",
                             verb_tok.line, verb_tok.column)
        # Legacy files carry stray padding inside recommendation strings.
        args = [Str(args[0].text.strip())]
    return ActionCall(verb, tuple(args), normalized_from=normalized_from)


def _token_atom(tok: Token) -> Atom:
    if tok.type is TokenType.SYMBOL:
        return Symbol(tok.value)
    if tok.type is TokenType.STRING:
        return Str(tok.value)
    if tok.type is TokenType.INT:
        return Int(tok.value)
    if tok.type is TokenType.VAR:
        return Var(tok.value)
    raise ParseError("expected symbol, string, integer, or variable", tok.line, tok.column)


def _check_references(kb: KnowledgeBase, rule_positions: dict[str, Token]) -> None:
    by_name = {t.name: t for t in kb.templates}
    for rule in kb.rules:
        pos = rule_positions[rule.name]
        for pattern in rule.patterns:
            tmpl = by_name.get(pattern.template)
            if tmpl is None:
                raise ParseError(
                    f"rule '{rule.name}' matches undeclared template '{pattern.template}'",
                    pos.line, pos.column)
            for test in pattern.slot_tests:
                if test.slot not in tmpl.slots:
                    raise ParseError(
                        f"template '{pattern.template}' has no slot '{test.slot}'",
                        pos.line, pos.column)


# ---------------------------------------------------------------------------
# Validator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str  # "error" | "warning"
    message: str


def validate(kb: KnowledgeBase) -> list[Diagnostic]:
    """Report soft diagnostics on a parsed KB.

    Codes: W001 normalized action verb, W002 unrecognized action verb,
    E101 tested ident without a question, W003 rules with identical pattern
    sets, W004 question never used by any rule.
    """
    out: list[Diagnostic] = []
    for rule in kb.rules:
        for act in rule.actions:
            if act.normalized_from is not None:
                out.append(Diagnostic(
                    "W001", "warning",
                    f"rule '{rule.name}': action verb '{act.normalized_from}' "
                    f"normalized to '{act.verb}'"))
            elif act.verb not in RECOGNIZED_VERBS:
                out.append(Diagnostic(
                    "W002", "warning",
                    f"rule '{rule.name}': unrecognized action verb '{act.verb}'"))

    question_idents = {q.ident for q in kb.questions}
    asked = set()
    for rule in kb.rules:
        for ident in rule_answer_idents(rule):
            asked.add(ident)
            if ident not in question_idents:
                out.append(Diagnostic(
                    "E101", "error",
                    f"rule '{rule.name}' tests ident '{ident}' which has no defquestion"))

    seen_signatures: dict[frozenset, str] = {}
    for rule in kb.rules:
        sig = frozenset(p.signature() for p in rule.patterns)
        if sig in seen_signatures:
            out.append(Diagnostic(
                "W003", "warning",
                f"rule '{rule.name}' has the same pattern set as rule "
                f"'{seen_signatures[sig]}' (shadowing)"))
        else:
            seen_signatures[sig] = rule.name

    for q in kb.questions:
        if q.ident not in asked:
            out.append(Diagnostic(
                "W004", "warning",
                f"question '{q.ident}' is never used by any rule"))
    return out


def rule_answer_idents(rule: RuleDef) -> list[str]:
    """Constant idents tested by a rule's `answer` patterns, in pattern order."""
    idents = []
    for pattern in rule.patterns:
        if pattern.template != "answer":
            continue
        const = pattern.constant_tests()
        ident = const.get("ident")
        if isinstance(ident, str):
            idents.append(ident)
    return idents


# ---------------------------------------------------------------------------
# Pretty-printer
# ---------------------------------------------------------------------------

def pretty_print(kb: KnowledgeBase) -> str:
    """Canonical text form; parse(pretty_print(kb)) is structurally equal to kb."""
    chunks: list[str] = []
    for t in kb.templates:
        lines = [f"(deftemplate {t.name}"]
        lines += [f"  (slot {s})" for s in t.slots]
        chunks.append("\n".join(lines) + ")")
    for q in kb.questions:
        chunks.append(f"(defquestion {q.ident}\n  {_print_atom(Str(q.prompt))})")
    for r in kb.rules:
        lines = [f"(defrule {r.name}"]
        props = []
        if r.auto_focus:
            props.append("(auto-focus TRUE)")
        if r.salience != 0:
            props.append(f"(salience {r.salience})")
        if props:
            lines.append("  (declare " + " ".join(props) + ")")
        for p in r.patterns:
            tests = " ".join(f"({t.slot} {_print_atom(t.test)})" for t in p.slot_tests)
            lines.append(f"  ({p.template} {tests})" if tests else f"  ({p.template})")
        lines.append("  =>")
        for a in r.actions:
            args = " ".join(_print_atom(arg) for arg in a.args)
            lines.append(f"  ({a.verb} {args})" if args else f"  ({a.verb})")
        chunks.append("\n".join(lines) + ")")
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def _print_atom(atom: Atom) -> str:
    if isinstance(atom, Symbol):
        return atom.text
    if isinstance(atom, Str):
        escaped = atom.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(atom, Int):
        return str(atom.value)
    return f"?{atom.name}"
