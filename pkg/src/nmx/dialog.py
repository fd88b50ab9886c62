"""Hypothesis-driven yes/no questioning.

A session walks the rule list as a chain of hypotheses: it asks the first
unanswered ident of the first still-viable rule, prunes every rule that a
given answer contradicts, and lets the match engine fire as soon as any
rule's conditions are complete. Answers are shared facts, so an ident is
never asked twice even when hypotheses overlap.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Optional

from .dsl import KnowledgeBase, NmxError, RuleDef
from .memory import WorkingMemory
from .rete import FiringRecord, ReteNetwork, compile_network

YES = "yes"
NO = "no"

NO_MATCH_TEXT = "No disease in the knowledge base matches the reported symptoms."


class DialogError(NmxError):
    pass


class EmptyKnowledgeBaseError(DialogError):
    pass


class OutOfOrderAnswerError(DialogError):
    """Raised when the submitted ident is not the pending question."""


class InvalidAnswerError(DialogError):
    """Raised when the answer token is not yes or no."""


class SessionFinishedError(DialogError):
    """Raised when a terminal session is asked to continue."""


@dataclass(frozen=True)
class Recommendation:
    rule: str
    diagnosis: str
    tests: Optional[str] = None
    treatments: Optional[str] = None

    def to_json_obj(self) -> dict:
        return {"rule": self.rule, "diagnosis": self.diagnosis,
                "tests": self.tests, "treatments": self.treatments}


@dataclass(frozen=True)
class NextStep:
    kind: str  # "question" | "done"
    ident: Optional[str] = None
    prompt: Optional[str] = None


DONE = NextStep("done")

IN_PROGRESS = "in_progress"
DIAGNOSED = "diagnosed"
NO_MATCH = "no_match"


@dataclass(frozen=True)
class SessionResult:
    status: str
    transcript: tuple[tuple[str, str], ...]
    recommendations: tuple[Recommendation, ...]

    def to_json_obj(self) -> dict:
        return {
            "status": self.status,
            "transcript": [{"ident": i, "answer": a} for i, a in self.transcript],
            "diagnoses": [r.to_json_obj() for r in self.recommendations],
        }


class Session:
    """One patient dialog over an immutable KB; not thread-safe."""

    def __init__(self, kb: KnowledgeBase):
        if not kb.rules:
            raise EmptyKnowledgeBaseError("knowledge base has no rules")
        # 128 bits, URL-safe: session ids double as capability tokens.
        self.id = secrets.token_urlsafe(16)
        self.kb = kb
        self.wm = WorkingMemory(kb)
        self.network: ReteNetwork = compile_network(kb)
        self.network.attach(self.wm)
        self.answered: dict[str, str] = {}
        self.candidates: list[str] = [r.name for r in kb.rules]
        self.transcript: list[tuple[str, str]] = []
        self.status = IN_PROGRESS
        self.recommendations: list[Recommendation] = []
        self.firings: list[FiringRecord] = []
        self._prompts = kb.question_prompts()
        self._rules = {r.name: r for r in kb.rules}

    def next_step(self) -> NextStep:
        if self.status != IN_PROGRESS:
            raise SessionFinishedError("session is finished")
        ident = self._pending_ident()
        if ident is None:
            return DONE
        return NextStep("question", ident, self._prompts.get(ident, ident))

    def submit_answer(self, ident: str, answer: str) -> None:
        if self.status != IN_PROGRESS:
            raise SessionFinishedError("session is finished")
        if answer not in (YES, NO):
            raise InvalidAnswerError(f"answer must be '{YES}' or '{NO}', got {answer!r}")
        if ident in self.answered:
            raise OutOfOrderAnswerError(f"ident '{ident}' was already answered")
        pending = self._pending_ident()
        if ident != pending:
            raise OutOfOrderAnswerError(
                f"expected answer for '{pending}', got '{ident}'")

        self.answered[ident] = answer
        self.transcript.append((ident, answer))
        self.wm.assert_fact("answer", {"ident": ident, "text": answer})
        self._prune(ident, answer)

        if self.network.activation_set():
            self.firings = self.network.run()
            self.recommendations = [_recommendation(r) for r in self.firings]
            self.status = DIAGNOSED
        elif not self.candidates:
            self.status = NO_MATCH

    def result(self) -> SessionResult:
        return SessionResult(self.status, tuple(self.transcript),
                             tuple(self.recommendations))

    # -- policy ---------------------------------------------------------------

    def _pending_ident(self) -> Optional[str]:
        if not self.candidates:
            return None
        rule = self._rules[self.candidates[0]]
        for ident in _rule_idents(rule):
            if ident not in self.answered:
                return ident
        return None

    def _prune(self, ident: str, answer: str) -> None:
        survivors = []
        for name in self.candidates:
            if _contradicts(self._rules[name], ident, answer):
                continue
            survivors.append(name)
        self.candidates = survivors


def _rule_idents(rule: RuleDef) -> list[str]:
    idents = []
    for pattern in rule.patterns:
        if pattern.template != "answer":
            continue
        const = pattern.constant_tests()
        ident = const.get("ident")
        if isinstance(ident, str) and ident not in idents:
            idents.append(ident)
    return idents


def _contradicts(rule: RuleDef, ident: str, answer: str) -> bool:
    for pattern in rule.patterns:
        if pattern.template != "answer":
            continue
        const = pattern.constant_tests()
        if const.get("ident") == ident and "text" in const and const["text"] != answer:
            return True
    return False


def _recommendation(record: FiringRecord) -> Recommendation:
    diagnosis = ""
    tests = None
    treatments = None
    for action in record.actions:
        if action.verb == "recommend-action" and action.args and not diagnosis:
            diagnosis = str(action.args[0])
        elif action.verb == "recommend-tests" and action.args and tests is None:
            tests = str(action.args[0])
        elif action.verb == "recommend-treatment" and action.args and treatments is None:
            treatments = str(action.args[0])
    if not diagnosis:
        # diagnosis must be nonempty even for rules without recommend-action
        diagnosis = f"Rule '{record.rule}' matched the reported symptoms."
    return Recommendation(record.rule, diagnosis, tests, treatments)


def start_session(kb: KnowledgeBase) -> Session:
    return Session(kb)
