"""Incremental rule matcher.

compile_network() turns a KnowledgeBase into a DAG of shared constant tests,
alpha memories (one per distinct pattern), per-rule join chains, and
production nodes. Attached to a WorkingMemory it consumes assert/retract
events, keeps a conflict-resolution agenda, and fires productions on run().

naive_match() is the independent brute-force oracle: it rechecks every rule
against every assignment of live facts to patterns, with no incremental
state, and must always agree with the network's activation set.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

from .dsl import ActionCall, KnowledgeBase, Pattern, RuleDef, Var, atom_value, RECOGNIZED_VERBS
from .memory import Fact, SlotValue, WorkingMemory


@dataclass
class InstrumentationCounters:
    alpha_evals: int = 0
    join_attempts: int = 0
    tokens_created: int = 0
    activations_created: int = 0

    def to_json_obj(self) -> dict:
        return {
            "alpha_evals": self.alpha_evals,
            "join_attempts": self.join_attempts,
            "tokens_created": self.tokens_created,
            "activations_created": self.activations_created,
        }


@dataclass(frozen=True)
class Token:
    facts: tuple[Fact, ...]
    bindings: dict[str, SlotValue]


@dataclass(frozen=True)
class Activation:
    rule: str
    fact_ids: tuple[int, ...]
    salience: int
    auto_focus: bool
    recency: int  # newest timestamp among the matched facts
    token: Token = field(compare=False, repr=False)

    def sort_key(self) -> tuple:
        # auto-focus first, then salience desc, recency desc, name asc;
        # fact ids break remaining ties so runs are totally ordered.
        return (not self.auto_focus, -self.salience, -self.recency,
                self.rule, self.fact_ids)


@dataclass(frozen=True)
class ResolvedAction:
    verb: str
    args: tuple[SlotValue, ...]


@dataclass(frozen=True)
class FiringRecord:
    rule: str
    actions: tuple[ResolvedAction, ...]
    fact_ids: tuple[int, ...]
    warnings: tuple[str, ...] = ()


class AlphaMemory:
    """Facts passing one distinct pattern's constant tests, in arrival order."""

    __slots__ = ("template", "required", "facts", "successors")

    def __init__(self, template: str, required: frozenset):
        self.template = template
        self.required = required  # set of (slot, value) this memory demands
        self.facts: list[Fact] = []
        self.successors: list[tuple["RuleNode", int]] = []


class RuleNode:
    """One rule's join chain: levels[i] holds tokens covering patterns 0..i."""

    __slots__ = ("rule", "alphas", "var_slots", "levels")

    def __init__(self, rule: RuleDef, alphas: list[AlphaMemory]):
        self.rule = rule
        self.alphas = alphas
        self.var_slots = [p.variable_slots() for p in rule.patterns]
        self.levels: list[list[Token]] = [[] for _ in rule.patterns]


class ReteNetwork:
    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.counters = InstrumentationCounters()
        # Distinct (slot, value) constant tests, grouped by template.
        self.alpha_tests: dict[str, list[tuple[str, SlotValue]]] = {}
        self.alpha_memories: dict[tuple, AlphaMemory] = {}
        self._memories_by_template: dict[str, list[AlphaMemory]] = {}
        self.rule_nodes: list[RuleNode] = []
        self._agenda: list[Activation] = []
        self._agenda_keys: set[tuple[str, tuple[int, ...]]] = set()
        self._fired: set[tuple[str, tuple[int, ...]]] = set()
        self._build()

    # -- construction -------------------------------------------------------

    def _build(self) -> None:
        for rule in self.kb.rules:
            alphas = []
            for pattern in rule.patterns:
                alphas.append(self._alpha_memory_for(pattern))
            node = RuleNode(rule, alphas)
            self.rule_nodes.append(node)
            for pos, mem in enumerate(alphas):
                mem.successors.append((node, pos))
        # Within a rule, deeper join positions must right-activate first so a
        # fact feeding several positions of the same rule cannot pair with the
        # token it just produced (the classic duplicate-token hazard).
        order = {id(node): i for i, node in enumerate(self.rule_nodes)}
        for mem in self.alpha_memories.values():
            mem.successors.sort(key=lambda s: (order[id(s[0])], -s[1]))

    def _alpha_memory_for(self, pattern: Pattern) -> AlphaMemory:
        consts = pattern.constant_tests()
        tests = self.alpha_tests.setdefault(pattern.template, [])
        for item in consts.items():
            if item not in tests:
                tests.append(item)
        key = (pattern.template, frozenset(consts.items()))
        mem = self.alpha_memories.get(key)
        if mem is None:
            mem = AlphaMemory(pattern.template, frozenset(consts.items()))
            self.alpha_memories[key] = mem
            self._memories_by_template.setdefault(pattern.template, []).append(mem)
        return mem

    @property
    def alpha_test_count(self) -> int:
        return sum(len(v) for v in self.alpha_tests.values())

    @property
    def join_count(self) -> int:
        return sum(max(0, len(n.rule.patterns) - 1) for n in self.rule_nodes)

    @property
    def production_count(self) -> int:
        return len(self.rule_nodes)

    def attach(self, wm: WorkingMemory) -> None:
        """Subscribe to a memory's events, replaying any facts it already holds."""
        wm.add_listener(self)
        for fact in wm.snapshot():
            self.on_assert(fact)

    # -- incremental match --------------------------------------------------

    def on_assert(self, fact: Fact) -> None:
        mems = self._memories_by_template.get(fact.template)
        if not mems:
            return
        passed = set()
        for slot, value in self.alpha_tests.get(fact.template, ()):
            self.counters.alpha_evals += 1
            if fact.slot_values.get(slot) == value:
                passed.add((slot, value))
        for mem in mems:
            if mem.required <= passed:
                mem.facts.append(fact)
                for node, pos in mem.successors:
                    self._right_activate(node, pos, fact)

    def on_retract(self, fact: Fact) -> None:
        for mem in self._memories_by_template.get(fact.template, ()):
            if fact in mem.facts:
                mem.facts.remove(fact)
        for node in self.rule_nodes:
            for level in node.levels:
                level[:] = [t for t in level if fact not in t.facts]
        removed = [a for a in self._agenda if fact.id in a.fact_ids]
        if removed:
            self._agenda = [a for a in self._agenda if fact.id not in a.fact_ids]
            self._agenda_keys -= {(a.rule, a.fact_ids) for a in removed}
        self._fired = {(r, ids) for (r, ids) in self._fired if fact.id not in ids}

    def _right_activate(self, node: RuleNode, pos: int, fact: Fact) -> None:
        if pos == 0:
            token = self._extend(None, fact, node.var_slots[0])
            if token is not None:
                self._add_token(node, 0, token)
            return
        for left in list(node.levels[pos - 1]):
            self.counters.join_attempts += 1
            token = self._extend(left, fact, node.var_slots[pos])
            if token is not None:
                self._add_token(node, pos, token)

    def _add_token(self, node: RuleNode, level: int, token: Token) -> None:
        self.counters.tokens_created += 1
        node.levels[level].append(token)
        if level == len(node.levels) - 1:
            self._activate(node, token)
            return
        for fact in list(node.alphas[level + 1].facts):
            self.counters.join_attempts += 1
            extended = self._extend(token, fact, node.var_slots[level + 1])
            if extended is not None:
                self._add_token(node, level + 1, extended)

    def _extend(self, left: Optional[Token], fact: Fact,
                var_slots: dict[str, str]) -> Optional[Token]:
        bindings = dict(left.bindings) if left else {}
        for slot, var in var_slots.items():
            value = fact.slot_values[slot]
            if var in bindings:
                if bindings[var] != value:
                    return None
            else:
                bindings[var] = value
        facts = left.facts + (fact,) if left else (fact,)
        return Token(facts, bindings)

    def _activate(self, node: RuleNode, token: Token) -> None:
        fact_ids = tuple(f.id for f in token.facts)
        key = (node.rule.name, fact_ids)
        if key in self._fired or key in self._agenda_keys:
            return
        activation = Activation(
            rule=node.rule.name,
            fact_ids=fact_ids,
            salience=node.rule.salience,
            auto_focus=node.rule.auto_focus,
            recency=max(f.timestamp for f in token.facts),
            token=token,
        )
        self._agenda.append(activation)
        self._agenda_keys.add(key)
        self.counters.activations_created += 1

    # -- agenda and firing --------------------------------------------------

    def agenda(self) -> list[Activation]:
        """Current activations in firing order (does not consume them)."""
        return sorted(self._agenda, key=Activation.sort_key)

    def activation_set(self) -> set[tuple[str, tuple[int, ...]]]:
        return {(a.rule, a.fact_ids) for a in self._agenda}

    def run(self, max_firings: Optional[int] = None) -> list[FiringRecord]:
        records: list[FiringRecord] = []
        while self._agenda:
            if max_firings is not None and len(records) >= max_firings:
                break
            best = min(self._agenda, key=Activation.sort_key)
            self._agenda.remove(best)
            self._agenda_keys.discard((best.rule, best.fact_ids))
            self._fired.add((best.rule, best.fact_ids))
            records.append(self._execute(best))
        return records

    def _execute(self, activation: Activation) -> FiringRecord:
        node = next(n for n in self.rule_nodes if n.rule.name == activation.rule)
        actions = []
        warnings = []
        for call in node.rule.actions:
            args = tuple(
                activation.token.bindings[a.name] if isinstance(a, Var) else atom_value(a)
                for a in call.args)
            actions.append(ResolvedAction(call.verb, args))
            if call.verb not in RECOGNIZED_VERBS:
                warnings.append(f"unrecognized action verb '{call.verb}'")
        return FiringRecord(activation.rule, tuple(actions),
                            activation.fact_ids, tuple(warnings))

    def snapshot_counters(self) -> InstrumentationCounters:
        return replace(self.counters)


def compile_network(kb: KnowledgeBase) -> ReteNetwork:
    return ReteNetwork(kb)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def naive_match(kb: KnowledgeBase,
                facts: Union[WorkingMemory, Iterable[Fact]]) -> set[tuple[str, tuple[int, ...]]]:
    """All (rule, fact-id tuple) matches, by exhaustive assignment."""
    live = facts.snapshot() if isinstance(facts, WorkingMemory) else list(facts)
    matches: set[tuple[str, tuple[int, ...]]] = set()
    for rule in kb.rules:
        for assignment in _assignments(rule, live, 0, (), {}):
            matches.add((rule.name, assignment))
    return matches


def _assignments(rule: RuleDef, facts: list[Fact], index: int,
                 chosen: tuple[int, ...], bindings: dict):
    if index == len(rule.patterns):
        yield chosen
        return
    pattern = rule.patterns[index]
    consts = pattern.constant_tests()
    var_slots = pattern.variable_slots()
    for fact in facts:
        if fact.template != pattern.template:
            continue
        if any(fact.slot_values.get(slot) != value for slot, value in consts.items()):
            continue
        extended = dict(bindings)
        ok = True
        for slot, var in var_slots.items():
            value = fact.slot_values[slot]
            if var in extended and extended[var] != value:
                ok = False
                break
            extended[var] = value
        if not ok:
            continue
        yield from _assignments(rule, facts, index + 1, chosen + (fact.id,), extended)
