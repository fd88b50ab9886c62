"""Shared fixtures, hand-checked oracle constants, and acceptance reporting."""

from pathlib import Path

import pytest

from nmx import load_bundled


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    meta = getattr(getattr(item, "function", None), "__acceptance__", None)
    if meta and report.when == "call":
        number, name = meta
        status = "PASS" if report.passed else "FAIL"
        line = f"ACCEPTANCE {number} {name}: {status}"
        reporter = item.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.ensure_newline()
            reporter.write_line(line)
        else:
            print(line)

FIXTURES = Path(__file__).parent / "fixtures"
LEGACY_KB = FIXTURES / "legacy_rules.kb"

# Question idents in KB declaration order.
IDENT_ORDER = [
    "progress", "age", "gait", "spasticity", "posture", "movement",
    "seizures", "muscle-wasting", "balance", "sensation", "vision",
    "strength",
]

# Each rule's condition values, keyed by rule name, in pattern order.
CONDITIONS = {
    "Cerebral-Palsy": [
        ("progress", "no"), ("age", "yes"), ("gait", "yes"),
        ("spasticity", "yes"),
    ],
    "Parkinson": [
        ("posture", "yes"), ("movement", "yes"), ("seizures", "yes"),
        ("gait", "yes"),
    ],
    "muscular-dystrophy": [
        ("muscle-wasting", "yes"), ("spasticity", "yes"), ("gait", "yes"),
        ("balance", "yes"),
    ],
    "multiple-sclerosis": [
        ("sensation", "yes"), ("balance", "yes"), ("vision", "yes"),
        ("strength", "yes"),
    ],
}

RULE_ORDER = list(CONDITIONS)

DIAGNOSES = {
    "Cerebral-Palsy": "The patient is suffering from Cerebral Palsy",
    "Parkinson": "The patient is suffering from Parkinson's disease",
    "muscular-dystrophy": "The patient is suffering from Muscular Dystrophy",
    "multiple-sclerosis": "The patient is suffering from Multiple Sclerosis.",
}


@pytest.fixture(scope="session")
def kb():
    return load_bundled()


def truth_vector(bits):
    """Map a 12-char 'y'/'n' string to a full ident -> answer assignment."""
    assert len(bits) == len(IDENT_ORDER)
    return {ident: ("yes" if b == "y" else "no")
            for ident, b in zip(IDENT_ORDER, bits)}


def drive_session(session, truth):
    """Answer every question from a full truth assignment; return asked idents."""
    asked = []
    while session.status == "in_progress":
        step = session.next_step()
        if step.kind != "question":
            break
        asked.append(step.ident)
        session.submit_answer(step.ident, truth[step.ident])
    return asked


def satisfied_rules(truth):
    """Rules whose every condition holds under a full truth assignment."""
    return {rule for rule, conds in CONDITIONS.items()
            if all(truth[ident] == text for ident, text in conds)}
