"""Access to the knowledge base shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .dsl import KnowledgeBase, parse

_KB_RESOURCE = "neuro.kb"


def bundled_kb_path() -> Path:
    """Filesystem path of the shipped neuromuscular KB."""
    return Path(resources.files("nmx").joinpath("data", _KB_RESOURCE))


def bundled_kb_text() -> str:
    return resources.files("nmx").joinpath("data", _KB_RESOURCE).read_text("utf-8")


def load_bundled() -> KnowledgeBase:
    """Parse the shipped KB; loads with zero validation errors or warnings."""
    return parse(bundled_kb_text())
