"""nmx: a rule-based diagnostic shell.

Parse an s-expression rule language, match facts incrementally with a
RETE network, and drive hypothesis-directed yes/no consultations over a
bundled neuromuscular knowledge base, from Python, the command line, or
an HTTP session service.
"""

from .bundled import bundled_kb_path, bundled_kb_text, load_bundled
from .dialog import (
    DIAGNOSED,
    IN_PROGRESS,
    NO_MATCH,
    NO_MATCH_TEXT,
    DialogError,
    EmptyKnowledgeBaseError,
    InvalidAnswerError,
    NextStep,
    OutOfOrderAnswerError,
    Recommendation,
    Session,
    SessionFinishedError,
    SessionResult,
    start_session,
)
from .dsl import (
    Diagnostic,
    KnowledgeBase,
    LexError,
    NmxError,
    ParseError,
    QuestionDef,
    RuleDef,
    TemplateDef,
    parse,
    parse_file,
    pretty_print,
    validate,
)
from .memory import Fact, WorkingMemory, WorkingMemoryError, facts_from_json
from .rete import (
    FiringRecord,
    InstrumentationCounters,
    ReteNetwork,
    compile_network,
    naive_match,
)

__version__ = "0.1.0"

__all__ = [
    "DIAGNOSED",
    "Diagnostic",
    "DialogError",
    "EmptyKnowledgeBaseError",
    "Fact",
    "FiringRecord",
    "IN_PROGRESS",
    "InstrumentationCounters",
    "InvalidAnswerError",
    "KnowledgeBase",
    "LexError",
    "NO_MATCH",
    "NO_MATCH_TEXT",
    "NextStep",
    "NmxError",
    "OutOfOrderAnswerError",
    "ParseError",
    "QuestionDef",
    "Recommendation",
    "ReteNetwork",
    "RuleDef",
    "Session",
    "SessionFinishedError",
    "SessionResult",
    "TemplateDef",
    "WorkingMemory",
    "WorkingMemoryError",
    "bundled_kb_path",
    "bundled_kb_text",
    "compile_network",
    "facts_from_json",
    "load_bundled",
    "naive_match",
    "parse",
    "parse_file",
    "pretty_print",
    "start_session",
    "validate",
    "__version__",
]
