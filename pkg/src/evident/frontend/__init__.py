from .cli import run_cli
from .parser import (
    DefaultSpec,
    DuplicateNameError,
    KnowledgeBase,
    ParseError,
    RuleSpec,
    WeightRangeError,
    parse_formula,
    parse_kb,
)

__all__ = [
    "DefaultSpec",
    "DuplicateNameError",
    "KnowledgeBase",
    "ParseError",
    "RuleSpec",
    "WeightRangeError",
    "parse_formula",
    "parse_kb",
    "run_cli",
]
