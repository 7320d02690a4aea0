"""Horn-clause classification of AU event sequences with near-miss explanations."""

from nearmiss.errors import (
    ContractError,
    DatasetError,
    GenerationError,
    LearnerError,
    ParseError,
    StructureError,
)
from nearmiss.sequence import (
    ActionUnit,
    AUEvent,
    Dataset,
    Intensity,
    SequenceRecord,
    parse_dataset,
    render_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "ActionUnit",
    "AUEvent",
    "ContractError",
    "Dataset",
    "DatasetError",
    "GenerationError",
    "Intensity",
    "LearnerError",
    "ParseError",
    "SequenceRecord",
    "StructureError",
    "parse_dataset",
    "render_dataset",
]
