"""Exception hierarchy shared by all modules."""


class DatasetError(ValueError):
    """A dataset violates a structural invariant (ids, intervals, labels)."""


class ParseError(DatasetError):
    """Input text could not be decoded into a dataset."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class StructureError(ValueError):
    """A clause or theory is not a well-formed classification rule."""


class ContractError(ValueError):
    """Feature sets of different mode or origin were compared."""


class LearnerError(RuntimeError):
    """No acceptable clause exists for a seed example."""

    def __init__(self, message, seed=None):
        super().__init__(message)
        self.seed = seed


class GenerationError(ValueError):
    """A generator configuration cannot be realised."""
