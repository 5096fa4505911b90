"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input falls outside the model's feasible domain."""


class InfeasibleError(DomainError):
    """No tender-car configuration satisfies the payload constraints."""


class ConsistencyError(RuntimeError):
    """Two algebraically equivalent computations disagreed beyond tolerance.

    Raised by internal cross-checks; indicates an implementation bug, not
    bad user input.
    """


class TableLookupError(KeyError):
    """A key is missing from one of the bundled rate tables."""

    def __init__(self, key, valid_keys):
        self.key = key
        self.valid_keys = sorted(valid_keys)
        super().__init__(
            f"unknown key {key!r}; valid keys: {', '.join(map(str, self.valid_keys))}"
        )

    def __str__(self):  # KeyError wraps the message in extra quotes
        return self.args[0]


class IngestError(ValueError):
    """A market CSV row failed validation."""

    def __init__(self, row, column, message):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: {message}")
