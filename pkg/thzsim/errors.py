"""Exception types raised by the simulator."""

from typing import List, Tuple


class ConfigError(ValueError):
    """
    Experiment configuration rejected.

    Attributes:
        issues: (JSON pointer, message) pairs, one per offending field.
    """

    def __init__(self, issues: List[Tuple[str, str]]):
        self.issues = issues
        detail = "; ".join(f"{pointer or '/'}: {message}" for pointer, message in issues)
        super().__init__(f"Invalid configuration: {detail}")


class SimulationError(RuntimeError):
    """A numerical routine could not deliver the requested accuracy."""
