from __future__ import annotations


class ConfigError(ValueError):
    """Invalid parameter set or scenario description."""


class SimulationError(RuntimeError):
    """A closed-loop run diverged (non-finite or overflowing state)."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step
