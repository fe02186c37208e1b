"""Process-wide desk-scale limits."""
from dataclasses import dataclass

HARD_MAX_N = 20


@dataclass
class Limits:
    max_n: int = 16
    # cap on quantifier expansion steps / enumerated strings per call
    max_expansion: int = 2_000_000

    def set_max_n(self, value):
        if not 0 <= value <= HARD_MAX_N:
            raise ValueError(f"max_n must lie in [0, {HARD_MAX_N}], got {value}")
        self.max_n = value


LIMITS = Limits()
