"""Witness and result types shared by the float and rational checkers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpq

R_DENOMINATOR = 1000


class Step(str, Enum):
    DOMAIN = "domain"              # midpoint outside [-4, 4]
    WITNESS = "witness"            # malformed witness fields
    UNIT_VECTOR = "unit-vector"    # |w|^2 != 1
    GLOBAL = "global-inequality"   # G <= max H
    CONGRUENCE = "congruence"
    CONDITION_A = "condition-A"
    SPANNING = "spanning"
    MIN_NORM = "min-norm"
    CONDITION_B = "condition-B"


@dataclass(frozen=True)
class GlobalWitness:
    s_index: int
    wx: int
    wy: int
    wd: int

    def w(self):
        return mpq(self.wx, self.wd), mpq(self.wy, self.wd)

    def w_float(self):
        return self.wx / self.wd, self.wy / self.wd


@dataclass(frozen=True)
class LocalWitness:
    p: tuple
    q: tuple
    r: int          # numerator over R_DENOMINATOR
    sigma_q: int

    def r_value(self):
        return mpq(self.r, R_DENOMINATOR)


@dataclass(frozen=True)
class CheckResult:
    excluded: bool
    step: Step | None = None
    detail: str = ""
    values: dict | None = None

    def __bool__(self):
        return self.excluded


def passed(**values) -> CheckResult:
    return CheckResult(True, None, "", values or None)


def failed(step: Step, detail: str = "", **values) -> CheckResult:
    return CheckResult(False, step, detail, values or None)
