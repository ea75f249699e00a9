"""Absolute Maslov indices for graded linear Lagrangians in split form.

A split Lagrangian in ``C^n`` is a product of real lines ``e^{i pi a_k} R``;
a grading is a choice of real lift ``a_k`` of each phase.  Lifts are kept as
``Fraction`` so that ceilings are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .errors import InputError, InvariantViolation, NonTransverseError


def as_lift(x) -> Fraction:
    if isinstance(x, float):
        raise InputError("lifts must be exact: pass an int, Fraction or 'p/q' string")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"cannot read lift {x!r}") from exc


@dataclass(frozen=True)
class SplitLagrangian:
    lifts: Tuple[Fraction, ...]

    def __init__(self, lifts: Sequence):
        object.__setattr__(self, "lifts", tuple(as_lift(a) for a in lifts))

    def __len__(self):
        return len(self.lifts)

    def __add__(self, other: "SplitLagrangian") -> "SplitLagrangian":
        return SplitLagrangian(self.lifts + other.lifts)

    def shifted(self, k: int, factor: int = 0) -> "SplitLagrangian":
        l = list(self.lifts)
        l[factor] += k
        return SplitLagrangian(l)


def factor_indices(L0: SplitLagrangian, L1: SplitLagrangian) -> List[int]:
    if len(L0) != len(L1):
        raise InputError("Lagrangians of different dimension")
    out = []
    for k, (a, b) in enumerate(zip(L0.lifts, L1.lifts)):
        diff = b - a
        if diff.denominator == 1:
            raise NonTransverseError(f"factor {k + 1} is not transverse (lift difference {diff})")
        out.append(math.ceil(diff))
    return out


def index(L0: SplitLagrangian, L1: SplitLagrangian) -> int:
    """``i(L0, L1) = sum_k ceil(b_k - a_k)``."""
    return sum(factor_indices(L0, L1))


def triangle_index(L0: SplitLagrangian, L1: SplitLagrangian, L2: SplitLagrangian) -> int:
    return index(L0, L2) - index(L0, L1) - index(L1, L2)


@dataclass(frozen=True)
class ThimbleModel:
    n: int
    mu: int
    thimble: SplitLagrangian  # Delta
    dual: SplitLagrangian  # Delta^!
    real: SplitLagrangian  # X_R


def thimble_model(n: int, mu: int) -> ThimbleModel:
    if not (0 <= mu <= n):
        raise InputError(f"Morse index {mu} outside 0..{n}")
    q = Fraction(1, 4)
    delta = SplitLagrangian([q] * mu + [-q] * (n - mu))
    dual = SplitLagrangian([-q] * mu + [q] * (n - mu))
    return ThimbleModel(n, mu, delta, dual, SplitLagrangian([0] * n))


@dataclass(frozen=True)
class MinusMuReport:
    value: int
    per_factor: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.value == -sum(1 for f in self.per_factor if f)


def check_minus_mu(n: int, mu: int) -> MinusMuReport:
    """Triangle index of ``(Delta^!, X_R, Delta)``; equals ``-mu``."""
    T = thimble_model(n, mu)
    per = tuple(
        triangle_index(SplitLagrangian([a]), SplitLagrangian([b]), SplitLagrangian([c]))
        for a, b, c in zip(T.dual.lifts, T.real.lifts, T.thimble.lifts)
    )
    value = triangle_index(T.dual, T.real, T.thimble)
    if value != sum(per) or value != -mu:
        raise InvariantViolation(f"triangle index {value} differs from -mu = {-mu}")
    return MinusMuReport(value, per)
