"""Exceptional collections in H^0 of the module category, mutations and braid words."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .dircat import DirectedCategory
from .errors import InputError, UnsupportedOperation
from .modcat import (
    AModule,
    hom_groups,
    iso_type_simple,
    projective_cached,
    simple_cached,
    twist,
)


class Collection(tuple):
    """Ordered tuple of modules over one category."""

    def __new__(cls, modules: Sequence[AModule]):
        mods = tuple(modules)
        if mods:
            A = mods[0].A
            for M in mods[1:]:
                if M.A is not A or M.F != mods[0].F:
                    raise InputError("collection entries live over different categories")
        return super().__new__(cls, mods)

    def names(self) -> List[str]:
        return [M.name for M in self]


@dataclass(frozen=True)
class BraidWord:
    """Word in the braid group on ``strands`` strands; letter ``i`` is sigma_i, ``-i`` its inverse."""

    strands: int
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        for l in self.letters:
            if l == 0 or abs(l) >= self.strands:
                raise InputError(f"letter {l} invalid on {self.strands} strands")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(f"s{l}" if l > 0 else f"s{-l}^-1" for l in self.letters)

    @classmethod
    def parse(cls, strands: int, text: str) -> "BraidWord":
        out = []
        for tok in text.split():
            t = tok.lower().lstrip("sσ")
            inv = t.endswith("^-1")
            t = t[:-3] if inv else t
            if not t.isdigit():
                raise InputError(f"cannot read braid letter {tok!r}")
            out.append(-int(t) if inv else int(t))
        return cls(strands, tuple(out))


@dataclass
class ExceptionalReport:
    ok: bool
    hom: Dict[Tuple[int, int], Dict[int, int]]
    problems: List[str] = field(default_factory=list)


def is_exceptional(coll: Sequence[AModule]) -> ExceptionalReport:
    """``End*(C_a) = K`` in degree 0 and ``Hom*(C_b, C_a) = 0`` whenever ``a < b``."""
    hom: Dict[Tuple[int, int], Dict[int, int]] = {}
    problems = []
    n = len(coll)
    for a in range(n):
        for b in range(n):
            if b < a:
                continue
            if a == b:
                h = hom_groups(coll[a], coll[a])
                hom[(a + 1, a + 1)] = h
                if h != {0: 1}:
                    problems.append(f"End*(#{a + 1}) = {h}, expected K in degree 0")
            else:
                h = hom_groups(coll[b], coll[a])
                hom[(b + 1, a + 1)] = h
                if h:
                    problems.append(f"Hom*(#{b + 1}, #{a + 1}) = {h} should vanish")
    return ExceptionalReport(not problems, hom, problems)


def mutate(coll: Sequence[AModule], i: int) -> Collection:
    """``(.., M_i, M_{i+1}, ..) -> (.., T_{M_i}(M_{i+1}), M_i, ..)`` (1-based ``i``)."""
    if not (1 <= i < len(coll)):
        raise InputError(f"mutation index {i} out of range 1..{len(coll) - 1}")
    out = list(coll)
    Mi, Mj = out[i - 1], out[i]
    out[i - 1] = twist(Mi, Mj)
    out[i] = Mi
    return Collection(out)


def apply_word(coll: Sequence[AModule], w: BraidWord) -> Collection:
    """Apply the letters of ``w`` left to right."""
    if w.strands != len(coll):
        raise InputError(f"word on {w.strands} strands applied to {len(coll)} objects")
    cur = Collection(coll)
    for l in w.letters:
        if l < 0:
            raise UnsupportedOperation("inverse mutations are not implemented")
        cur = mutate(cur, l)
    return cur


def half_twist(m: int) -> BraidWord:
    """``s_{m-1} (s_{m-2} s_{m-1}) ... (s_1 s_2 ... s_{m-1})``."""
    if m < 1:
        raise InputError("half twist needs m >= 1")
    letters: List[int] = []
    for start in range(m - 1, 0, -1):
        letters.extend(range(start, m))
    return BraidWord(m, tuple(letters))


@dataclass
class DualityReport:
    ok: bool
    table: Dict[Tuple[int, int], Dict[int, int]]  # (k, j) -> Hom*(A_k, B_j)


def duality_check(coll_a: Sequence[AModule], coll_b: Sequence[AModule]) -> DualityReport:
    """``coll_a = (M_1^!, .., M_m^!)`` against ``coll_b = (M_m, .., M_1)``."""
    if len(coll_a) != len(coll_b):
        raise InputError("collections of different length")
    m = len(coll_a)
    table = {}
    ok = True
    for k in range(1, m + 1):
        for j in range(1, m + 1):
            h = hom_groups(coll_a[k - 1], coll_b[m - j])
            table[(k, j)] = h
            if h != ({0: 1} if j == k else {}):
                ok = False
    return DualityReport(ok, table)


@dataclass
class SimplesReport:
    ok: bool
    word: BraidWord
    result: Collection
    iso_types: List[Optional[int]]
    duality: DualityReport
    problems: List[str] = field(default_factory=list)


def projectives_to_simples(A: DirectedCategory) -> SimplesReport:
    """Half twist ``(P_1..P_m)`` and certify the result as ``(S_m, .., S_1)``."""
    m = A.m
    projs = Collection([projective_cached(A, k) for k in range(1, m + 1)])
    w = half_twist(m)
    res = apply_word(projs, w)
    types = [iso_type_simple(M) for M in res]
    problems = []
    for p, t in enumerate(types):
        if t != m - p:
            problems.append(f"position {p + 1} is {'not simple' if t is None else f'S{t}'}, expected S{m - p}")
    dual = duality_check(projs, res)
    if not dual.ok:
        problems.append("duality pairing against the projectives fails")
    return SimplesReport(not problems, w, res, types, dual, problems)


def iso_certificate(M: AModule) -> Tuple:
    """Invariants of ``M`` up to isomorphism in H^0: cohomology per object and pairings with simples."""
    A = M.A
    coh = tuple(tuple(sorted(M.cohomology(j).dims.items())) for j in range(1, A.m + 1))
    pair = tuple(tuple(sorted(hom_groups(M, simple_cached(A, j)).items())) for j in range(1, A.m + 1))
    return coh, pair
