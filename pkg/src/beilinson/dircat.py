"""Strictly unital directed A∞-categories with finitely many ordered objects.

Objects are ``1..m``.  ``hom(i, j)`` for ``i < j`` is spanned by named graded
generators; ``hom(i, i)`` is the implicit unit ``e_i``; nothing goes backwards.
Structure maps live in one sparse table keyed by ``(chain, inputs)``:

* ``chain = (j0, ..., jd)`` is strictly increasing,
* ``inputs = (a1, ..., ad)`` lists generator indices with ``a_l`` in
  ``hom(j_{l-1}, j_l)``, i.e. ascending chain order; the evaluation reads
  ``mu^d(a_d, ..., a_1)`` with inputs listed right to left,
* the value maps generator indices of ``hom(j0, jd)`` to coefficients.

Sign conventions (used consistently by the module calculus):

* reduced degree ``||a|| = |a| - 1``;
* the relation inserting ``mu^i`` after the first ``j`` inputs carries
  ``(-1)^(||a_1|| + ... + ||a_j||)``;
* units: ``mu^2(a, e) = a``, ``mu^2(e, a) = (-1)^|a| a``, ``mu^1(e) = 0`` and
  every higher map with a unit input vanishes.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import InputError
from .exactlin import Field, vec_axpy

Chain = Tuple[int, ...]
UNIT = -1  # generator index standing for e_i inside hom(i, i)


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


class DirectedCategory:
    """Immutable directed A∞-category; see the module docstring for layout."""

    def __init__(
        self,
        F: Field,
        m: int,
        homs: Mapping[Tuple[int, int], Sequence[Tuple[str, int]]],
        mu: Mapping[Tuple[Chain, Tuple[int, ...]], Mapping[int, object]],
        name: str = "",
    ):
        if m < 1:
            raise InputError("a directed category needs at least one object")
        self.F = F
        self.m = m
        self.name = name
        self.homs: Dict[Tuple[int, int], Tuple[Generator, ...]] = {}
        for (i, j), gens in homs.items():
            if not (1 <= i < j <= m):
                raise InputError(f"hom({i},{j}) violates directedness")
            gl = tuple(Generator(str(g[0]), int(g[1])) for g in gens)
            if gl:
                self.homs[(i, j)] = gl
        self._by_name: Dict[str, Tuple[int, int, int]] = {}
        for (i, j), gens in self.homs.items():
            for k, g in enumerate(gens):
                if g.name in self._by_name:
                    raise InputError(f"duplicate generator name {g.name!r}")
                self._by_name[g.name] = (i, j, k)
        self.mu: Dict[Tuple[Chain, Tuple[int, ...]], Dict[int, object]] = {}
        for (chain, inputs), out in mu.items():
            chain, inputs = tuple(chain), tuple(inputs)
            self._check_key(chain, inputs)
            vals = {}
            for o, c in out.items():
                if not (0 <= o < len(self.hom(chain[0], chain[-1]))):
                    raise InputError(f"output index {o} out of range on chain {chain}")
                c = F(c)
                if c:
                    vals[o] = c
            if vals:
                self.mu[(chain, inputs)] = vals
        self._span_index: Optional[Dict[Tuple[int, int, int], list]] = None

    def _check_key(self, chain: Chain, inputs: Tuple[int, ...]) -> None:
        if len(chain) < 2 or len(inputs) != len(chain) - 1:
            raise InputError(f"malformed mu key {chain}, {inputs}")
        if any(not (1 <= c <= self.m) for c in chain):
            raise InputError(f"chain {chain} leaves the object range")
        if any(a >= b for a, b in zip(chain, chain[1:])):
            raise InputError(f"chain {chain} is not strictly increasing")
        for l, a in enumerate(inputs):
            if not (0 <= a < len(self.hom(chain[l], chain[l + 1]))):
                raise InputError(f"input {a} not a generator of hom{chain[l], chain[l + 1]}")

    # ------------------------------------------------------------------

    def __repr__(self):
        return f"DirectedCategory({self.name or '?'}, m={self.m}, {self.F})"

    def hom(self, i: int, j: int) -> Tuple[Generator, ...]:
        return self.homs.get((i, j), ())

    def degree(self, i: int, j: int, a: int) -> int:
        if a == UNIT:
            return 0
        return self.homs[(i, j)][a].degree

    def input_degrees(self, chain: Chain, inputs: Sequence[int]) -> List[int]:
        return [self.degree(chain[l], chain[l + 1], a) for l, a in enumerate(inputs)]

    def reduced_sum(self, chain: Chain, inputs: Sequence[int]) -> int:
        return sum(d - 1 for d in self.input_degrees(chain, inputs))

    def locate(self, name: str) -> Tuple[int, int, int]:
        try:
            return self._by_name[name]
        except KeyError:
            raise InputError(f"unknown generator {name!r}") from None

    def generator_count(self) -> int:
        return sum(len(g) for g in self.homs.values())

    def chains(self, min_len: int = 1, max_len: Optional[int] = None) -> Iterator[Chain]:
        """Strictly increasing chains of objects, shortest first."""
        top = self.m if max_len is None else min(max_len, self.m)
        for n in range(min_len, top + 1):
            yield from itertools.combinations(range(1, self.m + 1), n)

    def input_tuples(self, chain: Chain) -> Iterator[Tuple[int, ...]]:
        ranges = [range(len(self.hom(a, b))) for a, b in zip(chain, chain[1:])]
        return itertools.product(*ranges)

    def mu_value(self, chain: Chain, inputs: Tuple[int, ...]) -> Dict[int, object]:
        """``mu^d`` on a possibly non-strict chain; ``UNIT`` marks units."""
        d = len(inputs)
        if UNIT not in inputs:
            return self.mu.get((chain, inputs), {})
        F = self.F
        if d == 2:
            a1, a2 = inputs
            if a1 == UNIT and a2 == UNIT:
                return {UNIT: F.one}
            if a1 == UNIT:  # mu^2(a, e) = a
                return {a2: F.one}
            deg = self.degree(chain[0], chain[1], a1)  # mu^2(e, a)
            return {a1: F.sign(deg)}
        return {}

    def span_index(self) -> Dict[Tuple[int, int, int], list]:
        """``(start, end, output) -> [(chain, inputs, coeff)]`` over stored mu."""
        if self._span_index is None:
            idx: Dict[Tuple[int, int, int], list] = {}
            for (chain, inputs), out in self.mu.items():
                for o, c in out.items():
                    idx.setdefault((chain[0], chain[-1], o), []).append((chain, inputs, c))
            for v in idx.values():
                v.sort(key=lambda t: (t[0], t[1]))
            self._span_index = idx
        return self._span_index

    def max_mu_order(self) -> int:
        return max((len(k[1]) for k in self.mu), default=0)

    def with_mu(self, mu, name: Optional[str] = None) -> "DirectedCategory":
        return DirectedCategory(
            self.F, self.m, {k: [(g.name, g.degree) for g in v] for k, v in self.homs.items()},
            mu, self.name if name is None else name,
        )


# ----------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # "degree", "relation", "unit"
    chain: Tuple[int, ...]
    inputs: Tuple
    residual: Tuple[Tuple[object, str], ...] = ()
    detail: str = ""

    def describe(self) -> str:
        res = ", ".join(f"{k}:{v}" for k, v in self.residual)
        return f"{self.kind} chain={self.chain} inputs={self.inputs} {self.detail} [{res}]".strip()


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        if self.passed:
            return f"PASS ({self.checked} relations checked)"
        return f"FAIL ({len(self.violations)} violations of {self.checked} checked)"


def _relation(A: DirectedCategory, chain: Chain, inputs: Tuple[int, ...]) -> Dict[int, object]:
    """Left side of the A∞ relation on one input tuple (units allowed)."""
    F = A.F
    d = len(inputs)
    degs = A.input_degrees(chain, inputs)
    total: Dict[int, object] = {}
    for i in range(1, d + 1):
        sign_exp = 0
        for j in range(0, d - i + 1):
            if j > 0:
                sign_exp += degs[j - 1] - 1
            inner = A.mu_value(chain[j:j + i + 1], inputs[j:j + i])
            if not inner:
                continue
            outer_chain = chain[:j + 1] + chain[j + i:]
            sgn = F.sign(sign_exp)
            for b, cb in inner.items():
                outer = A.mu_value(outer_chain, inputs[:j] + (b,) + inputs[j + i:])
                vec_axpy(F, total, F.mul(sgn, cb), outer)
    return total


def _label(A: DirectedCategory, i: int, j: int, a: int) -> str:
    return f"e{i}" if a == UNIT else A.hom(i, j)[a].name


def validate_category(A: DirectedCategory) -> ValidationReport:
    """Check degrees, strict unitality and the A∞ relations exactly."""
    rep = ValidationReport()
    F = A.F
    for (chain, inputs), out in sorted(A.mu.items()):
        d = len(inputs)
        expect = sum(A.input_degrees(chain, inputs)) + 2 - d
        for o in sorted(out):
            got = A.degree(chain[0], chain[-1], o)
            if got != expect:
                rep.violations.append(Violation(
                    "degree", chain, tuple(_label(A, chain[l], chain[l + 1], a) for l, a in enumerate(inputs)),
                    ((F.format(out[o]), A.hom(chain[0], chain[-1])[o].name),),
                    f"output degree {got}, expected {expect}",
                ))
    # strict relations
    for chain in A.chains(min_len=2):
        for inputs in A.input_tuples(chain):
            rep.checked += 1
            res = _relation(A, chain, inputs)
            if res:
                rep.violations.append(Violation(
                    "relation", chain,
                    tuple(_label(A, chain[l], chain[l + 1], a) for l, a in enumerate(inputs)),
                    tuple((F.format(res[o]), _label(A, chain[0], chain[-1], o)) for o in sorted(res)),
                ))
    # relations with one unit inserted: chains with exactly one repetition
    for chain in A.chains(min_len=1, max_len=A.m - 0):
        if len(chain) > 3:
            continue
        for pos in range(len(chain)):
            uchain = chain[:pos + 1] + chain[pos:]
            for inputs in A.input_tuples(chain):
                uinputs = inputs[:pos] + (UNIT,) + inputs[pos:]
                rep.checked += 1
                res = _relation(A, uchain, uinputs)
                if res:
                    rep.violations.append(Violation(
                        "unit", uchain,
                        tuple(_label(A, uchain[l], uchain[l + 1], a) for l, a in enumerate(uinputs)),
                        tuple((F.format(res[o]), _label(A, uchain[0], uchain[-1], o)) for o in sorted(res)),
                    ))
    return rep


# ----------------------------------------------------------------------
# constructors


def dg_from_quiver(
    F: Field,
    m: int,
    generators: Mapping[Tuple[int, int], Sequence[Tuple[str, int]]],
    differential: Optional[Mapping[str, Mapping[str, object]]] = None,
    product: Optional[Mapping[Tuple[str, str], Mapping[str, object]]] = None,
    name: str = "",
) -> DirectedCategory:
    """Directed dg category from generators, a differential and a product.

    ``product[(b, a)]`` is the composite ``b·a`` (``a`` first).  The
    A∞ structure is ``mu^1(a) = (-1)^|a| da`` and
    ``mu^2(b, a) = (-1)^|a| b·a`` with no higher maps.
    """
    differential = differential or {}
    product = product or {}
    skel = DirectedCategory(F, m, generators, {}, name)

    def vec(i, j, terms):
        out = {}
        for nm, c in terms.items():
            si, sj, k = skel.locate(nm)
            if (si, sj) != (i, j):
                raise InputError(f"{nm} does not lie in hom({i},{j})")
            c = F(c)
            if c:
                out[k] = F.add(out.get(k, F.zero), c)
        return {k: v for k, v in out.items() if v}

    dmap: Dict[Tuple[int, int, int], Dict[int, object]] = {}
    for nm, terms in differential.items():
        i, j, k = skel.locate(nm)
        v = vec(i, j, terms)
        for o in v:
            if skel.hom(i, j)[o].degree != skel.hom(i, j)[k].degree + 1:
                raise InputError(f"differential of {nm} has wrong degree")
        dmap[(i, j, k)] = v
    pmap: Dict[Tuple[int, int, int, int], Dict[int, object]] = {}
    for (bn, an), terms in product.items():
        i, j, ka = skel.locate(an)
        j2, k, kb = skel.locate(bn)
        if j2 != j:
            raise InputError(f"{bn}·{an} is not composable")
        v = vec(i, k, terms)
        for o in v:
            if skel.hom(i, k)[o].degree != skel.hom(i, j)[ka].degree + skel.hom(j, k)[kb].degree:
                raise InputError(f"product {bn}·{an} has wrong degree")
        pmap[(i, j, k, ka, kb)] = v

    def d_of(i, j, v):
        out = {}
        for k, c in v.items():
            vec_axpy(F, out, c, dmap.get((i, j, k), {}))
        return out

    def prod(i, j, k, vb, va):
        out = {}
        for kb, cb in vb.items():
            for ka, ca in va.items():
                vec_axpy(F, out, F.mul(cb, ca), pmap.get((i, j, k, ka, kb), {}))
        return out

    for (i, j), gens in skel.homs.items():
        for k in range(len(gens)):
            if d_of(i, j, d_of(i, j, {k: F.one})):
                raise InputError(f"differential does not square to zero on {gens[k].name}")
    for i, j, k in itertools.combinations(range(1, m + 1), 3):
        for ka in range(len(skel.hom(i, j))):
            for kb in range(len(skel.hom(j, k))):
                va, vb = {ka: F.one}, {kb: F.one}
                lhs = d_of(i, k, prod(i, j, k, vb, va))
                rhs = prod(i, j, k, d_of(j, k, vb), va)
                deg_b = skel.hom(j, k)[kb].degree
                vec_axpy(F, rhs, F.sign(deg_b), prod(i, j, k, vb, d_of(i, j, va)))
                if lhs != rhs:
                    raise InputError("differential is not a derivation of the product")
    for i, j, k, l in itertools.combinations(range(1, m + 1), 4):
        for ka in range(len(skel.hom(i, j))):
            for kb in range(len(skel.hom(j, k))):
                for kc in range(len(skel.hom(k, l))):
                    va, vb, vc = {ka: F.one}, {kb: F.one}, {kc: F.one}
                    left = prod(i, k, l, vc, prod(i, j, k, vb, va))
                    right = prod(i, j, l, prod(j, k, l, vc, vb), va)
                    if left != right:
                        names = (skel.hom(k, l)[kc].name, skel.hom(j, k)[kb].name, skel.hom(i, j)[ka].name)
                        raise InputError(f"product is not associative on {names}")

    mu: Dict[Tuple[Chain, Tuple[int, ...]], Dict[int, object]] = {}
    for (i, j, k), v in dmap.items():
        if v:
            s = F.sign(skel.hom(i, j)[k].degree)
            mu[((i, j), (k,))] = {o: F.mul(s, c) for o, c in v.items()}
    for (i, j, k, ka, kb), v in pmap.items():
        if v:
            s = F.sign(skel.hom(i, j)[ka].degree)
            mu[((i, j, k), (ka, kb))] = {o: F.mul(s, c) for o, c in v.items()}
    return DirectedCategory(F, m, generators, mu, name)


_TRIANGULAR = re.compile(r"^triangular\((\d+)\)$")


def triangular(m: int, F: Optional[Field] = None) -> DirectedCategory:
    """Incidence algebra of the chain ``1 < ... < m``: one ``a_ij`` per ``i < j``."""
    F = F or Field.prime(5)
    gens = {(i, j): [(f"a{i}{j}" if m < 10 else f"a{i}_{j}", 0)]
            for i, j in itertools.combinations(range(1, m + 1), 2)}
    names = {k: v[0][0] for k, v in gens.items()}
    prod = {(names[(j, k)], names[(i, j)]): {names[(i, k)]: 1}
            for i, j, k in itertools.combinations(range(1, m + 1), 3)}
    return dg_from_quiver(F, m, gens, {}, prod, name=f"triangular({m})")


def fixture(name: str, F: Optional[Field] = None) -> DirectedCategory:
    """Named test categories: ``A2``, ``triangular(m)``, ``A4mu3``."""
    F = F or Field.prime(5)
    if name == "A2":
        return dg_from_quiver(F, 2, {(1, 2): [("a", 0)]}, name="A2")
    if name == "A4mu3":
        gens = {(1, 2): [("a12", 0)], (2, 3): [("a23", 0)], (3, 4): [("a34", 0)],
                (1, 4): [("c14", -1)]}
        return DirectedCategory(F, 4, gens, {((1, 2, 3, 4), (0, 0, 0)): {0: 1}}, name="A4mu3")
    mt = _TRIANGULAR.match(name)
    if mt:
        m = int(mt.group(1))
        if m < 1:
            raise InputError("triangular(m) needs m >= 1")
        return triangular(m, F)
    raise InputError(f"unknown fixture {name!r}")


FIXTURE_NAMES = ("A2", "triangular(3)", "triangular(4)", "A4mu3")
