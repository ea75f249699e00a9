"""Right A∞-modules over a directed category and the dg category they form.

A module table is keyed by ``(chain, m, inputs)`` where ``chain`` is a strictly
increasing tuple ``(j0, ..., jd)`` (``d >= 0``), ``m`` indexes a basis vector
of ``M(Y_jd)`` and ``inputs = (a1, ..., ad)`` are generator indices with
``a_l`` in ``hom(j_{l-1}, j_l)``.  The value maps basis indices of ``M(Y_j0)``
to coefficients.  ``d = 0`` entries are the differential ``mu^1``.

Pre-morphisms ``M -> N`` are sparse dicts over *slots*
``(chain, m, inputs, n)`` meaning: the component ``phi^{d+1}(m, a_d..a_1)``
has coefficient ``c`` on ``n`` in ``N(Y_j0)``.  A slot has degree
``|n| - |m| - sum|a| + d``.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from .dircat import UNIT, DirectedCategory, ValidationReport, Violation
from .errors import InputError, InvariantViolation, PreconditionError
from .exactlin import (
    ChainComplex,
    CohomologyResult,
    Field,
    GradedSpace,
    Matrix,
    cohomology,
    induced_map,
    is_isomorphism,
    kernel_basis,
    solve_linear,
    vec_axpy,
)

Chain = Tuple[int, ...]
Slot = Tuple[Chain, int, Tuple[int, ...], int]


class AModule:
    """Finite-dimensional strictly unital right A∞-module (immutable)."""

    def __init__(
        self,
        A: DirectedCategory,
        spaces: Mapping[int, object],
        mu: Mapping[Tuple[Chain, int, Tuple[int, ...]], Mapping[int, object]],
        name: str = "",
    ):
        self.A = A
        self.F: Field = A.F
        self.name = name
        self.spaces: Dict[int, GradedSpace] = {}
        for j in range(1, A.m + 1):
            sp = spaces.get(j, GradedSpace())
            if not isinstance(sp, GradedSpace):
                sp = GradedSpace.from_basis(sp)
            self.spaces[j] = sp
        for j in spaces:
            if not (1 <= j <= A.m):
                raise InputError(f"object {j} out of range 1..{A.m}")
        F = self.F
        self.mu: Dict[Tuple[Chain, int, Tuple[int, ...]], Dict[int, object]] = {}
        for (chain, m, inputs), out in mu.items():
            chain, inputs = tuple(chain), tuple(inputs)
            self._check_key(chain, m, inputs)
            vals = {}
            for o, c in out.items():
                if not (0 <= o < len(self.spaces[chain[0]])):
                    raise InputError(f"module output {o} out of range at Y{chain[0]}")
                c = F(c)
                if c:
                    vals[o] = c
            if vals:
                self.mu[(chain, m, inputs)] = vals
        self._top = None
        self._bottom = None
        self._coh: Dict[int, CohomologyResult] = {}

    def _check_key(self, chain, m, inputs):
        A = self.A
        if len(chain) < 1 or len(inputs) != len(chain) - 1:
            raise InputError(f"malformed module key {chain}, {inputs}")
        if any(not (1 <= c <= A.m) for c in chain):
            raise InputError(f"chain {chain} leaves the object range")
        if any(a >= b for a, b in zip(chain, chain[1:])):
            raise InputError(f"chain {chain} is not strictly increasing")
        if not (0 <= m < len(self.spaces[chain[-1]])):
            raise InputError(f"module input {m} out of range at Y{chain[-1]}")
        for l, a in enumerate(inputs):
            if not (0 <= a < len(A.hom(chain[l], chain[l + 1]))):
                raise InputError(f"input {a} not a generator of hom{chain[l], chain[l + 1]}")

    def __repr__(self):
        dims = {j: sp.dims() for j, sp in self.spaces.items() if len(sp)}
        return f"AModule({self.name or '?'}, {dims})"

    # ------------------------------------------------------------------

    def space(self, j: int) -> GradedSpace:
        return self.spaces[j]

    def deg(self, j: int, idx: int) -> int:
        return self.spaces[j].degrees[idx]

    def label(self, j: int, idx: int) -> str:
        return self.spaces[j].labels[idx]

    def total_dim(self) -> int:
        return sum(len(s) for s in self.spaces.values())

    def support(self) -> List[int]:
        return [j for j, s in self.spaces.items() if len(s)]

    def mu_value(self, chain: Chain, m: int, inputs: Tuple[int, ...]) -> Dict[int, object]:
        """``mu^{d+1}(m, a_d..a_1)`` with unit inputs handled on the fly."""
        if UNIT in inputs:
            if len(inputs) == 1:
                return {m: self.F.one}
            return {}
        return self.mu.get((chain, m, inputs), {})

    def differential(self, j: int) -> Matrix:
        n = len(self.spaces[j])
        cols = [dict(self.mu.get(((j,), k, ()), {})) for k in range(n)]
        return Matrix(self.F, n, n, cols)

    def complex(self, j: int) -> ChainComplex:
        return ChainComplex(self.F, self.spaces[j], self.differential(j))

    def cohomology(self, j: int) -> CohomologyResult:
        if j not in self._coh:
            self._coh[j] = cohomology(self.complex(j))
        return self._coh[j]

    def cohomology_dims(self) -> Dict[int, Dict[int, int]]:
        return {j: self.cohomology(j).dims for j in range(1, self.A.m + 1)}

    def top_index(self):
        """``(chain top, module input) -> [(chain, inputs, out)]``."""
        if self._top is None:
            idx: Dict[Tuple[int, int], list] = {}
            for (chain, m, inputs), out in self.mu.items():
                idx.setdefault((chain[-1], m), []).append((chain, inputs, out))
            for v in idx.values():
                v.sort(key=lambda t: (t[0], t[1]))
            self._top = idx
        return self._top

    def bottom_index(self):
        """``(chain bottom, output) -> [(chain, m, inputs, coeff)]``."""
        if self._bottom is None:
            idx: Dict[Tuple[int, int], list] = {}
            for (chain, m, inputs), out in self.mu.items():
                for o, c in out.items():
                    idx.setdefault((chain[0], o), []).append((chain, m, inputs, c))
            for v in idx.values():
                v.sort(key=lambda t: (t[0], t[1], t[2]))
            self._bottom = idx
        return self._bottom


# ----------------------------------------------------------------------
# module equations


def _module_relation(M: AModule, chain: Chain, m: int, inputs: Tuple[int, ...]) -> Dict[int, object]:
    A, F = M.A, M.F
    d = len(inputs)
    degs = A.input_degrees(chain, inputs)
    total: Dict[int, object] = {}
    sign_exp = 0
    for j in range(0, d + 1):
        if j > 0:
            sign_exp += degs[j - 1] - 1
        sgn = F.sign(sign_exp)
        inner = M.mu_value(chain[j:], m, inputs[j:])
        for x, cx in inner.items():
            vec_axpy(F, total, F.mul(sgn, cx), M.mu_value(chain[:j + 1], x, inputs[:j]))
    for i in range(1, d + 1):
        sign_exp = 0
        for j in range(0, d - i + 1):
            if j > 0:
                sign_exp += degs[j - 1] - 1
            inner = A.mu_value(chain[j:j + i + 1], inputs[j:j + i])
            if not inner:
                continue
            sgn = F.sign(sign_exp)
            oc = chain[:j + 1] + chain[j + i:]
            for b, cb in inner.items():
                out = M.mu_value(oc, m, inputs[:j] + (b,) + inputs[j + i:])
                vec_axpy(F, total, F.mul(sgn, cb), out)
    return total


def check_module(M: AModule) -> ValidationReport:
    """Degrees, strict unitality and the module equations, exactly."""
    A, F = M.A, M.F
    rep = ValidationReport()
    for (chain, m, inputs), out in sorted(M.mu.items()):
        d = len(inputs)
        expect = M.deg(chain[-1], m) + sum(A.input_degrees(chain, inputs)) + 1 - d
        for o in sorted(out):
            got = M.deg(chain[0], o)
            if got != expect:
                rep.violations.append(Violation(
                    "degree", chain, (M.label(chain[-1], m),) + tuple(
                        A.hom(chain[l], chain[l + 1])[a].name for l, a in enumerate(inputs)),
                    ((F.format(out[o]), M.label(chain[0], o)),),
                    f"output degree {got}, expected {expect}",
                ))

    def record(kind, chain, m, inputs, res):
        names = tuple(
            f"e{chain[l]}" if a == UNIT else A.hom(chain[l], chain[l + 1])[a].name
            for l, a in enumerate(inputs))
        rep.violations.append(Violation(
            kind, chain, (M.label(chain[-1], m),) + names,
            tuple((F.format(res[o]), M.label(chain[0], o)) for o in sorted(res)),
        ))

    for chain in A.chains(min_len=1):
        top = chain[-1]
        if not len(M.spaces[top]):
            continue
        for inputs in A.input_tuples(chain):
            for m in range(len(M.spaces[top])):
                rep.checked += 1
                res = _module_relation(M, chain, m, inputs)
                if res:
                    record("relation", chain, m, inputs, res)
    # one unit inserted, short chains only
    for chain in A.chains(min_len=1, max_len=3):
        top = chain[-1]
        if not len(M.spaces[top]):
            continue
        for pos in range(len(chain)):
            uchain = chain[:pos + 1] + chain[pos:]
            for inputs in A.input_tuples(chain):
                uinputs = inputs[:pos] + (UNIT,) + inputs[pos:]
                for m in range(len(M.spaces[top])):
                    rep.checked += 1
                    res = _module_relation(M, uchain, m, uinputs)
                    if res:
                        record("unit", uchain, m, uinputs, res)
    return rep


# ----------------------------------------------------------------------
# basic modules


def _check_object(A: DirectedCategory, j: int, lo: int = 1) -> None:
    if not (lo <= j <= A.m):
        raise InputError(f"object index {j} out of range {lo}..{A.m}")


def simple(A: DirectedCategory, j: int) -> AModule:
    """``S_j``: one-dimensional in degree 0 at ``Y_j``, zero elsewhere."""
    _check_object(A, j)
    return AModule(A, {j: [(f"s{j}", 0)]}, {}, name=f"S{j}")


def projective(A: DirectedCategory, k: int) -> AModule:
    """``P_k(Y_j) = hom(Y_j, Y_k)``; the unit ``e_k`` is the sole basis vector at ``Y_k``."""
    _check_object(A, k)
    F = A.F
    spaces = {k: [(f"e{k}", 0)]}
    for j in range(1, k):
        gens = A.hom(j, k)
        if gens:
            spaces[j] = [(g.name, g.degree) for g in gens]
    mu: Dict[Tuple[Chain, int, Tuple[int, ...]], Dict[int, object]] = {}
    for (chain, inputs), out in A.mu.items():
        if chain[-1] == k:
            mu[(chain[:-1], inputs[-1], inputs[:-1])] = dict(out)
    for j in range(1, k):
        for a, g in enumerate(A.hom(j, k)):
            mu[((j, k), 0, (a,))] = {a: F.sign(g.degree)}
    return AModule(A, spaces, mu, name=f"P{k}")


def zero_module(A: DirectedCategory) -> AModule:
    return AModule(A, {}, {}, name="0")


def direct_sum(M: AModule, N: AModule, name: str = "") -> AModule:
    _same_category(M, N)
    spaces, off = {}, {}
    for j in range(1, M.A.m + 1):
        sm, sn = M.spaces[j], N.spaces[j]
        spaces[j] = GradedSpace(sm.labels + sn.labels, sm.degrees + sn.degrees)
        off[j] = len(sm)
    mu = {}
    for (chain, m, inputs), out in M.mu.items():
        mu[(chain, m, inputs)] = dict(out)
    for (chain, n, inputs), out in N.mu.items():
        mu[(chain, n + off[chain[-1]], inputs)] = {o + off[chain[0]]: c for o, c in out.items()}
    return AModule(M.A, spaces, mu, name or f"({M.name}⊕{N.name})")


def _same_category(M: AModule, N: AModule) -> None:
    if M.A is not N.A and (M.A.m != N.A.m or M.A.mu != N.A.mu or M.A.homs != N.A.homs):
        raise InputError("modules live over different categories")
    if M.F != N.F:
        raise InputError("modules live over different fields")


# ----------------------------------------------------------------------
# tensor, shift


def tensor(Z: ChainComplex, M: AModule, name: str = "") -> AModule:
    """``Z ⊗ M``: ``mu^1(z⊗m) = (-1)^||m|| dz⊗m + z⊗mu^1 m``; higher maps act on ``M``."""
    if Z.F != M.F:
        raise InputError("complex and module over different fields")
    F = M.F
    nz = len(Z.space)
    spaces = {}
    for j, sp in M.spaces.items():
        spaces[j] = [
            (f"{Z.space.labels[z]}⊗{sp.labels[k]}", Z.space.degrees[z] + sp.degrees[k])
            for z in range(nz) for k in range(len(sp))
        ]

    def idx(j, z, k):
        return z * len(M.spaces[j]) + k

    mu: Dict[Tuple[Chain, int, Tuple[int, ...]], Dict[int, object]] = {}
    for (chain, m, inputs), out in M.mu.items():
        for z in range(nz):
            mu[(chain, idx(chain[-1], z, m), inputs)] = {idx(chain[0], z, o): c for o, c in out.items()}
    for j, sp in M.spaces.items():
        for k in range(len(sp)):
            s = F.sign(sp.degrees[k] - 1)
            for z in range(nz):
                dz = Z.d.cols[z]
                if not dz:
                    continue
                key = ((j,), idx(j, z, k), ())
                vals = mu.setdefault(key, {})
                for z2, c in dz.items():
                    t = idx(j, z2, k)
                    vals[t] = F.add(vals.get(t, F.zero), F.mul(s, c))
    return AModule(M.A, spaces, mu, name or f"(Z⊗{M.name})")


def unit_complex(F: Field, degree: int = 0) -> ChainComplex:
    return ChainComplex(F, GradedSpace((f"k[{degree}]" if degree else "k",), (degree,)), Matrix(F, 1, 1))


def shift(M: AModule, k: int) -> AModule:
    """``M[k]`` as ``K[-k] ⊗ M``: degrees drop by ``k``, maps unchanged."""
    T = tensor(unit_complex(M.F, -k), M)
    spaces = {j: GradedSpace(M.spaces[j].labels if k == 0 else tuple(f"{l}[{k}]" for l in M.spaces[j].labels),
                             T.spaces[j].degrees) for j in T.spaces}
    return AModule(M.A, spaces, T.mu, name=M.name if k == 0 else f"{M.name}[{k}]")


# ----------------------------------------------------------------------
# pre-morphisms and hom complexes


@dataclass
class PreMorphism:
    source: AModule
    target: AModule
    degree: int
    comps: Dict[Slot, object] = field(default_factory=dict)

    def __post_init__(self):
        F = self.source.F
        self.comps = {s: F(c) for s, c in self.comps.items() if F(c)}
        for s in self.comps:
            if slot_degree(self.source, self.target, s) != self.degree:
                raise InputError(f"slot {s} has degree {slot_degree(self.source, self.target, s)}, not {self.degree}")

    def is_zero(self) -> bool:
        return not self.comps

    def __add__(self, other: "PreMorphism") -> "PreMorphism":
        _check_parallel(self, other)
        out = dict(self.comps)
        vec_axpy(self.source.F, out, self.source.F.one, other.comps)
        return PreMorphism(self.source, self.target, self.degree, out)

    def __sub__(self, other: "PreMorphism") -> "PreMorphism":
        return self + other.scale(self.source.F.neg(self.source.F.one))

    def scale(self, a) -> "PreMorphism":
        F = self.source.F
        a = F(a)
        return PreMorphism(self.source, self.target, self.degree,
                           {s: F.mul(a, c) for s, c in self.comps.items()})

    def __eq__(self, other):
        if not isinstance(other, PreMorphism):
            return NotImplemented
        return (self.source is other.source and self.target is other.target
                and (self.degree == other.degree or not self.comps) and self.comps == other.comps)

    def linear_part(self, j: int) -> Dict[int, Dict[int, object]]:
        """``phi^1`` at ``Y_j`` as ``{m: {n: c}}``."""
        out: Dict[int, Dict[int, object]] = {}
        for (chain, m, inputs, n), c in self.comps.items():
            if chain == (j,):
                out.setdefault(m, {})[n] = c
        return out

    def __repr__(self):
        return f"PreMorphism({self.source.name}->{self.target.name}, deg {self.degree}, {len(self.comps)} comps)"


def _check_parallel(a: PreMorphism, b: PreMorphism) -> None:
    if a.source is not b.source or a.target is not b.target:
        raise InputError("pre-morphisms have different source or target")
    if a.degree != b.degree and a.comps and b.comps:
        raise InputError("pre-morphisms have different degrees")


def slot_degree(M: AModule, N: AModule, s: Slot) -> int:
    chain, m, inputs, n = s
    return N.deg(chain[0], n) - M.deg(chain[-1], m) - sum(M.A.input_degrees(chain, inputs)) + len(inputs)


class HomComplex:
    """``hom_C(M, N)`` with its slot basis and the matrix of ``mu^1_C``."""

    def __init__(self, M: AModule, N: AModule):
        _same_category(M, N)
        self.M, self.N = M, N
        A = M.A
        F = self.F = M.F
        slots: List[Slot] = []
        for chain in A.chains(min_len=1):
            nm, nn = len(M.spaces[chain[-1]]), len(N.spaces[chain[0]])
            if not nm or not nn:
                continue
            for inputs in A.input_tuples(chain):
                for m in range(nm):
                    for n in range(nn):
                        slots.append((chain, m, inputs, n))
        self.slots = slots
        self.index = {s: i for i, s in enumerate(slots)}
        self.degrees = tuple(slot_degree(M, N, s) for s in slots)
        labels = tuple(self.slot_label(s) for s in slots)
        self.space = GradedSpace(labels, self.degrees)
        cols = [self._vector(differential_push(M, N, s, F.one)) for s in slots]
        self.d = Matrix(F, len(slots), len(slots), cols)
        self.complex = ChainComplex(F, self.space, self.d)
        self._coh: Optional[CohomologyResult] = None

    def __len__(self):
        return len(self.slots)

    def slot_label(self, s: Slot) -> str:
        chain, m, inputs, n = s
        A = self.M.A
        names = [A.hom(chain[l], chain[l + 1])[a].name for l, a in enumerate(inputs)]
        mid = ",".join(reversed(names))
        return f"<{self.N.label(chain[0], n)}|{self.M.label(chain[-1], m)}{';' + mid if mid else ''}>"

    def _vector(self, comps: Mapping[Slot, object]) -> Dict[int, object]:
        return {self.index[s]: c for s, c in comps.items() if c}

    def to_vector(self, phi: PreMorphism) -> Dict[int, object]:
        if phi.source is not self.M or phi.target is not self.N:
            raise InputError("pre-morphism does not belong to this hom complex")
        return self._vector(phi.comps)

    def from_vector(self, v: Mapping[int, object], degree: Optional[int] = None) -> PreMorphism:
        if degree is None:
            degs = {self.degrees[i] for i, c in v.items() if c}
            if len(degs) > 1:
                raise InputError("vector is not homogeneous")
            degree = degs.pop() if degs else 0
        return PreMorphism(self.M, self.N, degree, {self.slots[i]: c for i, c in v.items()})

    def basis(self, g: int) -> List[PreMorphism]:
        return [self.from_vector({i: self.F.one}, g) for i in self.space.indices_in_degree(g)]

    def cohomology(self) -> CohomologyResult:
        if self._coh is None:
            self._coh = cohomology(self.complex)
        return self._coh

    def dims(self) -> Dict[int, int]:
        return dict(self.cohomology().dims)

    def cocycles(self, g: int) -> List[PreMorphism]:
        idx = self.space.indices_in_degree(g)
        Z = kernel_basis(self.F, [self.d.cols[i] for i in idx], idx)
        return [self.from_vector(z, g) for z in Z]

    def cohomology_classes(self, g: int) -> List[PreMorphism]:
        return [self.from_vector(r, g) for r in self.cohomology().reps.get(g, [])]

    def class_of(self, phi: PreMorphism) -> list:
        return self.cohomology().coordinates(self.to_vector(phi), phi.degree)


@functools.lru_cache(maxsize=128)
def hom_complex(M: AModule, N: AModule) -> HomComplex:
    return HomComplex(M, N)


def hom_groups(M: AModule, N: AModule) -> Dict[int, int]:
    """Graded dimensions of ``Hom*_C(M, N)``."""
    return hom_complex(M, N).dims()


def differential_push(M: AModule, N: AModule, s: Slot, coeff) -> Dict[Slot, object]:
    """``mu^1_C`` of the pre-morphism ``coeff · [s]``, as a dict of slots."""
    A, F = M.A, M.F
    chain, m, a, n = s
    degs = A.input_degrees(chain, a)
    red = [g - 1 for g in degs]
    red_a = sum(red)
    out: Dict[Slot, object] = {}

    def put(slot, c):
        v = F.add(out.get(slot, F.zero), c)
        if v:
            out[slot] = v
        else:
            out.pop(slot, None)

    # mu_N after phi: phi consumed all of a
    base = F.sign(M.deg(chain[-1], m) + red_a)
    for cN, aN, vals in N.top_index().get((chain[0], n), ()):
        nc, na = cN + chain[1:], aN + a
        for n2, c in vals.items():
            put((nc, m, na, n2), F.mul(F.mul(base, coeff), c))
    # phi after mu_M: mu_M consumed the new top inputs
    for cM, m0, aM, c in M.bottom_index().get((chain[-1], m), ()):
        sgn = F.sign(M.deg(cM[-1], m0) + A.reduced_sum(cM, aM))
        put((chain + cM[1:], m0, a + aM, n), F.mul(F.mul(sgn, coeff), c))
    # mu_A inside the inputs
    span = A.span_index()
    tail = 0
    for p in range(len(a) - 1, -1, -1):
        for cA, b, c in span.get((chain[p], chain[p + 1], a[p]), ()):
            sgn = F.sign(M.deg(chain[-1], m) + A.reduced_sum(cA, b) + tail)
            nc = chain[:p + 1] + cA[1:-1] + chain[p + 1:]
            put((nc, m, a[:p] + b + a[p + 1:], n), F.mul(F.mul(sgn, coeff), c))
        tail += red[p]
    return out


def mu1(phi: PreMorphism) -> PreMorphism:
    """``mu^1_C(phi)``."""
    F = phi.source.F
    out: Dict[Slot, object] = {}
    for s, c in phi.comps.items():
        vec_axpy(F, out, F.one, differential_push(phi.source, phi.target, s, c))
    return PreMorphism(phi.source, phi.target, phi.degree + 1, out)


def compose(psi: PreMorphism, phi: PreMorphism) -> PreMorphism:
    """``mu^2_C(psi, phi)`` for ``phi: M -> N`` and ``psi: N -> P``."""
    if phi.target is not psi.source:
        raise InputError("compose: target of phi is not the source of psi")
    M = phi.source
    A, F = M.A, M.F
    by_top: Dict[Tuple[int, int], list] = {}
    for (c1, m1, a1, n1), v in psi.comps.items():
        by_top.setdefault((c1[-1], m1), []).append((c1, a1, n1, v))
    out: Dict[Slot, object] = {}
    for (c2, m2, a2, n2), u in phi.comps.items():
        hits = by_top.get((c2[0], n2))
        if not hits:
            continue
        sgn = F.sign(M.deg(c2[-1], m2) + A.reduced_sum(c2, a2))
        su = F.mul(sgn, u)
        for c1, a1, n1, v in hits:
            key = (c1 + c2[1:], m2, a1 + a2, n1)
            val = F.add(out.get(key, F.zero), F.mul(su, v))
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return PreMorphism(M, psi.target, phi.degree + psi.degree, out)


def strict_morphism(M: AModule, N: AModule, maps: Mapping[int, Mapping[int, Mapping[int, object]]]) -> PreMorphism:
    """Degree-0 pre-morphism from a strict map ``f``: ``phi^1(m) = (-1)^|m| f(m)``.

    With this sign a strict module map (commuting with every structure map)
    is a cocycle, and ``identity(M)`` is the unit of composition.
    """
    F = M.F
    comps = {}
    for j, fj in maps.items():
        for m, col in fj.items():
            s = F.sign(M.deg(j, m))
            for n, c in col.items():
                if F(c):
                    comps[((j,), m, (), n)] = F.mul(s, F(c))
    return PreMorphism(M, N, 0, comps)


def identity(M: AModule) -> PreMorphism:
    return strict_morphism(M, M, {j: {k: {k: 1} for k in range(len(sp))} for j, sp in M.spaces.items()})


def zero_morphism(M: AModule, N: AModule, degree: int = 0) -> PreMorphism:
    return PreMorphism(M, N, degree, {})


def chain_map_at(phi: PreMorphism, j: int) -> Matrix:
    """The chain map ``M(Y_j) -> N(Y_j)`` of a degree-0 cocycle: ``m ↦ (-1)^|m| phi^1(m)``."""
    M, N, F = phi.source, phi.target, phi.source.F
    lin = phi.linear_part(j)
    cols = []
    for m in range(len(M.spaces[j])):
        s = F.sign(M.deg(j, m))
        cols.append({n: F.mul(s, c) for n, c in lin.get(m, {}).items()})
    return Matrix(F, len(N.spaces[j]), len(M.spaces[j]), cols)


def require_cocycle(phi: PreMorphism, degree: Optional[int] = 0) -> None:
    if degree is not None and phi.comps and phi.degree != degree:
        raise PreconditionError(f"expected a degree-{degree} morphism, got degree {phi.degree}")
    if not mu1(phi).is_zero():
        raise PreconditionError("pre-morphism is not a cocycle")


# ----------------------------------------------------------------------
# cones, evaluation, twist


def cone(phi: PreMorphism, name: str = "") -> AModule:
    """Mapping cone ``M[1] ⊕ N`` of a degree-0 cocycle ``phi: M -> N``."""
    require_cocycle(phi, 0)
    M, N = phi.source, phi.target
    spaces, off = {}, {}
    for j in range(1, M.A.m + 1):
        sm, sn = M.spaces[j], N.spaces[j]
        spaces[j] = GradedSpace(
            tuple(f"↑{l}" for l in sm.labels) + sn.labels,
            tuple(g - 1 for g in sm.degrees) + sn.degrees,
        )
        off[j] = len(sm)
    mu: Dict[Tuple[Chain, int, Tuple[int, ...]], Dict[int, object]] = {}
    for key, out in M.mu.items():
        mu[key] = dict(out)
    for (chain, n, inputs), out in N.mu.items():
        mu[(chain, n + off[chain[-1]], inputs)] = {o + off[chain[0]]: c for o, c in out.items()}
    for (chain, m, inputs, n), c in phi.comps.items():
        vals = mu.setdefault((chain, m, inputs), {})
        t = n + off[chain[0]]
        vals[t] = phi.source.F.add(vals.get(t, phi.source.F.zero), c)
    return AModule(M.A, spaces, mu, name or f"Cone({M.name}→{N.name})")


def cone_inclusion(phi: PreMorphism, Q: AModule) -> PreMorphism:
    """Strict inclusion ``N -> Cone(phi)``."""
    M, N = phi.source, phi.target
    return strict_morphism(N, Q, {j: {k: {k + len(M.spaces[j]): 1} for k in range(len(N.spaces[j]))}
                                  for j in range(1, M.A.m + 1)})


def evaluation(M: AModule, N: AModule) -> PreMorphism:
    """``eps: hom_C(M, N) ⊗ M -> N``, ``eps(phi⊗m, a..) = phi(m, a..)``."""
    H = hom_complex(M, N)
    ZM = tensor(H.complex, M, name=f"hom({M.name},{N.name})⊗{M.name}")
    comps = {}
    for si, (chain, m, inputs, n) in enumerate(H.slots):
        top = chain[-1]
        comps[(chain, si * len(M.spaces[top]) + m, inputs, n)] = M.F.one
    return PreMorphism(ZM, N, 0, comps)


def twist(M: AModule, N: AModule) -> AModule:
    """``T_M(N) = Cone(evaluation(M, N))``."""
    return cone(evaluation(M, N), name=f"T_{M.name}({N.name})")


# ----------------------------------------------------------------------
# Yoneda


def yoneda(M: AModule, k: int) -> Tuple[Matrix, ChainComplex, HomComplex]:
    """The chain map ``M(Y_k) -> hom_C(P_k, M)`` and its source and target.

    ``F(m)^{d+1}(a, a_d..a_1) = mu_M^{d+2}(m, a, a_d..a_1)`` with ``F(m)^1(e_k) = m``;
    it commutes with the differentials as it stands.
    """
    A, F = M.A, M.F
    _check_object(A, k)
    P = projective_cached(A, k)
    H = hom_complex(P, M)
    nk = len(M.spaces[k])
    cols = []
    for m in range(nk):
        comps: Dict[Slot, object] = {((k,), 0, (), m): F.one}
        for chain, inputs, out in M.top_index().get((k, m), ()):
            if len(chain) < 2:
                continue
            for o, c in out.items():
                comps[(chain[:-1], inputs[-1], inputs[:-1], o)] = c
        cols.append({H.index[sl]: c for sl, c in comps.items()})
    f = Matrix(F, len(H), nk, cols)
    return f, M.complex(k), H


def yoneda_morphism(M: AModule, k: int, m: Mapping[int, object]) -> PreMorphism:
    """``F(m)`` for a homogeneous element ``m`` of ``M(Y_k)``."""
    F = M.F
    f, _, H = yoneda(M, k)
    v: Dict[int, object] = {}
    for i, c in m.items():
        vec_axpy(F, v, F(c), f.cols[i])
    return H.from_vector(v)


def yoneda_inverse(phi: PreMorphism, k: Optional[int] = None) -> Dict[int, object]:
    """``phi^1(e_k)`` for ``phi`` out of ``P_k``."""
    P = phi.source
    if k is None:
        if not P.name.startswith("P") or not P.name[1:].isdigit():
            raise InputError("yoneda_inverse needs a morphism out of a projective P_k")
        k = int(P.name[1:])
    if len(P.spaces[k]) != 1 or P.spaces[k].labels[0] != f"e{k}" or any(
        len(P.spaces[j]) for j in range(k + 1, P.A.m + 1)
    ):
        raise InputError(f"source of the morphism is not P{k}")
    out = {}
    for (chain, p, inputs, n), c in phi.comps.items():
        if chain == (k,) and p == 0:
            out[n] = c
    return out


@functools.lru_cache(maxsize=64)
def projective_cached(A: DirectedCategory, k: int) -> AModule:
    return projective(A, k)


@functools.lru_cache(maxsize=64)
def simple_cached(A: DirectedCategory, j: int) -> AModule:
    return simple(A, j)


# ----------------------------------------------------------------------
# truncation


class Truncation(NamedTuple):
    sub: AModule
    quotient: AModule
    inclusion: PreMorphism
    projection: PreMorphism


def restrict(M: AModule, objects: Iterable[int], name: str = "") -> AModule:
    keep = set(objects)
    spaces = {j: M.spaces[j] for j in keep}
    mu = {key: out for key, out in M.mu.items() if key[0][0] in keep and key[0][-1] in keep}
    return AModule(M.A, spaces, mu, name or M.name)


def truncation(M: AModule, j: int) -> Truncation:
    """``M^{<=j}`` (support ``<= j``), the quotient, and the strict maps between them."""
    if not (0 <= j <= M.A.m):
        raise InputError(f"truncation level {j} out of range 0..{M.A.m}")
    low = range(1, j + 1)
    high = range(j + 1, M.A.m + 1)
    sub = restrict(M, low, f"{M.name}^≤{j}")
    quo = restrict(M, high, f"{M.name}/{M.name}^≤{j}")
    inc = strict_morphism(sub, M, {i: {k: {k: 1} for k in range(len(M.spaces[i]))} for i in low})
    pro = strict_morphism(M, quo, {i: {k: {k: 1} for k in range(len(M.spaces[i]))} for i in high})
    return Truncation(sub, quo, inc, pro)


def graded_piece(M: AModule, j: int) -> AModule:
    """``M^{<=j} / M^{<=j-1}``, i.e. ``M(Y_j) ⊗ S_j``."""
    return restrict(M, [j], f"gr{j}({M.name})")


# ----------------------------------------------------------------------
# isomorphisms in H^0


def is_quasi_iso(phi: PreMorphism) -> bool:
    require_cocycle(phi, 0)
    M, N = phi.source, phi.target
    for j in range(1, M.A.m + 1):
        H = induced_map(chain_map_at(phi, j), M.cohomology(j), N.cohomology(j))
        if not is_isomorphism(H):
            return False
    return True


@dataclass
class Inverse:
    psi: PreMorphism
    h_source: PreMorphism  # compose(psi, phi) - id = mu1(h_source)
    h_target: PreMorphism  # compose(phi, psi) - id = mu1(h_target)

    def verify(self, phi: PreMorphism) -> bool:
        M, N = phi.source, phi.target
        ok = mu1(self.psi).is_zero()
        ok &= (compose(self.psi, phi) - identity(M)) == mu1(self.h_source)
        ok &= (compose(phi, self.psi) - identity(N)) == mu1(self.h_target)
        return bool(ok)


def invert(phi: PreMorphism) -> Optional[Inverse]:
    """Solve for a homotopy inverse with explicit homotopies; ``None`` if none exists."""
    require_cocycle(phi, 0)
    M, N = phi.source, phi.target
    F = M.F
    HNM, HMM, HNN = hom_complex(N, M), hom_complex(M, M), hom_complex(N, N)
    o1 = len(HNM)
    o2 = o1 + len(HMM)
    nrows = o2 + len(HNN)
    cols: List[Dict[int, object]] = []
    psi_idx = HNM.space.indices_in_degree(0)
    for i in psi_idx:
        b = HNM.from_vector({i: F.one}, 0)
        col = dict(HNM.d.cols[i])
        for r, c in HMM.to_vector(compose(b, phi)).items():
            col[o1 + r] = c
        for r, c in HNN.to_vector(compose(phi, b)).items():
            col[o2 + r] = c
        cols.append(col)
    hm_idx = HMM.space.indices_in_degree(-1)
    for i in hm_idx:
        cols.append({o1 + r: F.neg(c) for r, c in HMM.d.cols[i].items()})
    hn_idx = HNN.space.indices_in_degree(-1)
    for i in hn_idx:
        cols.append({o2 + r: F.neg(c) for r, c in HNN.d.cols[i].items()})
    rhs = {o1 + r: c for r, c in HMM.to_vector(identity(M)).items()}
    rhs.update({o2 + r: c for r, c in HNN.to_vector(identity(N)).items()})
    sol = solve_linear(Matrix(F, nrows, len(cols), cols), rhs)
    if sol is None:
        return None
    n1, n2 = len(psi_idx), len(psi_idx) + len(hm_idx)
    psi = HNM.from_vector({psi_idx[c]: v for c, v in sol.items() if c < n1}, 0)
    hm = HMM.from_vector({hm_idx[c - n1]: v for c, v in sol.items() if n1 <= c < n2}, -1)
    hn = HNN.from_vector({hn_idx[c - n2]: v for c, v in sol.items() if c >= n2}, -1)
    inv = Inverse(psi, hm, hn)
    if not inv.verify(phi):
        raise InvariantViolation("inverse failed its own certificate")
    return inv


def find_isomorphism(M: AModule, N: AModule, rng: Optional[random.Random] = None,
                     tries: int = 30, exhaustive_limit: int = 4096) -> Optional[PreMorphism]:
    """A degree-0 quasi-isomorphism ``M -> N`` if one is found, else ``None``.

    Random combinations of cohomology classes come first; over a prime field
    with few enough classes every combination is then tried, so ``None`` is a
    proof of non-isomorphism in that case.
    """
    if M.cohomology_dims() != N.cohomology_dims():
        return None
    H = hom_complex(M, N)
    classes = H.cohomology_classes(0)
    F = M.F
    rng = rng or random.Random(0)

    def combo(coeffs):
        out = zero_morphism(M, N)
        for c, z in zip(coeffs, classes):
            if c:
                out = out + z.scale(c)
        return out

    for _ in range(tries):
        phi = combo([F.random_element(rng) for _ in classes])
        if is_quasi_iso(phi):
            return phi
    if F.p is not None and F.p ** len(classes) <= exhaustive_limit:
        for coeffs in itertools.product(range(F.p), repeat=len(classes)):
            phi = combo(coeffs)
            if is_quasi_iso(phi):
                return phi
    return None


def iso_type_simple(M: AModule) -> Optional[int]:
    """``j`` if ``M`` has the cohomology of ``S_j`` (hence ``M ≅ S_j``), else ``None``."""
    found = None
    for j in range(1, M.A.m + 1):
        dims = M.cohomology(j).dims
        if not dims:
            continue
        if dims != {0: 1} or found is not None:
            return None
        found = j
    return found


def is_zero_object(M: AModule, cross_check: bool = True) -> bool:
    """Every ``M(Y_j)`` acyclic; optionally confirmed via ``Hom*(M, S_j)``."""
    answer = all(M.cohomology(j).is_acyclic() for j in range(1, M.A.m + 1))
    if cross_check:
        via_simples = all(not hom_groups(M, simple_cached(M.A, j)) for j in range(1, M.A.m + 1))
        if via_simples != answer:
            raise InvariantViolation("acyclicity and Hom(-, S_j) criteria disagree")
    return answer


def precompose_matrix(c: PreMorphism, target: AModule) -> Tuple[Matrix, HomComplex, HomComplex]:
    """Matrix of ``chi ↦ mu^2(chi, c)`` from ``hom(M0, T)`` to ``hom(M1, T)``."""
    M1, M0 = c.source, c.target
    H0, H1 = hom_complex(M0, target), hom_complex(M1, target)
    F = c.source.F
    cols = []
    for i in range(len(H0)):
        chi = H0.from_vector({i: F.one})
        cols.append(H1.to_vector(compose(chi, c)))
    return Matrix(F, len(H1), len(H0), cols), H0, H1


def whitehead_test(c: PreMorphism) -> bool:
    """Composition with ``c`` iso on ``Hom*(-, S_j)`` for all ``j``; certified by ``invert``."""
    require_cocycle(c, 0)
    A = c.source.A
    for j in range(1, A.m + 1):
        f, H0, H1 = precompose_matrix(c, simple_cached(A, j))
        if not is_isomorphism(induced_map(f, H0.cohomology(), H1.cohomology())):
            return False
    inv = invert(c)
    if inv is None:
        raise InvariantViolation("Hom criterion passed but no inverse exists")
    return True


@dataclass
class TowerStage:
    k: int
    module: AModule


def projective_tower(M: AModule, max_stages: Optional[int] = None) -> List[TowerStage]:
    """Twist by ``P_k`` for the largest non-acyclic ``k`` until the module is zero."""
    A = M.A
    limit = A.m if max_stages is None else max_stages
    stages: List[TowerStage] = []
    cur = M
    while True:
        ks = [j for j in range(1, A.m + 1) if not cur.cohomology(j).is_acyclic()]
        if not ks:
            return stages
        if len(stages) >= limit:
            raise InvariantViolation("projective tower did not terminate within m stages")
        k = max(ks)
        cur = twist(projective_cached(A, k), cur)
        stages.append(TowerStage(k, cur))


# ----------------------------------------------------------------------
# random data for tests and demos


def random_cocycle(M: AModule, N: AModule, rng: random.Random, degree: int = 0) -> PreMorphism:
    H = hom_complex(M, N)
    F = M.F
    out = zero_morphism(M, N, degree)
    for z in H.cocycles(degree):
        out = out + z.scale(F.random_element(rng))
    return out


def random_complex(F: Field, rng: random.Random, max_dim: int = 3, acyclic: bool = False) -> ChainComplex:
    """Small random complex in degrees ``-1..1``; ``acyclic`` builds a sum of ``K -> K``."""
    if acyclic:
        pairs = rng.randint(1, 2)
        labels, degs, cols = [], [], []
        for p in range(pairs):
            g = rng.randint(-1, 0)
            labels += [f"u{p}", f"v{p}"]
            degs += [g, g + 1]
            c = F.random_element(rng) or F.one
            cols += [{2 * p + 1: c}, {}]
        return ChainComplex(F, GradedSpace(tuple(labels), tuple(degs)), Matrix(F, len(degs), len(degs), cols))
    dims = {g: rng.randint(0, max_dim) for g in (-1, 0, 1)}
    if not any(dims.values()):
        dims[0] = 1
    blocks = {}
    # d_{0} ∘ d_{-1} = 0: pick d_{-1} then d_0 vanishing on its image
    a = Matrix.from_rows(F, [[F.random_element(rng) for _ in range(dims[-1])] for _ in range(dims[0])],
                         ncols=dims[-1])
    blocks[-1] = a
    left = Matrix.from_rows(F, [[F.random_element(rng) for _ in range(dims[0])] for _ in range(dims[1])],
                            ncols=dims[0])
    # kill the image of a by projecting rows onto the left kernel of a
    ker = a.transpose().kernel()
    rows = []
    for r in left.to_rows():
        acc = {}
        for coeff, kv in zip(r, ker):
            vec_axpy(F, acc, coeff, kv)
        rows.append([acc.get(i, F.zero) for i in range(dims[0])])
    blocks[0] = Matrix.from_rows(F, rows, ncols=dims[0])
    return ChainComplex.from_blocks(F, dims, blocks)


def random_module(A: DirectedCategory, rng: random.Random, depth: int = 2) -> AModule:
    """A random valid module built from projectives and simples by cones, tensors and sums."""
    F = A.F
    base = [projective_cached(A, k) for k in range(1, A.m + 1)] + [simple_cached(A, j) for j in range(1, A.m + 1)]
    M = rng.choice(base)
    for _ in range(depth):
        op = rng.randrange(4)
        if op == 0:
            N = rng.choice(base)
            phi = random_cocycle(N, M, rng) if rng.random() < 0.5 else random_cocycle(M, N, rng)
            M = cone(phi)
        elif op == 1:
            M = tensor(random_complex(F, rng, 2, acyclic=rng.random() < 0.3), M)
        elif op == 2:
            M = direct_sum(M, rng.choice(base))
        else:
            M = shift(M, rng.choice((-1, 1)))
        if M.total_dim() > 14:
            break
    return M
