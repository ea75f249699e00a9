"""Spectral sequence of a finite filtered cochain complex, specialised to the
filtration of ``hom_C(M0, M1)`` by the truncations of ``M1``.

A filtered complex here is a complex whose basis vectors carry an integer
*level*; ``F^p`` is spanned by the basis vectors of level ``>= p``.  For the
hom complex, a slot whose output object is ``Y_i`` has level ``m + 1 - i``,
so column ``j`` of every page corresponds to ``Y_{m+1-j}``.

Pages are computed from the classical description

    Z_r^p = {x in F^p : dx in F^{p+r}},
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}),

with explicit representatives, so ``d_r`` is an honest matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InputError, InvariantViolation
from .exactlin import (
    ChainComplex,
    Echelon,
    Field,
    GradedSpace,
    Matrix,
    cohomology,
    induced_map,
    kernel_basis,
    vec_axpy,
)
from .modcat import (
    AModule,
    HomComplex,
    PreMorphism,
    compose,
    hom_complex,
    simple_cached,
    projective_cached,
)

Vector = Dict[int, object]


@dataclass(frozen=True)
class FilteredComplex:
    total: ChainComplex
    levels: Tuple[int, ...]
    lo: int
    hi: int

    def __post_init__(self):
        if len(self.levels) != len(self.total):
            raise InputError("one filtration level per basis vector is required")
        for j, col in enumerate(self.total.d.cols):
            for i in col:
                if self.levels[i] < self.levels[j]:
                    raise InvariantViolation("filtration is not closed under the differential")

    @property
    def F(self) -> Field:
        return self.total.F

    def piece(self, p: int, t: int) -> List[int]:
        """Basis indices of ``F^p`` in degree ``t``."""
        degs = self.total.space.degrees
        return [i for i in range(len(degs)) if degs[i] == t and self.levels[i] >= p]

    def graded_piece(self, p: int) -> ChainComplex:
        """``F^p / F^{p+1}`` on the basis vectors of level exactly ``p``."""
        idx = [i for i, l in enumerate(self.levels) if l == p]
        pos = {i: k for k, i in enumerate(idx)}
        sp = self.total.space
        cols = [{pos[r]: c for r, c in self.total.d.cols[i].items() if r in pos} for i in idx]
        space = GradedSpace(tuple(sp.labels[i] for i in idx), tuple(sp.degrees[i] for i in idx))
        return ChainComplex(self.F, space, Matrix(self.F, len(idx), len(idx), cols))


def filtered_hom(M0: AModule, M1: AModule) -> Tuple[FilteredComplex, HomComplex]:
    """``hom_C(M0, M1)`` filtered by ``F^j = hom_C(M0, M1^{<= m+1-j})``."""
    H = hom_complex(M0, M1)
    m = M0.A.m
    levels = tuple(m + 1 - s[0][0] for s in H.slots)
    return FilteredComplex(H.complex, levels, 1, m), H


class _Quotient:
    """``num / den`` (with ``den`` inside ``span(num)``) with explicit representatives."""

    def __init__(self, F: Field, num: Sequence[Vector], den: Sequence[Vector]):
        self.F = F
        ech = Echelon(F, track=True)
        for v in den:
            ech.add(v)
        self.sub_dim = len(ech)
        self.nb = ech.offered
        reps = []
        for v in num:
            res, _ = ech.reduce(v)
            if res:
                ech.add(res)
                reps.append(res)
        self.reps = reps
        self.ech = ech

    def __len__(self):
        return len(self.reps)

    def coordinates(self, v: Vector) -> List[object]:
        res, coords = self.ech.reduce(v)
        if res:
            raise InvariantViolation("vector outside the numerator subspace")
        combo = self.ech.express(coords)
        return [combo.get(self.nb + r, self.F.zero) for r in range(len(self.reps))]


@dataclass
class SSRun:
    pages: Dict[int, Dict[Tuple[int, int], int]] = field(default_factory=dict)
    differentials: Dict[int, Dict[Tuple[int, int], Matrix]] = field(default_factory=dict)
    einf: Dict[Tuple[int, int], int] = field(default_factory=dict)
    grH: Dict[Tuple[int, int], int] = field(default_factory=dict)
    hom_dims: Dict[int, int] = field(default_factory=dict)
    lo: int = 1
    hi: int = 1
    stable_from: int = 1
    converged: bool = False

    def einf_totals(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (j, k), d in self.einf.items():
            out[j + k] = out.get(j + k, 0) + d
        return dict(sorted((t, d) for t, d in out.items() if d))

    def nontrivial_differentials(self) -> List[int]:
        return [r for r, ds in self.differentials.items() if any(not M.is_zero() for M in ds.values())]


def _cycles(Fc: FilteredComplex, p: int, r: int, t: int) -> List[Vector]:
    """Basis of ``Z_r^p`` in degree ``t``."""
    idx = Fc.piece(p, t)
    lv = Fc.levels
    cols = [{i: c for i, c in Fc.total.d.cols[k].items() if lv[i] < p + r} for k in idx]
    return kernel_basis(Fc.F, cols, idx)


def _page(Fc: FilteredComplex, r: int, p: int, t: int) -> _Quotient:
    F = Fc.F
    num = _cycles(Fc, p, r, t)
    den = list(_cycles(Fc, p + 1, r - 1, t))
    for z in _cycles(Fc, p - r + 1, r - 1, t - 1):
        den.append(Fc.total.d.apply(z))
    return _Quotient(F, num, den)


def spectral_sequence(Fc: FilteredComplex, max_page: Optional[int] = None) -> SSRun:
    """All pages up to stabilisation, ``E_inf`` and the comparison with ``gr H``."""
    F = Fc.F
    degs = sorted(set(Fc.total.space.degrees))
    span = Fc.hi - Fc.lo
    last = span + 1 if max_page is None else max(1, max_page)
    run = SSRun(lo=Fc.lo, hi=Fc.hi)
    cols = range(Fc.lo, Fc.hi + 1)
    tdeg = range(degs[0] - 1, degs[-1] + 2) if degs else range(0)
    prev_dims = None
    for r in range(1, last + 1):
        quo = {(p, t): _page(Fc, r, p, t) for p in cols for t in tdeg}
        dims = {(p, t - p): len(q) for (p, t), q in quo.items() if len(q)}
        run.pages[r] = dims
        if prev_dims is not None:
            # E_r must be the cohomology of (E_{r-1}, d_{r-1})
            dprev = run.differentials[r - 1]
            for p in cols:
                for t in tdeg:
                    out = dprev.get((p, t))
                    inc = dprev.get((p - (r - 1), t - 1))
                    rk_out = out.rank() if out is not None else 0
                    rk_in = inc.rank() if inc is not None else 0
                    expect = prev_dims.get((p, t - p), 0) - rk_out - rk_in
                    if expect != dims.get((p, t - p), 0):
                        raise InvariantViolation(f"E_{r} is not the cohomology of E_{r - 1} at ({p},{t})")
        ds: Dict[Tuple[int, int], Matrix] = {}
        for (p, t), q in quo.items():
            tgt = quo.get((p + r, t + 1))
            if not len(q) or tgt is None or not len(tgt):
                continue
            mcols = []
            for x in q.reps:
                c = tgt.coordinates(Fc.total.d.apply(x))
                mcols.append({i: a for i, a in enumerate(c) if a})
            ds[(p, t)] = Matrix(F, len(tgt), len(q), mcols)
        for (p, t), D in ds.items():
            nxt = ds.get((p + r, t + 1))
            if nxt is not None and not (nxt @ D).is_zero():
                raise InvariantViolation(f"d_{r} ∘ d_{r} != 0")
        run.differentials[r] = ds
        prev_dims = dims
    # E_inf with r beyond the filtration length
    rinf = span + 1
    for p in cols:
        for t in tdeg:
            q = _page(Fc, rinf, p, t)
            if len(q):
                run.einf[(p, t - p)] = len(q)
    # filtration induced on H(total)
    H = cohomology(Fc.total)
    run.hom_dims = dict(H.dims)
    for t in tdeg:
        bnd = [Fc.total.d.cols[i] for i in Fc.total.space.indices_in_degree(t - 1)]
        b = Echelon(F)
        for v in bnd:
            b.add(v)
        base = len(b)
        dims_p = {}
        for p in list(cols) + [Fc.hi + 1]:
            e = Echelon(F)
            for v in b.rows_copy():
                e.add(v)
            for z in _cycles(Fc, p, span + 1, t):
                e.add(z)
            dims_p[p] = len(e) - base
        for p in cols:
            g = dims_p[p] - dims_p[p + 1]
            if g:
                run.grH[(p, t - p)] = g
    run.converged = run.einf == run.grH and run.einf_totals() == dict(sorted(run.hom_dims.items()))
    run.stable_from = 1
    for r in sorted(run.pages):
        if run.pages[r] == run.einf:
            run.stable_from = r
            break
    return run


# ----------------------------------------------------------------------
# E_1 identification


def _convolve(a: Dict[int, int], b: Dict[int, int]) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for x, u in a.items():
        for y, v in b.items():
            out[x + y] = out.get(x + y, 0) + u * v
    return {t: d for t, d in sorted(out.items()) if d}


@dataclass
class E1Column:
    j: int
    obj: int
    module_dims: Dict[int, int]  # H*(M1(Y_obj))
    simple_dims: Dict[int, int]  # Hom*(M0, S_obj)
    predicted: Dict[int, int]  # by total degree
    raw: Dict[int, int]  # from the filtered complex
    witness_iso: bool


@dataclass
class E1Identification:
    columns: List[E1Column]

    @property
    def matches(self) -> bool:
        return all(c.predicted == c.raw and c.witness_iso for c in self.columns)

    def grid(self) -> Dict[Tuple[int, int], int]:
        out = {}
        for c in self.columns:
            for t, d in c.predicted.items():
                out[(c.j, t - c.j)] = d
        return out


def e1_identification(M0: AModule, M1: AModule) -> E1Identification:
    """``E_1^{jk} ≅ (H(M1(Y_i)) ⊗ Hom*(M0, S_i))^{j+k}`` with ``i = m+1-j``.

    The witness sends ``x ⊗ phi`` (cocycles) to the pre-morphism with
    components ``phi(m, a..) · x`` on slots ending at ``Y_i``; it must induce
    an isomorphism onto the cohomology of the graded piece.
    """
    m = M0.A.m
    F = M0.F
    Fc, H = filtered_hom(M0, M1)
    cols = []
    for j in range(1, m + 1):
        i = m + 1 - j
        Si = simple_cached(M0.A, i)
        HS = hom_complex(M0, Si)
        hm = M1.cohomology(i)
        predicted = _convolve(hm.dims, HS.dims())
        gr = Fc.graded_piece(j)
        grH = cohomology(gr)
        raw = dict(grH.dims)
        idx = [k for k, l in enumerate(Fc.levels) if l == j]
        pos = {k: n for n, k in enumerate(idx)}
        ok = True
        by_deg: Dict[int, List[List[object]]] = {}
        for ga, xs in hm.reps.items():
            for x in xs:
                for gb, phis in HS.cohomology().reps.items():
                    for pv in phis:
                        w: Vector = {}
                        for si, c in pv.items():
                            chain, mm, a, _ = HS.slots[si]
                            for n, xc in x.items():
                                slot = (chain, mm, a, n)
                                w[pos[H.index[slot]]] = F.add(w.get(pos[H.index[slot]], F.zero), F.mul(c, xc))
                        w = {k: v for k, v in w.items() if v}
                        by_deg.setdefault(ga + gb, []).append(grH.coordinates(w, ga + gb))
        for t, rows in by_deg.items():
            M = Matrix.from_rows(F, rows, ncols=grH.dim(t)).transpose()
            if not (M.nrows == M.ncols == M.rank()):
                ok = False
        if set(by_deg) != set(raw):
            ok = ok and all(grH.dim(t) == 0 for t in set(raw) - set(by_deg))
        cols.append(E1Column(j, i, dict(hm.dims), HS.dims(), predicted, raw, ok))
    return E1Identification(cols)


# ----------------------------------------------------------------------
# edge map


@dataclass
class EdgeResult:
    source: ChainComplex  # hom(P1, M1) ⊗ hom(M0, S1)
    chain_map: Matrix  # source -> hom(M0, M1)
    cohomology_map: Dict[int, Matrix]
    agrees_with_product: bool
    pairs_checked: int


def _tensor_complex(F: Field, A: ChainComplex, B: ChainComplex) -> ChainComplex:
    """``A ⊗ B`` with ``d(a⊗b) = (-1)^|b| da⊗b + a⊗db``; basis index ``ia * len(B) + ib``."""
    nb = len(B)
    labels, degs, cols = [], [], []
    for ia in range(len(A)):
        for ib in range(nb):
            labels.append(f"{A.space.labels[ia]}⊗{B.space.labels[ib]}")
            degs.append(A.space.degrees[ia] + B.space.degrees[ib])
            col: Vector = {}
            s = F.sign(B.space.degrees[ib])
            for ja, c in A.d.cols[ia].items():
                vec_axpy(F, col, F.one, {ja * nb + ib: F.mul(s, c)})
            for jb, c in B.d.cols[ib].items():
                vec_axpy(F, col, F.one, {ia * nb + jb: c})
            cols.append(col)
    n = len(degs)
    return ChainComplex(F, GradedSpace(tuple(labels), tuple(degs)), Matrix(F, n, n, cols))


def edge_map(M0: AModule, M1: AModule) -> EdgeResult:
    """Right edge map ``hom(P1, M1) ⊗ hom(M0, S1) -> hom(M0, M1)`` and its comparison
    with composition after identifying ``S1`` with ``P1``.

    ``eta(psi ⊗ phi)`` has components ``psi^1(e_1) · phi`` on slots ending at
    ``Y_1``.  On cohomology ``mu^2(psi, phi) = (-1)^|phi| eta(psi ⊗ phi)``.
    """
    A, F = M0.A, M0.F
    P1, S1 = projective_cached(A, 1), simple_cached(A, 1)
    HP, HS, H = hom_complex(P1, M1), hom_complex(M0, S1), hom_complex(M0, M1)
    src = _tensor_complex(F, HP.complex, HS.complex)
    ns = len(HS)
    cols = []
    for ip, (cp, _, _, n) in enumerate(HP.slots):
        for is_, (cs, mm, a, _) in enumerate(HS.slots):
            cols.append({H.index[(cs, mm, a, n)]: F.one})
    f = Matrix(F, len(H), len(src), cols)
    Hsrc = cohomology(src)
    Hmap = induced_map(f, Hsrc, H.cohomology())
    # composition with the literal identification S1 = P1
    agree, count = True, 0
    for gp, psis in HP.cohomology().reps.items():
        for pv in psis:
            psi = HP.from_vector(pv, gp)
            for gs, phis in HS.cohomology().reps.items():
                for sv in phis:
                    phi_p = PreMorphism(M0, P1, gs, {HS.slots[i]: c for i, c in sv.items()})
                    prod = H.to_vector(compose(psi, phi_p))
                    tens: Vector = {}
                    for i, c in pv.items():
                        for k, d in sv.items():
                            vec_axpy(F, tens, F.one, {i * ns + k: F.mul(c, d)})
                    eta = f.apply(tens)
                    diff = dict(prod)
                    vec_axpy(F, diff, F.neg(F.sign(gs)), eta)
                    count += 1
                    if not H.cohomology().is_coboundary(diff, gp + gs):
                        agree = False
    return EdgeResult(src, f, Hmap, agree, count)


def edge_is_surjective(res: EdgeResult) -> bool:
    return all(M.rank() == M.nrows for M in res.cohomology_map.values())


# ----------------------------------------------------------------------
# Morse-theoretic E_1 display


def morse_e1_grid(indices: Sequence[int], n: int, r: int, column: Dict[int, int]) -> Dict[Tuple[int, int], int]:
    """``E_1^{jk} = H^{j+k+n-mu(y_{j-r})}`` for ``r < j <= r+s``; zero elsewhere."""
    if not indices:
        raise InputError("at least one Morse index is required")
    if n < 0 or r < 0:
        raise InputError("dimension and shift must be non-negative")
    for mu in indices:
        if not isinstance(mu, int) or isinstance(mu, bool) or not (0 <= mu <= n):
            raise InputError(f"Morse index {mu!r} is not an integer in 0..{n}")
    out = {}
    for pos, mu in enumerate(indices):
        j = r + 1 + pos
        for g, d in column.items():
            if d:
                out[(j, g - j - n + mu)] = d
    return dict(sorted(out.items()))


def grid_totals(grid: Dict[Tuple[int, int], int]) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for (j, k), d in grid.items():
        out[j + k] = out.get(j + k, 0) + d
    return dict(sorted(out.items()))
