"""Independent reference computations used to cross-check the library.

Nothing here calls into the library's linear algebra or its hom-complex
assembly; coefficients are handled as plain ints (reduced mod p) or Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from beilinson.dircat import DirectedCategory


# ----------------------------------------------------------------------
# scalar helpers


def _norm(p: Optional[int], x):
    return Fraction(x) if p is None else int(x) % p


def _inv(p: Optional[int], x):
    return 1 / Fraction(x) if p is None else pow(int(x), -1, p)


def dense_rank(p: Optional[int], rows: List[List]) -> int:
    """Row rank by plain Gaussian elimination over GF(p) or Q (``p=None``)."""
    M = [[_norm(p, x) for x in r] for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    rank, row = 0, 0
    for c in range(ncols):
        piv = next((r for r in range(row, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        iv = _inv(p, M[row][c])
        M[row] = [_norm(p, x * iv) for x in M[row]]
        for r in range(len(M)):
            if r != row and M[r][c] != 0:
                f = M[r][c]
                M[r] = [_norm(p, a - f * b) for a, b in zip(M[r], M[row])]
        row += 1
        rank += 1
        if row == len(M):
            break
    return rank


def complex_cohomology_dims(p, degrees: List[int], d_cols: List[Dict[int, object]]) -> Dict[int, int]:
    """``dim H^t = dim C^t - rank d_t - rank d_{t-1}`` from a sparse differential."""
    by: Dict[int, List[int]] = {}
    for i, g in enumerate(degrees):
        by.setdefault(g, []).append(i)

    def rank_from(t):
        src, dst = by.get(t, []), by.get(t + 1, [])
        if not src or not dst:
            return 0
        rows = [[d_cols[s].get(r, 0) for s in src] for r in dst]
        return dense_rank(p, rows)

    out = {}
    for t, idx in by.items():
        h = len(idx) - rank_from(t) - rank_from(t - 1)
        if h:
            out[t] = h
    return dict(sorted(out.items()))


# ----------------------------------------------------------------------
# bar construction: b∘b = 0  <=>  A∞ relations


Word = Tuple[Tuple[int, ...], Tuple[int, ...]]


def _bar_apply(A_mu, degree, p, word: Word, coeff) -> Dict[Word, object]:
    """``b`` on one bar word ``(chain, (a_1..a_d))`` with sign ``(-1)^(||a_1||+..+||a_j||)``."""
    chain, a = word
    d = len(a)
    out: Dict[Word, object] = {}
    for i in range(1, d + 1):
        red = 0
        for j in range(0, d - i + 1):
            if j:
                red += degree(chain[j - 1], chain[j], a[j - 1]) - 1
            key = (chain[j:j + i + 1], a[j:j + i])
            for o, c in A_mu.get(key, {}).items():
                nw = (chain[:j + 1] + chain[j + i:], a[:j] + (o,) + a[j + i:])
                val = coeff * c * (-1 if red % 2 else 1)
                out[nw] = _norm(p, out.get(nw, 0) + val)
    return {k: v for k, v in out.items() if v != 0}


def bar_square(A: DirectedCategory) -> Dict[Word, Dict[Word, object]]:
    """Nonzero entries of ``b∘b`` on every bar word with at least one input."""
    p = A.F.p
    mu = {k: {o: (int(c) if p is not None else Fraction(c)) for o, c in v.items()} for k, v in A.mu.items()}

    def degree(i, j, a):
        return A.homs[(i, j)][a].degree

    import itertools
    bad = {}
    for n in range(2, A.m + 1):
        for chain in itertools.combinations(range(1, A.m + 1), n):
            ranges = [range(len(A.hom(x, y))) for x, y in zip(chain, chain[1:])]
            for a in itertools.product(*ranges):
                w = (chain, tuple(a))
                once = _bar_apply(mu, degree, p, w, 1)
                twice: Dict[Word, object] = {}
                for w2, c in once.items():
                    for w3, c3 in _bar_apply(mu, degree, p, w2, c).items():
                        twice[w3] = _norm(p, twice.get(w3, 0) + c3)
                twice = {k: v for k, v in twice.items() if v != 0}
                if twice:
                    bad[w] = twice
    return bad


def module_as_category(M) -> DirectedCategory:
    """Adjoin a terminal object ``Z = m+1`` with ``hom(Y_j, Z) = M(Y_j)``.

    The module equations of ``M`` are exactly the A∞ relations of the new
    category on chains ending at ``Z``.
    """
    A = M.A
    z = A.m + 1
    homs = {k: [(g.name, g.degree) for g in v] for k, v in A.homs.items()}
    for j in range(1, A.m + 1):
        sp = M.spaces[j]
        if len(sp):
            homs[(j, z)] = [(f"m{j}_{k}", g) for k, g in enumerate(sp.degrees)]
    mu = {k: dict(v) for k, v in A.mu.items()}
    for (chain, m, inputs), out in M.mu.items():
        mu[(chain + (z,), inputs + (m,))] = dict(out)
    return DirectedCategory(A.F, z, homs, mu, name=f"{M.name}+Z")


# ----------------------------------------------------------------------
# literal evaluation of the hom-complex differential and composition


def _phi_eval(phi_comps, chain, m, a) -> Dict[int, object]:
    return phi_comps.get((chain, m, a), {})


def _index_pre(comps) -> Dict[Tuple, Dict[int, object]]:
    out: Dict[Tuple, Dict[int, object]] = {}
    for (chain, m, a, n), c in comps.items():
        out.setdefault((chain, m, a), {})[n] = c
    return out


def _all_slots(M, N):
    A = M.A
    import itertools
    for n in range(1, A.m + 1):
        for chain in itertools.combinations(range(1, A.m + 1), n):
            if not len(M.spaces[chain[-1]]) or not len(N.spaces[chain[0]]):
                continue
            ranges = [range(len(A.hom(x, y))) for x, y in zip(chain, chain[1:])]
            for a in itertools.product(*ranges):
                for m in range(len(M.spaces[chain[-1]])):
                    yield chain, m, tuple(a)


def mu1_literal(M, N, comps) -> Dict[Tuple, object]:
    """``mu^1_C(phi)`` evaluated term by term from the three displayed sums."""
    A, p = M.A, M.F.p
    phi = _index_pre(comps)
    res: Dict[Tuple, object] = {}

    def red(chain, a, lo, hi):
        return sum(A.homs[(chain[l], chain[l + 1])][a[l]].degree - 1 for l in range(lo, hi))

    def add(key, v):
        res[key] = _norm(p, res.get(key, 0) + v)

    for chain, m, a in _all_slots(M, N):
        d = len(a)
        dm = M.spaces[chain[-1]].degrees[m]
        for j in range(0, d + 1):
            s = -1 if (red(chain, a, j, d) + dm) % 2 else 1
            # mu_N(phi(m, a_d..a_{j+1}), a_j..a_1)
            for x, cx in _phi_eval(phi, chain[j:], m, a[j:]).items():
                for n, cn in N.mu.get((chain[:j + 1], x, a[:j]), {}).items():
                    add((chain, m, a, n), s * cx * cn)
            # phi(mu_M(m, a_d..a_{j+1}), a_j..a_1)
            for y, cy in M.mu.get((chain[j:], m, a[j:]), {}).items():
                for n, cn in _phi_eval(phi, chain[:j + 1], y, a[:j]).items():
                    add((chain, m, a, n), s * cy * cn)
        for i in range(1, d + 1):
            for j in range(0, d - i + 1):
                s = -1 if (red(chain, a, j, d) + dm) % 2 else 1
                for b, cb in A.mu.get((chain[j:j + i + 1], a[j:j + i]), {}).items():
                    nc = chain[:j + 1] + chain[j + i:]
                    na = a[:j] + (b,) + a[j + i:]
                    for n, cn in _phi_eval(phi, nc, m, na).items():
                        add((chain, m, a, n), s * cb * cn)
    return {k: v for k, v in res.items() if v != 0}


def mu2_literal(M, N, P, psi_comps, phi_comps) -> Dict[Tuple, object]:
    """``mu^2_C(psi, phi)`` from the displayed single sum."""
    A, p = M.A, M.F.p
    phi, psi = _index_pre(phi_comps), _index_pre(psi_comps)
    res: Dict[Tuple, object] = {}
    for chain, m, a in _all_slots(M, P):
        d = len(a)
        dm = M.spaces[chain[-1]].degrees[m]
        for j in range(0, d + 1):
            r = sum(A.homs[(chain[l], chain[l + 1])][a[l]].degree - 1 for l in range(j, d))
            s = -1 if (r + dm) % 2 else 1
            for x, cx in _phi_eval(phi, chain[j:], m, a[j:]).items():
                for n, cn in _phi_eval(psi, chain[:j + 1], x, a[:j]).items():
                    key = (chain, m, a, n)
                    res[key] = _norm(p, res.get(key, 0) + s * cx * cn)
    return {k: v for k, v in res.items() if v != 0}


def ceil_index(a0, a1) -> int:
    """Maslov index of split lifts by the direct rule, using floor division on Fractions."""
    total = 0
    for x, y in zip(a0, a1):
        diff = Fraction(y) - Fraction(x)
        total += -((-diff.numerator) // diff.denominator)
    return total


def degree_errors(A: DirectedCategory) -> int:
    """Stored structure constants whose output degree is not ``sum |a_l| + 2 - d``."""
    bad = 0
    for (chain, a), out in A.mu.items():
        want = sum(A.homs[(x, y)][g].degree for x, y, g in zip(chain, chain[1:], a)) + 2 - len(a)
        for o, c in out.items():
            if c and A.homs[(chain[0], chain[-1])][o].degree != want:
                bad += 1
    return bad


def is_valid_category(A: DirectedCategory) -> bool:
    return not degree_errors(A) and not bar_square(A)


def single_coefficient_mutants(A: DirectedCategory, p: Optional[int]):
    """Every table obtained by changing one structure constant, or adding one where none is stored.

    Yields ``(description, mu)``.
    """
    import itertools
    step = 1
    for key in sorted(A.mu):
        for o in sorted(A.mu[key]):
            mu = {k: dict(v) for k, v in A.mu.items()}
            mu[key][o] = _norm(p, mu[key][o] + step)
            yield f"shift {key}->{o}", mu
    for n in range(2, A.m + 1):
        for chain in itertools.combinations(range(1, A.m + 1), n):
            outs = len(A.homs.get((chain[0], chain[-1]), ()))
            ranges = [range(len(A.homs.get((x, y), ()))) for x, y in zip(chain, chain[1:])]
            for a in itertools.product(*ranges):
                key = (chain, tuple(a))
                for o in range(outs):
                    if o in A.mu.get(key, {}):
                        continue
                    mu = {k: dict(v) for k, v in A.mu.items()}
                    mu.setdefault(key, {})[o] = _norm(p, 1)
                    yield f"insert {key}->{o}", mu


def module_mutants(M):
    """Single-coefficient corruptions of a module's action table, as ``(description, mu)``."""
    B = module_as_category(M)
    z = B.m
    for desc, mu in single_coefficient_mutants(B, B.F.p):
        if any(mu.get(k) != B.mu.get(k) for k in set(mu) | set(B.mu) if k[0][-1] != z):
            continue
        table = {(chain[:-1], a[-1], a[:-1]): dict(out) for (chain, a), out in mu.items() if chain[-1] == z}
        yield desc, table
