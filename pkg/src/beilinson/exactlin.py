"""Exact linear algebra over prime fields and the rationals.

Vectors are sparse ``dict[int, element]`` maps with no stored zeros.  Prime
field elements are plain ints in ``range(p)``; rational elements are
``fractions.Fraction``.  Matrices are stored column-sparse because every
consumer (differentials, chain maps) is assembled one basis image at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import FieldParseError, InputError, InvariantViolation

Vector = Dict[int, object]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class Field:
    """Coefficient field: ``GF(p)`` for an odd prime ``p``, or ``QQ``.

    Characteristic 2 is refused unless ``allow_char2`` is set explicitly.
    """

    p: Optional[int] = None
    allow_char2: bool = False

    def __post_init__(self):
        if self.p is None:
            return
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise InputError(f"field characteristic {self.p!r} is not prime")
        if self.p == 2 and not self.allow_char2:
            raise InputError("characteristic 2 requires allow_char2=True")

    @classmethod
    def prime(cls, p: int, allow_char2: bool = False) -> "Field":
        return cls(p, allow_char2)

    @classmethod
    def rational(cls) -> "Field":
        return cls(None)

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def name(self) -> str:
        return "QQ" if self.p is None else f"GF({self.p})"

    def __repr__(self):
        return self.name

    # element arithmetic ------------------------------------------------

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __call__(self, x):
        """Coerce an int, Fraction or literal string into the field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return self.div(x.numerator % self.p, x.denominator % self.p)
        return int(x) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sign(self, exponent: int):
        """(-1)**exponent as a field element."""
        return self.one if exponent % 2 == 0 else self.neg(self.one)

    def parse(self, text: str):
        """Parse a decimal integer or ``p/q`` literal."""
        s = text.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                q = Fraction(int(num), int(den))
            else:
                q = Fraction(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldParseError(f"cannot parse coefficient {text!r}") from exc
        if self.p is not None and q.denominator % self.p == 0:
            raise FieldParseError(
                f"coefficient {text!r} has a denominator divisible by {self.p}"
            )
        return self(q)

    def format(self, a) -> str:
        if self.p is not None:
            return str(a)
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def random_element(self, rng, span: int = 5):
        if self.p is not None:
            return rng.randrange(self.p)
        return Fraction(rng.randint(-span, span), rng.randint(1, 3))


# ----------------------------------------------------------------------
# sparse vectors


def vec_axpy(F: Field, y: Vector, a, x: Vector) -> None:
    """In place ``y += a * x``."""
    if not a:
        return
    p = F.p
    if p is None:
        for k, v in x.items():
            s = y.get(k, 0) + a * v
            if s:
                y[k] = s
            else:
                y.pop(k, None)
    else:
        for k, v in x.items():
            s = (y.get(k, 0) + a * v) % p
            if s:
                y[k] = s
            else:
                y.pop(k, None)


def vec_scale(F: Field, a, x: Vector) -> Vector:
    if not a:
        return {}
    return {k: F.mul(a, v) for k, v in x.items()}


def vec_add(F: Field, x: Vector, y: Vector) -> Vector:
    out = dict(x)
    vec_axpy(F, out, F.one, y)
    return out


def vec_sub(F: Field, x: Vector, y: Vector) -> Vector:
    out = dict(x)
    vec_axpy(F, out, F.neg(F.one), y)
    return out


# ----------------------------------------------------------------------
# matrices


class Matrix:
    """Column-sparse matrix; ``cols[j]`` is the image of the j-th basis vector."""

    __slots__ = ("F", "nrows", "ncols", "cols")

    def __init__(self, F: Field, nrows: int, ncols: int, cols: Optional[List[Vector]] = None):
        self.F = F
        self.nrows = nrows
        self.ncols = ncols
        if cols is None:
            cols = [{} for _ in range(ncols)]
        if len(cols) != ncols:
            raise InputError("column count mismatch")
        self.cols = cols

    @classmethod
    def from_rows(cls, F: Field, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols: List[Vector] = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise InputError("ragged matrix rows")
            for j, v in enumerate(row):
                v = F(v)
                if v:
                    cols[j][i] = v
        return cls(F, nrows, ncols, cols)

    @classmethod
    def identity(cls, F: Field, n: int) -> "Matrix":
        return cls(F, n, n, [{i: F.one} for i in range(n)])

    @classmethod
    def zero(cls, F: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(F, nrows, ncols)

    def to_rows(self) -> List[list]:
        rows = [[self.F.zero] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def entry(self, i: int, j: int):
        return self.cols[j].get(i, self.F.zero)

    def apply(self, v: Vector) -> Vector:
        out: Vector = {}
        for j, a in v.items():
            vec_axpy(self.F, out, a, self.cols[j])
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.F, self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch")
        return Matrix(self.F, self.nrows, self.ncols,
                      [vec_add(self.F, a, b) for a, b in zip(self.cols, other.cols)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch")
        return Matrix(self.F, self.nrows, self.ncols,
                      [vec_sub(self.F, a, b) for a, b in zip(self.cols, other.cols)])

    def scale(self, a) -> "Matrix":
        return Matrix(self.F, self.nrows, self.ncols, [vec_scale(self.F, a, c) for c in self.cols])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.F})"

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return not any(self.cols)

    def transpose(self) -> "Matrix":
        cols: List[Vector] = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                cols[i][j] = v
        return Matrix(self.F, self.ncols, self.nrows, cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        rpos = {r: k for k, r in enumerate(rows)}
        out = []
        for c in cols:
            out.append({rpos[i]: v for i, v in self.cols[c].items() if i in rpos})
        return Matrix(self.F, len(rows), len(cols), out)

    def rank(self) -> int:
        ech = Echelon(self.F)
        for c in self.cols:
            ech.add(c)
        return len(ech)

    def kernel(self) -> List[Vector]:
        return kernel_basis(self.F, self.cols)

    def image(self) -> List[Vector]:
        ech = Echelon(self.F)
        for c in self.cols:
            ech.add(c)
        return ech.rows_copy()


# ----------------------------------------------------------------------
# echelon bases


class Echelon:
    """Fully reduced echelon basis of a subspace, built incrementally.

    Every stored row has coefficient 1 at its pivot and 0 at every other
    row's pivot, so the coordinate of a vector on row ``i`` is simply its
    entry at ``pivot[i]``.  With ``track=True`` each row also carries its
    expression in terms of the vectors passed to :meth:`add`, numbered in
    the order they were offered (dependent ones included).
    """

    def __init__(self, F: Field, track: bool = False):
        self.F = F
        self.track = track
        self.rows: List[Vector] = []
        self.pivots: List[int] = []
        self.where: Dict[int, int] = {}
        self.combos: List[Vector] = []
        self.offered = 0

    def __len__(self):
        return len(self.rows)

    def rows_copy(self) -> List[Vector]:
        return [dict(r) for r in self.rows]

    def reduce(self, v: Vector) -> Tuple[Vector, Dict[int, object]]:
        """Return ``(residual, coords)`` with ``v = sum coords[i]*rows[i] + residual``."""
        F = self.F
        coords = {}
        for col, a in v.items():
            i = self.where.get(col)
            if i is not None:
                coords[i] = a
        res = dict(v)
        neg = F.neg
        for i, a in coords.items():
            vec_axpy(F, res, neg(a), self.rows[i])
        return res, coords

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)[0]

    def express(self, coords: Dict[int, object]) -> Vector:
        """Translate row coordinates into coordinates over offered vectors."""
        out: Vector = {}
        for i, a in coords.items():
            vec_axpy(self.F, out, a, self.combos[i])
        return out

    def add(self, v: Vector):
        """Offer ``v``.  Returns ``None`` if it was independent; otherwise the
        dependency as coordinates over previously offered vectors."""
        F = self.F
        tag = self.offered
        self.offered += 1
        res, coords = self.reduce(v)
        if not res:
            return self.express(coords) if self.track else {}
        piv = min(res)
        inv = F.inv(res[piv])
        row = vec_scale(F, inv, res)
        if self.track:
            combo = {tag: F.one}
            vec_axpy(F, combo, F.neg(F.one), self.express(coords))
            combo = vec_scale(F, inv, combo)
        for k, other in enumerate(self.rows):
            a = other.get(piv)
            if a:
                vec_axpy(F, other, F.neg(a), row)
                if self.track:
                    vec_axpy(F, self.combos[k], F.neg(a), combo)
        self.where[piv] = len(self.rows)
        self.rows.append(row)
        self.pivots.append(piv)
        if self.track:
            self.combos.append(combo)
        return None


def kernel_basis(F: Field, cols: Sequence[Vector], index: Optional[Sequence[int]] = None) -> List[Vector]:
    """Kernel of the map whose column images are ``cols``.

    ``index`` names the domain coordinate of each column (defaults to
    ``range(len(cols))``).  Each kernel vector has a distinct leading
    coordinate with coefficient 1, so the output is a reduced basis.
    """
    if index is None:
        index = range(len(cols))
    index = list(index)
    ech = Echelon(F, track=True)
    out = []
    for k, c in enumerate(cols):
        dep = ech.add(c)
        if dep is not None:
            v = {index[k]: F.one}
            for t, a in dep.items():
                vec_axpy(F, v, F.neg(a), {index[t]: F.one})
            out.append(v)
    return out


def solve_linear(A: Matrix, b: Vector) -> Optional[Vector]:
    """A solution of ``A x = b`` or ``None`` if the system is inconsistent.

    ``b`` may be a sparse dict or a dense sequence of length ``A.nrows``.
    The particular solution is determined by first-nonzero pivoting.
    """
    F = A.F
    if not isinstance(b, dict):
        if len(b) != A.nrows:
            raise InputError(f"right-hand side has length {len(b)}, expected {A.nrows}")
        b = {i: F(v) for i, v in enumerate(b) if F(v)}
    elif b and max(b) >= A.nrows:
        raise InputError("right-hand side index out of range")
    ech = Echelon(F, track=True)
    for c in A.cols:
        ech.add(c)
    res, coords = ech.reduce(b)
    if res:
        return None
    return ech.express(coords)


def dense(F: Field, v: Vector, n: int) -> list:
    out = [F.zero] * n
    for k, a in v.items():
        out[k] = a
    return out


# ----------------------------------------------------------------------
# graded spaces and chain complexes


@dataclass(frozen=True)
class GradedSpace:
    """Finite graded vector space given by an ordered, labelled basis."""

    labels: Tuple[str, ...] = ()
    degrees: Tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise InputError("label count differs from degree count")

    @classmethod
    def from_basis(cls, basis: Iterable[Tuple[str, int]]) -> "GradedSpace":
        basis = list(basis)
        return cls(tuple(str(b[0]) for b in basis), tuple(int(b[1]) for b in basis))

    @classmethod
    def from_dims(cls, dims: Dict[int, int], prefix: str = "x") -> "GradedSpace":
        labels, degrees = [], []
        for deg in sorted(dims):
            for k in range(dims[deg]):
                labels.append(f"{prefix}{deg}_{k}")
                degrees.append(deg)
        return cls(tuple(labels), tuple(degrees))

    def __len__(self):
        return len(self.degrees)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def indices_in_degree(self, deg: int) -> List[int]:
        return [i for i, d in enumerate(self.degrees) if d == deg]

    def by_degree(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, d in enumerate(self.degrees):
            out.setdefault(d, []).append(i)
        return dict(sorted(out.items()))


@dataclass(frozen=True)
class ChainComplex:
    """Cochain complex on a graded space with a degree +1 differential."""

    F: Field
    space: GradedSpace
    d: Matrix
    check: bool = dc_field(default=True, compare=False)

    def __post_init__(self):
        n = len(self.space)
        if self.d.shape != (n, n):
            raise InputError(f"differential shape {self.d.shape} does not match dim {n}")
        if self.check:
            degs = self.space.degrees
            for j, col in enumerate(self.d.cols):
                for i in col:
                    if degs[i] != degs[j] + 1:
                        raise InvariantViolation(
                            f"differential maps degree {degs[j]} to degree {degs[i]}"
                        )
            if not (self.d @ self.d).is_zero():
                raise InvariantViolation("d∘d != 0")

    @classmethod
    def from_blocks(cls, F: Field, dims: Dict[int, int], blocks: Dict[int, Matrix]) -> "ChainComplex":
        """Build from per-degree matrices ``blocks[g]: C^g -> C^(g+1)``."""
        space = GradedSpace.from_dims(dims)
        start, pos = {}, 0
        for g in sorted(dims):
            start[g] = pos
            pos += dims[g]
        d = Matrix(F, pos, pos)
        for g, blk in blocks.items():
            if blk.shape != (dims.get(g + 1, 0), dims.get(g, 0)):
                raise InputError(f"block for degree {g} has shape {blk.shape}")
            for j, col in enumerate(blk.cols):
                d.cols[start[g] + j] = {start[g + 1] + i: v for i, v in col.items()}
        return cls(F, space, d)

    def __len__(self):
        return len(self.space)


class CohomologyResult:
    """Cohomology of a :class:`ChainComplex` with explicit representatives.

    ``reps[g]`` are cocycles (sparse vectors in the complex's basis) spanning
    a complement of the coboundaries inside the cocycles; they are the
    reduced residues of the kernel basis modulo coboundaries.
    """

    def __init__(self, C: ChainComplex):
        self.complex = C
        F = self.F = C.F
        self._by_deg = C.space.by_degree()
        self.dims: Dict[int, int] = {}
        self.reps: Dict[int, List[Vector]] = {}
        self._ech: Dict[int, Tuple[Echelon, int]] = {}
        self._proj: Dict[int, Matrix] = {}
        for g, idx in self._by_deg.items():
            Z = kernel_basis(F, [C.d.cols[i] for i in idx], idx)
            ech = Echelon(F, track=True)
            for i in self._by_deg.get(g - 1, []):
                ech.add(C.d.cols[i])
            nb = ech.offered
            reps = []
            for z in Z:
                res, _ = ech.reduce(z)
                if res:
                    ech.add(res)
                    reps.append(res)
            self._ech[g] = (ech, nb)
            self.reps[g] = reps
            if reps:
                self.dims[g] = len(reps)

    def dim(self, g: int) -> int:
        return self.dims.get(g, 0)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_acyclic(self) -> bool:
        return not self.dims

    def coordinates(self, v: Vector, g: int) -> list:
        """Class of the degree-``g`` cocycle ``v`` in the representative basis."""
        if g not in self._ech:
            if v:
                raise InvariantViolation(f"vector outside the complex in degree {g}")
            return []
        ech, nb = self._ech[g]
        res, coords = ech.reduce(v)
        if res:
            raise InvariantViolation(f"vector is not a cocycle in degree {g}")
        combo = ech.express(coords)
        return [combo.get(nb + r, self.F.zero) for r in range(len(self.reps[g]))]

    def is_coboundary(self, v: Vector, g: int) -> bool:
        return not any(self.coordinates(v, g))

    def projection_matrix(self, g: int) -> Matrix:
        """Matrix ``C^g -> H^g`` vanishing on a fixed complement of the cocycles."""
        if g in self._proj:
            return self._proj[g]
        F = self.F
        idx = self._by_deg.get(g, [])
        reps = self.reps.get(g, [])
        ech = Echelon(F, track=True)
        for i in self._by_deg.get(g - 1, []):
            ech.add(self.complex.d.cols[i])
        nb = ech.offered
        for r in reps:
            ech.add(r)
        for i in idx:
            ech.add({i: F.one})
        cols = []
        for i in idx:
            _, coords = ech.reduce({i: F.one})
            combo = ech.express(coords)
            cols.append({r: combo[nb + r] for r in range(len(reps)) if combo.get(nb + r)})
        P = Matrix(F, len(reps), len(idx), cols)
        self._proj[g] = P
        return P

    def inclusion_matrix(self, g: int) -> Matrix:
        idx = self._by_deg.get(g, [])
        pos = {i: k for k, i in enumerate(idx)}
        cols = [{pos[i]: a for i, a in r.items()} for r in self.reps.get(g, [])]
        return Matrix(self.F, len(idx), len(cols), cols)


def cohomology(C: ChainComplex) -> CohomologyResult:
    return CohomologyResult(C)


def _check_chain_map(f: Matrix, C: ChainComplex, D: ChainComplex) -> None:
    if f.shape != (len(D), len(C)):
        raise InputError(f"chain map shape {f.shape} does not match {len(D)}x{len(C)}")
    cd, dd = C.space.degrees, D.space.degrees
    for j, col in enumerate(f.cols):
        for i in col:
            if dd[i] != cd[j]:
                raise InvariantViolation("map does not preserve degree")
    if (f @ C.d) != (D.d @ f):
        raise InvariantViolation("map does not commute with the differentials")


def induced_map(f: Matrix, src: CohomologyResult, dst: CohomologyResult) -> Dict[int, Matrix]:
    """Matrices of ``H(f)`` per degree in the representative bases."""
    _check_chain_map(f, src.complex, dst.complex)
    out = {}
    degs = sorted(set(src.dims) | set(dst.dims))
    for g in degs:
        cols = []
        for r in src.reps.get(g, []):
            img = f.apply(r)
            c = dst.coordinates(img, g)
            cols.append({k: a for k, a in enumerate(c) if a})
        out[g] = Matrix(src.F, dst.dim(g), src.dim(g), cols)
    return out


def is_isomorphism(H: Dict[int, Matrix]) -> bool:
    return all(M.nrows == M.ncols == M.rank() for M in H.values())


def is_quasi_isomorphism(f: Matrix, C: ChainComplex, D: ChainComplex) -> bool:
    return is_isomorphism(induced_map(f, cohomology(C), cohomology(D)))
