"""Command line front end.

Categories are given as a fixture name (``A2``, ``triangular(3)``,
``A4mu3``, optionally prefixed ``cat``) or a path to a category document.
Modules are expressions: ``S2``, ``P1``, ``0``, ``T(P1,P2)`` (twist),
``X[k]`` (shift), ``random`` (uses ``--seed``) or a path to a module document.

Exit codes: 0 success, 1 an invariant or certification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import maslov as ms
from .dircat import DirectedCategory, fixture, validate_category
from .errors import BeilinsonError, InputError, InvariantViolation
from .exactlin import Field
from .interchange import parse_document, parse_field, serialize
from .modcat import (
    AModule,
    check_module,
    hom_complex,
    is_zero_object,
    iso_type_simple,
    projective_cached,
    projective_tower,
    random_module,
    shift,
    simple_cached,
    twist,
    yoneda,
    zero_module,
)
from .exactlin import cohomology, induced_map, is_isomorphism
from .mutate import BraidWord, Collection, apply_word, half_twist, is_exceptional, projectives_to_simples
from .specseq import edge_is_surjective, edge_map, e1_identification, filtered_hom, grid_totals, morse_e1_grid, spectral_sequence


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# argument resolution


def load_category(ref: str, field: Optional[Field]) -> DirectedCategory:
    if os.path.isfile(ref):
        with open(ref, encoding="utf-8") as fh:
            doc = parse_document(fh.read(), field)
        if doc.kind == "category":
            return doc.value
        if doc.kind == "module":
            return doc.value.A
        raise InputError(f"{ref} is a {doc.kind} document, not a category")
    name = ref[3:] if ref.startswith("cat") else ref
    return fixture(name, field)


class _ModuleParser:
    def __init__(self, A: DirectedCategory, text: str, seed: int):
        self.A, self.s, self.pos, self.seed = A, text.replace(" ", ""), 0, seed

    def parse(self) -> AModule:
        M = self.expr()
        if self.pos != len(self.s):
            raise InputError(f"unexpected text {self.s[self.pos:]!r} in module expression")
        return M

    def expr(self) -> AModule:
        M = self.atom()
        while self.peek("["):
            self.pos += 1
            mt = re.match(r"-?\d+", self.s[self.pos:])
            if not mt:
                raise InputError("shift needs an integer")
            self.pos += mt.end()
            self.expect("]")
            M = shift(M, int(mt.group()))
        return M

    def peek(self, t):
        return self.s.startswith(t, self.pos)

    def expect(self, t):
        if not self.peek(t):
            raise InputError(f"expected {t!r} at position {self.pos} in {self.s!r}")
        self.pos += len(t)

    def atom(self) -> AModule:
        s = self.s[self.pos:]
        for pat, make in ((r"S(\d+)", lambda k: simple_cached(self.A, k)),
                          (r"P(\d+)", lambda k: projective_cached(self.A, k))):
            mt = re.match(pat, s)
            if mt:
                self.pos += mt.end()
                return make(int(mt.group(1)))
        if s.startswith("T("):
            self.pos += 2
            X = self.expr()
            self.expect(",")
            Y = self.expr()
            self.expect(")")
            return twist(X, Y)
        if s.startswith("random"):
            self.pos += len("random")
            return random_module(self.A, random.Random(self.seed))
        if s.startswith("0"):
            self.pos += 1
            return zero_module(self.A)
        raise InputError(f"cannot read module expression {self.s!r}")


def load_module(A: DirectedCategory, ref: str, seed: int, field: Optional[Field]) -> AModule:
    if os.path.isfile(ref):
        with open(ref, encoding="utf-8") as fh:
            doc = parse_document(fh.read(), field)
        if doc.kind != "module":
            raise InputError(f"{ref} is a {doc.kind} document, not a module")
        return doc.value
    return _ModuleParser(A, ref, seed).parse()


# ----------------------------------------------------------------------
# formatting


def _dims(d: Dict[int, int]) -> str:
    return "{" + ", ".join(f"{k}: {v}" for k, v in sorted(d.items())) + "}"


def _grid(dims: Dict[Tuple[int, int], int], cols: Sequence[int]) -> List[str]:
    if not dims:
        return ["  (zero)"]
    ks = sorted({k for _, k in dims}, reverse=True)
    w = max(3, max(len(str(v)) for v in dims.values()) + 1)
    head = " k\\j " + "".join(f"{j:>{w}}" for j in cols)
    lines = [head]
    for k in ks:
        lines.append(f"{k:>4} " + "".join(f"{(dims.get((j, k)) or '.'):>{w}}" for j in cols))
    return lines


def _matrix_rows(M) -> List[List[str]]:
    return [[M.F.format(x) for x in row] for row in M.to_rows()]


# ----------------------------------------------------------------------
# commands; each returns (table lines, struct payload, success)


def cmd_validate(a):
    if os.path.isfile(a.target):
        with open(a.target, encoding="utf-8") as fh:
            doc = parse_document(fh.read(), a.field)
        if doc.kind == "module":
            rep = check_module(doc.value)
            what = "module"
        elif doc.kind == "category":
            rep = validate_category(doc.value)
            what = "category"
        else:
            raise InputError(f"cannot validate a {doc.kind} document")
    else:
        A = load_category(a.target, a.field)
        if a.module:
            rep = check_module(load_module(A, a.module, a.seed, a.field))
            what = "module"
        else:
            rep = validate_category(A)
            what = "category"
    lines = [f"{what}: {rep.summary()}"] + [f"  {v.describe()}" for v in rep.violations]
    struct = {"checked": rep.checked, "pass": rep.passed, "violations": [v.describe() for v in rep.violations]}
    return lines, struct, rep.passed


def cmd_hom(a):
    A = load_category(a.category, a.field)
    M, N = load_module(A, a.source, a.seed, a.field), load_module(A, a.target, a.seed, a.field)
    H = hom_complex(M, N)
    dims = H.dims()
    lines = [f"hom({M.name}, {N.name}): {len(H)} slots, chain dims {_dims(H.space.dims())}",
             f"Hom* dims: {_dims(dims)}"]
    struct = {"chain_dims": {str(k): v for k, v in H.space.dims().items()},
              "hom_dims": {str(k): v for k, v in dims.items()}, "slots": len(H)}
    return lines, struct, True


def cmd_ss(a):
    A = load_category(a.category, a.field)
    M0, M1 = load_module(A, a.source, a.seed, a.field), load_module(A, a.target, a.seed, a.field)
    Fc, H = filtered_hom(M0, M1)
    run = spectral_sequence(Fc, a.max_page)
    ident = e1_identification(M0, M1)
    cols = list(range(1, A.m + 1))
    lines = [f"spectral sequence for Hom*({M0.name}, {M1.name}); column j is Y_(m+1-j)"]
    for r in sorted(run.pages):
        lines.append(f"E{r}:")
        lines += _grid(run.pages[r], cols)
    lines.append("E∞:")
    lines += _grid(run.einf, cols)
    lines.append(f"E∞ totals: {_dims(run.einf_totals())}")
    lines.append(f"Hom dims:  {_dims(run.hom_dims)}")
    ok_conv = run.converged
    ok_e1 = ident.matches and ident.grid() == run.pages.get(1, ident.grid())
    lines.append(f"E1 identification: {'OK' if ok_e1 else 'MISMATCH'}")
    lines.append(f"E∞ total dims = Hom dims: {'OK' if ok_conv else 'MISMATCH'}")
    struct = {
        "columns": cols,
        "converged": ok_conv,
        "e1_identification": ok_e1,
        "einf": [[j, k, d] for (j, k), d in sorted(run.einf.items())],
        "einf_totals": {str(t): d for t, d in run.einf_totals().items()},
        "hom_dims": {str(t): d for t, d in sorted(run.hom_dims.items())},
        "pages": {str(r): [[j, k, d] for (j, k), d in sorted(p.items())] for r, p in sorted(run.pages.items())},
    }
    return lines, struct, ok_conv and ok_e1


def cmd_edge(a):
    A = load_category(a.category, a.field)
    M0, M1 = load_module(A, a.source, a.seed, a.field), load_module(A, a.target, a.seed, a.field)
    res = edge_map(M0, M1)
    lines = [f"edge map Hom(P1,{M1.name}) ⊗ Hom({M0.name},S1) -> Hom({M0.name},{M1.name})"]
    mats = {}
    for g, Mx in sorted(res.cohomology_map.items()):
        lines.append(f"  degree {g}: {Mx.ncols} -> {Mx.nrows}, rank {Mx.rank()}")
        mats[str(g)] = _matrix_rows(Mx)
    lines.append(f"surjective: {'yes' if edge_is_surjective(res) else 'no'}")
    lines.append(f"agrees with composition (sign (-1)^|phi|): {'OK' if res.agrees_with_product else 'MISMATCH'}")
    struct = {"agrees_with_product": res.agrees_with_product, "matrices": mats,
              "pairs_checked": res.pairs_checked, "surjective": edge_is_surjective(res)}
    return lines, struct, res.agrees_with_product


def _describe_collection(coll) -> Tuple[List[str], List[Dict]]:
    lines, items = [], []
    for p, M in enumerate(coll, 1):
        t = iso_type_simple(M)
        coh = {str(j): {str(g): d for g, d in M.cohomology(j).dims.items()} for j in range(1, M.A.m + 1)}
        lines.append(f"  {p}: {M.name}  dim {M.total_dim()}  ≅ {'S' + str(t) if t else '?'}")
        items.append({"cohomology": coh, "dim": M.total_dim(), "name": M.name, "simple": t})
    return lines, items


def _collection(A, refs, a) -> Collection:
    if len(refs) == 1 and os.path.isfile(refs[0]):
        with open(refs[0], encoding="utf-8") as fh:
            doc = parse_document(fh.read(), a.field)
        if doc.kind != "collection":
            raise InputError(f"{refs[0]} is not a collection document")
        return doc.value
    if not refs:
        return Collection([projective_cached(A, k) for k in range(1, A.m + 1)])
    return Collection([load_module(A, r, a.seed, a.field) for r in refs])


def cmd_mutate(a):
    A = load_category(a.category, a.field)
    coll = _collection(A, a.modules, a)
    letters = [int(x) for x in a.word.replace(",", " ").split()] if a.word else [a.index]
    out = apply_word(coll, BraidWord(len(coll), tuple(letters)))
    rep = is_exceptional(out)
    body, items = _describe_collection(out)
    lines = [f"after {BraidWord(len(coll), tuple(letters))}:"] + body
    lines.append(f"exceptional: {'yes' if rep.ok else 'no'}")
    return lines, {"exceptional": rep.ok, "modules": items, "word": list(letters)}, True


def cmd_halftwist(a):
    w = half_twist(a.m)
    if not a.category:
        return [str(w)], {"length": len(w), "word": list(w.letters)}, True
    A = load_category(a.category, a.field)
    if A.m != a.m:
        raise InputError(f"category has {A.m} objects, not {a.m}")
    rep = projectives_to_simples(A)
    body, items = _describe_collection(rep.result)
    lines = [str(w)] + body
    lines.append(f"duality with projectives: {'OK' if rep.duality.ok else 'FAIL'}")
    lines += [f"  {p}" for p in rep.problems]
    lines.append(f"certified (S{A.m},...,S1): {'OK' if rep.ok else 'FAIL'}")
    struct = {"certified": rep.ok, "duality": rep.duality.ok, "modules": items,
              "problems": rep.problems, "word": list(w.letters)}
    return lines, struct, rep.ok


def cmd_yoneda(a):
    A = load_category(a.category, a.field)
    M = load_module(A, a.module, a.seed, a.field)
    f, C, H = yoneda(M, a.k)
    Hm = induced_map(f, cohomology(C), H.cohomology())
    ok = is_isomorphism(Hm)
    lines = [f"H*({M.name}(Y{a.k})) = {_dims(cohomology(C).dims)}",
             f"Hom*(P{a.k}, {M.name}) = {_dims(H.dims())}",
             f"Yoneda map is a quasi-isomorphism: {'yes' if ok else 'no'}"]
    struct = {"hom_dims": {str(k): v for k, v in H.dims().items()},
              "module_dims": {str(k): v for k, v in cohomology(C).dims.items()}, "quasi_iso": ok}
    return lines, struct, ok


def cmd_twist(a):
    A = load_category(a.category, a.field)
    M, N = load_module(A, a.by, a.seed, a.field), load_module(A, a.module, a.seed, a.field)
    T = twist(M, N)
    rep = check_module(T)
    t = iso_type_simple(T)
    coh = {j: T.cohomology(j).dims for j in range(1, A.m + 1)}
    lines = [f"{T.name}: dim {T.total_dim()}, module equations {'OK' if rep.passed else 'FAIL'}"]
    lines += [f"  H*(Y{j}) = {_dims(d)}" for j, d in coh.items()]
    lines.append(f"isomorphic to a simple: {'S' + str(t) if t else 'no'}")
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(serialize(T))
    struct = {"cohomology": {str(j): {str(g): n for g, n in d.items()} for j, d in coh.items()},
              "dim": T.total_dim(), "module_ok": rep.passed, "simple": t}
    return lines, struct, rep.passed


def cmd_tower(a):
    A = load_category(a.category, a.field)
    M = load_module(A, a.module, a.seed, a.field)
    stages = projective_tower(M)
    lines = [f"projective tower of {M.name}:"]
    lines += [f"  stage {n}: twist by P{s.k} -> dim {s.module.total_dim()}" for n, s in enumerate(stages, 1)]
    final = stages[-1].module if stages else M
    zero = is_zero_object(final)
    lines.append(f"ends at zero object: {'yes' if zero else 'no'}")
    return lines, {"stages": [[s.k, s.module.total_dim()] for s in stages], "zero": zero}, zero


def cmd_maslov(a):
    lifts = [Fraction(x) for x in a.values]
    if a.op == "index":
        if len(lifts) % 2:
            raise InputError("index needs two lists of equal length")
        n = len(lifts) // 2
        v = ms.index(ms.SplitLagrangian(lifts[:n]), ms.SplitLagrangian(lifts[n:]))
        return [str(v)], {"index": v}, True
    if a.op == "triangle":
        if len(lifts) % 3 or not lifts:
            raise InputError("triangle needs three lists of equal length")
        n = len(lifts) // 3
        Ls = [ms.SplitLagrangian(lifts[i * n:(i + 1) * n]) for i in range(3)]
        v = ms.triangle_index(*Ls)
        return [str(v)], {"triangle": v}, True
    if a.op == "minus-mu":
        if len(a.values) != 2:
            raise InputError("minus-mu needs n and mu")
        n, mu = int(a.values[0]), int(a.values[1])
        rep = ms.check_minus_mu(n, mu)
        return [str(rep.value)], {"per_factor": list(rep.per_factor), "value": rep.value}, True
    raise InputError(f"unknown maslov operation {a.op!r}")


def cmd_morse(a):
    idx = [int(x) for x in a.indices.split(",") if x.strip()]
    col = {}
    for part in a.column.split(","):
        g, _, d = part.partition(":")
        col[int(g)] = int(d or 1)
    grid = morse_e1_grid(idx, a.n, a.r, col)
    cols = list(range(a.r + 1, a.r + len(idx) + 1))
    lines = _grid(grid, cols) + [f"totals: {_dims(grid_totals(grid))}"]
    struct = {"grid": [[j, k, d] for (j, k), d in grid.items()],
              "totals": {str(t): d for t, d in grid_totals(grid).items()}}
    return lines, struct, True


# ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept rational literals such as -3/10 as positional values
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "struct"), default="table")
    common.add_argument("--field", default=None, help="coefficient field, e.g. GF(5) or QQ")
    common.add_argument("--seed", type=int, default=0)
    p = _Parser(prog="beilinson", description="Directed A∞-categories, modules and spectral sequences.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check a category or module")
    s.add_argument("target")
    s.add_argument("module", nargs="?")
    s.set_defaults(run=cmd_validate)

    for name, fn, helptext in (("hom", cmd_hom, "graded Hom dimensions"),
                               ("ss", cmd_ss, "spectral sequence of the canonical filtration"),
                               ("edge", cmd_edge, "edge homomorphism against composition")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("category")
        s.add_argument("source")
        s.add_argument("target")
        if name == "ss":
            s.add_argument("--max-page", type=int, default=None)
        s.set_defaults(run=fn)

    s = sub.add_parser("mutate", parents=[common], help="mutate a collection (default: projectives)")
    s.add_argument("category")
    s.add_argument("modules", nargs="*")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--index", type=int, default=1)
    g.add_argument("--word", default=None, help="letters such as '2 1 2'")
    s.set_defaults(run=cmd_mutate)

    s = sub.add_parser("halftwist", parents=[common], help="half twist word; certify on a category")
    s.add_argument("m", type=int)
    s.add_argument("--category", default=None)
    s.set_defaults(run=cmd_halftwist)

    s = sub.add_parser("yoneda", parents=[common], help="Yoneda quasi-isomorphism check")
    s.add_argument("category")
    s.add_argument("module")
    s.add_argument("k", type=int)
    s.set_defaults(run=cmd_yoneda)

    s = sub.add_parser("twist", parents=[common], help="twist a module by another")
    s.add_argument("category")
    s.add_argument("by")
    s.add_argument("module")
    s.add_argument("--output", default=None, help="write the twisted module as a document")
    s.set_defaults(run=cmd_twist)

    s = sub.add_parser("tower", parents=[common], help="iterated twists by projectives")
    s.add_argument("category")
    s.add_argument("module")
    s.set_defaults(run=cmd_tower)

    s = sub.add_parser("maslov", parents=[common], help="Maslov index calculus")
    s.add_argument("op", choices=("index", "triangle", "minus-mu"))
    s.add_argument("values", nargs="+")
    s.set_defaults(run=cmd_maslov)

    s = sub.add_parser("morse-e1", parents=[common], help="E1 grid from Morse indices")
    s.add_argument("--indices", required=True, help="comma separated Morse indices")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, default=0)
    s.add_argument("--column", required=True, help="degree:dim pairs, e.g. 3:1")
    s.set_defaults(run=cmd_morse)
    return p


def run_command(argv: Sequence[str]) -> Tuple[int, str]:
    """Run one command; returns ``(exit code, output text)``."""
    parser = build_parser()
    try:
        a = parser.parse_args(list(argv))
        if not getattr(a, "command", None):
            raise UsageError("a subcommand is required: " + ", ".join(sorted(
                ("validate", "hom", "ss", "edge", "mutate", "halftwist", "yoneda", "twist", "tower",
                 "maslov", "morse-e1"))))
        a.field = parse_field(a.field) if a.field else None
        lines, struct, ok = a.run(a)
    except UsageError as exc:
        return 2, f"usage error: {exc}\n"
    except (InputError, ValueError, ZeroDivisionError) as exc:
        return 2, f"input error: {exc}\n"
    except (InvariantViolation, BeilinsonError, ArithmeticError) as exc:
        return 1, f"invariant violation: {exc}\n"
    if a.format == "struct":
        text = json.dumps(struct, sort_keys=True, indent=1, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    return (0 if ok else 1), text


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    (sys.stdout if code == 0 else sys.stderr if code == 2 else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
