"""JSON interchange documents for categories, modules, morphisms and collections.

Every document is an object with ``kind`` and ``version``.  Serialization is
canonical (sorted keys, sorted entry lists, fixed indentation), so
``serialize(parse_document(serialize(x)))`` reproduces the bytes.

Structure-map entries store the inputs as ``(a_1, ..., a_d)`` in ascending
chain order; they encode ``mu(m, a_d, ..., a_1)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

from .dircat import DirectedCategory, fixture
from .errors import FieldParseError, InputError
from .exactlin import Field
from .modcat import AModule, PreMorphism
from .mutate import Collection

VERSION = 1
KINDS = ("category", "module", "morphism", "collection", "job")


@dataclass
class Document:
    kind: str
    value: Any
    version: int = VERSION


class SchemaError(InputError):
    """Document does not follow the schema; ``path`` locates the offending node."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


# ----------------------------------------------------------------------
# fields and coefficients


_GF = re.compile(r"^(?:GF|F)\(?(\d+)\)?$")


def parse_field(spec: Union[str, int, Dict], allow_char2: bool = False) -> Field:
    """``"QQ"``, ``"GF(p)"``/``"Fp"``, a bare prime, or ``{"prime": p, "allow_char2": b}``."""
    try:
        if isinstance(spec, dict):
            if spec.get("prime") is None:
                return Field.rational()
            return Field.prime(int(spec["prime"]), bool(spec.get("allow_char2", allow_char2)))
        if isinstance(spec, int) and not isinstance(spec, bool):
            return Field.prime(spec, allow_char2)
        s = str(spec).strip()
        if s.upper() in ("QQ", "Q"):
            return Field.rational()
        mt = _GF.match(s.upper())
        if mt:
            return Field.prime(int(mt.group(1)), allow_char2)
        if s.isdigit():
            return Field.prime(int(s), allow_char2)
    except InputError as exc:
        raise FieldParseError(str(exc)) from exc
    raise FieldParseError(f"unknown field {spec!r}")


def field_to_json(F: Field):
    if F.p == 2:
        return {"allow_char2": True, "prime": 2}
    return F.name


def _coeff_json(F: Field, c):
    s = F.format(c)
    return int(s) if "/" not in s else s


def _coeff(F: Field, raw, path: str):
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise SchemaError(path, f"coefficient must be an integer or 'p/q' string, got {raw!r}")
    try:
        return F.parse(raw) if isinstance(raw, str) else F(raw)
    except FieldParseError as exc:
        raise FieldParseError(f"{path}: {exc}") from exc


# ----------------------------------------------------------------------
# categories


def category_to_dict(A: DirectedCategory) -> Dict:
    hom = []
    for (i, j) in sorted(A.homs):
        hom.append({"from": i, "to": j,
                    "generators": [{"degree": g.degree, "name": g.name} for g in A.homs[(i, j)]]})
    mu = []
    for (chain, inputs), out in sorted(A.mu.items()):
        for o in sorted(out):
            mu.append({
                "chain": list(chain),
                "coeff": _coeff_json(A.F, out[o]),
                "inputs": [A.hom(chain[l], chain[l + 1])[a].name for l, a in enumerate(inputs)],
                "output": A.hom(chain[0], chain[-1])[o].name,
            })
    d = {"field": field_to_json(A.F), "hom": hom, "kind": "category", "mu": mu,
         "objects": list(range(1, A.m + 1)), "version": VERSION}
    if A.name:
        d["name"] = A.name
    return d


def _need(obj, key, path, typ=None):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing")
    v = obj[key]
    if typ is not None and not isinstance(v, typ):
        raise SchemaError(f"{path}.{key}", f"expected {typ.__name__ if isinstance(typ, type) else typ}")
    return v


def category_from_dict(d: Dict, path: str = "$", field: Optional[Field] = None) -> DirectedCategory:
    F = field or parse_field(_need(d, "field", path))
    objects = _need(d, "objects", path, list)
    m = len(objects)
    if objects != list(range(1, m + 1)):
        raise SchemaError(f"{path}.objects", "objects must be 1..m in order")
    homs = {}
    for n, h in enumerate(_need(d, "hom", path, list)):
        p = f"{path}.hom[{n}]"
        i, j = _need(h, "from", p, int), _need(h, "to", p, int)
        gens = []
        for k, g in enumerate(_need(h, "generators", p, list)):
            gp = f"{p}.generators[{k}]"
            gens.append((_need(g, "name", gp, str), _need(g, "degree", gp, int)))
        if (i, j) in homs:
            raise SchemaError(p, f"hom({i},{j}) listed twice")
        homs[(i, j)] = gens
    skel = DirectedCategory(F, m, homs, {}, d.get("name", ""))
    mu: Dict = {}
    for n, e in enumerate(_need(d, "mu", path, list)):
        p = f"{path}.mu[{n}]"
        chain = tuple(_need(e, "chain", p, list))
        names = _need(e, "inputs", p, list)
        if len(chain) != len(names) + 1 or len(chain) < 2:
            raise SchemaError(p, "chain length must be one more than the number of inputs")
        inputs = []
        for l, nm in enumerate(names):
            inputs.append(_resolve_gen(skel, nm, chain[l], chain[l + 1], f"{p}.inputs[{l}]"))
        out = _resolve_gen(skel, _need(e, "output", p, str), chain[0], chain[-1], f"{p}.output")
        c = _coeff(F, _need(e, "coeff", p), f"{p}.coeff")
        slot = mu.setdefault((chain, tuple(inputs)), {})
        slot[out] = F.add(slot.get(out, F.zero), c)
    return DirectedCategory(F, m, homs, mu, d.get("name", ""))


def _resolve_gen(A: DirectedCategory, name, i, j, path) -> int:
    if not isinstance(name, str):
        raise SchemaError(path, "generator reference must be a name")
    try:
        si, sj, k = A.locate(name)
    except InputError:
        raise SchemaError(path, f"unknown generator {name!r}") from None
    if (si, sj) != (i, j):
        raise SchemaError(path, f"generator {name!r} lies in hom({si},{sj}), not hom({i},{j})")
    return k


# ----------------------------------------------------------------------
# modules


def _unique_labels(M: AModule, j: int) -> bool:
    labels = M.spaces[j].labels
    return len(set(labels)) == len(labels)


def _basis_ref(M: AModule, j: int, idx: int):
    return M.label(j, idx) if _unique_labels(M, j) else idx


def module_to_dict(M: AModule) -> Dict:
    A = M.A
    spaces = []
    for j in range(1, A.m + 1):
        sp = M.spaces[j]
        if len(sp):
            spaces.append({"basis": [{"degree": g, "label": l} for l, g in zip(sp.labels, sp.degrees)],
                           "object": j})
    mu = []
    for (chain, m, inputs), out in sorted(M.mu.items()):
        for o in sorted(out):
            mu.append({
                "chain": list(chain),
                "coeff": _coeff_json(M.F, out[o]),
                "inputs": [A.hom(chain[l], chain[l + 1])[a].name for l, a in enumerate(inputs)],
                "m_in": _basis_ref(M, chain[-1], m),
                "output": _basis_ref(M, chain[0], o),
            })
    d = {"kind": "module", "mu": mu, "over": category_to_dict(A), "spaces": spaces, "version": VERSION}
    if M.name:
        d["name"] = M.name
    return d


def _resolve_basis(spaces, j, ref, path) -> int:
    labels = spaces.get(j, [])
    if isinstance(ref, int) and not isinstance(ref, bool):
        if 0 <= ref < len(labels):
            return ref
        raise SchemaError(path, f"basis index {ref} out of range at Y{j}")
    if isinstance(ref, str):
        hits = [k for k, (l, _) in enumerate(labels) if l == ref]
        if len(hits) == 1:
            return hits[0]
        raise SchemaError(path, f"basis label {ref!r} {'ambiguous' if hits else 'unknown'} at Y{j}")
    raise SchemaError(path, "basis reference must be a label or an index")


def _category_ref(raw, path, field: Optional[Field]) -> DirectedCategory:
    if isinstance(raw, str):
        return fixture(raw, field)
    return category_from_dict(raw, path, field)


def module_from_dict(d: Dict, path: str = "$", A: Optional[DirectedCategory] = None,
                     field: Optional[Field] = None) -> AModule:
    if A is None:
        A = _category_ref(_need(d, "over", path), f"{path}.over", field)
    F = A.F
    spaces: Dict[int, List] = {}
    for n, s in enumerate(_need(d, "spaces", path, list)):
        p = f"{path}.spaces[{n}]"
        j = _need(s, "object", p, int)
        if not (1 <= j <= A.m):
            raise SchemaError(f"{p}.object", f"object {j} out of range")
        if j in spaces:
            raise SchemaError(p, f"space at Y{j} listed twice")
        spaces[j] = [(_need(b, "label", f"{p}.basis[{k}]", str), _need(b, "degree", f"{p}.basis[{k}]", int))
                     for k, b in enumerate(_need(s, "basis", p, list))]
    mu: Dict = {}
    for n, e in enumerate(_need(d, "mu", path, list)):
        p = f"{path}.mu[{n}]"
        chain = tuple(_need(e, "chain", p, list))
        names = _need(e, "inputs", p, list)
        if len(chain) != len(names) + 1:
            raise SchemaError(p, "chain length must be one more than the number of inputs")
        inputs = tuple(_resolve_gen(A, nm, chain[l], chain[l + 1], f"{p}.inputs[{l}]") for l, nm in enumerate(names))
        m = _resolve_basis(spaces, chain[-1], _need(e, "m_in", p), f"{p}.m_in")
        o = _resolve_basis(spaces, chain[0], _need(e, "output", p), f"{p}.output")
        c = _coeff(F, _need(e, "coeff", p), f"{p}.coeff")
        slot = mu.setdefault((chain, m, inputs), {})
        slot[o] = F.add(slot.get(o, F.zero), c)
    return AModule(A, spaces, mu, d.get("name", ""))


# ----------------------------------------------------------------------
# morphisms and collections


def morphism_to_dict(phi: PreMorphism) -> Dict:
    M, N = phi.source, phi.target
    A = M.A
    comps = []
    for (chain, m, inputs, n), c in sorted(phi.comps.items()):
        comps.append({
            "chain": list(chain),
            "coeff": _coeff_json(M.F, c),
            "inputs": [A.hom(chain[l], chain[l + 1])[a].name for l, a in enumerate(inputs)],
            "m_in": _basis_ref(M, chain[-1], m),
            "output": _basis_ref(N, chain[0], n),
        })
    return {"components": comps, "degree": phi.degree, "kind": "morphism",
            "source": module_to_dict(M), "target": module_to_dict(N), "version": VERSION}


def morphism_from_dict(d: Dict, path: str = "$", field: Optional[Field] = None) -> PreMorphism:
    M = module_from_dict(_need(d, "source", path, dict), f"{path}.source", field=field)
    N = module_from_dict(_need(d, "target", path, dict), f"{path}.target", A=M.A)
    msp = {j: list(zip(M.spaces[j].labels, M.spaces[j].degrees)) for j in M.spaces}
    nsp = {j: list(zip(N.spaces[j].labels, N.spaces[j].degrees)) for j in N.spaces}
    comps = {}
    for n, e in enumerate(_need(d, "components", path, list)):
        p = f"{path}.components[{n}]"
        chain = tuple(_need(e, "chain", p, list))
        names = _need(e, "inputs", p, list)
        if len(chain) != len(names) + 1:
            raise SchemaError(p, "chain length must be one more than the number of inputs")
        inputs = tuple(_resolve_gen(M.A, nm, chain[l], chain[l + 1], f"{p}.inputs[{l}]") for l, nm in enumerate(names))
        m = _resolve_basis(msp, chain[-1], _need(e, "m_in", p), f"{p}.m_in")
        o = _resolve_basis(nsp, chain[0], _need(e, "output", p), f"{p}.output")
        key = (chain, m, inputs, o)
        comps[key] = M.F.add(comps.get(key, M.F.zero), _coeff(M.F, _need(e, "coeff", p), f"{p}.coeff"))
    return PreMorphism(M, N, _need(d, "degree", path, int), comps)


def collection_to_dict(coll) -> Dict:
    over = category_to_dict(coll[0].A) if coll else None
    mods = []
    for M in coll:
        md = module_to_dict(M)
        del md["over"]
        mods.append(md)
    return {"kind": "collection", "modules": mods, "over": over, "version": VERSION}


def collection_from_dict(d: Dict, path: str = "$", field: Optional[Field] = None) -> Collection:
    over = _need(d, "over", path)
    mods = _need(d, "modules", path, list)
    if over is None:
        if mods:
            raise SchemaError(f"{path}.over", "missing category for a nonempty collection")
        return Collection([])
    A = _category_ref(over, f"{path}.over", field)
    return Collection([module_from_dict(md, f"{path}.modules[{k}]", A=A) for k, md in enumerate(mods)])


# ----------------------------------------------------------------------
# documents


def to_dict(x) -> Dict:
    if isinstance(x, DirectedCategory):
        return category_to_dict(x)
    if isinstance(x, AModule):
        return module_to_dict(x)
    if isinstance(x, PreMorphism):
        return morphism_to_dict(x)
    if isinstance(x, Collection):
        return collection_to_dict(x)
    if isinstance(x, Document):
        return to_dict(x.value) if x.kind != "job" else {"argv": list(x.value), "kind": "job", "version": x.version}
    raise InputError(f"cannot serialize {type(x).__name__}")


def serialize(x) -> str:
    return json.dumps(to_dict(x), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def parse_document(text: str, field: Optional[Field] = None) -> Document:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(d, dict):
        raise SchemaError("$", "top level must be an object")
    kind = _need(d, "kind", "$", str)
    version = d.get("version", VERSION)
    if version != VERSION:
        raise SchemaError("$.version", f"unsupported version {version!r}")
    if kind == "category":
        return Document(kind, category_from_dict(d, "$", field), version)
    if kind == "module":
        return Document(kind, module_from_dict(d, "$", field=field), version)
    if kind == "morphism":
        return Document(kind, morphism_from_dict(d, "$", field), version)
    if kind == "collection":
        return Document(kind, collection_from_dict(d, "$", field), version)
    if kind == "job":
        argv = _need(d, "argv", "$", list)
        if not all(isinstance(a, str) for a in argv):
            raise SchemaError("$.argv", "arguments must be strings")
        return Document(kind, tuple(argv), version)
    raise SchemaError("$.kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")


def category_equal(A: DirectedCategory, B: DirectedCategory) -> bool:
    return A.F == B.F and A.m == B.m and A.homs == B.homs and A.mu == B.mu


def module_equal(M: AModule, N: AModule) -> bool:
    return category_equal(M.A, N.A) and M.spaces == N.spaces and M.mu == N.mu
