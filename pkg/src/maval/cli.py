"""Command-line front door: validate a JSON payload, dispatch, write a deterministic report.

Exit codes: 0 success, 2 malformed input, 3 computation error, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

import jsonschema
import numpy as np

from . import __version__
from .convex_functions import AffineMap, from_json, min_if_convex, pointwise_max, to_json, valuation_pair
from .exact_poly import PolynomialError, format_polynomial, parse_polynomial
from .ma_operators import InvariantViolation, LocalFunctional, discrete_ma, invariant_registry, mixed_ma_discrete
from .minor_spaces import MatrixVariableLayout, hessian_minor_space, minor_basis, module_layout, squared_minor_basis
from .serialize import num, parse_rat, rat, spec_hash
from .weights import weight_from_json, weight_to_json

# ---------------------------------------------------------------------------
# schemas

RAT = {"anyOf": [{"type": "integer"}, {"type": "string", "pattern": r"^[+-]?\d+(/\d+)?$"}]}
VEC = {"type": "array", "items": {"$ref": "#/$defs/rat"}}
BOX = {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/rat"}, "minItems": 2, "maxItems": 2}}
CPLX = {"anyOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}

FUNCTION = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["max_affine", "quadratic", "support", "combo"]}},
    "allOf": [
        {"if": {"properties": {"type": {"const": "max_affine"}}},
         "then": {"required": ["pieces"], "properties": {"pieces": {
             "type": "array", "minItems": 1,
             "items": {"type": "object", "required": ["a", "b"],
                       "properties": {"a": {"$ref": "#/$defs/vec"}, "b": {"$ref": "#/$defs/rat"}}}}}}},
        {"if": {"properties": {"type": {"const": "quadratic"}}},
         "then": {"required": ["A"], "properties": {"A": {"type": "array", "items": {"$ref": "#/$defs/vec"}},
                                                     "l": {"$ref": "#/$defs/vec"}, "c": {"$ref": "#/$defs/rat"}}}},
        {"if": {"properties": {"type": {"const": "support"}}},
         "then": {"required": ["vertices"], "properties": {
             "vertices": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/vec"}},
             "shift": {"$ref": "#/$defs/vec"}}}},
        {"if": {"properties": {"type": {"const": "combo"}}},
         "then": {"required": ["terms"], "properties": {"terms": {
             "type": "array", "minItems": 1,
             "items": {"type": "object", "required": ["w", "f"],
                       "properties": {"w": {"$ref": "#/$defs/rat"}, "f": {"$ref": "#/$defs/function"}}}}}}},
    ],
}
WEIGHT = {"type": "object", "required": ["type"],
          "properties": {"type": {"enum": ["constant", "polynomial", "bump", "product", "shifted", "sum"]}}}
FUNCTIONAL = {
    "type": "object",
    "required": ["n", "terms"],
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "terms": {"type": "array", "items": {"type": "object", "required": ["P"],
                                             "properties": {"P": {"type": "string"}, "weight": {"$ref": "#/$defs/weight"}}}},
    },
}
DEFS = {"rat": RAT, "vec": VEC, "box": BOX, "complex": CPLX, "function": FUNCTION, "weight": WEIGHT,
        "functional": FUNCTIONAL}

NK = {"n": {"type": "integer", "minimum": 1, "maximum": 4}, "k": {"type": "integer", "minimum": 0, "maximum": 4}}


def _obj(required, props):
    return {"type": "object", "required": required, "properties": props}


SCHEMAS = {
    "minors": _obj(["n", "k"], {**NK, "kind": {"enum": ["M2_k", "M_k", "hessian"]}}),
    "divide": _obj(["n", "k", "F"], {**NK, "F": {"type": "string"}, "basis": {"type": "array", "items": {"type": "string"}}}),
    "membership": _obj(["n", "k", "F"], {**NK, "F": {"type": "string"}, "trials": {"type": "integer", "minimum": 1}}),
    "ma": _obj(["function"], {"function": {"$ref": "#/$defs/function"}, "window": {"$ref": "#/$defs/box"}}),
    "mixed-ma": _obj(["functions"], {"functions": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/function"}},
                                     "window": {"$ref": "#/$defs/box"},
                                     "path": {"enum": ["both", "volumes", "polarization"]}}),
    "valuation-check": {"type": "object", "properties": {
        "f": {"$ref": "#/$defs/function"}, "h": {"$ref": "#/$defs/function"}, "window": {"$ref": "#/$defs/box"},
        "random": _obj(["n", "pairs"], {"n": {"type": "integer", "minimum": 1, "maximum": 3},
                                         "pairs": {"type": "integer", "minimum": 1}})},
        "anyOf": [{"required": ["f", "h"]}, {"required": ["random"]}]},
    "homog": _obj(["functional", "f", "box"], {
        "functional": {"$ref": "#/$defs/functional"}, "f": {"$ref": "#/$defs/function"},
        "probe": {"$ref": "#/$defs/weight"}, "box": {"$ref": "#/$defs/box"},
        "nodes": {"type": "integer", "minimum": 2, "maximum": 256}}),
    "translative": _obj(["functional", "f", "ell", "box"], {
        "functional": {"$ref": "#/$defs/functional"}, "f": {"$ref": "#/$defs/function"},
        "ell": _obj(["y"], {"y": {"$ref": "#/$defs/vec"}, "c": {"$ref": "#/$defs/rat"}}),
        "d": {"type": "integer", "minimum": 0},
        "probe": {"$ref": "#/$defs/weight"}, "box": {"$ref": "#/$defs/box"},
        "nodes": {"type": "integer", "minimum": 2, "maximum": 256}}),
    "qpoly": _obj(["n", "k", "P"], {**NK, "P": {"type": "string"}, "normalization": {"$ref": "#/$defs/rat"}}),
    "eval-maps": _obj(["n", "d"], {"n": {"type": "integer", "minimum": 1, "maximum": 3},
                                   "d": {"type": "integer", "minimum": 0, "maximum": 2},
                                   "strict": {"type": "boolean"}}),
    "reconstruct": _obj(["functional", "test_f", "probe", "box"], {
        "functional": {"$ref": "#/$defs/functional"}, "test_f": {"$ref": "#/$defs/function"},
        "probe": {"$ref": "#/$defs/weight"}, "box": {"$ref": "#/$defs/box"},
        "d": {"type": "integer", "minimum": 0, "maximum": 2},
        "nodes": {"type": "integer", "minimum": 2, "maximum": 256},
        "moment_degree": {"type": "integer", "minimum": 0, "maximum": 3}}),
    "fourier": _obj(["weight", "P", "k", "points"], {
        "weight": {"$ref": "#/$defs/weight"}, "P": {"type": "string"}, "k": {"type": "integer", "minimum": 0},
        "points": {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/complex"}}}},
        "path": {"enum": ["product", "polarization", "both"]}}),
    "pws-report": _obj(["weight", "P", "k", "A"], {
        "weight": {"$ref": "#/$defs/weight"}, "P": {"type": "string"}, "k": {"type": "integer", "minimum": 0},
        "A": {"$ref": "#/$defs/box"}, "N": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "m": {"type": "integer", "minimum": 2, "maximum": 101}, "radius": {"type": "number", "exclusiveMinimum": 0}}),
    "density": {"type": "object", "required": ["op"], "properties": {"op": {"enum": ["spanning_rank", "transport", "average"]}},
                "allOf": [
                    {"if": {"properties": {"op": {"const": "spanning_rank"}}},
                     "then": {"required": ["n", "k", "family"], "properties": {
                         **NK, "family": {"type": "array", "items": {"$ref": "#/$defs/function"}},
                         "g_samples": {"type": "integer", "minimum": 0}}}},
                    {"if": {"properties": {"op": {"const": "transport"}}},
                     "then": {"required": ["n", "P", "g"], "properties": {
                         **NK, "P": {"type": "string"}, "g": {"type": "array", "items": {"$ref": "#/$defs/vec"}},
                         "kind": {"enum": ["invariant", "q"]}}}},
                    {"if": {"properties": {"op": {"const": "average"}}},
                     "then": {"required": ["functional", "K", "eps"], "properties": {
                         "functional": {"$ref": "#/$defs/functional"}, "K": {"type": "integer", "minimum": 0},
                         "eps": {"$ref": "#/$defs/rat"}, "window": {"$ref": "#/$defs/box"}}}},
                ]},
}
SCHEMAS["decompose"] = SCHEMAS["homog"]


class InputError(ValueError):
    """Schema or parse failure; ``path`` points at the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def validate(command: str, payload):
    schema = dict(SCHEMAS[command])
    schema["$defs"] = DEFS
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(payload), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        # the deepest error is usually the most specific one
        err = max(errors, key=lambda e: len(e.absolute_path))
        path = "/" + "/".join(str(p) for p in err.absolute_path)
        raise InputError(path, err.message)


# ---------------------------------------------------------------------------
# parsing helpers


def _box(b):
    return None if b is None else tuple((parse_rat(lo), parse_rat(hi)) for lo, hi in b)


def _functional(obj):
    n = obj["n"]
    reg = invariant_registry(n)
    terms = []
    for t in obj["terms"]:
        w = weight_from_json(t.get("weight", {"type": "constant", "n": n, "value": "1"}), n)
        terms.append((w, parse_polynomial(t["P"], reg)))
    return LocalFunctional(n, tuple(terms))


def _cplx(v):
    return complex(v) if isinstance(v, (int, float)) else complex(v[0], v[1])


def _poly_list(polys):
    return [format_polynomial(p) for p in polys]


# ---------------------------------------------------------------------------
# commands


def cmd_minors(p, ctx):
    n, k, kind = p["n"], p["k"], p.get("kind", "M2_k")
    if k > n:
        raise InputError("/k", f"k={k} exceeds n={n}")
    basis = {"M2_k": squared_minor_basis, "M_k": minor_basis}.get(kind)
    B = basis(n, k) if basis else hessian_minor_space(n)
    return {"n": n, "k": k, "kind": kind, "dimension": B.dimension, "generators": _poly_list(B.generators)}


def _module_poly(text, n, k, where):
    try:
        return parse_polynomial(text, module_layout(n, k).registry)
    except PolynomialError as exc:
        raise InputError(where, str(exc)) from exc


def cmd_divide(p, ctx):
    from .module_division import build_groebner, decompose_in_m2k, divide

    n, k = p["n"], p["k"]
    F = _module_poly(p["F"], n, k, "/F")
    if "basis" in p:
        gens = [_module_poly(t, n, k, f"/basis/{i}") for i, t in enumerate(p["basis"])]
    else:
        gens = list(squared_minor_basis(n, k).generators)
    gb = build_groebner(gens, n, k)
    g, rem = divide(F, gb)
    out = {"groebner": _poly_list(gb.generators), "g": _poly_list(g), "remainder": format_polynomial(rem),
           "member": rem.is_zero()}
    if rem.is_zero() and "basis" not in p:
        out["coefficients"] = _poly_list(decompose_in_m2k(F, n, k))
    return out


def cmd_membership(p, ctx):
    from .module_division import membership_by_restriction

    n, k = p["n"], p["k"]
    F = _module_poly(p["F"], n, k, "/F")
    trials = p.get("trials", 3)
    return {"member": membership_by_restriction(F, n, k, trials=trials, seed=ctx.seed), "trials": trials, "seed": ctx.seed}


def _measure_json(m):
    out = m.to_json()
    out["total_mass"] = rat(m.total_mass)
    return out


def cmd_ma(p, ctx):
    f = from_json(p["function"])
    return _measure_json(discrete_ma(f, _box(p.get("window"))))


def cmd_mixed_ma(p, ctx):
    fs = [from_json(x) for x in p["functions"]]
    path = p.get("path", "both")
    return {"path": path, **_measure_json(mixed_ma_discrete(fs, _box(p.get("window")), path=path))}


def _check_pair(f, h, window):
    lo = min_if_convex(f, h)
    if lo is None:
        raise ValueError("min(f, h) is not convex")
    hi = pointwise_max(f, h)
    left = discrete_ma(hi, window) + discrete_ma(lo, window)
    right = discrete_ma(f, window) + discrete_ma(h, window)
    return left == right, left


def cmd_valuation_check(p, ctx):
    window = _box(p.get("window"))
    if "random" in p:
        rng = random.Random(ctx.seed)
        n, count = p["random"]["n"], p["random"]["pairs"]
        bad = []
        for i in range(count):
            f, h, _, _ = valuation_pair(rng, n)
            ok, _ = _check_pair(f, h, window)
            if not ok:
                bad.append({"index": i, "f": to_json(f), "h": to_json(h)})
        if bad:
            raise InvariantViolation(f"valuation identity fails on {len(bad)} of {count} pairs: {json.dumps(bad[0])}")
        return {"pairs": count, "n": n, "seed": ctx.seed, "holds": True}
    f, h = from_json(p["f"]), from_json(p["h"])
    ok, left = _check_pair(f, h, window)
    if not ok:
        raise InvariantViolation("MA(max) + MA(min) differs from MA(f) + MA(h)")
    return {"holds": True, "sum": _measure_json(left)}


def _probe(p, n):
    from .weights import ConstantWeight

    return weight_from_json(p["probe"], n) if "probe" in p else ConstantWeight(n)


def cmd_homog(p, ctx):
    from .valuation_lab import homogeneous_components

    psi = _functional(p["functional"])
    comps = homogeneous_components(psi, from_json(p["f"]), _probe(p, psi.n), _box(p["box"]), nodes=p.get("nodes", 32))
    return {"components": [num(c) for c in comps], "degree_bound": psi.n + psi.degree}


def cmd_translative(p, ctx):
    from .valuation_lab import translative_components

    psi = _functional(p["functional"])
    ell = AffineMap(tuple(parse_rat(v) for v in p["ell"]["y"]), parse_rat(p["ell"].get("c", "0")))
    comps = translative_components(psi, from_json(p["f"]), ell, _probe(p, psi.n), _box(p["box"]), d=p.get("d"),
                                   nodes=p.get("nodes", 32))
    return {"components": [num(c) for c in comps]}


def cmd_qpoly(p, ctx):
    from .valuation_lab import q_polynomial

    n, k = p["n"], p["k"]
    P = parse_polynomial(p["P"], invariant_registry(n))
    norm = parse_rat(p["normalization"]) if "normalization" in p else None
    Q = q_polynomial(P, k, n, normalization=norm)
    return {"Q": format_polynomial(Q.poly), "coordinates": [rat(c) for c in Q.coordinates],
            "basis": _poly_list(squared_minor_basis(n, k).generators)}


def cmd_eval_maps(p, ctx):
    from .valuation_lab import build_evaluation_maps, invariant_basis

    n, d = p["n"], p["d"]
    basis = invariant_basis(n, d)
    maps = build_evaluation_maps(basis, n, strict=p.get("strict", False))
    return {
        "n": n, "d": d, "basis": _poly_list(basis),
        "complete": all(E is not None for E in maps),
        "unreachable": [format_polynomial(P) for P, E in zip(basis, maps) if E is None],
        "maps": [E.to_json() for E in maps if E is not None],
    }


def cmd_reconstruct(p, ctx):
    from .valuation_lab import build_evaluation_maps, invariant_basis, reconstruct

    psi = _functional(p["functional"])
    d = p.get("d", psi.degree)
    maps = build_evaluation_maps(invariant_basis(psi.n, d), psi.n, strict=True)
    rep = reconstruct(psi, maps, from_json(p["test_f"]), weight_from_json(p["probe"], psi.n), _box(p["box"]),
                      nodes=p.get("nodes", 32), moment_degree=p.get("moment_degree", 0))
    if rep.residual > ctx.tol * max(1.0, abs(rep.value)):
        raise InvariantViolation(f"reconstruction residual {rep.residual} exceeds tolerance {ctx.tol}")
    return {"tol": ctx.tol, **rep.to_json()}


def cmd_fourier(p, ctx):
    from .fourier_pws import as_point, f_hat_polarization, f_hat_product, load_normalization
    from .valuation_lab import q_polynomial

    phi = weight_from_json(p["weight"])
    n, k = phi.n, p["k"]
    P = parse_polynomial(p["P"], invariant_registry(n))
    path = p.get("path", "product")
    Q = q_polynomial(P, k, n, normalization=load_normalization(n, k)) if path != "polarization" else None
    out = []
    for i, pt in enumerate(p["points"]):
        W = as_point(np.array([[_cplx(v) for v in row] for row in pt]), n, k + 1)
        row = {}
        if path in ("product", "both"):
            row["product"] = num(f_hat_product(phi, Q, W))
        if path in ("polarization", "both"):
            row["polarization"] = num(f_hat_polarization(phi, P, k, W))
        if path == "both":
            a, b = complex(*row["product"]), complex(*row["polarization"])
            rel = abs(a - b) / max(abs(b), 1e-300)
            row["relative_error"] = rel
            if rel > ctx.tol and abs(a - b) > ctx.tol:
                raise InvariantViolation(f"product and polarization paths disagree at point {i}: {rel}")
        out.append(row)
    return {"tol": ctx.tol, "values": out}


def cmd_pws_report(p, ctx):
    from .fourier_pws import pws_decay_report, reports_csv

    phi = weight_from_json(p["weight"])
    P = parse_polynomial(p["P"], invariant_registry(phi.n))
    reps = [pws_decay_report(phi, P, p["k"], _box(p["A"]), N, seed=ctx.seed, m=p.get("m", 21),
                             radius=p.get("radius", 10.0)) for N in p.get("N", [0, 1, 2])]
    if ctx.csv:
        with open(ctx.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(reports_csv(reps))
    return {"reports": [r.to_json() for r in reps], "csv": reports_csv(reps)}


def cmd_density(p, ctx):
    from . import density_experiments as de

    op = p["op"]
    if op == "spanning_rank":
        n, k = p["n"], p["k"]
        fam = [from_json(x) for x in p["family"]]
        rep = de.spanning_rank(fam, n, k, g_samples=p.get("g_samples"), seed=ctx.seed,
                               describe=[x["type"] for x in p["family"]])
        if not rep.dichotomy:
            raise InvariantViolation(f"rank {rep.rank} is neither 0 nor N = {rep.N}")
        return rep.to_json()
    if op == "transport":
        n = p["n"]
        g = [[parse_rat(v) for v in row] for row in p["g"]]
        if p.get("kind", "invariant") == "q":
            reg = MatrixVariableLayout(n, p.get("k", 1)).registry
        else:
            reg = invariant_registry(n)
        return {"P": format_polynomial(de.gl_transport(parse_polynomial(p["P"], reg), g))}
    psi = _functional(p["functional"])
    rep = de.translation_average(psi, p["K"], parse_rat(p["eps"]), window=_box(p.get("window")))
    return {"weights": [weight_to_json(w) if not isinstance(w, de.RiemannSumWeight) else
                        {"type": "riemann_sum", "base": weight_to_json(w.base), "eps": rat(w.eps), "K": w.K}
                        for w, _ in rep.functional.terms], **rep.to_json()}


COMMANDS = {
    "minors": cmd_minors, "divide": cmd_divide, "membership": cmd_membership, "ma": cmd_ma,
    "mixed-ma": cmd_mixed_ma, "valuation-check": cmd_valuation_check, "homog": cmd_homog,
    "decompose": cmd_homog, "translative": cmd_translative, "qpoly": cmd_qpoly, "eval-maps": cmd_eval_maps,
    "reconstruct": cmd_reconstruct, "fourier": cmd_fourier, "pws-report": cmd_pws_report, "density": cmd_density,
}


# ---------------------------------------------------------------------------
# self tests: each runs the trivial examples of its module


def _st_minors():
    return [("dim M2_1 (n=2) = 3", cmd_minors({"n": 2, "k": 1}, None)["dimension"] == 3),
            ("dim M2_2 (n=2) = 1", cmd_minors({"n": 2, "k": 2}, None)["dimension"] == 1),
            ("dim M2_0 = 1", cmd_minors({"n": 3, "k": 0}, None)["dimension"] == 1)]


def _st_divide():
    r = cmd_divide({"n": 2, "k": 1, "F": "w_1_1^2*z_1"}, None)
    r0 = cmd_divide({"n": 2, "k": 1, "F": "0"}, None)
    return [("member divides to zero", r["member"]), ("0 has remainder 0", r0["remainder"] == "0")]


def _st_membership(seed):
    ctx = Context(seed=seed)
    return [("w_1_1^2 is a member", cmd_membership({"n": 2, "k": 1, "F": "w_1_1^2"}, ctx)["member"]),
            ("w_1_1 is not", not cmd_membership({"n": 2, "k": 1, "F": "w_1_1"}, ctx)["member"])]


def _abs2():
    return {"type": "max_affine", "pieces": [{"a": [a, b], "b": "0"} for a in ("1", "-1") for b in ("1", "-1")]}


def _st_ma():
    r = cmd_ma({"function": _abs2(), "window": [["-1", "1"], ["-1", "1"]]}, None)
    aff = cmd_ma({"function": {"type": "max_affine", "pieces": [{"a": ["1", "2"], "b": "3"}]}}, None)
    return [("|x1|+|x2| has one atom of weight 4", r["atoms"] == [{"x": ["0", "0"], "w": "4"}]),
            ("affine functions have no atoms", aff["atoms"] == [])]


def _st_mixed():
    sq = {"type": "support", "vertices": [["0", "0"], ["1", "0"], ["0", "1"], ["1", "1"]]}
    dia = {"type": "support", "vertices": [["1", "0"], ["0", "1"], ["-1", "0"], ["0", "-1"]]}
    r = cmd_mixed_ma({"functions": [sq, dia]}, None)
    d = cmd_mixed_ma({"functions": [_abs2(), _abs2()]}, None)
    return [("V(square, diamond) = 2", r["total_mass"] == "2"), ("diagonal recovers MA", d["total_mass"] == "4")]


def _st_valuation(seed):
    r = cmd_valuation_check({"random": {"n": 2, "pairs": 5}}, Context(seed=seed))
    return [("valuation identity on 5 random pairs", r["holds"])]


def _st_homog():
    fn = {"n": 1, "terms": [{"P": "s_1_1"}]}
    q = {"type": "quadratic", "A": [["1"]], "l": ["0"], "c": "0"}
    r = cmd_homog({"functional": fn, "f": q, "box": [["0", "1"]]}, None)
    comps = [complex(*c) if isinstance(c, list) else (float(Fraction(c)) if isinstance(c, str) else c) for c in r["components"]]
    return [("s_1_1 on x^2 is 1-homogeneous with value 2", abs(comps[1] - 2) < 1e-9 and abs(comps[0]) < 1e-9)]


def _st_translative():
    fn = {"n": 1, "terms": [{"P": "c"}]}
    q = {"type": "quadratic", "A": [["0"]], "l": ["0"], "c": "0"}
    r = cmd_translative({"functional": fn, "f": q, "ell": {"y": ["1"]}, "box": [["0", "1"]]}, None)
    c1 = r["components"][1]
    v = float(Fraction(c1)) if isinstance(c1, str) else c1
    return [("integral of x over [0,1] is 1/2", abs(v - 0.5) < 1e-12)]


def _st_qpoly():
    r = cmd_qpoly({"n": 1, "k": 1, "P": "s_1_1"}, None)
    g = cmd_qpoly({"n": 2, "k": 2, "P": "s_1_1*s_2_2 - s_1_2^2"}, None)
    return [("Q(s_1_1) = w_1_1^2", r["Q"] == "w_1_1^2"), ("Q(det) spans M2_2", len(g["coordinates"]) == 1)]


def _st_eval():
    r = cmd_eval_maps({"n": 1, "d": 0}, None)
    return [("E for (n,d)=(1,0) is complete", r["complete"] and len(r["maps"]) == 2)]


def _st_reconstruct():
    fn = {"n": 1, "terms": [{"P": "s_1_1", "weight": {"type": "bump", "center": ["0"], "sigma": "1"}}]}
    r = cmd_reconstruct({"functional": fn, "test_f": {"type": "quadratic", "A": [["1"]], "l": ["0"], "c": "0"},
                         "probe": {"type": "constant", "n": 1, "value": "1"}, "box": [["-1", "1"]]}, Context())
    return [("reconstruction residual is small", r["residual"] < 1e-9)]


def _st_fourier():
    w = {"type": "bump", "center": ["0"], "sigma": "1"}
    r = cmd_fourier({"weight": w, "P": "s_1_1", "k": 1, "points": [[[[0, 0.5], [0.3, 0.1]]]], "path": "both"},
                    Context(tol=1e-6))
    return [("product and polarization paths agree", r["values"][0]["relative_error"] < 1e-6)]


def _st_pws(seed):
    w = {"type": "bump", "center": ["0"], "sigma": "1"}
    r = cmd_pws_report({"weight": w, "P": "s_1_1", "k": 1, "A": [["-1", "1"]], "N": [0], "m": 11}, Context(seed=seed))
    return [("N=0 report is finite and stable", r["reports"][0]["stable"])]


def _st_density(seed):
    half = {"type": "quadratic", "A": [["1/2", "0"], ["0", "1/2"]]}
    zero = {"type": "max_affine", "pieces": [{"a": ["0", "0"], "b": "0"}]}
    ctx = Context(seed=seed)
    a = cmd_density({"op": "spanning_rank", "n": 2, "k": 1, "family": [half]}, ctx)
    b = cmd_density({"op": "spanning_rank", "n": 2, "k": 1, "family": [zero]}, ctx)
    t = cmd_density({"op": "transport", "n": 2, "P": "s_1_1", "g": [["1", "0"], ["0", "1"]]}, ctx)
    return [("half |x|^2 reaches N_{2,1} = 3", a["rank"] == 3), ("zero family is trivial", b["rank"] == 0),
            ("identity transport", t["P"] == "s_1_1")]


SELFTESTS = {
    "minors": lambda s: _st_minors(), "divide": lambda s: _st_divide(), "membership": _st_membership,
    "ma": lambda s: _st_ma(), "mixed-ma": lambda s: _st_mixed(), "valuation-check": _st_valuation,
    "homog": lambda s: _st_homog(), "decompose": lambda s: _st_homog(), "translative": lambda s: _st_translative(),
    "qpoly": lambda s: _st_qpoly(), "eval-maps": lambda s: _st_eval(), "reconstruct": lambda s: _st_reconstruct(),
    "fourier": lambda s: _st_fourier(), "pws-report": _st_pws, "density": _st_density,
}


# ---------------------------------------------------------------------------
# driver


class Context:
    def __init__(self, seed=0, tol=1e-6, csv=None):
        self.seed, self.tol, self.csv = seed, tol, csv


def _read_json(path, label):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(label, f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(label, f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def build_payload(command, args):
    payload = _read_json(args.input, "--input") if args.input else {}
    if not isinstance(payload, dict):
        raise InputError("/", "payload must be a JSON object")
    if command == "ma":
        if "type" in payload:
            payload = {"function": payload}
        if args.window:
            w = _read_json(args.window, "--window")
            payload["window"] = w["window"] if isinstance(w, dict) and "window" in w else w
    if command == "minors":
        for key in ("n", "k"):
            if getattr(args, key, None) is not None:
                payload[key] = getattr(args, key)
    return payload


def make_parser():
    ap = argparse.ArgumentParser(prog="maval", description="Exact and numerical experiments with Monge-Ampere valuations.")
    ap.add_argument("--version", action="version", version=f"maval {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--input", help="JSON payload file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-6)
        sp.add_argument("--out", help="report path (stdout if omitted)")
        sp.add_argument("--selftest", action="store_true", help="run the module's trivial examples")
        if name == "ma":
            sp.add_argument("--window", help="JSON box [[lo, hi], ...]")
        if name == "minors":
            sp.add_argument("--n", type=int)
            sp.add_argument("--k", type=int)
        if name == "pws-report":
            sp.add_argument("--csv", help="also write the CSV table here")
    return ap


def render(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = make_parser().parse_args(argv)
    command = args.command
    if args.seed < 0:
        print("error: --seed: must be a nonnegative integer", file=sys.stderr)
        return 2
    if args.selftest:
        try:
            results = SELFTESTS[command](args.seed)
        except Exception as exc:  # a crashing self test is a failed self test
            results = [(f"raised {type(exc).__name__}: {exc}", False)]
        for name, ok in results:
            print(f"{'PASS' if ok else 'FAIL'} {command}: {name}")
        return 0 if all(ok for _, ok in results) else 4
    try:
        payload = build_payload(command, args)
        validate(command, payload)
        ctx = Context(args.seed, args.tol, getattr(args, "csv", None))
        result = COMMANDS[command](payload, ctx)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    except (ValueError, ArithmeticError, RuntimeError, KeyError) as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    key = {"command": command, "payload": payload, "seed": args.seed, "tol": args.tol}
    report = {"artifact": "maval", "version": __version__, "command": command, "seed": args.seed,
              "spec_hash": spec_hash(key), "result": result}
    _emit(render(report), args.out)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
