"""Task-file front end: one JSON task in, one JSON report out.

A task file holds a single JSON object whose "task" field names the
kind; the remaining fields are the kind-specific payload.  The report
embeds the effective payload (defaults and flag overrides applied)
under "input", so feeding that object back as a task file reproduces
the report byte for byte.  Exit codes: 0 success, 1 input or schema
errors, 2 inconclusive verdicts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .bs import (
    BSSpec,
    BSWord,
    concat,
    has_fsqrt,
    infinite_sqrt_witness,
    rewrite_S,
    square_roots_bounded,
)
from .bs import bs_oracle
from .equations import (
    Const,
    Constraint,
    QuadSystem,
    Var,
    analyze,
    trivial_constraint,
    verify,
)
from .fsa import dfa_from_json, imperfection_witness, is_periodically_perfect, perfectness_bound
from .graph_product import (
    GPSpec,
    gp_element,
    gp_oracle,
    has_finite_power_submonoid,
    nf_global,
    pump_family_nf,
    square_roots,
)
from .monoids import Finite, MonoidOracle, finite_monoid_oracle, integer_oracle, polycyclic_oracle, power_profile
from .traces import indep_from_json, lex_nf
from .trace_pump import certify_pumping_family
from .words import exponent_of_periodicity


class TaskError(ValueError):
    """Malformed task file or payload; reported as exit code 1."""


# ---------------------------------------------------------------- oracles


class OracleRef:
    """A monoid oracle together with JSON encode/decode for its elements."""

    def __init__(self, oracle: MonoidOracle,
                 encode: Callable[[Any], Any], decode: Callable[[Any], Any]):
        self.oracle = oracle
        self.encode = encode
        self.decode = decode


def _decode_int(x: Any) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise TaskError(f"expected an integer element, got {x!r}")
    return x


def _resolve_oracle(data: Any) -> OracleRef:
    if not isinstance(data, dict) or "kind" not in data:
        raise TaskError("oracle reference must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "int":
        return OracleRef(integer_oracle(), int, _decode_int)
    if kind == "finite":
        table = tuple(tuple(int(x) for x in row) for row in data["table"])
        o = finite_monoid_oracle(table)

        def dec_finite(x: Any) -> int:
            v = _decode_int(x)
            if not 0 <= v < len(table):
                raise TaskError(f"element {v} outside the table range")
            return v

        return OracleRef(o, int, dec_finite)
    if kind == "zn":
        n = int(data["n"])
        o = polycyclic_oracle("zn", n=n)

        def dec_zn(x: Any) -> Tuple[int, ...]:
            v = tuple(_decode_int(c) for c in x)
            if len(v) != n:
                raise TaskError(f"element {x!r} must have {n} coordinates")
            return v

        return OracleRef(o, list, dec_zn)
    if kind == "semidirect":
        o = polycyclic_oracle("semidirect", matrix=data["matrix"])

        def dec_sd(x: Any) -> Tuple[int, int, int]:
            v = tuple(_decode_int(c) for c in x)
            if len(v) != 3:
                raise TaskError(f"element {x!r} must be [x, y, k]")
            return v

        return OracleRef(o, list, dec_sd)
    if kind == "bs":
        spec = BSSpec(int(data["p"]), int(data["q"]))
        o = bs_oracle(spec)
        return OracleRef(
            o,
            lambda w: w.to_string(),
            lambda s: rewrite_S(spec, BSWord.from_string(s)),
        )
    raise TaskError(f"unknown oracle kind {kind!r}")


def _resolve_gpspec(data: Any) -> Tuple[GPSpec, OracleRef]:
    colors = data["colors"]
    names = [c["name"] for c in colors]
    order = data.get("color_order", names)
    refs = {c["name"]: _resolve_oracle(c["oracle"]) for c in colors}
    independence = frozenset(frozenset(pair) for pair in data.get("independence", []))
    spec = GPSpec(tuple(order), independence,
                  {name: ref.oracle for name, ref in refs.items()})

    def decode(arr: Any):
        factors = []
        for f in arr:
            color = f["color"]
            if color not in refs:
                raise TaskError(f"unknown color {color!r}")
            factors.append((color, refs[color].decode(f["element"])))
        return gp_element(spec, factors)

    def encode(x) -> List[dict]:
        return [{"color": c, "element": refs[c].encode(m)} for c, m in x.letters]

    return spec, OracleRef(gp_oracle(spec), encode, decode)


def _resolve_group(data: Any) -> OracleRef:
    """A quad-analyze group: either a graph-product spec or an oracle."""
    if isinstance(data, dict) and "colors" in data:
        return _resolve_gpspec(data)[1]
    return _resolve_oracle(data)


def _generator(o: MonoidOracle, ref: str) -> Any:
    """Resolve a generator name to an element.  Names are the oracle's
    letters (tagged "color:letter" for graph products); a bare color
    over the integers abbreviates its "+1" letter.  A "^-1" suffix
    inverts.
    """
    inverted = ref.endswith("^-1")
    base = ref[:-3] if inverted else ref
    if base in o.letter_value:
        g = o.letter_value[base]
    elif f"{base}:+1" in o.letter_value:
        g = o.letter_value[f"{base}:+1"]
    else:
        raise TaskError(f"unknown generator {ref!r}")
    if inverted:
        if o.invert is None:
            raise TaskError("the group oracle provides no inversion")
        g = o.invert(g)
    return g


# ---------------------------------------------------------------- constraints


def _group_table(table: Tuple[Tuple[int, ...], ...]) -> Tuple[int, Callable[[int], int]]:
    n = len(table)
    identity = next(
        (e for e in range(n)
         if all(table[e][j] == j and table[j][e] == j for j in range(n))),
        None,
    )
    if identity is None:
        raise TaskError("constraint table has no identity")

    def inverse(h: int) -> int:
        for k in range(n):
            if table[h][k] == identity:
                return k
        raise TaskError("constraint table is not a group")

    return identity, inverse


def _expand_mu(o: MonoidOracle, table, mu_gen_json: Dict[str, int]) -> Dict[str, int]:
    """Per-letter images, resolving shorthand keys and filling missing
    inverse letters with inverse images.
    """
    _, inverse = _group_table(table)
    mu: Dict[str, int] = {}
    for key, h in mu_gen_json.items():
        if key in o.letter_value:
            mu[key] = int(h)
        elif f"{key}:+1" in o.letter_value:
            mu[f"{key}:+1"] = int(h)
        else:
            raise TaskError(f"mu_gen names unknown generator {key!r}")
    if o.invert is not None:
        for a in o.letters:
            if a in mu:
                continue
            value = o.invert(o.letter_value[a])
            for b, h in list(mu.items()):
                if o.equal(o.letter_value[b], value):
                    mu[a] = inverse(h)
                    break
    missing = [a for a in o.letters if a not in mu]
    if missing:
        raise TaskError(f"mu_gen misses letters {missing!r}")
    return mu


def _build_constraint(group: OracleRef, variables: Tuple[str, ...],
                      data: Optional[dict]) -> Constraint:
    if data is None:
        return trivial_constraint(group.oracle, variables)
    table = tuple(tuple(int(x) for x in row) for row in data["table"])
    mu_gen = _expand_mu(group.oracle, table, data["mu_gen"])
    mu_var = {v: frozenset(int(h) for h in hs) for v, hs in data["mu_var"].items()}
    return Constraint(table, mu_gen, mu_var)


def _symbol(group: OracleRef, variables: Tuple[str, ...], s: str):
    if s in variables:
        return Var(s)
    if s.endswith("^-1") and s[:-3] in variables:
        return Var(s[:-3], True)
    return Const(_generator(group.oracle, s))


# ---------------------------------------------------------------- handlers


def _task_exp(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    return {"exp": exponent_of_periodicity(p["word"])}, 0


def _task_lexnf(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    alph = indep_from_json(p["alphabet"])
    nf = lex_nf(p["word"], alph).word
    return {"normal_form": nf if isinstance(nf, str) else "".join(nf)}, 0


def _task_trace_pump(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    alph = indep_from_json(p["alphabet"])
    body = certify_pumping_family(
        lex_nf(p["u"], alph), lex_nf(p["p"], alph), lex_nf(p["v"], alph),
        p["n_max"],
    )
    if figures:
        from .figures import write_series

        write_series(figures, "trace_pump_series", ("n", "length", "exp"),
                     [(e["n"], len(e["word"]), e["exp"])
                      for e in body["normal_forms"]])
    return body, 0


def _task_pp_check(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    a = dfa_from_json(p["automaton"])
    perfect = is_periodically_perfect(a)
    body: dict = {"perfect": perfect, "n": p["n"]}
    if perfect:
        body["bound"] = perfectness_bound(a, p["n"])
    else:
        witness = imperfection_witness(a)
        body["bound"] = None
        body["imperfection"] = ["".join(w) for w in witness] if witness else None
    return body, 0


def _task_gp_nf(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec, ref = _resolve_gpspec(p["spec"])
    return {"normal_form": list(nf_global(ref.decode(p["element"])))}, 0


def _task_gp_pump(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec, ref = _resolve_gpspec(p["spec"])
    series = pump_family_nf(spec, ref.decode(p["u"]), ref.decode(p["p"]),
                            ref.decode(p["v"]), p["n_max"])
    if figures:
        from .figures import write_series

        write_series(figures, "gp_pump_series", ("n", "length", "exp"),
                     [(n, len(w), e) for n, w, e in series])
    return {"series": [{"n": n, "word": list(w), "exp": e}
                       for n, w, e in series]}, 0


def _task_gp_sqrt(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec, ref = _resolve_gpspec(p["spec"])
    roots = square_roots(spec, ref.decode(p["element"]))
    ordered = sorted(roots, key=lambda r: (len(nf_global(r)), nf_global(r)))
    return {"roots": [ref.encode(r) for r in ordered]}, 0


def _task_gp_torsion(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec, ref = _resolve_gpspec(p["spec"])
    x = ref.decode(p["element"])
    profile = power_profile(ref.oracle, x, p["bound"])
    body = {
        "finite_powers": has_finite_power_submonoid(spec, x),
        "profile": (
            {"kind": "finite", "r": profile.r, "p": profile.p}
            if isinstance(profile, Finite)
            else {"kind": "no_repetition", "bound": profile.bound}
        ),
    }
    return body, 0


def _task_bs_nf(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec = BSSpec(int(p["p"]), int(p["q"]))
    nf = rewrite_S(spec, BSWord.from_string(p["word"]))
    return {"normal_form": nf.to_string()}, 0


def _task_bs_sqrt(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec = BSSpec(int(p["p"]), int(p["q"]))
    g = BSWord.from_string(p["word"])
    roots = square_roots_bounded(spec, g, p["t_bound"], p["a_bound"])
    return {
        "has_fsqrt": has_fsqrt(spec.p, spec.q),
        "roots": sorted(x.to_string() for x in roots),
    }, 0


def _task_bs_witness(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    spec = BSSpec(int(p["p"]), int(p["q"]))
    members = []
    target = None
    for n in range(p["n_max"] + 1):
        x, g = infinite_sqrt_witness(spec, n)
        target = rewrite_S(spec, g).to_string()
        members.append({
            "n": n,
            "word": x.to_string(),
            "square_ok": rewrite_S(spec, concat(x, x)).to_string() == target,
        })
    return {"target": target, "members": members}, 0


def _task_quad_analyze(p: dict, figures: Optional[str]) -> Tuple[dict, int]:
    group = _resolve_group(p["group"])
    variables = tuple(p["variables"])
    equations = tuple(
        tuple(_symbol(group, variables, s) for s in eq) for eq in p["equations"]
    )
    system = QuadSystem(group.oracle, variables, equations,
                        _build_constraint(group, variables, p.get("constraint")))
    report = analyze(system, p["budget"])
    body: dict = {"verdict": report.verdict}
    if report.verdict == "finite":
        body["solutions"] = [
            {v: group.encode(sol[v]) for v in variables} for sol in report.solutions
        ]
    elif report.verdict == "infinite":
        w = report.witness
        body["witness"] = {
            "variable": w.variable,
            "case": w.case,
            "multiplier": w.multiplier,
            "base": group.encode(w.base),
            "step": group.encode(w.step),
        }
        body["samples"] = [
            {
                "n": n,
                "assignment": {v: group.encode(a[v]) for v in variables},
                "exp": e,
                "verified": verify(system, a),
            }
            for n, a, e in report.samples
        ]
        if figures:
            from .figures import write_series

            write_series(figures, "quad_analyze_series", ("n", "exp"),
                         [(n, e) for n, _, e in report.samples])
    else:
        body["reason"] = report.reason
    return body, 2 if report.verdict == "inconclusive" else 0


HANDLERS: Dict[str, Callable[[dict, Optional[str]], Tuple[dict, int]]] = {
    "exp": _task_exp,
    "lexnf": _task_lexnf,
    "trace-pump": _task_trace_pump,
    "pp-check": _task_pp_check,
    "gp-nf": _task_gp_nf,
    "gp-pump": _task_gp_pump,
    "gp-sqrt": _task_gp_sqrt,
    "gp-torsion": _task_gp_torsion,
    "bs-nf": _task_bs_nf,
    "bs-sqrt": _task_bs_sqrt,
    "bs-witness": _task_bs_witness,
    "quad-analyze": _task_quad_analyze,
}

_DEFAULTS: Dict[str, Dict[str, int]] = {
    "trace-pump": {"n_max": 6},
    "gp-pump": {"n_max": 6},
    "bs-witness": {"n_max": 4},
    "pp-check": {"n": 3},
    "gp-torsion": {"bound": 60},
    "bs-sqrt": {"t_bound": 3, "a_bound": 8},
    "quad-analyze": {"budget": 3},
}

# which payload key each flag overrides, per task kind
_N_MAX_KEY = {"trace-pump": "n_max", "gp-pump": "n_max", "bs-witness": "n_max"}
_BOUND_KEY = {
    "quad-analyze": "budget",
    "gp-torsion": "bound",
    "bs-sqrt": "a_bound",
    "pp-check": "n",
}


def _run_task(raw: Any, args: argparse.Namespace) -> Tuple[dict, int]:
    if not isinstance(raw, dict) or "task" not in raw:
        raise TaskError("task file must be a JSON object with a 'task' field")
    kind = raw["task"]
    if kind not in HANDLERS:
        raise TaskError(f"unknown task kind {kind!r}")
    payload = dict(raw)
    for key, value in _DEFAULTS.get(kind, {}).items():
        payload.setdefault(key, value)
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.bound is not None and kind in _BOUND_KEY:
        payload[_BOUND_KEY[kind]] = args.bound
    if args.n_max is not None and kind in _N_MAX_KEY:
        payload[_N_MAX_KEY[kind]] = args.n_max
    body, code = HANDLERS[kind](payload, args.figures)
    return {"input": payload, "result": body}, code


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="expkit",
        description="Run a JSON task file and print a JSON report.",
    )
    parser.add_argument("task_file", help="path to the JSON task file")
    parser.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, help="seed recorded in the normalized payload")
    parser.add_argument("--bound", type=int, help="search budget override")
    parser.add_argument("--n-max", type=int, dest="n_max", help="series length override")
    parser.add_argument("--figures", metavar="DIR",
                        help="also render CSV + PNG series for tasks that produce one")
    args = parser.parse_args(argv)
    try:
        with open(args.task_file, encoding="utf-8") as fh:
            raw = json.load(fh)
        doc, code = _run_task(raw, args)
    except (TaskError, ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        message = str(exc) or repr(exc)
        doc, code = {"error": {"type": type(exc).__name__, "message": message}}, 1
    text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
