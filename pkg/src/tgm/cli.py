"""Command-line entry point ``tgm``.

Exit codes: 0 success, 1 mathematical or validation failure, 2 parse or
usage error. ``--json`` switches every subcommand to a stable JSON document.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import downgrade as dg
from . import sections as sec
from . import segdiv as sd
from . import threefold as tf
from .exactmath import format_rat
from .formats import (FormatError, divisor_to_json, dumps, read_divisor,
                      theorem_data_from_json)
from .poly import PolyError, parse_poly
from .surface import blowup_fan, fan_isomorphic, fan_model, normalize_fan


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of printing and exiting, so batch threads stay isolated
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class Result:
    payload: dict
    text: str
    code: int = 0


def _ints(text: str, n: int | None = None) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} integers, got {len(vals)}")
    return vals


def _poly(text: str, variables=("u", "v")):
    try:
        return parse_poly(text, variables)
    except PolyError as exc:
        raise UsageError(str(exc)) from exc


def _divisor(path: str):
    try:
        return read_divisor(path)
    except (OSError, FormatError, PolyError) as exc:
        raise UsageError(str(exc)) from exc


def _pair(p) -> str:
    return f"({p[0]},{p[1]})"


# handlers -------------------------------------------------------------------------


def _downgrade_payload(res: dg.Downgrade) -> tuple[dict, str]:
    # prefer blow-up coordinates when the fan is the blow-up of the origin
    nfan, m = blowup_fan(1), fan_isomorphic(res.fan, blowup_fan(1))
    if m is None:
        nfan, m = normalize_fan(res.fan)
    names = {tuple(m @ list(r)): n for n, r in res.model.toric}
    nmodel = fan_model(nfan, names)
    moved = sd.transport(res.divisor, m, nmodel)
    payload = {
        "weights": list(res.weights.weights),
        "section": list(res.section.coeffs),
        "projection": res.projection.tolist(),
        "rays": [list(r) for r in res.fan.rays],
        "cones": res.fan.to_dict()["cones"],
        "divisor": divisor_to_json(res.divisor),
        "normalized": {"matrix": m.tolist(), "rays": [list(r) for r in nfan.rays],
                       "divisor": divisor_to_json(moved),
                       "normal_form": divisor_to_json(sd.normal_form(moved))},
    }
    text = "\n".join([
        f"weights     {list(res.weights.weights)}",
        f"section     {list(res.section.coeffs)}",
        f"projection  {res.projection.tolist()}",
        f"rays        {' '.join(_pair(r) for r in res.fan.rays)}",
        f"divisor     {res.divisor}",
        f"normalized  rays {' '.join(_pair(r) for r in nfan.rays)}",
        f"            divisor {moved}",
        f"            normal form {sd.normal_form(moved)}",
    ])
    return payload, text


def cmd_downgrade(a) -> Result:
    weights = _ints(a.weights, 3)
    section = _ints(a.section, 3) if a.section else None
    payload, text = _downgrade_payload(dg.downgrade(weights, section))
    return Result(payload, text)


def cmd_prop_formula(a) -> Result:
    weights = _ints(a.weights, 3)
    section = _ints(a.section, 3) if a.section else None
    d = dg.proposition_formula(*weights, s=section)
    return Result({"divisor": divisor_to_json(d)}, str(d))


def cmd_crosscheck(a) -> Result:
    weights = _ints(a.weights, 3)
    ok = dg.crosscheck(weights)
    return Result({"weights": list(weights), "agree": ok},
                  "agree" if ok else "disagree", 0 if ok else 1)


def cmd_eval(a) -> Result:
    q = sd.evaluate(_divisor(a.divisor), a.n)
    return Result({"n": a.n, "coefficients": {k: format_rat(v) for k, v in q.coefficients}}, str(q))


def cmd_scale(a) -> Result:
    d = sd.scale(_divisor(a.divisor), a.m)
    return Result({"divisor": divisor_to_json(d)}, str(d))


def cmd_equiv(a) -> Result:
    w = sd.equivalent(_divisor(a.a), _divisor(a.b))
    if w is None:
        return Result({"equivalent": False, "witness": None}, "not equivalent", 1)
    return Result({"equivalent": True, "witness": list(w)}, f"equivalent, witness [{w[0]},{w[1]}]")


def cmd_normal_form(a) -> Result:
    d = _divisor(a.divisor)
    w = sd.normal_form_shift(d)
    nf = sd.shift(d, w)
    return Result({"shift": list(w), "divisor": divisor_to_json(nf)}, f"{nf}\nshift [{w[0]},{w[1]}]")


def cmd_check_proper(a) -> Result:
    rep = sd.check_proper(_divisor(a.divisor), a.bound)
    payload = {"bound": rep.bound, "q_cartier": rep.q_cartier, "semi_ample": rep.semi_ample,
               "big": rep.big, "passed": rep.passed,
               "semi_ample_failures": list(rep.semi_ample_failures),
               "big_failures": list(rep.big_failures),
               "semi_ample_equalities": list(rep.semi_ample_equalities)}
    text = (f"{'proper' if rep.passed else 'not proper'} for 0<|n|<={rep.bound}\n"
            f"semi-ample failures {list(rep.semi_ample_failures)}\n"
            f"big failures {list(rep.big_failures)}\n"
            f"semi-ample equalities {list(rep.semi_ample_equalities)}")
    return Result(payload, text, 0 if rep.passed else 1)


def cmd_describe(a) -> Result:
    rep = sd.describe(_divisor(a.divisor), a.exceptional)
    terms = [{"name": t.name, "segment": str(t.segment), "kind": t.kind, "order": t.order}
             for t in rep.terms]
    payload = {"terms": terms, "isotropy_orders": sorted(rep.nontrivial_orders),
               "interval_divisors": list(rep.interval_divisors),
               "unique_interval": rep.unique_interval,
               "fixed_point_divisor": rep.fixed_point_divisor,
               "interval_on_exceptional": rep.interval_on_exceptional}
    lines = [f"{t['name']}: {t['segment']} " + (f"isotropy Z/{t['order']}" if t["kind"] == "point"
                                                 else "fixed points") for t in terms]
    lines.append(f"nontrivial isotropy orders {sorted(rep.nontrivial_orders)}")
    lines.append(f"fixed-point divisor {rep.fixed_point_divisor}")
    return Result(payload, "\n".join(lines))


def cmd_sections(a) -> Result:
    st = sec.weight_space(_divisor(a.divisor), a.n)
    payload = {"n": a.n, "generators": [list(g) for g in st.generators],
               "constraints": [{"ray": list(r), "bound": c} for r, c in st.constraints]}
    return Result(payload, " ".join(sec.monomial_str(g) for g in st.generators))


def cmd_find_d(a) -> Result:
    d = sec.find_d(_divisor(a.divisor), a.bound, a.verify)
    return Result({"d": d, "verify": a.verify if a.verify is not None else sec.verify_bound()}, str(d))


def cmd_center_ideal(a) -> Result:
    gens = sec.center_ideal(_divisor(a.divisor), a.d)
    return Result({"d": a.d, "generators": [list(g) for g in gens]},
                  "(" + ", ".join(sec.monomial_str(g) for g in gens) + ")")


def cmd_hypmod(a) -> Result:
    base = tuple(v.strip() for v in a.vars.split(",") if v.strip())
    if not base:
        raise UsageError("--vars needs at least one variable")
    f = _poly(a.poly, base)
    if f.variables != base:
        raise UsageError(f"polynomial uses variables outside {list(base)}")
    h = tf.hyperbolic_modification(f, base)
    return Result({"result": str(h), "variables": list(h.variables)}, str(h))


def cmd_build(a) -> Result:
    if a.zeta < 1 or a.xi < 1:
        raise UsageError("cover orders must be positive integers")
    p = tf.bicyclic_presentation(_poly(a.f), _poly(a.g), a.zeta, a.xi)
    if a.eliminate:
        p = tf.eliminate_linear(p)
    payload = {"variables": list(p.variables), "relations": [str(r) for r in p.relations],
               "dimension": p.dimension}
    return Result(payload, str(p))


def cmd_intersect(a) -> Result:
    rep = tf.intersection_analysis(_poly(a.f), _poly(a.g))
    payload = {"count": rep.count, "d": rep.d, "transversal": rep.transversal, "origin": rep.origin,
               "projection": rep.projection, "resultant": rep.resultant,
               "squarefree_projection": rep.squarefree_projection,
               "rational_points": [[format_rat(x), format_rat(y)] for x, y in rep.rational_points],
               "jacobian_ok": rep.jacobian_ok}
    text = (f"{rep.count} intersection(s) with multiplicity, resultant {rep.resultant}\n"
            f"transversal {rep.transversal}, origin {rep.origin}, d = {rep.d}")
    return Result(payload, text, 0 if rep.normal_with_origin else 1)


def cmd_validate(a) -> Result:
    try:
        with open(a.data, encoding="utf-8") as fh:
            data = theorem_data_from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, FormatError, PolyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = tf.validate_theorem_data(data)
    payload = {"passed": rep.passed, "d": rep.d, "warnings": list(rep.warnings),
               "conditions": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                              for c in rep.conditions]}
    lines = [f"({c.name}) {'pass' if c.passed else 'FAIL'}: {c.detail}" for c in rep.conditions]
    lines += [f"warning: {w}" for w in rep.warnings]
    return Result(payload, "\n".join(lines), 0 if rep.passed else 1)


def cmd_smooth_check(a) -> Result:
    rep = tf.smoothness_check(_divisor(a.divisor), a.bound)
    payload = {"applicable": rep.applicable, "passed": rep.passed, "reason": rep.reason,
               "match": list(rep.match) if rep.match else None}
    text = f"{'pass' if rep.passed else 'fail'}: {rep.reason}"
    if rep.match:
        text += f" {list(rep.match)}"
    return Result(payload, text, 0 if rep.passed else 1)


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tgm", description="Segmental divisors of hyperbolic torus actions.")
    p.add_argument("--json", action="store_true", help="emit a stable JSON document")
    p.add_argument("--batch", metavar="FILE", help="run one command per line of FILE")
    sub = p.add_subparsers(dest="command")

    def add(name, func, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                       help="emit a stable JSON document")
        s.set_defaults(func=func)
        return s

    def divisor_arg(s):
        s.add_argument("--divisor", required=True, metavar="FILE")

    s = add("downgrade", cmd_downgrade, "fan and divisor of a linear action on 3-space")
    s.add_argument("--weights", required=True)
    s.add_argument("--section")
    s = add("prop-formula", cmd_prop_formula, "closed-form divisor on the blow-up of the origin")
    s.add_argument("--weights", required=True)
    s.add_argument("--section")
    s = add("crosscheck", cmd_crosscheck, "compare downgrade with the closed formula")
    s.add_argument("--weights", required=True)
    s = add("eval", cmd_eval, "evaluate D(n)")
    divisor_arg(s)
    s.add_argument("-n", type=int, required=True)
    s = add("scale", cmd_scale, "multiply a divisor by a positive integer")
    divisor_arg(s)
    s.add_argument("-m", type=int, required=True)
    s = add("equiv", cmd_equiv, "shift witness between two divisors")
    s.add_argument("a", metavar="A")
    s.add_argument("b", metavar="B")
    s = add("normal-form", cmd_normal_form, "canonical shift representative")
    divisor_arg(s)
    s = add("check-proper", cmd_check_proper, "semi-ampleness and bigness up to a bound")
    divisor_arg(s)
    s.add_argument("--bound", type=int, default=12)
    s = add("describe", cmd_describe, "isotropy orders and fixed-point divisor")
    divisor_arg(s)
    s.add_argument("--exceptional", default="E")
    s = add("sections", cmd_sections, "staircase generators of A_n")
    divisor_arg(s)
    s.add_argument("-n", type=int, required=True)
    s = add("find-d", cmd_find_d, "smallest generating degree")
    divisor_arg(s)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--verify", type=int, help="generation window (default $TGM_VERIFY_BOUND or 8)")
    s = add("center-ideal", cmd_center_ideal, "monomial ideal <A_d * A_-d>")
    divisor_arg(s)
    s.add_argument("--d", type=int, required=True)
    s = add("hypmod", cmd_hypmod, "hyperbolic modification of a polynomial")
    s.add_argument("--poly", required=True)
    s.add_argument("--vars", required=True)
    s = add("build", cmd_build, "bi-cyclic cover presentation")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--zeta", type=int, required=True)
    s.add_argument("--xi", type=int, required=True)
    s.add_argument("--eliminate", action="store_true")
    s = add("intersect", cmd_intersect, "intersection analysis of two plane curves")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s = add("validate", cmd_validate, "check theorem data from a JSON file")
    s.add_argument("--data", required=True, metavar="FILE")
    s = add("smooth-check", cmd_smooth_check, "template test of the local smoothness criterion")
    divisor_arg(s)
    s.add_argument("--bound", type=int, default=12)
    return p


_LIST_OPTIONS = ("--weights", "--section")


def _glue_negative_lists(argv: list[str]) -> list[str]:
    # argparse reads "-1,1,1" as an option flag; bind it to its option instead
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv: list[str]) -> tuple[int, str, str]:
    """Run one invocation; returns ``(exit code, stdout text, stderr text)``."""
    parser = build_parser()
    argv = _glue_negative_lists(list(argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return 2, "", f"{exc}\n{parser.format_usage()}"
    if args.batch:
        if args.command:
            return 2, "", "tgm: --batch cannot be combined with a subcommand\n"
        return _run_batch(args.batch, args.json)
    if not args.command:
        return 2, "", parser.format_usage()
    try:
        res = args.func(args)
    except UsageError as exc:
        return 2, "", f"tgm: {exc}\n"
    except (ValueError, ArithmeticError, KeyError) as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        if args.json:
            return 1, dumps({"error": str(msg)}) + "\n", f"tgm: {msg}\n"
        return 1, "", f"tgm: {msg}\n"
    out = dumps(res.payload) if args.json else res.text
    return res.code, out + "\n", ""


def _run_batch(path: str, as_json: bool) -> tuple[int, str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        return 2, "", f"tgm: {exc}\n"
    jobs = []
    for ln in lines:
        argv = shlex.split(ln)
        if as_json and "--json" not in argv:
            argv = ["--json"] + argv
        jobs.append(argv)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(run, jobs))
    code = max((r[0] for r in results), default=0)
    if as_json:
        docs = [{"command": ln, "exit": c, "output": json.loads(o) if o.strip() else None,
                 "error": e.strip() or None} for ln, (c, o, e) in zip(lines, results)]
        return code, dumps(docs) + "\n", ""
    out = "".join(f"$ {ln}\n{o}" for ln, (_, o, _) in zip(lines, results))
    err = "".join(e for _, _, e in results)
    return code, out, err


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
