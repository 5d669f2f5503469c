"""Command line front end: ``wittforge <command> --field F FORM``.

Exit status 0 on success, 1 when ``verify-paper`` finds a mismatch, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from typing import Callable

from . import isotropy, levels, valuesets
from .arith import squarefree_int
from .fields import FieldError, Rationals, parse_field
from .forms import Form, FormError
from .parser import ParseError, form_from_source
from .pfister import I1Error, I1Hints, i1_interval, is_neighbor_of, is_pfister_similar, rule_intervals

SCHEMA = 1


class UsageError(Exception):
    pass


def _emit(args, payload: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _field_and_form(args):
    f = parse_field(args.field)
    return f, form_from_source(args.form, f)


def _level_payload(r: levels.LevelResult) -> dict:
    out = {"kind": r.kind}
    if r.finite:
        out["value"] = r.n
        out["checks"] = [{"n": n, "isotropic": iso} for n, iso in r.checks]
    elif r.infinite:
        out["certificate"] = str(r.certificate)
    else:
        out["cap"] = r.cap
    return out


def _level_line(name: str, r: levels.LevelResult) -> str:
    if r.infinite:
        return f"{name}: inf  ({r.certificate})"
    if r.kind == "exceeded":
        return f"{name}: undecided up to {r.cap}"
    return f"{name}: {r.n}"


# commands -------------------------------------------------------------------------


def cmd_isotropy(args) -> int:
    f, q = _field_and_form(args)
    iso = isotropy.is_isotropic(q)
    payload = {"command": "isotropy", "field": str(f), "form": str(q), "result": {"isotropic": iso}}
    lines = [f"{q} over {f}: {'isotropic' if iso else 'anisotropic'}"]
    if isinstance(f, Rationals) and q.dim and not iso:
        place = isotropy.anisotropy_certificate(q)
        payload["certificate"] = {"anisotropic_at": str(place)}
        lines.append(f"  anisotropic at {place}")
    _emit(args, payload, lines)
    return 0


def cmd_witt(args) -> int:
    f, q = _field_and_form(args)
    d = isotropy.witt_decomposition(q)
    payload = {
        "command": "witt", "field": str(f), "form": str(q),
        "result": {"witt_index": d.witt_index, "kernel": str(d.kernel)},
    }
    _emit(args, payload, [f"{q} = {d.kernel} + {d.witt_index} x <1,-1>"])
    return 0


def _cmd_level(name: str, fn: Callable):
    def run(args) -> int:
        f, q = _field_and_form(args)
        r = fn(q)
        payload = {"command": name, "field": str(f), "form": str(q), "result": _level_payload(r)}
        _emit(args, payload, [_level_line(name, r)])
        return 0

    return run


def cmd_qlength(args) -> int:
    f, q = _field_and_form(args)
    if (args.element is None) == (args.phi is None):
        raise UsageError("give exactly one of --element or --phi")
    if args.element is not None:
        r = levels.q_length(q, args.element)
        target = args.element
    else:
        phi = form_from_source(args.phi, f)
        r = levels.q_length_form(q, phi)
        target = str(phi)
    payload = {"command": "qlength", "field": str(f), "form": str(q), "target": target, "result": _level_payload(r)}
    _emit(args, payload, [_level_line(f"length of {target}", r)])
    return 0


def _bound(s: str):
    if s in ("inf", "oo", "infinity"):
        return math.inf
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bound {s!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("bound must be non-negative")
    return v


def _i1_range(s: str):
    try:
        lo, _, hi = s.partition(":")
        lo = int(lo)
        hi = int(hi) if hi else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad i1 range {s!r}; use LO or LO:HI")
    return lo, hi


def cmd_values(args) -> int:
    lo, hi = args.i1
    rep = valuesets.value_set_report(
        args.kind, args.dim, lo, hi, args.bound, args.horizon,
        sublevel_bound=args.sublevel_bound, represents_one=args.represents_one,
    )
    if args.json or args.format == "json":
        print(json.dumps({"schema": SCHEMA, "command": "values", "result": rep.as_dict()}, sort_keys=True))
        return 0
    print(f"{'value':>6}  status      tags")
    for m in range(0 if args.kind == "sublevel" else 1, rep.horizon + 1):
        if m in rep.admissible:
            status, tags = "admissible", rep.admissible[m]
        elif m in rep.excluded:
            status, tags = "excluded", rep.excluded[m]
        else:
            status, tags = "undecided", []
        print(f"{m:>6}  {status:<10}  {', '.join(tags)}")
    return 0


def cmd_i1(args) -> int:
    f, q = _field_and_form(args)
    hints = I1Hints()
    if args.factor:
        pi = form_from_source(args.factor[0], f)
        r = form_from_source(args.factor[1], f)
        hints.factor = (pi, r)
    if args.neighbor_of:
        hints.neighbor_of = form_from_source(args.neighbor_of, f)
    iv = i1_interval(q, hints)
    rules = rule_intervals(q, hints)
    payload = {
        "command": "i1", "field": str(f), "form": str(q),
        "result": {"lo": iv.lo, "hi": iv.hi, "cap": iv.cap, "provenance": list(iv.provenance),
                   "rules": {k: list(v) for k, v in rules.items()}},
    }
    lines = [f"i1 in {iv}  (cap {iv.cap})"] + [f"  {k}: [{a},{b}]" for k, (a, b) in rules.items()]
    _emit(args, payload, lines)
    return 0


def cmd_pfister_check(args) -> int:
    f, q = _field_and_form(args)
    res = {"pfister_similar": is_pfister_similar(q)}
    lines = [f"{q}: {'similar to a Pfister form' if res['pfister_similar'] else 'not similar to a Pfister form'}"]
    if args.neighbor_of:
        pi = form_from_source(args.neighbor_of, f)
        res["neighbor"] = is_neighbor_of(q, pi)
        lines.append(f"  neighbour of {pi}: {res['neighbor']}")
    _emit(args, {"command": "pfister-check", "field": str(f), "form": str(q), "result": res}, lines)
    return 0


# golden checks ------------------------------------------------------------------------


def _q(src: str, field: str = "Q") -> Form:
    return form_from_source(src, parse_field(field))


def _quaternion_example(p: int) -> dict:
    from .arith import least_nonresidue

    u = least_nonresidue(p)
    f = f"Qp({p})"
    q = _q(f"<1,{-u},{-p},{u * p}>", f)
    tau = q[1:]
    lev_q, lev_tau = levels.level(q).n, levels.level(tau).n
    b = valuesets.pfister_neighbor_brackets(q.dim, tau.dim, level_q=lev_q).level
    return {"s_q": lev_q, "s_tau": lev_tau, "bracket": [b.lo, b.hi], "inside": lev_tau in b}


def _dim3_closed_form(horizon: int) -> bool:
    want = {1}
    k = 0
    while True:
        a, b = (2 ** (2 * k) + 2) // 3, (2 ** (2 * k + 1) + 1) // 3
        if k >= 1 and a <= horizon:
            want.add(a)
        if b <= horizon:
            want.add(b)
        if a > horizon and b > horizon:
            break
        k += 1
    return valuesets.admissible_levels(3, math.inf, horizon) == want


def _two_powers(h: int) -> list[int]:
    return [2**k for k in range(h.bit_length()) if 2**k <= h]


CHECKS: dict[str, Callable[[], object]] = {
    "q_det_nonsquare": lambda: squarefree_int(_q("<1,1,1,7>").det()) != 1,
    "q_not_pfister_similar": lambda: is_pfister_similar(_q("<1,1,1,7>")),
    "pi_tensor_q_is_16_ones": lambda: isotropy.is_isometric(_q("pfister(1,1) (*) <1,1,1,7>"), _q("16 x <1>")),
    "i1_q": lambda: [i1_interval(_q("<1,1,1,7>")).lo, i1_interval(_q("<1,1,1,7>")).hi],
    "i1_pi_tensor_q": lambda: [
        i1_interval(_q("pfister(1,1) (*) <1,1,1,7>")).lo,
        i1_interval(_q("pfister(1,1) (*) <1,1,1,7>")).hi,
    ],
    "neighbor_pi_tensor_111": lambda: is_neighbor_of(_q("pfister(1,1) (*) <1,1,1>"), _q("16 x <1>")),
    "excluded_set_dim6": lambda: sorted(valuesets.inadmissible_sublevels(6, 2, 32, 32)),
    "excluded_set_dim6_bound4": lambda: sorted(valuesets.inadmissible_sublevels(6, 2, 4, 8)),
    "dim3_levels_closed_form": lambda: _dim3_closed_form(2**20),
    "mset_dim1_two_powers": lambda: sorted(valuesets.mset_values(1, 2**20)) == _two_powers(2**20),
    "mset_dim2_two_powers": lambda: sorted(valuesets.mset_values(2, 2**20)) == _two_powers(2**20),
    "neighbor_level_bracket_Q3": lambda: _quaternion_example(3),
    "neighbor_level_bracket_Q5": lambda: _quaternion_example(5),
    "pfister_exact_levels_1_to_16": lambda: [valuesets.pfister_exact_level(n) for n in range(1, 17)],
    "dim3_sublevel_set": lambda: sorted(valuesets.signature_sets(3, "near-definite", 4).admissible),
    "level_of_Q7": lambda: levels.level(_q("<1>", "Qp(7)")).n,
    "length_of_7_over_Q": lambda: levels.q_length(_q("<1>"), 7).n,
}


def load_golden() -> dict:
    text = resources.files("wittforge").joinpath("golden/checks.json").read_text(encoding="utf-8")
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        raise UsageError(f"golden file schema {data.get('schema')} != {SCHEMA}")
    return data


def verify_paper() -> tuple[bool, list[dict]]:
    golden = load_golden()
    report = []
    ok_all = True
    for entry in golden["checks"]:
        fn = CHECKS.get(entry["id"])
        if fn is None:
            got, ok = "missing check", False
        else:
            try:
                got = json.loads(json.dumps(fn()))
                ok = got == entry["expected"]
            except Exception as exc:  # a crash is a failed check, not a crashed harness
                got, ok = f"error: {exc}", False
        ok_all &= ok
        report.append({"id": entry["id"], "anchor": entry["anchor"], "expected": entry["expected"], "got": got, "ok": ok})
    return ok_all, report


def cmd_verify_paper(args) -> int:
    ok, report = verify_paper()
    if args.json:
        print(json.dumps({"schema": SCHEMA, "command": "verify-paper", "ok": ok, "checks": report}, sort_keys=True))
    else:
        for r in report:
            print(f"{'PASS' if r['ok'] else 'FAIL'}  {r['id']}")
            if not r["ok"]:
                print(f"      expected {r['expected']!r}, got {r['got']!r}")
        print(f"{sum(r['ok'] for r in report)}/{len(report)} checks passed")
    return 0 if ok else 1


# argument parsing ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wittforge", description="Quadratic forms: isotropy, Witt index, levels and value sets.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_form(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--field", required=True, help="Q, R, Qp(p), Fp(p) or laurent(FIELD)")
        sp.add_argument("form", help="form expression, e.g. '<1,1,1,7>' or 'pfister(1,1) (*) <1,-t>'")
        sp.add_argument("--json", action="store_true")
        sp.set_defaults(fn=fn)
        return sp

    with_form("isotropy", cmd_isotropy, "isotropic or anisotropic")
    with_form("witt", cmd_witt, "Witt index and anisotropic kernel")
    with_form("level", _cmd_level("level", levels.level), "least n with <1> + n x q isotropic")
    with_form("sublevel", _cmd_level("sublevel", levels.sublevel), "least n with (n+1) x q isotropic")
    sp = with_form("qlength", cmd_qlength, "q-length of an element or a form")
    sp.add_argument("--element")
    sp.add_argument("--phi", help="form expression whose q-length is wanted")
    sp = with_form("i1", cmd_i1, "certified bounds on the first Witt index")
    sp.add_argument("--factor", nargs=2, metavar=("PI", "R"), help="q = PI (*) R with PI Pfister-similar")
    sp.add_argument("--neighbor-of", help="Pfister form q is claimed to neighbour")
    sp = with_form("pfister-check", cmd_pfister_check, "Pfister similarity and neighbour tests")
    sp.add_argument("--neighbor-of")

    sp = sub.add_parser("values", help="admissible and excluded values over extension fields")
    sp.add_argument("--kind", choices=["sublevel", "level"], required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--i1", type=_i1_range, required=True, help="LO or LO:HI")
    sp.add_argument("--bound", type=_bound, required=True, help="sublevel or level over the base field, or inf")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--sublevel-bound", type=_bound, help="level exclusions need the sublevel too")
    sp.add_argument("--represents-one", action="store_true", help="q represents 1 (enables level exclusions)")
    sp.add_argument("--format", choices=["table", "json"], default="table")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_values)

    sp = sub.add_parser("verify-paper", help="run the golden reproduction suite")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_verify_paper)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except (FormError, FieldError, UsageError, valuesets.ValueSetError, I1Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
