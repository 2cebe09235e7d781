"""Command line entry point: ``twistfact <command> ...``; every report is JSON."""
from __future__ import annotations

import argparse
import json
import math
import pathlib
import sys

from . import conjcheck, descent, visualization
from .curve import load_curve
from .dirichlet import from_spec
from .errors import TwistfactError
from .lvalue import DEFAULT_PRECISION, script_L_algebraic


def _data(*parts):
    return pathlib.Path(__file__).parent / "data" / pathlib.Path(*parts)


def load_char(ref):
    """A character from a JSON file, an inline JSON object, or a bundled name."""
    text = str(ref)
    if text.lstrip().startswith("{"):
        return from_spec(json.loads(text))
    path = pathlib.Path(text)
    if not path.exists():
        bundled = _data("chars", path.name if path.suffix else path.name + ".json")
        if not bundled.exists():
            raise TwistfactError(f"unknown character {ref!r}")
        path = bundled
    try:
        return from_spec(json.loads(path.read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise TwistfactError(f"bad character spec {path}: {exc}") from exc


def _embedding(args, d):
    k = args.embedding if args.embedding is not None else 1
    if math.gcd(k, d) != 1:
        raise TwistfactError(f"embedding index {k} is not a unit mod {d}")
    return k % d


def cmd_lvalue(args):
    E, chi = load_curve(args.curve), load_char(args.char)
    sl = script_L_algebraic(E, chi, None, args.prec)
    return sl.to_json(_embedding(args, chi.d))


def cmd_factor(args):
    E, chi = load_curve(args.curve), load_char(args.char)
    sl = script_L_algebraic(E, chi, args.p, args.prec)
    k = _embedding(args, chi.d)
    out = sl.to_json(k)
    if sl.ideal_part is not None:
        part = conjcheck.lhs_for_embedding(sl, k)
        out["ideal_part_p"] = part.to_json()
        out["ideal_part_text"] = str(part)
        out["ideal_part_vector"] = list(part.vector())
    return out


def cmd_visualize(args):
    E, mw = visualization.load_mw_fixture(args.mw)
    p = args.p or mw.raw.get("p", 11)
    M = visualization.action_matrix_auto(E, mw.K, mw.generators, p, torsion_trivial=mw.torsion_trivial)
    out = {"curve": E.label, "action_matrix": M.to_json(), "order_of_tau": mw.K.order_of_tau()}
    if args.char:
        chi = load_char(args.char)
        part = None
        if args.curve:
            sl = script_L_algebraic(load_curve(args.curve), chi, p, args.prec)
            part = sl.ideal_part
            out["compared_curve"] = sl.curve
        out["corollary"] = visualization.corollary_check(M, chi, p, part)
    return out


def cmd_descent(args):
    fx = descent.load_descent_fixture(args.fixture)
    val = descent.fixture_validate(fx)
    out = {"validation": val}
    if val["valid"]:
        rep, cands = descent.h_theta_from_fixture(fx)
        d = args.d or fx.q
        out["eigen_report"] = rep.to_json()
        out["h_theta_candidates"] = [[f"x - {a}" for a in c] for c in cands]
        out["rhs_ideals"] = [str(descent.rhs_ideal(c, fx.p, d)) for c in cands]
    return out


def cmd_verify(args):
    return conjcheck.run_pipeline(args.config, args.prec, args.embedding)


def cmd_bsd_check(args):
    E, chi = load_curve(args.curve), load_char(args.char)
    sl = script_L_algebraic(E, chi, None, args.prec)
    return conjcheck.bsd_norm_check(E, sl)


def build_parser():
    ap = argparse.ArgumentParser(prog="twistfact", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, prec=True):
        sp.add_argument("--out", help="also write the JSON report to this file")
        sp.add_argument("--embedding", type=int, help="pin iota: zeta -> exp(2 pi i k / d)")
        if prec:
            sp.add_argument("--prec", type=int, default=None, help="working precision in bits")

    sp = sub.add_parser("lvalue", help="twisted L-value and its algebraic normalization")
    sp.add_argument("curve")
    sp.add_argument("char")
    common(sp)
    sp.set_defaults(func=cmd_lvalue)

    sp = sub.add_parser("factor", help="factor scriptL(E, chi) above p")
    sp.add_argument("curve")
    sp.add_argument("char")
    sp.add_argument("--p", type=int, default=11)
    common(sp)
    sp.set_defaults(func=cmd_factor)

    sp = sub.add_parser("visualize", help="Galois action on Mordell-Weil generators")
    sp.add_argument("mw")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--char", help="character for the corollary check")
    sp.add_argument("--curve", help="curve whose scriptL is compared with the product ideal")
    common(sp)
    sp.set_defaults(func=cmd_visualize)

    sp = sub.add_parser("descent", help="h_theta from a descent fixture")
    sp.add_argument("fixture")
    sp.add_argument("--d", type=int, default=None, help="order of chi (defaults to q)")
    common(sp, prec=False)
    sp.set_defaults(func=cmd_descent)

    sp = sub.add_parser("verify", help="run a batch configuration")
    sp.add_argument("config")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bsd-check", help="compare the half-norm with the BSD prediction")
    sp.add_argument("curve")
    sp.add_argument("char")
    common(sp)
    sp.set_defaults(func=cmd_bsd_check)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "prec", None) is None and hasattr(args, "prec") and args.command != "verify":
        args.prec = DEFAULT_PRECISION
    try:
        report = args.func(args)
    except (TwistfactError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    text = json.dumps(report, indent=2, sort_keys=False, default=str)
    print(text)
    if args.out:
        pathlib.Path(args.out).write_text(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
