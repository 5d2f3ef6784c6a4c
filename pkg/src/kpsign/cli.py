"""Command-line entry point: JSON on stdout, diagnostics on stderr.

Exit codes: 0 success, 1 negative verdict, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import connectivity, info, kp, model, signature, strata, tropical
from .errors import KpSignError, LimitExceeded, ParseError
from .subsets import label, to_one_based

ENUMERATE_LIMIT = 2 ** 24


def _q(x) -> str:
    return model.format_rational(Fraction(x))


def _f(x: float) -> float:
    return float(f"{x:.15g}")


def load_model(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict) or "matrix" not in data or "kappa" not in data:
        raise ParseError("model JSON needs 'matrix' and 'kappa'")
    return model.build_model(data["matrix"], data["kappa"], data.get("d", 3))


def load_weights(arg, n):
    if os.path.exists(arg):
        try:
            with open(arg) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{arg}: {exc}") from exc
    else:
        data = [x for x in arg.split(",") if x.strip()]
    if not isinstance(data, list):
        raise ParseError("weights must be a JSON list")
    return [model.parse_rational(x) for x in data]


def load_signature(arg, table):
    text = arg
    if arg.startswith("@"):
        with open(arg[1:]) as fh:
            text = fh.read()
    return signature.parse_signature(text, table)


def parse_order(arg, n):
    if arg is None:
        return tuple(range(n))
    try:
        idx = [int(x) for x in arg.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad order {arg!r}") from exc
    return tuple(i - 1 for i in idx)


def parse_range(arg):
    try:
        if ":" in arg:
            lo, hi = arg.split(":")
            return range(int(lo), int(hi) + 1)
        return [int(x) for x in arg.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad range {arg!r}") from exc


def _setup(args):
    m = load_model(args.model)
    t = model.compute_minors(m)
    return m, t


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args):
    m = load_model(args.model)
    return {"valid": True, "n": m.n, "k": m.k, "d": m.d}, 0


def cmd_minors(args):
    m, t = _setup(args)
    return {
        "n": m.n,
        "k": m.k,
        "G": t.G,
        "pivot": to_one_based(t.pivot),
        "minors": {label(s): _q(v) for s, v in sorted(t.minors.items())},
        "terms": {label(s): _q(v) for s, v in sorted(model.cauchy_binet(m, t).terms.items())},
        "plucker_violations": len(model.plucker_audit(t)),
        "exchange_ok": model.exchange_audit(t.support)[0],
    }, 0


def cmd_reduce(args):
    m, t = _setup(args)
    r = model.reduce_model(m, t)
    return {
        "core": to_one_based(r.core),
        "rowset": [i + 1 for i in r.rowset],
        "columns": [c + 1 for c in r.columns],
        "matrix": [[_q(x) for x in row] for row in r.matrix],
        "constant": _q(r.constant),
        "hidden_polys": {str(b + 1): _q(p) for b, p in r.hidden_polys.items()},
    }, 0


def cmd_classes(args):
    _, t = _setup(args)
    part = connectivity.classes(t)
    return {
        "P": part.P,
        "classes": [to_one_based(c) for c in part.classes],
        "sizes": list(part.sizes),
    }, 0


def cmd_count(args):
    m, t = _setup(args)
    P = connectivity.classes(t).P
    return {"n": m.n, "P": P, "G": t.G, "count": connectivity.count_distinct(t)}, 0


def cmd_check_kp(args):
    m, t = _setup(args)
    sig = load_signature(args.signature, t)
    res = kp.kp_residual(model.cauchy_binet(m, t), sig)
    bad = res.nonzero()
    out = {"solitonic": not bad, "nonzero_groups": len(bad)}
    if bad:
        out["groups"] = [
            {"intersection": to_one_based(h), "union": to_one_based(u), "coefficient": _q(v)}
            for (h, u), v in sorted(bad.items())[:10]
        ]
    if args.collision_audit:
        clashes = kp.collision_audit(model.cauchy_binet(m, t))
        out["collisions"] = [
            [[to_one_based(a[0]), to_one_based(a[1])], [to_one_based(b[0]), to_one_based(b[1])]]
            for a, b in clashes
        ]
        if clashes:
            print(f"warning: {len(clashes)} key collisions in power sums", file=sys.stderr)
    return out, 0 if not bad else 1


def cmd_decompose(args):
    m, t = _setup(args)
    sig = load_signature(args.signature, t)
    part = connectivity.classes(t)
    signs = connectivity.decompose(t, sig)
    if signs is None:
        return {"decomposable": False}, 1
    return {
        "decomposable": True,
        "R": signs.row,
        "chi": [signs.chi(a) for a in range(m.n)],
        "flips": to_one_based(signs.flips),
        "family_size": 2 ** part.P,
    }, 0


def _enumerate_chunk(payload):
    data, lo, hi = payload
    m = model.build_model(data["matrix"], data["kappa"], data["d"])
    t = model.compute_minors(m)
    ker = kp.ResidualKernel(model.cauchy_binet(m, t))
    induced = {
        signature.induced_signature(t, signature.RowColSigns(r, S)).values
        for r in (1, -1)
        for S in range(1 << m.n)
    }
    sol = ind = dec = agree = 0
    for bits in range(lo, hi):
        sig = signature.signature_from_bits(t, bits)
        vals = sig.as_dict()
        a = ker.is_zero([vals[x] for x in ker.order])
        b = sig.values in induced
        c = connectivity.decompose(t, sig) is not None
        sol += a
        ind += b
        dec += c
        agree += a == b == c
    return sol, ind, dec, agree


def cmd_enumerate(args):
    m, t = _setup(args)
    total = 2 ** t.G
    if total > ENUMERATE_LIMIT and not args.force:
        raise LimitExceeded(f"2^{t.G} signatures exceeds the limit; pass --force")
    workers = max(1, args.workers)
    step = max(1, -(-total // (workers * 4)))
    chunks = [(m.to_json(), lo, min(total, lo + step)) for lo in range(0, total, step)]
    if workers == 1:
        parts = [_enumerate_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_enumerate_chunk, chunks))
    sol, ind, dec, agree = (sum(p[i] for p in parts) for i in range(4))
    P = connectivity.classes(t).P
    expected = 2 ** (m.n + 1 - P)
    ok = agree == total and sol == expected
    return {
        "signatures": total,
        "solitonic": sol,
        "induced": ind,
        "decomposable": dec,
        "expected": expected,
        "consistent": ok,
    }, 0 if ok else 1


def cmd_omega(args):
    return {"n": args.n, "k": args.k, "s": args.s, "omega": strata.omega(args.n, args.k, args.s)}, 0


def cmd_duality(args):
    ok = strata.duality_check(args.n, args.k, args.s)
    return {"n": args.n, "k": args.k, "s": args.s, "holds": ok}, 0 if ok else 1


def cmd_amoeba(args):
    m, t = _setup(args)
    e = model.cauchy_binet(m, t)
    th = load_weights(args.weights, m.n)
    level = "all" if args.level == "all" else int(args.level)
    fam = strata.negatives(e, th, level, force=args.force)
    witness = strata.disjoint_negatives_search(fam, m.k)
    return {
        "level": level,
        "count": len(fam.members),
        "members": [to_one_based(s) for s in fam.members],
        "disjoint_witness": None if witness is None else [to_one_based(s) for s in witness],
    }, 0


def cmd_leverage(args):
    m = load_model(args.model)
    th = load_weights(args.weights, m.n)
    rep = strata.leverage(m, th)
    return {
        "tau": _q(rep.tau),
        "diagonal": [_q(x) for x in rep.diagonal],
        "trace": _q(rep.trace),
        "flip_ratios": [_q(x) for x in rep.flip_ratios],
        "above_half": sum(1 for x in rep.diagonal if x > Fraction(1, 2)),
    }, 0


def cmd_kl(args):
    if args.mode == "grid":
        rows = info.kl_grid(parse_range(args.n_range), parse_range(args.k_range), parse_range(args.s_range))
        return info.grid_csv(rows), 0
    if args.mode == "star":
        if args.model:
            m, t = _setup(args)
            G, n, P = t.G, m.n, connectivity.classes(t).P
        else:
            _need(args, "n", "k")
            n, G, P = args.n, math.comb(args.n, args.k), info.generic_class_count(args.n, args.k)
        return {"G": G, "n": n, "P": P, "kl_star": _f(info.kl_star(G, n, P))}, 0
    if args.mode == "fixed-s":
        _need(args, "n", "k", "s")
        v = info.kl_fixed_s(args.n, args.k, args.s, args.column_only)
        return {"n": args.n, "k": args.k, "s": args.s, "column_only": args.column_only, "kl_fixed_s": _f(v)}, 0
    # induced
    if not args.model:
        raise ParseError("--model is required for induced mode")
    m, t = _setup(args)
    dist = info.induced_distribution(t, args.s)
    return {
        "G": t.G,
        "s": args.s,
        "classes": len(dist),
        "weights": [{"signature": key, "weight": _q(p)} for key, p in dist],
        "kl_induced": _f(info.kl_from_weights([p for _, p in dist], t.G)),
    }, 0


def _need(args, *names):
    missing = [x for x in names if getattr(args, x) is None]
    if missing:
        raise ParseError("missing " + ", ".join("--" + x for x in missing))


def cmd_tropical(args):
    m, t = _setup(args)
    if args.action == "copy":
        _need(args, "col", "m")
        col = args.col - 1
        if not args.check:
            cm = tropical.copy_soliton(m, col, args.m)
            return {"n": cm.n, "kappa": [_q(x) for x in cm.kappa],
                    "matrix": [[_q(x) for x in row] for row in cm.matrix]}, 0
        th = load_weights(args.weights, m.n) if args.weights else [1] * m.n
        rep = tropical.copy_identity_check(m, col, args.m, th)
        return {
            "col": args.col,
            "m": args.m,
            "direct": _q(rep.direct),
            "expanded": _q(rep.expanded),
            "sigma_in": _q(rep.sigma_in),
            "sigma_out": _q(rep.sigma_out),
            "tau": _q(rep.tau),
            "matches": rep.matches,
            "singular": rep.singular,
            "singular_relation": rep.singular_relation,
        }, 0 if rep.matches else 1
    order = parse_order(args.order, m.n)
    nest = tropical.nested_groups(t, order)
    return {
        "order": [a + 1 for a in nest.order],
        "dominant": to_one_based(nest.dominant),
        "group_sizes": [len(g) for g in nest.groups],
    }, 0


COMMANDS = {
    "validate": cmd_validate,
    "minors": cmd_minors,
    "reduce": cmd_reduce,
    "classes": cmd_classes,
    "count": cmd_count,
    "check-kp": cmd_check_kp,
    "decompose": cmd_decompose,
    "enumerate": cmd_enumerate,
    "omega": cmd_omega,
    "duality": cmd_duality,
    "amoeba": cmd_amoeba,
    "leverage": cmd_leverage,
    "kl": cmd_kl,
    "tropical": cmd_tropical,
}


def build_parser():
    p = argparse.ArgumentParser(prog="kpsign", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def with_model(name, required=True):
        sp = sub.add_parser(name)
        sp.add_argument("--model", required=required)
        return sp

    for name in ("validate", "minors", "reduce", "classes", "count"):
        with_model(name)
    sp = with_model("check-kp")
    sp.add_argument("--signature", required=True, help="'+-' string or @file")
    sp.add_argument("--collision-audit", action="store_true")
    sp = with_model("decompose")
    sp.add_argument("--signature", required=True)
    sp = with_model("enumerate")
    sp.add_argument("--force", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    for name in ("omega", "duality"):
        sp = sub.add_parser(name)
        for x in ("n", "k", "s"):
            sp.add_argument(f"--{x}", type=int, required=True)
    sp = with_model("amoeba")
    sp.add_argument("--level", default="all")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--force", action="store_true")
    sp = with_model("leverage")
    sp.add_argument("--weights", required=True)
    sp = with_model("kl", required=False)
    sp.add_argument("--mode", choices=("star", "fixed-s", "induced", "grid"), required=True)
    for x in ("n", "k", "s"):
        sp.add_argument(f"--{x}", type=int)
    sp.add_argument("--column-only", action="store_true")
    sp.add_argument("--n-range", default="3:10")
    sp.add_argument("--k-range", default="1:9")
    sp.add_argument("--s-range", default="0:10")
    sp = with_model("tropical")
    sp.add_argument("action", nargs="?", choices=("dominant", "copy"), default="dominant")
    sp.add_argument("--order")
    sp.add_argument("--col", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--check", action="store_true")
    sp.add_argument("--weights")
    return p


def _join_signature(argv):
    # signature strings may start with '-', which argparse would take for a flag
    out = []
    it = iter(argv)
    for a in it:
        if a == "--signature":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--signature={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_signature(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        out, code = COMMANDS[args.command](args)
    except (KpSignError, FileNotFoundError, ValueError, IndexError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if isinstance(out, str):
        sys.stdout.write(out)
    else:
        json.dump(out, sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
