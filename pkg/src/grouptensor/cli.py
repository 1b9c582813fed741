"""Command-line entry point.

Exit codes: 0 success, 1 bad parameters or input, 2 a resource cap was hit,
3 an internal consistency failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import config
from .conjugacy import conjugacy_classes, ell_regular_count, torus_class_counts
from .errors import GroupTensorError, InputError, ParameterError, ResourceError
from .groups import make_group, quasirandom_degree
from .matching import (
    exact_max_matching,
    gowers_matching_upper,
    heuristic_matching,
    load_matching,
    matching_to_dict,
    save_matching,
    verify_matching,
)
from .modrep import radical_trace_chain, semisimple_summary
from .report import bounds_report, emit, gap_eval, gap_scan, quasirandom_probe
from .slicerank import c_p, clp_count, exact_slice_rank, load_tensor, sr_lower_semisimple


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _print(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_group(args) -> None:
    G = make_group(args.group)
    _print(
        {
            "group": G.descriptor,
            "family": G.family,
            "order": G.order,
            "generators": [int(g) for g in G.generators],
            "identity": int(G.identity),
            "is_abelian": G.is_abelian,
            "quasirandom_degree": quasirandom_degree(G),
        }
    )


def cmd_classes(args) -> None:
    G = make_group(args.group)
    data = conjugacy_classes(G)
    out = {
        "group": G.descriptor,
        "classes": [{"rep": int(G.code(c.rep)), "size": c.size, "order": c.element_order} for c in data.classes],
    }
    if args.ell is not None:
        out["ell"] = args.ell
        out["ell_regular_count"] = ell_regular_count(G, args.ell)
    if G.family == "psl2":
        t = torus_class_counts(G)
        out["torus"] = dataclasses.asdict(t)
    _print(out)


def cmd_semisimple(args) -> None:
    G = make_group(args.group)
    s = semisimple_summary(G, args.ell, args.seed)
    _print({"group": G.descriptor, "ell": args.ell, **s.as_dict()})


def cmd_radical_oracle(args) -> None:
    G = make_group(args.group)
    _print({"group": G.descriptor, "ell": args.ell, "dim_radical": radical_trace_chain(G, args.ell)})


def cmd_matching(args) -> None:
    if args.action == "verify":
        if not args.file:
            raise ParameterError("matching verify needs --file")
        G, cand = load_matching(args.file)
        if args.group and make_group(args.group) != G:
            raise InputError(f"file is for {G.descriptor}, not {args.group}")
        res = verify_matching(G, cand)
        _print({"group": G.descriptor, "m": cand.m, "valid": res.valid, "violation": res.violation})
        return
    if not args.group:
        raise ParameterError(f"matching {args.action} needs --group")
    G = make_group(args.group)
    if args.action == "bound":
        D = quasirandom_degree(G)
        upper = gowers_matching_upper(G.order, D)
        _print({"group": G.descriptor, "order": G.order, "D_lower": D, "matching_upper": upper, "vacuous": upper >= G.order})
        return
    if args.action == "exact":
        _, cand = exact_max_matching(G)
    else:
        cand = heuristic_matching(G, args.seed, args.iters)
    if args.file:
        save_matching(G, cand, args.file)
    _print({"m": cand.m, **matching_to_dict(G, cand)})


def cmd_slicerank(args) -> None:
    if args.action == "exact":
        if not args.tensor:
            raise ParameterError("slicerank exact needs --tensor")
        T = load_tensor(args.tensor)
        value, w = exact_slice_rank(T)
        _print(
            {
                "dims": list(T.dims),
                "char": T.char,
                "slice_rank": value,
                "witness": {
                    name: np.asarray(V.basis.data).tolist() for name, V in (("V1", w.V1), ("V2", w.V2), ("V3", w.V3))
                },
            }
        )
        return
    if not args.group or args.ell is None:
        raise ParameterError("slicerank bounds needs --group and --ell")
    G = make_group(args.group)
    s = semisimple_summary(G, args.ell, args.seed)
    cand = heuristic_matching(G, args.seed, args.iters)
    _print(
        {
            "group": G.descriptor,
            "ell": args.ell,
            "order": G.order,
            "sr_lower_semisimple": sr_lower_semisimple(G, args.ell, s),
            "sr_lower_matching": cand.m,
            "upper": G.order,
        }
    )


def cmd_clp(args) -> None:
    N, bound = clp_count(args.p, args.n)
    _print({"p": args.p, "n": args.n, "N": N, "bound": bound, "ambient": args.p**args.n})


def cmd_cp(args) -> None:
    _print({"p": args.p, "tol": args.tol, "c_p": c_p(args.p, args.tol)})


def cmd_report(args) -> None:
    reports = [bounds_report(make_group(d), args.seed, args.iters) for d in args.group]
    text = emit(reports[0] if len(reports) == 1 else reports, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


def cmd_gap(args) -> None:
    if args.scan is not None:
        first, curves = gap_scan(args.scan, args.p or 3)
        rows = curves if args.all else [c for c in curves if c.p == first]
        _print({"crossover_p": first, "scanned": len(curves), "curves": [c.to_dict() for c in rows]})
        return
    if args.p is None:
        raise ParameterError("gap needs --p or --scan")
    _print(gap_eval(args.p).to_dict())


def cmd_probe(args) -> None:
    rows = quasirandom_probe([make_group(d) for d in args.group], args.seed)
    _print([r.to_dict() for r in rows])


def _common_flags() -> argparse.ArgumentParser:
    """--config and the cap flags, accepted before or after the subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help=f"TOML caps file (default: ${config.ENV_VAR})")
    grp = common.add_argument_group("resource caps (override the config file)")
    for f in dataclasses.fields(config.Config):
        grp.add_argument(
            f"--{f.name.replace('_', '-')}", type=int, dest=f"cap_{f.name}", metavar="N", default=argparse.SUPPRESS
        )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(
        prog="grouptensor", description="Slice-rank and matching bounds for finite groups.", parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    p = add("group", help="describe a group")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_group)

    p = add("classes", help="conjugacy classes")
    p.add_argument("--group", required=True)
    p.add_argument("--ell", type=int)
    p.set_defaults(func=cmd_classes)

    p = add("semisimple", help="simple modules and dim k[G]/J")
    p.add_argument("--group", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_semisimple)

    p = add("radical-oracle", help="dim J by the trace-form chain (small groups)")
    p.add_argument("--group", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_radical_oracle)

    p = add("matching", help="3-matchings")
    p.add_argument("action", choices=["exact", "heuristic", "verify", "bound"])
    p.add_argument("--group")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--file", type=Path)
    p.set_defaults(func=cmd_matching)

    p = add("slicerank", help="slice-rank bounds or the exact oracle")
    p.add_argument("action", choices=["bounds", "exact"])
    p.add_argument("--group")
    p.add_argument("--ell", type=int)
    p.add_argument("--tensor", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=200)
    p.set_defaults(func=cmd_slicerank)

    p = add("clp", help="polynomial-method bound for F_p^n")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_clp)

    p = add("cp", help="the constant c_p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_cp)

    p = add("report", help="bounds report for one or more groups")
    p.add_argument("--group", action="append", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=200)
    p.set_defaults(func=cmd_report)

    p = add("gap", help="closed-form gap curve for PSL(2,p)")
    p.add_argument("--p", type=int, help="single prime (or scan start with --scan)")
    p.add_argument("--scan", type=int, metavar="PMAX", help="scan odd primes up to PMAX")
    p.add_argument("--all", action="store_true", help="print every scanned curve")
    p.set_defaults(func=cmd_gap)

    p = add("probe", help="min over ell of dim k[G]/J divided by |G|")
    p.add_argument("--group", action="append", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    saved = config.get()
    try:
        if getattr(args, "config", None):
            config.set_config(config.load(args.config))
        caps = {k[4:]: v for k, v in vars(args).items() if k.startswith("cap_")}
        for key, value in caps.items():
            if value is not None and value < 1:
                raise ParameterError(f"--{key.replace('_', '-')} must be positive")
        config.override(**caps)
        args.func(args)
    except (ParameterError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 2
    except GroupTensorError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        config.set_config(saved)
    return 0


if __name__ == "__main__":
    sys.exit(main())
