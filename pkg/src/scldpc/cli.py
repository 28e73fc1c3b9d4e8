"""Command-line interface.

Subcommands mirror the library stages: oo-solve, cpo, count, baseline, gast,
pipeline, table1, export-alist.  Every command that uses randomness takes a
--seed flag; output is JSON on stdout unless --out is given.  The exhaustive
searches honor the SCLDPC_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import ast
import json
import sys
from pathlib import Path

from . import baselines, pipeline
from .alist import export_code_alist
from .cpo import cpo_optimize
from .cycles import count_ugast_3330, girth_check
from .gast import gast_scan, remove_gast
from .gf import FieldGF
from .overlap import count_partition_choices, realize_mask, solve_optimal_overlap
from .qc import build_ab_powers, code_from_json, code_to_json, couple, label_edges


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=1, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load_code(path: str):
    return code_from_json(Path(path).read_text())


def _cmd_oo_solve(args) -> None:
    sol = solve_optimal_overlap(args.kappa, args.L)
    _emit(
        {
            "F_star": sol.f_star,
            "alpha": sol.alpha,
            "optima": [v.as_list() for v in sol.optima],
            "N_choices": count_partition_choices(sol.optima[0], args.kappa, sol.alpha),
        },
        args.out,
    )


def _cmd_cpo(args) -> None:
    code = _load_code(args.code)
    res = cpo_optimize(
        code.proto,
        code.mask,
        args.L if args.L else code.L,
        budget=args.budget,
        seed=args.seed,
        target=args.target,
    )
    _emit(res.as_dict(), args.out)


def _cmd_count(args) -> None:
    code = _load_code(args.code)
    if args.what == "ugast3330":
        value = count_ugast_3330(code)
    else:
        from .cycles import build_window

        win = build_window(code.proto, code.mask)
        fs, fd = win.structural_counts6()
        value = code.L * fs + (code.L - 1) * fd
    _emit({"what": args.what, "count": value, "girth": girth_check(code)}, args.out)


def _cmd_baseline(args) -> None:
    proto = build_ab_powers(3, args.kappa)
    if args.method == "cv":
        zeta, count = baselines.cv_exhaustive_best(proto, args.L)
        _emit({"method": "cv", "zeta": list(zeta), "count": count}, args.out)
    else:
        mask, count = baselines.mo_best(proto, args.L)
        _emit(
            {"method": "mo", "mask": [list(r) for r in mask.assign], "count": count},
            args.out,
        )


def _parse_targets(text: str) -> list[tuple]:
    parsed = ast.literal_eval(f"[{text}]")
    return [tuple(t) for t in parsed]


def _cmd_gast(args) -> None:
    code = _load_code(args.code)
    field = FieldGF(args.q.bit_length() - 1)
    if field.q != args.q:
        raise SystemExit(f"q must be a power of two, got {args.q}")
    targets = _parse_targets(args.targets)
    found = gast_scan(code, field, targets, a_max=args.amax)
    if args.action == "scan":
        _emit(
            [
                {
                    "label": list(inst.label),
                    "vns": list(inst.topology.vn_ids),
                    "witness": list(inst.witness) if inst.witness else None,
                }
                for inst in found
            ],
            args.out,
        )
        return
    applied = []
    for inst in found:
        outcome, code = remove_gast(code, inst, field)
        applied.append(
            {
                "label": list(inst.label),
                "vns": list(inst.topology.vn_ids),
                "removed": outcome.success,
                "changes": [list(c) for c in outcome.changes or ()],
            }
        )
    _emit({"results": applied, "code": json.loads(code_to_json(code))}, args.out)


def _cmd_pipeline(args) -> None:
    config = pipeline.DesignConfig(
        kappa=args.kappa,
        p=args.p if args.p else args.kappa,
        L=args.L,
        field_lam=args.field_lam,
        seed_partition=args.seed_partition,
        seed_labels=args.seed_labels,
        seed_cpo=args.seed_cpo,
        cpo_budget=args.budget,
        cpo_target=args.target,
        gast_targets=tuple(_parse_targets(args.targets)),
        gast_a_max=args.amax,
        optimum_index=args.optimum_index,
    )
    report = pipeline.run_pipeline(config, out_dir=args.out_dir)
    if args.out_dir is None:
        print(report.to_json())
    else:
        print(report.summary())


def _cmd_table1(args) -> None:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    table = pipeline.table1_report(args.L, args.sizes, methods=methods)
    if args.json:
        _emit(table, args.out)
    else:
        print(pipeline.render_table1(table))


def _cmd_export_alist(args) -> None:
    code = _load_code(args.code)
    with open(args.out, "w") as fh:
        export_code_alist(code, fh)


def _cmd_make_code(args) -> None:
    proto = build_ab_powers(3, args.kappa)
    sol = solve_optimal_overlap(args.kappa, args.L)
    mask = realize_mask(sol.optima[0], args.kappa, args.seed)
    code = couple(proto, mask, args.L)
    if args.field_lam:
        code = label_edges(code, FieldGF(args.field_lam), args.seed)
    text = code_to_json(code)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="scldpc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("oo-solve", help="solve the optimal-overlap partitioning problem")
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_oo_solve)

    s = sub.add_parser("cpo", help="run the circulant power optimizer on a code")
    s.add_argument("--code", required=True)
    s.add_argument("--L", type=int, default=0)
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--target", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_cpo)

    s = sub.add_parser("count", help="cycle or absorbing-set census of a code")
    s.add_argument("--what", choices=("cycles6", "ugast3330"), required=True)
    s.add_argument("--code", required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_count)

    s = sub.add_parser("baseline", help="cutting-vector or minimum-overlap baselines")
    s.add_argument("--method", choices=("cv", "mo"), required=True)
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_baseline)

    s = sub.add_parser("gast", help="scan for or remove absorbing sets")
    s.add_argument("action", choices=("scan", "remove"))
    s.add_argument("--code", required=True)
    s.add_argument("--q", type=int, default=4)
    s.add_argument("--targets", default="(4,2,2,5,0),(6,0,0,9,0)")
    s.add_argument("--amax", type=int, default=8)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_gast)

    s = sub.add_parser("pipeline", help="run the full design flow")
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--p", type=int, default=0)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--field-lam", type=int, default=2)
    s.add_argument("--seed-partition", type=int, default=1)
    s.add_argument("--seed-labels", type=int, default=1)
    s.add_argument("--seed-cpo", type=int, default=0)
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--target", type=int, default=0)
    s.add_argument("--targets", default="(4,2,2,5,0)")
    s.add_argument("--amax", type=int, default=5)
    s.add_argument("--optimum-index", type=int, default=0)
    s.add_argument("--out-dir")
    s.set_defaults(func=_cmd_pipeline)

    s = sub.add_parser("table1", help="comparison table across design techniques")
    s.add_argument("--L", type=int, default=30)
    s.add_argument("--sizes", type=int, nargs="+", default=[7, 11, 13, 17])
    s.add_argument("--methods", default="uncoupled,cv")
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_table1)

    s = sub.add_parser("export-alist", help="write the lifted binary matrix as alist")
    s.add_argument("--code", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_export_alist)

    s = sub.add_parser("make-code", help="build an optimal-overlap code file")
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--field-lam", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_make_code)

    args = ap.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
