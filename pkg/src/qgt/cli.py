"""Command-line entry point: ``qgt verify|sweep|replay|selftest``.

Exit codes: 0 all checks hold, 1 at least one violation or mismatch,
2 invalid configuration or unreadable input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import campaign
from .campaign import CampaignConfig, ConfigError

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _eig_range(text):
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("--eig-range takes LO,HI")
    return tuple(vals)


def build_parser():
    parser = argparse.ArgumentParser(prog="qgt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification campaign")
    v.add_argument("suite", choices=campaign.SUITES + ("all",))
    v.add_argument("--q", type=float, action="append", help="single q value (repeatable)")
    v.add_argument("--q-grid", type=_floats, help="comma-separated q values")
    v.add_argument("--dim", type=_ints, action="append", help="dimension(s), comma-separated")
    v.add_argument("--trials", type=int, default=200, help="trials per cell")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--eig-range", type=_eig_range, default=(0.05, 20.0))
    v.add_argument("--tol-scale", type=float, default=1e-9)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out", help="report path (default: stdout)")
    v.add_argument("--workers", type=int, help="worker processes (default: QGT_THREADS or CPU count)")
    v.add_argument("--serial", action="store_true", help="single-process run")
    v.add_argument("--records-dir", help="write each failed trial as a replay file here")
    v.add_argument("--all-records", action="store_true",
                   help="with --records-dir, write replay files for passing trials too")

    s = sub.add_parser("sweep", help="deformed Golden-Thompson sides along a q grid for one seeded pair")
    s.add_argument("--a-seed", type=int, default=1)
    s.add_argument("--b-seed", type=int, default=2)
    s.add_argument("--q-grid", type=_floats,
                   default=[1.0 + 0.1 * i for i in range(21)])
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--eig-range", type=_eig_range, default=(0.05, 20.0))
    s.add_argument("--out", help="CSV path (default: stdout)")

    r = sub.add_parser("replay", help="re-evaluate a stored trial")
    r.add_argument("path")
    r.add_argument("--index", type=int, default=0, help="failure index when PATH is a report")

    sub.add_parser("selftest", help="finite-difference and scalar-oracle cross-checks")
    return parser


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args):
    q_grid = list(args.q or []) + list(args.q_grid or [])
    dims = [d for group in (args.dim or []) for d in group]
    cfg = CampaignConfig(
        suite=args.suite,
        q_grid=tuple(q_grid) if q_grid else campaign.DEFAULT_Q_GRID,
        dims=tuple(dims) if dims else campaign.DEFAULT_DIMS,
        trials_per_cell=args.trials,
        seed=args.seed,
        eigenvalue_range=args.eig_range,
        tolerance_scale=args.tol_scale,
        output_format=args.format,
    )
    workers = 1 if args.serial else (args.workers or campaign.default_workers())
    start = time.perf_counter()
    report = campaign.run_campaign(cfg, workers=workers)
    elapsed = time.perf_counter() - start

    if args.format == "json":
        _write(campaign.report_to_json(report), args.out)
    else:
        _write(campaign.records_to_csv(campaign.report_records(report)), args.out)

    if args.records_dir:
        os.makedirs(args.records_dir, exist_ok=True)
        payloads = _with_inputs(cfg, report) if args.all_records else report["failures"]
        for p in payloads:
            name = f"{p['suite']}_q{p['q']:g}_d{p['dim']}_t{p['trial_index']}.json"
            with open(os.path.join(args.records_dir, name), "w", encoding="utf-8") as fh:
                json.dump(p, fh, sort_keys=True, indent=1)

    for cell in report["cells"]:
        agg = cell["aggregates"]
        status = "ok" if cell["violations"] == 0 else "VIOLATED"
        print(f"{cell['suite']:<14} q={cell['q']:<5g} dim={cell['dim']:<3d} "
              f"trials={agg['trials']:<5d} violations={cell['violations']:<4d} "
              f"min_margin={agg['min_relative_margin']} {status}", file=sys.stderr)
    verdict = "PASS" if report["pass"] else f"FAIL ({len(report['failures'])} violations)"
    print(f"{verdict} in {elapsed:.1f}s [{report['backend']} kernels]", file=sys.stderr)
    return EXIT_OK if report["pass"] else EXIT_VIOLATION


def _with_inputs(cfg, report):
    """Regenerate every trial of ``report`` with its inputs attached."""
    out = []
    for cell in report["cells"]:
        for rec in cell["records"]:
            seed = rec["seed"]
            full = campaign.run_trial(rec["suite"], rec["q"], rec["dim"], rec["trial_index"],
                                      seed, cfg, keep_inputs=True)
            out.append(campaign.failure_entry(full, cfg.tolerance_scale))
    return out


def _cmd_sweep(args):
    rows = campaign.sweep_gap(args.a_seed, args.b_seed, args.q_grid, args.dim, args.eig_range)
    _write(campaign.sweep_to_csv(rows), args.out)
    return EXIT_OK


def _cmd_replay(args):
    record = campaign.load_record(args.path, args.index)
    _, summary = campaign.replay_record(record)
    print(json.dumps(summary, indent=2))
    if not summary["bitwise"] and summary["reproduced"]:
        print("note: reproduced within 1e-12 but not bit-for-bit", file=sys.stderr)
    return EXIT_OK if summary["reproduced"] else EXIT_VIOLATION


def _cmd_selftest(args):
    from .selftest import run_selftest

    results = run_selftest()
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VIOLATION


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"verify": _cmd_verify, "sweep": _cmd_sweep,
                "replay": _cmd_replay, "selftest": _cmd_selftest}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
