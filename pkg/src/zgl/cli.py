"""``zgl`` command line: zero tables, experiment runs and result reports.

Exit codes: 0 success, 1 an experiment failed its checks, 2 usage or
configuration error, 3 data, coverage or numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import load_config, parse_overrides, run_from_config
from .errors import ConfigError, ConvergenceError, DataError, DomainError, ZGLError
from .experiments import EXPERIMENTS, write_series
from .zeros import ZeroTable, count_check, find_zeros, load_zero_table, save_zero_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.4f}"


# ---------------------------------------------------------------------------
# zeros


def cmd_zeros(args) -> int:
    if args.action == "compute":
        table = find_zeros(args.t_from, args.t_to, workers=args.workers)
        save_zero_table(table, args.out)
        print(f"wrote {len(table)} ordinates in [{args.t_from:g}, {args.t_to:g}] to {args.out}")
        return EXIT_OK
    if args.action == "import":
        t = load_zero_table(args.inp)
        t = ZeroTable(t.ordinates, t.max_height, "imported", t.precision_hint)
        save_zero_table(t, args.out)
        print(f"imported {len(t)} ordinates up to {t.max_height:g} into {args.out}")
        return EXIT_OK
    table = load_zero_table(args.table)
    r = count_check(args.T, table, args.slack)
    status = "PASS" if r.passed else "FAIL"
    print(f"N={r.count} main={r.main_term:.6f} diff={r.difference:+.6f} slack={args.slack:g} {status}")
    return EXIT_OK if r.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# run


def cmd_run(args) -> int:
    overrides = parse_overrides(args.set)
    if args.out is not None:
        overrides["out"] = args.out
    if args.workers is not None:
        overrides["workers"] = str(args.workers)
    cfg = load_config(args.experiment_id, args.config, overrides)
    series = run_from_config(cfg)
    csv_path, json_path = write_series(series, cfg.as_dict(), cfg.output_dir())
    checks = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in series.checks.items())
    print(f"{series.experiment_id}: slope={_fmt(series.fitted_slope)} cap={_fmt(series.cap)} {checks}")
    print(f"{'PASS' if series.passed else 'FAIL'} -> {json_path}")
    return EXIT_OK if series.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    d = Path(args.dir)
    files = sorted(d.glob("*.json")) if d.is_dir() else []
    rows = []
    for f in files:
        try:
            data = json.loads(f.read_text(encoding="utf-8"))
            rows.append((f.stem, data["experiment_id"], data.get("fitted_slope"), data.get("cap"),
                         bool(data["passed"]), data["points"]))
        except (json.JSONDecodeError, KeyError) as exc:
            raise DataError(f"{f}: not a result file ({exc})") from None
    if not rows:
        print(f"warning: no results in {d}", file=sys.stderr)
        return EXIT_OK
    header = ["result", "experiment", "slope", "cap", "status"]
    table = [[stem, eid, _fmt(slope), _fmt(cap), "PASS" if ok else "FAIL"]
             for stem, eid, slope, cap, ok, _ in rows]
    widths = [max(len(r[i]) for r in [header, *table]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header, *table]]
    text = "\n".join(lines) + "\n"
    (d / "summary.txt").write_text(text, encoding="utf-8")
    with (d / "summary.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(table)
    for stem, *_, points in rows:
        body = "".join(f"{s!r} {r!r}\n" for s, r in points)
        (d / f"{stem}.dat").write_text(f"# scale residual\n{body}", encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if all(r[4] for r in rows) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zgl", description="Zeta-zero sums and desk-scale residual experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    z = sub.add_parser("zeros", help="compute, import or verify zero tables")
    zs = z.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = zs.add_parser("compute", help="locate zeros in a height range")
    c.add_argument("--from", dest="t_from", type=float, required=True)
    c.add_argument("--to", dest="t_to", type=float, required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--workers", type=int, default=1)
    i = zs.add_parser("import", help="validate a text table and store it")
    i.add_argument("--in", dest="inp", required=True)
    i.add_argument("--out", required=True)
    v = zs.add_parser("verify", help="compare N(T) with the smooth main term")
    v.add_argument("--table", required=True)
    v.add_argument("--T", dest="T", type=float, required=True)
    v.add_argument("--slack", type=float, default=3.0)
    z.set_defaults(func=cmd_zeros)

    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("experiment_id", choices=EXPERIMENTS)
    r.add_argument("--config")
    r.add_argument("--set", nargs="+", action="extend", default=[], metavar="KEY=VALUE")
    r.add_argument("--out")
    r.add_argument("--workers", type=int)
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="collate result files")
    rep.add_argument("--dir", required=True)
    rep.set_defaults(func=cmd_report)
    return p


def _error(message: str, code: int) -> int:
    print("error: " + " ".join(str(message).split()), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        return _error(exc, EXIT_USAGE)
    except (DataError, ConvergenceError) as exc:
        return _error(exc, EXIT_DATA)
    except OSError as exc:
        return _error(f"{exc.filename or ''}: {exc.strerror}", EXIT_DATA)
    except ZGLError as exc:
        return _error(exc, EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
