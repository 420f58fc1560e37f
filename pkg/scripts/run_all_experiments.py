"""Run every experiment on its default configuration and collate a report.

    python3 scripts/run_all_experiments.py [--out DIR] [--workers N]

Writes one CSV/JSON pair per run plus summary.txt, summary.csv and .dat files.
"""

import argparse
import sys

from zgl.cli import main as zgl

RUNS = [
    ("thm31", []), ("thm31", ["xi=1/2"]),
    ("cor32", []), ("cor32", ["m=1", "q=4"]),
    ("bound11", []), ("bound11", ["m=1", "q=4"]), ("bound11", ["scale=per_eq_1_1"]),
    ("lemma23", []), ("lemma24", []), ("lemma24", ["xi=2/5"]),
    ("lemma22", []), ("lemma22", ["chi.q=5"]), ("lemma22", ["chi.q=5", "chi.index=1"]),
    ("gonek", []), ("stirling", []), ("gauss-check", []),
]


def main() -> int:
    p = argparse.ArgumentParser(description="run all experiments")
    p.add_argument("--out", default="zgl-data/results")
    p.add_argument("--workers", type=int, default=4)
    a = p.parse_args()
    for exp, sets in RUNS:
        argv = ["run", exp, "--out", a.out, "--workers", str(a.workers)]
        if sets:
            argv += ["--set", *sets]
        print(f"$ zgl {' '.join(argv)}", flush=True)
        zgl(argv)
    return zgl(["report", "--dir", a.out])


if __name__ == "__main__":
    sys.exit(main())
