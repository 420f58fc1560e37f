"""Fill the zero cache up to a height (default 84000, enough for every shipped grid).

    python3 scripts/compute_zero_cache.py [HEIGHT] [--cache DIR] [--workers N]
"""

import argparse
import time

from zgl.zeros import count_check, ensure_zeros


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("height", nargs="?", type=float, default=84000.0)
    p.add_argument("--cache", default=None, help="cache directory (default $ZGL_DATA_DIR/cache)")
    p.add_argument("--workers", type=int, default=4)
    a = p.parse_args()
    t0 = time.perf_counter()
    table = ensure_zeros(a.height, a.cache, workers=a.workers)
    check = count_check(a.height, table)
    print(f"{len(table)} zeros up to {table.max_height:g} in {time.perf_counter() - t0:.1f}s; "
          f"N - main = {check.difference:+.3f} ({'ok' if check.passed else 'FAILED'})")


if __name__ == "__main__":
    main()
