"""Write a reference zero table from mpmath.zetazero (independent of zgl's zero finder).

    python scripts/make_reference_zeros.py 100 tests/data/zeros_ref_100.txt
"""

import sys

import mpmath as mp


def main(n: int, out: str) -> None:
    mp.mp.dps = 25
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(f"# first {n} ordinates from mpmath.zetazero\n")
        fh.write("# precision=1e-15\n")
        for k in range(1, n + 1):
            fh.write(mp.nstr(mp.zetazero(k).imag, 20, strip_zeros=False) + "\n")


if __name__ == "__main__":
    main(int(sys.argv[1]), sys.argv[2])
