"""Iterations of φ to the class representative, by word length, with the fitted log envelope."""
import argparse
import csv
import sys
import time

from hypsmooth import Group
from hypsmooth.conjugacy import ConjugacyConfig, conjugacy_engine


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="free:2")
    ap.add_argument("--radius", type=int, default=8)
    ap.add_argument("--c10", type=float, default=1.0)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    G = Group.from_tag(args.group)
    eng = conjugacy_engine(G, ConjugacyConfig(c10=args.c10))
    t0 = time.perf_counter()
    prof = eng.convergence_profile(args.radius)
    elapsed = time.perf_counter() - t0

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["length", "max_iterations"])
    for l, it in prof.max_by_length.items():
        w.writerow([l, it])
    if args.out:
        fh.close()
    print(f"# {len(prof.rows)} elements in {elapsed:.1f}s; C11={prof.c11:.3f} C12={prof.c12:.3f}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
