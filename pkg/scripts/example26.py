"""Projective vs unconditional cross-norm on the two 2x2 matrices, with certificates as JSON."""
import argparse
import json
import math

from hypsmooth import SeminormSpec
from hypsmooth.norms import example26, projective_norm_l2, ucnorm_bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", help="write certificates here instead of stdout")
    args = ap.parse_args()
    _, a, b = example26()
    l2 = SeminormSpec.sobolev2(0)
    report = {}
    for name, T in (("a", a), ("b", b)):
        cert = ucnorm_bounds(T, l2, l2)
        assert cert.verify(), cert.problems()
        report[name] = {"projective": projective_norm_l2(T), "uc": cert.to_json_obj()}
        print(f"{name}: projective={report[name]['projective']:.6f} uc in [{cert.lower:.6f}, {cert.upper:.6f}]")
    print(f"sqrt(17) = {math.sqrt(17):.6f} > uc upper(a) = {report['a']['uc']['upper']:.6f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)


if __name__ == "__main__":
    main()
