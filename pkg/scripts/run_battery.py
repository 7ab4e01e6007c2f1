"""Run the three-way cross-check over the fixture battery and print one row per fixture."""
import argparse
import json
import random
import time

from abelia.mainthm import cross_check, fixture_battery, random_data


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-g", type=int, default=4)
    ap.add_argument("--t0", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--json", action="store_true", help="one JSON object per line")
    args = ap.parse_args()

    specs = fixture_battery(args.max_g, tuple(args.t0))
    start = time.perf_counter()
    bad = 0
    for i, spec in enumerate(specs):
        rep = cross_check(random_data(random.Random(args.seed + i), spec))
        bad += not rep.agree
        row = {"g": spec.g, "g0": spec.g0, "k": spec.k, "hbar_bar": spec.hbar_bar, "t0": spec.t0,
               "dims": rep.dims(), "page": rep.degeneration_page, "agree": rep.agree}
        if args.json:
            print(json.dumps(row))
        else:
            print(f"g={spec.g} g0={spec.g0} k={spec.k} hb={spec.hbar_bar} t0={spec.t0}  "
                  f"dims={rep.dims()}  page={rep.degeneration_page}  {'ok' if rep.agree else 'DISAGREE'}")
    print(f"# {len(specs)} fixtures, {bad} disagreements, {time.perf_counter() - start:.2f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
