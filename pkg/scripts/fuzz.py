"""Random fixtures (g <= 4): cross-check, classical dimensions and lattice-basis invariance per seed."""
import argparse
import random
import time

from abelia.exterior import binom
from abelia.mainthm import INFINITY, FixtureSpec, cross_check, random_data, random_unimodular
from abelia.torus import classical_dims


def random_spec(rng, max_g):
    g = rng.randint(1, max_g)
    g0 = rng.randint(0, g)
    k = rng.randint(0, min(1, g - g0))
    hb = rng.choice([1, 2, 3]) if g0 < g else 1
    t0 = rng.choice([1, 2, 3]) if g0 else INFINITY
    return FixtureSpec(g, g0, k, hb, t0, extra_terms=rng.randint(0, 1) if g0 else 0)


def check(seed, max_g):
    rng = random.Random(seed)
    spec = random_spec(rng, max_g)
    data = random_data(rng, spec)
    rep = cross_check(data)
    problems = list(rep.discrepancies)
    dims = classical_dims(data.ah, data.lattice)
    if dims != [spec.hbar_bar * binom(spec.g0, j - spec.k) for j in range(spec.g + 1)]:
        problems.append({"classical": dims})
    moved = data.change_lattice_basis(random_unimodular(rng, 2 * spec.g))
    if cross_check(moved).formula != rep.formula:
        problems.append({"lattice_basis": "formula changed"})
    return spec, problems


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--max-g", type=int, default=4)
    args = ap.parse_args()
    start = time.perf_counter()
    failures = 0
    for seed in range(args.start, args.start + args.seeds):
        spec, problems = check(seed, args.max_g)
        if problems:
            failures += 1
            print(f"seed {seed}: {spec} -> {problems}")
    print(f"# {args.seeds} seeds, {failures} failures, {time.perf_counter() - start:.2f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
