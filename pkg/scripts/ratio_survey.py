"""Survey approximation ratios of both LP-based algorithms on seeded random instances.

    python3 scripts/ratio_survey.py --count 50 --n-min 5 --n-max 9
"""

import argparse
import csv
import random
import sys
import warnings
from dataclasses import dataclass

from tjoin.approx import aks_tjoin, christofides_tjoin
from tjoin.generate import gen_random_metric
from tjoin.lp import solve_lp1


@dataclass
class SurveyConfig:
    count: int = 50
    n_min: int = 5
    n_max: int = 9
    t_sizes: tuple[int, ...] = (2, 4, 6)
    seed: int = 0


def survey(cfg: SurveyConfig):
    rng = random.Random(cfg.seed)
    for i in range(cfg.count):
        n = rng.randint(cfg.n_min, cfg.n_max)
        t = rng.choice([t for t in cfg.t_sizes if t <= n])
        inst = gen_random_metric(n, t, cfg.seed * 100_000 + i)
        lp = solve_lp1(inst)
        five = christofides_tjoin(inst, lp=lp)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            aks = aks_tjoin(inst, lp=lp)
        yield {
            "instance": i,
            "n": n,
            "t": t,
            "lp": lp.value,
            "five_thirds": five.ratio,
            "thirteen_eighths": aks.ratio,
            "trees": len(aks.decomposition),
            "aggregate_over_lp": aks.aggregate_y / lp.value,
        }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args(argv)
    cfg = SurveyConfig(a.count, a.n_min, a.n_max, seed=a.seed)
    rows = list(survey(cfg))
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]))
    w.writeheader()
    for r in rows:
        w.writerow({k: str(v) for k, v in r.items()})
    for key in ("five_thirds", "thirteen_eighths"):
        worst = max(r[key] for r in rows)
        mean = sum(r[key] for r in rows) / len(rows)
        print(f"# {key}: worst {worst} (~{float(worst):.4f}), mean ~{float(mean):.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
