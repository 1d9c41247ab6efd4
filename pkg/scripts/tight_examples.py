"""Primal-dual cost, dual value and ratio on the tight cycle family."""

import argparse
from dataclasses import dataclass

from tjoin.prizecollect import gen_tight_example, make_pc, rho, solve_pd, verify_pd_guarantees


@dataclass
class TightConfig:
    sizes: tuple[int, ...] = (4, 6, 8, 10, 12)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("sizes", nargs="*", type=int, default=list(TightConfig.sizes))
    cfg = TightConfig(tuple(p.parse_args(argv).sizes))
    print(f"{'|T|':>4} {'cost':>6} {'dual':>6} {'ratio':>7} {'rho':>7} audit")
    for t in cfg.sizes:
        pc = make_pc(gen_tight_example(t))
        r = solve_pd(pc)
        audit = verify_pd_guarantees(pc, r)
        print(
            f"{t:>4} {str(r.total):>6} {str(r.dual_value):>6} {str(r.ratio):>7} "
            f"{str(rho(t)):>7} {'pass' if audit.ok else 'FAIL'}"
        )


if __name__ == "__main__":
    main()
