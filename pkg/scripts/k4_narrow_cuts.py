"""Narrow cuts and correction flow on K4 at the all-halves point, for a range of tau."""

import argparse
from fractions import Fraction

from tjoin.generate import gen_k4
from tjoin.instance import fmt_set
from tjoin.narrowcuts import correction_flows, enumerate_narrow_cuts


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("taus", nargs="*", default=["1/2", "51/100", "3/4", "1"])
    inst = gen_k4()
    x = {e: Fraction(1, 2) for e in inst.edge_list}
    for raw in p.parse_args(argv).taus:
        tau = Fraction(raw)
        fam = enumerate_narrow_cuts(inst, x, tau=tau)
        flows = correction_flows(inst, x, fam)
        cuts = " ".join(fmt_set(S) for S in fam.cuts) or "-"
        print(f"tau {tau}: {len(fam)} cuts [{cuts}] flow {flows.value} of {len(fam)}")


if __name__ == "__main__":
    main()
