"""Tail-limit checks for random MLM parameters, with the predicted log-rate error.

    python3 scripts/tail_report.py --draws 20 --seed 0
"""
import argparse
import math

import numpy as np

from mlmfit.distributions import MlmParams
from mlmfit.tailprops import class_D_check, class_L_check, tail_equivalence_check, von_mises_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'alpha':>7}{'beta':>7}{'sigma':>10} | {'D err':>9}{'TE err':>9}{'TE pred':>9}"
          f"{'L err':>9}{'VM err':>9}")
    for _ in range(args.draws):
        p = MlmParams(rng.uniform(0.5, 5), rng.uniform(-0.95, 1), math.exp(rng.uniform(math.log(0.1), math.log(1000))))
        d, te, l, vm = class_D_check(p), tail_equivalence_check(p), class_L_check(p), von_mises_check(p)
        w = math.log1p(1e10)
        # leading term of the tail-equivalence error: alpha*beta*(beta+1)/(2w)
        pred = abs(p.alpha * p.beta * (p.beta + 1) / (2 * w))
        print(f"{p.alpha:7.3f}{p.beta:7.3f}{p.sigma:10.3g} | {d.final_rel_err:9.2e}{te.final_rel_err:9.2e}"
              f"{pred:9.2e}{l.final_rel_err:9.2e}{vm.final_rel_err:9.2e}")


if __name__ == "__main__":
    main()
