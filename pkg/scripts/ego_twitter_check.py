"""Fit MLM to the ego-Twitter degree distribution (edge list downloaded separately).

    python3 scripts/ego_twitter_check.py twitter_combined.txt --mode total
"""
import argparse

from mlmfit.estimation import cv, fit_mlm
from mlmfit.graph_io import degree_histogram, iter_edges

REFERENCE = {"alpha": 1.9922, "beta": -0.3591, "sigma": 30.543, "cv": 2.6654}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("edges")
    ap.add_argument("--mode", choices=("in", "out", "total"), default="total")
    ap.add_argument("--keep-duplicates", action="store_true")
    ap.add_argument("--keep-self-loops", action="store_true")
    ap.add_argument("--likelihood", choices=("continuous", "discrete"), default="discrete")
    args = ap.parse_args()
    with open(args.edges) as fh:
        h = degree_histogram(iter_edges(fh, args.edges), args.mode, not args.keep_duplicates,
                             not args.keep_self_loops)
    s = h.to_sample()
    fr = fit_mlm(s, likelihood=args.likelihood)
    got = dict(fr.estimates, cv=cv(s))
    print(f"nodes {h.n}, converged {fr.converged}")
    for k, ref in REFERENCE.items():
        print(f"{k:<6} {got[k]:12.5g}  reference {ref:10.5g}  rel err {abs(got[k] - ref) / abs(ref):.3g}")


if __name__ == "__main__":
    main()
