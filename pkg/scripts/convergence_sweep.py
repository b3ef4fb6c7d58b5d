"""Monte Carlo persistent Betti numbers against the limit for growing n."""

import argparse

from lmpersist.experiments import TrialConfig, mc_persistent_betti


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--s", type=float, default=2.0)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=42)
    a = ap.parse_args()
    print("n,mean,sd,limit,abs_error")
    for n in a.n:
        cfg = TrialConfig(n=n, k=a.k, trials=a.trials, seed0=a.seed, r_list=[a.r], s_list=[a.s])
        rep = mc_persistent_betti(cfg)
        print(f"{n},{rep.mean[0]:.6f},{rep.sd[0]:.6f},{rep.theory[0]:.6f},{abs(rep.mean[0] - rep.theory[0]):.6f}")


if __name__ == "__main__":
    main()
