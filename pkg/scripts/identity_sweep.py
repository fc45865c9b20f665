"""Worst relative error of the determinant identities over random graphs and z."""

import argparse
from dataclasses import dataclass

import numpy as np

from nbwalk import determinants as dt
from nbwalk import graph as G


@dataclass
class IdentityConfig:
    count: int = 30
    n_max: int = 40
    dmax: int = 5
    seed: int = 0
    weighted: bool = False


def run(cfg: IdentityConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    worst = {"thm13": 0.0, "ihara": 0.0, "detK": 0.0, "intertwining": 0.0}
    done = 0
    while done < cfg.count:
        n = int(rng.integers(3, cfg.n_max + 1))
        g = G.random_min_degree(n, 2, min(cfg.dmax, n - 1), seed=int(rng.integers(2**31)))
        if not G.validate(g).is_connected:
            continue
        done += 1
        w = G.random_weights(g, rng) if cfg.weighted else None
        z = complex(rng.uniform(-2, 2), rng.uniform(0.5, 2))
        worst["thm13"] = max(worst["thm13"], dt.thm13_check(g, z, weights=w).max_rel_error)
        worst["ihara"] = max(worst["ihara"], dt.ihara_check(g).max_rel_error)
        worst["detK"] = max(worst["detK"], dt.detK_check(g, z).max_rel_error)
        worst["intertwining"] = max(worst["intertwining"], dt.intertwining_residual(g, z))
    return worst


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weighted", action="store_true")
    args = p.parse_args(argv)
    for name, err in run(IdentityConfig(count=args.count, seed=args.seed, weighted=args.weighted)).items():
        print(f"{name:>13s}  {err:.3e}")


if __name__ == "__main__":
    main()
