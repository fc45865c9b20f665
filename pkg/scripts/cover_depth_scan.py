"""Distance between truncated-cover zeta and the fixed point as the depth grows."""

import argparse
from dataclasses import dataclass, field

from nbwalk import graph as G
from nbwalk import green as gr
from nbwalk.cli import parse_complex


@dataclass
class ScanConfig:
    graphs: int = 5
    n: int = 12
    dmin: int = 2
    dmax: int = 3
    z: complex = 1j
    depths: list = field(default_factory=lambda: [4, 6, 8, 10, 12, 14, 16])
    seed: int = 700


def scan(cfg: ScanConfig):
    for s in range(cfg.graphs):
        g = G.random_min_degree(cfg.n, cfg.dmin, cfg.dmax, seed=cfg.seed + s)
        zf = gr.solve_zeta(g, cfg.z)
        for depth in cfg.depths:
            oracle = gr.cover_root_zeta(g, 0, depth, cfg.z)
            err = max(abs(v - zf.zeta[e]) for e, v in oracle.items())
            size = gr.truncated_cover(g, 0, depth).tree.vertex_count
            yield s, depth, size, err


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--graphs", type=int, default=5)
    p.add_argument("--dmax", type=int, default=3)
    p.add_argument("--z", type=parse_complex, default=1j)
    p.add_argument("--depths", default="4,6,8,10,12,14,16")
    p.add_argument("--seed", type=int, default=700)
    args = p.parse_args(argv)
    cfg = ScanConfig(graphs=args.graphs, dmax=args.dmax, z=args.z, seed=args.seed,
                     depths=[int(d) for d in args.depths.split(",")])
    print("graph,depth,tree_vertices,max_abs_error")
    for row in scan(cfg):
        print("{},{},{},{:.3e}".format(*row))


if __name__ == "__main__":
    main()
