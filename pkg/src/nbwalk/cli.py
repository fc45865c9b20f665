"""Command-line front end.

Exit codes: 0 all verdicts pass, 1 verification failure, 2 input error,
3 fixed-point non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from nbwalk import determinants as det
from nbwalk import graph as gmod
from nbwalk import green, operators, spectral
from nbwalk.errors import NbwalkError, NonConvergence

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NONCONV = 0, 1, 2, 3

DEFAULT_Z = (0.5 + 0.5j, 1 + 1j, 2j, -1.3 + 0.7j)
DEFAULT_TOL = 1e-8
ZETA_TOL = 1e-12
COMMANDS = ("analyze", "certify", "det-check", "ihara-check", "zeta", "generate", "decompose")
GREEN_COMMANDS = ("det-check", "zeta")

_Z_RE = re.compile(
    r"^\s*(?:(?P<re>[+-]?\d*\.?\d+(?:[eE][+-]?\d+)?)(?=[+-]|\s*$))?"
    r"\s*(?:(?P<im>[+-]?\s*(?:\d*\.?\d+(?:[eE][+-]?\d+)?)?)\s*[ij])?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` literals: ``2i``, ``1+i``, ``-1.3+0.7i``, ``0.5``."""
    m = _Z_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"cannot parse complex number {text!r}")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im = m.group("im")
    if im is None:
        im_part = 0.0
    else:
        im = im.replace(" ", "")
        im_part = float(im + "1") if im in ("", "+", "-") else float(im)
    return complex(re_part, im_part)


def parse_z_list(text: str) -> list:
    return [parse_complex(tok) for tok in text.split(",") if tok.strip()]


@dataclass
class RunConfig:
    command: str
    graph_path: str | None = None
    generator: str | None = None
    weights_path: str | None = None
    z_list: list = field(default_factory=lambda: list(DEFAULT_Z))
    samples: int | None = None
    tol: float = DEFAULT_TOL
    seed: int = 0
    output_format: str = "json"
    out: str | None = None
    n_list: tuple = (1, 2, 4, 8)

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if (self.graph_path is None) == (self.generator is None):
            raise ValueError("exactly one of --graph or --generate is required")
        if self.command in GREEN_COMMANDS and any(not z.imag > 0 for z in self.z_list):
            raise ValueError("every z must have Im z > 0")
        if self.output_format not in ("json", "csv"):
            raise ValueError("format must be json or csv")


class VerificationFailure(Exception):
    pass


def _load_graph(cfg: RunConfig) -> gmod.Graph:
    if cfg.graph_path is not None:
        return gmod.read_edge_list(cfg.graph_path)
    family, params = gmod.parse_family(cfg.generator)
    return gmod.generate(family, *params, seed=cfg.seed)


def _c(x) -> list:
    return [float(np.real(x)), float(np.imag(x))]


# ---------------------------------------------------------------------------
# commands: each returns (results, passed, failure message)


def _cmd_analyze(g, cfg, weights):
    spectra = {
        "A": np.linalg.eigvalsh(operators.adjacency(g, dense=True)),
        "P": np.sort(np.linalg.eigvalsh(operators.symmetrised_P(g))),
        "S": np.linalg.eigvals(operators.nb_S(g, dense=True)),
        "B": np.linalg.eigvals(operators.nb_B(g, dense=True)),
    }
    results = {"validation": gmod.validate(g).as_dict()}
    for name, ev in spectra.items():
        ev = ev[np.lexsort((ev.imag, ev.real))] if np.iscomplexobj(ev) else ev
        results[f"spectrum_{name}"] = [_c(v) for v in ev]
    return results, True, ""


def _cmd_certify(g, cfg, weights):
    cert = spectral.certify(g, cfg.n_list)
    msg = ""
    if not cert.all_hold:
        failing = [k for k in ("theorem1_holds", "corollary_holds", "remark22_holds")
                   if not getattr(cert, k)]
        msg = "certificate failed: " + ", ".join(failing)
    return cert.as_dict(), cert.all_hold, msg


def _det_reports_at(g, z, weights, tol):
    zf = green.solve_zeta(g, z, tol=ZETA_TOL)
    reports = [det.thm13_check(g, z, tol=tol, zf=zf)]
    if weights is not None:
        zw = green.solve_zeta(g, z, weights, tol=ZETA_TOL)
        reports.append(det.thm13_check(g, z, weights, tol=tol, zf=zw))
    resid = det.intertwining_residual(g, zf=zf)
    reports.append(det.DetReport("intertwining", [zf.z], [], [], [resid], tol))
    reports.append(det.detK_check(g, tol=tol, zf=zf))
    return reports


def _summarise(reports):
    failing = [r for r in reports if not r.passed]
    if not failing:
        return True, ""
    worst = max(failing, key=lambda r: r.max_rel_error)
    return False, (f"identity {worst.identity} failed: error {worst.max_rel_error:.3e} "
                   f"at sample {worst.worst_sample}")


def _cmd_det_check(g, cfg, weights):
    reports = []
    for z in cfg.z_list:
        reports.extend(_det_reports_at(g, z, weights, cfg.tol))
    ok, msg = _summarise(reports)
    return [r.as_dict() for r in reports], ok, msg


def _cmd_ihara(g, cfg, weights):
    u = det.default_u_samples(g, cfg.samples)
    reports = [det.ihara_check(g, u, tol=cfg.tol)]
    if g.is_regular():
        reports.append(det.ihara_regular_check(g, u, tol=cfg.tol))
    ok, msg = _summarise(reports)
    return [r.as_dict() for r in reports], ok, msg


def _cmd_zeta(g, cfg, weights):
    out = []
    ok, msg = True, ""
    for z in cfg.z_list:
        zf = green.solve_zeta(g, z, weights, tol=ZETA_TOL)
        good = zf.residual <= cfg.tol and zf.herglotz_ok()
        if not good and ok:
            ok, msg = False, f"fixed-point residual {zf.residual:.3e} or Herglotz sign failed at z = {z}"
        out.append({
            "z": _c(z),
            "iterations": zf.iterations,
            "final_update_norm": zf.final_update_norm,
            "residual": zf.residual,
            "herglotz": zf.herglotz_ok(),
            **zf.tables(g),
        })
    return out, ok, msg


def _cmd_generate(g, cfg, weights):
    return {"edges": g.undirected_edges.tolist(), "validation": gmod.validate(g).as_dict(),
            "edge_list": gmod.serialize_edge_list(g)}, True, ""


def _cmd_decompose(g, cfg, weights):
    rep = operators.decomposition_report(g)
    ok = rep.dim_H == rep.expected_dim_H and rep.orthogonality_residual < cfg.tol
    msg = "" if ok else f"dim_H = {rep.dim_H}, expected {rep.expected_dim_H}"
    return rep.as_dict(), ok, msg


HANDLERS = {
    "analyze": _cmd_analyze,
    "certify": _cmd_certify,
    "det-check": _cmd_det_check,
    "ihara-check": _cmd_ihara,
    "zeta": _cmd_zeta,
    "generate": _cmd_generate,
    "decompose": _cmd_decompose,
}


def run(cfg: RunConfig) -> tuple:
    """Execute one command. Returns (exit code, report document)."""
    doc = {"command": cfg.command, "graph_summary": None, "results": None, "verdict": None}
    try:
        cfg.validate()
        g = _load_graph(cfg)
        doc["graph_summary"] = g.summary()
        weights = gmod.load_weights(cfg.weights_path, g) if cfg.weights_path else None
        results, ok, msg = HANDLERS[cfg.command](g, cfg, weights)
        doc["results"] = results
        code = EXIT_OK if ok else EXIT_FAIL
    except NonConvergence as exc:
        code, ok, msg = EXIT_NONCONV, False, str(exc)
    except (NbwalkError, ValueError, OSError) as exc:
        code, ok, msg = EXIT_INPUT, False, f"{type(exc).__name__}: {exc}"
    doc["verdict"] = {"passed": ok, "exit_code": code, "message": msg}
    return code, doc


def _rows(doc: dict) -> list:
    """Flatten a report for CSV: one row per (identity, sample) or per scalar field."""
    results = doc["results"]
    rows = []
    if doc["command"] in ("det-check", "ihara-check") and results:
        for rep in results:
            n = len(rep["samples"])
            for i in range(n):
                row = {"identity": rep["identity"],
                       "sample_re": rep["samples"][i][0], "sample_im": rep["samples"][i][1]}
                if rep["lhs"]:
                    row.update(lhs_re=rep["lhs"][i][0], lhs_im=rep["lhs"][i][1],
                               rhs_re=rep["rhs"][i][0], rhs_im=rep["rhs"][i][1])
                row.update(rel_error=rep["rel_errors"][i], passed=rep["rel_errors"][i] < rep["tol"])
                rows.append(row)
    elif doc["command"] == "zeta" and results:
        for entry in results:
            for item in entry["zeta"]:
                rows.append({"z_re": entry["z"][0], "z_im": entry["z"][1], "from": item["from"],
                             "to": item["to"], "zeta_re": item["value"][0],
                             "zeta_im": item["value"][1], "residual": entry["residual"]})
    elif doc["command"] == "generate" and results:
        rows = [{"u": u, "v": v} for u, v in results["edges"]]
    elif isinstance(results, dict):
        for k, v in results.items():
            rows.append({"field": k, "value": json.dumps(v)})
    rows.append({"verdict": doc["verdict"]["passed"], "exit_code": doc["verdict"]["exit_code"],
                 "message": doc["verdict"]["message"]})
    return rows


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        rows = _rows(doc)
        keys = []
        for r in rows:
            keys += [k for k in r if k not in keys]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    return json.dumps(doc, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbwalk", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="PATH", help="edge-list file")
    src.add_argument("--generate", metavar="SPEC",
                     help="family spec, e.g. complete:4 or random_regular:10:3")
    parser.add_argument("--weights", metavar="PATH", help="JSON document with 'p' and 'W'")
    parser.add_argument("--z", metavar="LIST", help="comma-separated a+bi values")
    parser.add_argument("--samples", type=int, help="number of u samples for ihara-check")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-list", metavar="LIST", default="1,2,4,8",
                        help="powers n for the norm bound in certify")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", metavar="PATH")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        z_list = parse_z_list(args.z) if args.z else list(DEFAULT_Z)
        n_list = tuple(int(tok) for tok in args.n_list.split(",") if tok.strip())
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = RunConfig(
        command=args.command,
        graph_path=args.graph,
        generator=args.generate,
        weights_path=args.weights,
        z_list=z_list,
        samples=args.samples,
        tol=args.tol,
        seed=args.seed,
        output_format=args.format,
        out=args.out,
        n_list=n_list,
    )
    code, doc = run(cfg)
    text = render(doc, cfg.output_format)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code != EXIT_OK:
        print(doc["verdict"]["message"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
