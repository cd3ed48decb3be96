"""Command-line front end.

Exit status is 0 when every internal check passes, 1 when a check fails and
2 when the input cannot be read.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Tuple

from . import flowcat as fc
from . import grid as gr
from . import gridflow as gf
from . import khovanov as kh
from .complexes import HomologyTable, homology, homology_gf2, verify_d_squared, verify_d_squared_gf2

SCHEMA = 1


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    path: Optional[str]
    coeff: str = "int"
    policy: str = "right"
    mu_max: Optional[int] = None
    json: bool = False
    shift: int = 2
    hypercube: Optional[int] = None

    def __post_init__(self):
        if self.mu_max is not None and not 1 <= self.mu_max <= 4:
            raise InputError("--mu-max must lie in 1..4")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_pd(path: str) -> kh.LinkDiagram:
    try:
        return kh.parse_pd(_read(path))
    except kh.DiagramError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_grid(path: str) -> gr.GridDiagram:
    try:
        return gr.parse_grid(_read(path))
    except gr.GridError as exc:
        raise InputError(f"{path}: {exc}") from None


def _homology(C, coeff: str) -> Tuple[HomologyTable, bool]:
    if coeff == "gf2":
        return homology_gf2(C), verify_d_squared_gf2(C)
    ok = verify_d_squared(C)
    return (homology(C, check=False) if ok else HomologyTable({}, {})), ok


# -- commands ----------------------------------------------------------------


def cmd_khovanov(cfg: RunConfig) -> Tuple[dict, bool]:
    D = _load_pd(cfg.path)
    C = kh.khovanov_complex(D)
    H, ok = _homology(C, cfg.coeff)
    per_vertex = Counter()
    for g in C.generators:
        v, _ = kh.parse_generator_id(g)
        per_vertex[kh.vertex_str(v)] += 1
    report = {
        "schema": SCHEMA,
        "command": "khovanov",
        "crossings": D.n,
        "unknots": D.unknots,
        "generators": len(C),
        "generators_per_vertex": dict(sorted(per_vertex.items())),
        "d_squared_zero": ok,
        "coefficients": cfg.coeff,
        "homology": H.to_dict(),
        "total_rank": H.total_rank(),
        "ladybug_faces": [f.label() for f in kh.detect_ladybugs(D)],
    }
    return report, ok


def _path_name(b: fc.Broken) -> str:
    p, q = b
    return f"{p.source}>{p.target}>{q.target}"


def cmd_flowcat(cfg: RunConfig) -> Tuple[dict, bool]:
    if cfg.hypercube is not None:
        try:
            cat = fc.hypercube_category(cfg.hypercube)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        source = {"hypercube": cfg.hypercube}
        ladybug_pairs = []
    else:
        D = _load_pd(cfg.path)
        cat = fc.khovanov_flow_category(D, cfg.policy)
        source = {"pd": cfg.path, "policy": cfg.policy}
        ladybug_pairs = []
        for f in kh.detect_ladybugs(D):
            for (y, z), ivs in sorted(cat.intervals.items()):
                u, _ = kh.parse_generator_id(y)
                w, _ = kh.parse_generator_id(z)
                if u == f.top and w == f.bottom and len(ivs) == 2:
                    ladybug_pairs.append(
                        {
                            "face": f.label(),
                            "from": y,
                            "to": z,
                            "intervals": [[_path_name(a), _path_name(b)] for a, b in (iv.ends for iv in ivs)],
                        }
                    )
    coherent = {str(d): fc.check_boundary_coherence(cat, d) for d in (0, 1, 2)}
    cycles = {
        f"{y} -> {z}": sorted(len(p) for p in pgs) for (y, z), pgs in sorted(cat.polygons.items()) if pgs
    }
    input_complex = cat.boundary_matrix_complex()
    cw = fc.cjs_realize(cat, cfg.shift)
    H_in, ok_in = _homology(input_complex, cfg.coeff)
    H_cw, ok_cw = _homology(cw.cellular_complex(), cfg.coeff)
    matches = H_cw == H_in.shifted(cfg.shift)
    ok = all(coherent.values()) and ok_in and ok_cw and matches
    report = {
        "schema": SCHEMA,
        "command": "flowcat",
        "source": source,
        "coherence": coherent,
        "boundary_cycles": cycles,
        "ladybug_matchings": ladybug_pairs,
        "cw": {
            "shift": cfg.shift,
            "cells": cw.to_dict()["cells"],
            "homology": H_cw.to_dict(),
            "matches_input_homology": matches,
        },
        "category": cat.to_dict(),
    }
    return report, ok


def _cd_report(G: gr.GridDiagram, mu_max: int, signs) -> Tuple[dict, bool]:
    oc = gf.obstruction_complex(G, mu_max, signs)
    ok = verify_d_squared(oc.complex)
    out = {"generators": {str(k): v for k, v in oc.generator_counts().items()}, "d_squared_zero": ok}
    if ok:
        H = gf.cd_homology(G, mu_max, signs)
        out["homology"] = H.to_dict()
    return out, ok


def cmd_grid(cfg: RunConfig) -> Tuple[dict, bool]:
    G = _load_grid(cfg.path)
    signs = gr.solve_sign_assignment(G)
    signs_ok = gr.check_sign_assignment(signs)
    C = gr.tilde_differential(G, cfg.coeff, signs if cfg.coeff == "int" else None)
    H, ok = _homology(C, cfg.coeff)
    report = {
        "schema": SCHEMA,
        "command": "grid",
        "grid": G.to_dict(),
        "states": len(C),
        "coefficients": cfg.coeff,
        "d_squared_zero": ok,
        "sign_assignment": {"solved": True, "constraints_hold": signs_ok},
        "homology": H.to_dict(),
        "total_rank": H.total_rank(),
        "bigraded_gf2": [
            {"maslov": m, "alexander": a, "rank": r} for (m, a), r in sorted(gr.grid_homology_bigraded(G).items())
        ],
    }
    ok = ok and signs_ok
    if cfg.mu_max is not None:
        cd, cd_ok = _cd_report(G, cfg.mu_max, signs)
        report["obstruction_complex"] = cd
        ok = ok and cd_ok
    return report, ok


def cmd_gridflow(cfg: RunConfig) -> Tuple[dict, bool]:
    G = _load_grid(cfg.path)
    mu_max = cfg.mu_max if cfg.mu_max is not None else 2
    per_mu: Counter = Counter()
    dec_counts: Counter = Counter()
    shapes: Counter = Counter()
    interval_ok = True
    states = list(G.states())
    for x in states:
        for y in states:
            for D in gf.enumerate_positive_domains(G, x, y, min(mu_max, 3)):
                mu = gr.maslov_index(D)
                per_mu[mu] += 1
                if mu == 0:
                    continue
                nd = len(gf.decompositions(G, D))
                dec_counts[(mu, nd)] += 1
                if mu == 2:
                    interval_ok &= nd + len(gf.detect_bubble_ends(G, D)) == 2
                if mu == 3:
                    shapes[gf.moduli_shape(G, D).kind] += 1
    if mu_max > 3:
        for x in states:
            for y in states:
                per_mu[4] += sum(1 for D in gf.enumerate_positive_domains(G, x, y, 4) if gr.maslov_index(D) == 4)
    signs = gr.solve_sign_assignment(G)
    report = {
        "schema": SCHEMA,
        "command": "gridflow",
        "grid": G.to_dict(),
        "mu_max": mu_max,
        "domains_per_mu": {str(k): v for k, v in sorted(per_mu.items())},
        "decomposition_counts": [
            {"mu": mu, "decompositions": nd, "domains": c} for (mu, nd), c in sorted(dec_counts.items())
        ],
        "mu2_ends_ok": interval_ok,
        "mu3_shapes": dict(sorted(shapes.items())),
        "strip_pairs": [{"o_column": p.o_column, "H": p.row, "V": p.column} for p in gf.pair_strips(G)],
    }
    ok = interval_ok
    if mu_max >= 2:
        cd, cd_ok = _cd_report(G, mu_max, signs)
        report["obstruction_complex"] = cd
        ok = ok and cd_ok
    return report, ok


# -- output -------------------------------------------------------------------


def _format_table(report: dict) -> str:
    lines = []
    cmd = report["command"]
    if cmd == "khovanov":
        lines.append(f"{report['generators']} generators on {report['crossings']} crossings")
        lines.append("per vertex: " + " ".join(f"{v}:{c}" for v, c in report["generators_per_vertex"].items()))
        lines.append(f"d^2 = 0: {report['d_squared_zero']}")
        lines.append(HomologyTable.from_dict(report["homology"]).format())
        lines.append(f"total rank {report['total_rank']}")
        lines.append("ladybug faces: " + (", ".join(report["ladybug_faces"]) or "none"))
    elif cmd == "flowcat":
        lines.append("coherence: " + " ".join(f"dim{d}={v}" for d, v in report["coherence"].items()))
        for pair, sizes in report["boundary_cycles"].items():
            word = {1: "one", 2: "two"}.get(len(sizes), str(len(sizes)))
            lines.append(f"{pair}: {word} {'/'.join(map(str, sorted(set(sizes))))}-cycle{'s' if len(sizes) > 1 else ''}")
        for m in report["ladybug_matchings"]:
            lines.append(f"ladybug {m['face']} {m['from']} -> {m['to']}:")
            for a, b in m["intervals"]:
                lines.append(f"  {a}  --  {b}")
        lines.append(f"CW homology (shift {report['cw']['shift']}):")
        lines.append(HomologyTable.from_dict(report["cw"]["homology"]).format())
        lines.append(f"matches input homology: {report['cw']['matches_input_homology']}")
    elif cmd == "grid":
        lines.append(f"{report['states']} states, coefficients {report['coefficients']}")
        lines.append(f"d^2 = 0: {report['d_squared_zero']}; sign constraints hold: {report['sign_assignment']['constraints_hold']}")
        lines.append(HomologyTable.from_dict(report["homology"]).format())
        lines.append(f"total rank {report['total_rank']}")
        for row in report["bigraded_gf2"]:
            lines.append(f"  M={row['maslov']:>3} A={row['alexander']:>3}  rank {row['rank']}")
        if "obstruction_complex" in report:
            lines.append(_format_cd(report["obstruction_complex"]))
    elif cmd == "gridflow":
        lines.append("positive domains per Maslov index: " + ", ".join(f"{k}:{v}" for k, v in report["domains_per_mu"].items()))
        for row in report["decomposition_counts"]:
            lines.append(f"  mu={row['mu']}: {row['domains']} domains with {row['decompositions']} decompositions")
        lines.append(f"index-2 ends (decompositions + bubbles = 2): {report['mu2_ends_ok']}")
        if report["mu3_shapes"]:
            lines.append("index-3 shapes: " + ", ".join(f"{k}:{v}" for k, v in report["mu3_shapes"].items()))
        lines.append("strip pairs: " + " ".join(f"O{p['o_column']}=(H{p['H']},V{p['V']})" for p in report["strip_pairs"]))
        if "obstruction_complex" in report:
            lines.append(_format_cd(report["obstruction_complex"]))
    return "\n".join(lines)


def _format_cd(cd: dict) -> str:
    lines = ["obstruction complex: " + ", ".join(f"C_{k}={v}" for k, v in cd["generators"].items())]
    lines.append(f"d^2 = 0: {cd['d_squared_zero']}")
    if "homology" in cd:
        lines.append(HomologyTable.from_dict(cd["homology"]).format())
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowknot", description="Khovanov and grid complexes with their flow categories.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--coeff", choices=("gf2", "int"), default="int", help="homology coefficients")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("khovanov", parents=[common], help="Khovanov complex and homology of a PD code")
    p.add_argument("path")

    p = sub.add_parser("flowcat", parents=[common], help="flow category up to dimension 2 and its realization")
    p.add_argument("path", nargs="?")
    p.add_argument("--hypercube", type=int, metavar="N", help="use the cube category of dimension N instead")
    p.add_argument("--policy", choices=("right", "left"), default="right")
    p.add_argument("--shift", type=int, default=2, help="cell dimension shift d")

    p = sub.add_parser("grid", parents=[common], help="tilde grid homology")
    p.add_argument("path")
    p.add_argument("--mu-max", type=int, dest="mu_max", help="also build the obstruction complex")

    p = sub.add_parser("gridflow", parents=[common], help="domains, decompositions and the obstruction complex")
    p.add_argument("action", choices=("report",))
    p.add_argument("path")
    p.add_argument("--mu-max", type=int, dest="mu_max", default=3)
    return parser


COMMANDS = {"khovanov": cmd_khovanov, "flowcat": cmd_flowcat, "grid": cmd_grid, "gridflow": cmd_gridflow}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "flowcat" and (args.path is None) == (args.hypercube is None):
            raise InputError("flowcat needs exactly one of a PD file or --hypercube N")
        cfg = RunConfig(
            command=args.command,
            path=args.path,
            coeff=args.coeff,
            policy=getattr(args, "policy", "right"),
            mu_max=getattr(args, "mu_max", None),
            json=args.json,
            shift=getattr(args, "shift", 2),
            hypercube=getattr(args, "hypercube", None),
        )
        report, ok = COMMANDS[args.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (kh.DiagramError, gr.GridError, fc.ModuliError, ValueError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    if cfg.json:
        print(json.dumps(report, indent=2))
    else:
        print(_format_table(report))
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
