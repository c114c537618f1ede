"""Command-line entry point: ``aqecc <group> <verb> [options]``.

Every run writes ``config.json`` plus its outputs under ``--out``. Exit
status is 0 on success, 1 on a domain error and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional

import numpy as np

from . import codes, dense, ed, eth, kl, parent
from .errors import AqeccError
from .reporting import OutputDir, fit_power_law, parse_grid


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", default="aqecc-out", help="output directory")
    p.add_argument("--threads", type=int, default=1, help="cap on worker threads")


def _capacity(text: str) -> float:
    return math.inf if text in ("inf", "none") else float(text)


def _code_args(p, k=True, capacity="1"):
    p.add_argument("--model", required=True, choices=[m.value for m in codes.Model])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    if k:
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--capacity-c", type=_capacity, default=_capacity(capacity),
                       help=f"largest |m| allowed is c*sqrt(N); 'inf' disables the check (default {capacity})")


def _ed_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", choices=[m.value for m in ed.ModelName])
    src.add_argument("--hamiltonian", help="JSON file {site_dim, N, terms}")
    p.add_argument("--n", type=int, help="number of sites (with --model)")
    p.add_argument("--q0-only", action="store_true", help="keep only zero-momentum eigenstates")


def _window_args(p):
    p.add_argument("--energy", type=float, help="window centre (default N/2)")
    p.add_argument("--half-width", type=float, help="window half width (default sqrt(N))")


def _generator_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=["motzkin", "exchange", "none"])
    src.add_argument("--generators", help="JSON file {D, k, rules}")
    p.add_argument("--n", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aqecc", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("codes").add_subparsers(dest="verb", required=True)
    p = g.add_parser("rdm", help="closed-form d-site reduced state weights of one codeword")
    _code_args(p, k=False)
    p.add_argument("--m", type=int, required=True)
    _common(p)
    p = g.add_parser("select", help="choose the magnetization ladder of a code")
    _code_args(p)
    _common(p)
    p = g.add_parser("verify", help="approximate Knill-Laflamme report")
    # desk-scale sizes cannot satisfy |m| <= sqrt(N) for any useful ladder
    _code_args(p, capacity="inf")
    p.add_argument("--seed", type=int, default=0, help="recorded for provenance; the check is deterministic")
    p.add_argument("--path", choices=["auto", "dense", "rdm"], default="auto")
    p.add_argument("--operators", help="JSON operator set (default: full d-local basis)")
    p.add_argument("--all-positions", action="store_true", help="apply the basis at every start site")
    _common(p)

    g = groups.add_parser("ed").add_subparsers(dest="verb", required=True)
    p = g.add_parser("spectrum", help="block-diagonalize a ring Hamiltonian")
    _ed_args(p)
    p.add_argument("--lowest", type=int, help="only this many lowest states per block")
    p.add_argument("--vectors", action="store_true", help="also dump eigenvectors")
    _common(p)
    p = g.add_parser("sample", help="random eigenstate codewords from a window")
    _ed_args(p)
    _window_args(p)
    p.add_argument("--count", type=int, default=4, help="number of codewords L")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--mode", choices=["uniform", "stratified"], default="uniform")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--first-position-only", action="store_true")
    _common(p)

    g = groups.add_parser("eth").add_subparsers(dest="verb", required=True)
    p = g.add_parser("scan", help="diagonal, off-diagonal, weak or reduced-state scan")
    _ed_args(p)
    _window_args(p)
    p.add_argument("--kind", choices=["diagonal", "offdiagonal", "weak", "rdm"], default="diagonal")
    p.add_argument("--observable", default="Z", help="single-site basis label (Z, X, L3, ...)")
    p.add_argument("--site", type=int, default=1)
    p.add_argument("--delta", type=float, default=0.3)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    _common(p)

    g = groups.add_parser("parent").add_subparsers(dest="verb", required=True)
    for verb, text in [("orbits", "orbit partition"), ("build", "projector Hamiltonian entries"),
                       ("check", "ground-space check")]:
        p = g.add_parser(verb, help=text)
        _generator_args(p)
        _common(p)

    g = groups.add_parser("scaling").add_subparsers(dest="verb", required=True)
    p = g.add_parser("fit", help="log-log fit of the codeword trace distance against N")
    p.add_argument("--model", required=True, choices=[m.value for m in codes.Model])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mprime", type=int, required=True)
    p.add_argument("--grid", required=True, help="lo:hi:x2 or lo:hi:+s")
    _common(p)
    return parser


def _resolved(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("out", "threads")}
    if isinstance(cfg.get("capacity_c"), float) and math.isinf(cfg["capacity_c"]):
        cfg["capacity_c"] = "inf"
    return cfg


def _hamiltonian(args):
    if args.hamiltonian:
        return ed.load_hamiltonian(args.hamiltonian)
    if args.n is None:
        raise AqeccError("--n is required with --model")
    return ed.build_hamiltonian(args.model, args.n)


def _window(args, sol):
    E = sol.N / 2 if args.energy is None else args.energy
    return ed.make_window(sol, E, args.half_width, q0_only=args.q0_only)


def _generators(args):
    if args.generators:
        return parent.load_generators(args.generators)
    if args.preset == "motzkin":
        return 3, parent.motzkin_moves()
    if args.preset == "exchange":
        return 2, parent.exchange_move()
    return 2, []


def cmd_codes_rdm(args, out: OutputDir):
    rdm = codes.schmidt_weights(codes.CodewordSpec(codes.as_model(args.model), args.n, args.m), args.d)
    out.csv("weights.csv", ["r", "weight", "log_weight"],
            [(r, rdm.weights[r], rdm.log_weights[r]) for r in sorted(rdm.weights)])


def cmd_codes_select(args, out: OutputDir):
    space = codes.select_code_space(args.model, args.n, args.k, args.d, args.capacity_c)
    out.json("code_space.json", space.to_dict())


def cmd_codes_verify(args, out: OutputDir):
    space = codes.select_code_space(args.model, args.n, args.k, args.d, args.capacity_c)
    D = space.model.site_dim
    if args.operators:
        basis = dense.load_operators(args.operators)
    else:
        basis = dense.error_basis(D, args.d, range(1, args.n + 1) if args.all_positions else None)
    report = kl.verify_code(space, basis, args.path)
    payload = report.to_dict()
    payload["seed"] = args.seed
    out.json("kl_report.json", payload)


def cmd_ed_spectrum(args, out: OutputDir):
    h = _hamiltonian(args)
    sol = ed.diagonalize_sectored(h, q0_only=args.q0_only, lowest=args.lowest)
    mags = sol.magnetization
    rows = [(i, float(sol.energies[i]), int(sol.momentum[i]), "" if mags is None else int(mags[i]))
            for i in range(len(sol))]
    out.csv("energies.csv", ["index", "energy", "momentum", "magnetization"], rows)
    out.json("metadata.json", {
        "model": h.name, "N": sol.N, "site_dim": sol.site_dim, "states": len(sol),
        "complete": sol.complete, "block_dims": sol.block_dims(),
        "ground_energy": float(sol.energies.min()),
        "ground_degeneracy": int(ed.ground_indices(sol).size),
        "magnetization_conserved": mags is not None,
    })
    if args.vectors:
        V = sol.vectors()
        cols = ["basis_index"] + [f"{part}{i}" for i in range(V.shape[1]) for part in ("re", "im")]
        out.csv("vectors.csv", cols,
                ([s] + [x for i in range(V.shape[1]) for x in (V[s, i].real, V[s, i].imag)]
                 for s in range(V.shape[0])))


def cmd_ed_sample(args, out: OutputDir):
    h = _hamiltonian(args)
    sol = ed.diagonalize_sectored(h, q0_only=args.q0_only)
    window = _window(args, sol)
    idx, eps = eth.sampled_code_epsilon(sol, window, args.count, args.d, args.seed, args.mode,
                                        all_positions=not args.first_position_only)
    energies = [float(sol.energies[i]) for i in idx]
    out.json("sample.json", {
        "model": h.name, "N": sol.N, "window": window.to_dict(), "indices": idx, "energies": energies,
        "epsilon_matrix": eps, "epsilon_max": float(eps.max()),
        "protected_distance": ed.theorem1_distance(energies, sol.N) if len(idx) > 1 else None,
    })


def _observable(args, D) -> dense.LocalOperator:
    basis = dense.single_site_basis(D)
    if args.observable not in basis:
        raise AqeccError(f"unknown observable {args.observable!r}; choose from {sorted(basis)}")
    return dense.LocalOperator(basis[args.observable], D, 1, args.site, f"{args.observable}@{args.site}")


def cmd_eth_scan(args, out: OutputDir):
    h = _hamiltonian(args)
    sol = ed.diagonalize_sectored(h, q0_only=args.q0_only)
    window = _window(args, sol)
    if args.kind == "rdm":
        rep = eth.rdm_distance_pairs(sol, window, args.d, args.pairs, args.seed, args.site, model=h.name)
    else:
        O = _observable(args, sol.site_dim)
        if args.kind == "diagonal":
            rep = eth.diagonal_eth_scan(sol, window, O, model=h.name)
        elif args.kind == "offdiagonal":
            rep = eth.offdiagonal_decay_scan(sol, window, O, model=h.name)
        else:
            rep = eth.weak_eth_scan(sol, window, O, args.delta, model=h.name)
    out.csv("scan.csv", rep.columns, ([row[c] for c in rep.columns] for row in rep.rows))
    out.json("scan.json", rep.sidecar())


def cmd_parent(args, out: OutputDir):
    D, gens = _generators(args)
    part = parent.orbit_decompose(gens, D, args.n)
    if args.verb == "orbits":
        payload = part.to_dict()
        payload["rules"] = parent.dump_generators(D, gens)
        out.json("orbits.json", payload)
        return 0
    H = parent.build_projector_hamiltonian(gens, D, args.n)
    if args.verb == "build":
        coo = H.tocoo()
        order = np.lexsort((coo.col, coo.row))
        out.csv("hamiltonian.csv", ["row", "col", "value"],
                ((int(coo.row[i]), int(coo.col[i]), float(coo.data[i].real)) for i in order))
        out.json("hamiltonian.json", {"D": D, "N": args.n, "dimension": H.shape[0], "nonzeros": int(H.nnz),
                                      "rules": parent.dump_generators(D, gens)})
        return 0
    report = parent.ground_space_check(H, part)
    out.json("ground_check.json", report.to_dict())
    if not report.ok:
        print("ground-space check failed: " + "; ".join(report.failures), file=sys.stderr)
        return 1
    return 0


def cmd_scaling_fit(args, out: OutputDir):
    grid = parse_grid(args.grid)
    curve = codes.scaling_curve(args.model, args.d, args.m, args.mprime, grid, workers=args.threads)
    slope, intercept, r2 = fit_power_law(curve)
    out.csv("scaling.csv", ["N", "trace_distance"], curve)
    out.json("fit.json", {"model": args.model, "d": args.d, "m": args.m, "mprime": args.mprime, "grid": grid,
                          "slope": slope, "intercept": intercept, "r_squared": r2, "predicted_slope": -1.0})


COMMANDS = {
    ("codes", "rdm"): cmd_codes_rdm,
    ("codes", "select"): cmd_codes_select,
    ("codes", "verify"): cmd_codes_verify,
    ("ed", "spectrum"): cmd_ed_spectrum,
    ("ed", "sample"): cmd_ed_sample,
    ("eth", "scan"): cmd_eth_scan,
    ("parent", "orbits"): cmd_parent,
    ("parent", "build"): cmd_parent,
    ("parent", "check"): cmd_parent,
    ("scaling", "fit"): cmd_scaling_fit,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("aqecc: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        out = OutputDir(args.out, _resolved(args))
        out.write_config()
        status = COMMANDS[(args.group, args.verb)](args, out)
    except (AqeccError, OSError, KeyError, ValueError) as exc:
        print(f"aqecc: {exc}", file=sys.stderr)
        return 1
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
