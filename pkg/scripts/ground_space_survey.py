"""Ground-space degeneracy of the Heisenberg and Motzkin rings, and of the parent
Hamiltonians built from their local moves, across chain lengths."""
import argparse
from dataclasses import asdict, dataclass

import numpy as np

from aqecc import dense, ed, parent, reporting
from aqecc.codes import CodewordSpec, Model


@dataclass
class SurveyConfig:
    heisenberg_max_n: int = 12
    motzkin_max_n: int = 8


def _codeword_span(model, N):
    step = 2 if model is Model.HEISENBERG else 1
    return np.array([dense.build_codeword_vector(CodewordSpec(model, N, m)).amplitudes
                     for m in range(-N, N + 1, step)]).T


def run(cfg: SurveyConfig, out_dir: str):
    out = reporting.OutputDir(out_dir, asdict(cfg))
    out.write_config()
    rows = []
    for name, model, moves, D, top in (
        ("heisenberg-pbc", Model.HEISENBERG, parent.exchange_move(), 2, cfg.heisenberg_max_n),
        ("motzkin-pbc", Model.MOTZKIN, parent.motzkin_moves(), 3, cfg.motzkin_max_n),
    ):
        for N in range(3, top + 1):
            sol = ed.diagonalize_sectored(ed.build_hamiltonian(name, N))
            ground = ed.ground_indices(sol)
            dist = ed.projector_distance(sol.vectors(ground), _codeword_span(model, N))
            check = parent.ground_space_check(parent.build_projector_hamiltonian(moves, D, N),
                                              parent.orbit_decompose(moves, D, N))
            rows.append((name, N, float(sol.energies[0]), int(ground.size), dist, check.degeneracy, check.ok))
            print(f"{name:15s} N={N:2d}  E0={sol.energies[0]:+.6f}  deg={ground.size:3d}  "
                  f"dist={dist:.1e}  parent deg={check.degeneracy:3d} ok={check.ok}")
    out.csv("survey.csv", ["model", "N", "ground_energy", "degeneracy", "projector_distance",
                           "parent_degeneracy", "parent_ok"], rows)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--heisenberg-max-n", type=int, default=12)
    p.add_argument("--motzkin-max-n", type=int, default=8)
    p.add_argument("--out", default="results/ground_space")
    args = p.parse_args()
    run(SurveyConfig(args.heisenberg_max_n, args.motzkin_max_n), args.out)


if __name__ == "__main__":
    main()
