import functools

import numpy

import fqhe_torus

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {}  # Keys without a default
        self.nullable = {"aspect_ratios": list, "results_path": str}  # Keys that may stay None



        ### Model
        self.n_electrons = 3  # N_e
        self.n_orbitals = 9  # N_s, the number of flux quanta
        self.q_cutoff = 20  # Reciprocal lattice spacings kept in each direction of the interaction sum
        self.coupling = 1.0  # Overall interaction strength



        ### Scan
        self.n_keep = 1  # Number of particles kept by the partial trace
        self.start = 0.05  # First aspect ratio L_y / L_x
        self.stop = 1.0  # Last aspect ratio
        self.steps = 20  # Number of equally spaced aspect ratios
        self.aspect_ratios = None  # Explicit aspect ratios, they replace start, stop and steps
        self.fermionic_signs = False  # Carry the annihilation signs through the partial trace



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Particle-partitioned entropy of the torus ground state against the aspect ratio.
    """

    columns = ("aspect_ratio", "entropy", "entropy_minus_slater", "degeneracy")

    @functools.cached_property
    def spec(self):
        c = self.config
        return fqhe_torus.FQHESpec(c.n_electrons, c.n_orbitals, q_cutoff=c.q_cutoff, coupling=c.coupling)

    def points(self):
        c = self.config
        if not 1 <= c.n_keep < c.n_electrons:
            raise ValueError(f"n_keep must lie in 1..{c.n_electrons - 1}, got {c.n_keep}")
        ratios = c.aspect_ratios if c.aspect_ratios is not None else numpy.linspace(c.start, c.stop, c.steps)
        return [{"aspect_ratio": float(ratio)} for ratio in ratios]

    def evaluate(self, point):
        result = fqhe_torus.fqhe_entropy(
            self.spec.replace(aspect_ratio=point["aspect_ratio"]), self.config.n_keep, self.config.fermionic_signs
        )
        return {
            "entropy": result.entropy,
            "entropy_minus_slater": result.entropy_minus_slater,
            "degeneracy": result.degeneracy,
        }

    def finalize(self, rows):
        c = self.config
        jump = fqhe_torus.largest_jump([row["entropy"] for row in rows])
        return {
            "iqhe_entropy": fqhe_torus.iqhe_entropy(c.n_orbitals, c.n_keep),
            "slater_baseline": fqhe_torus.slater_baseline(c.n_electrons, c.n_keep),
            "largest_jump_after": None if jump is None else rows[jump]["aspect_ratio"],
        }
