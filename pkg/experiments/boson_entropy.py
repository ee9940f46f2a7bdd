import functools

import criticality
import entanglement
import gaussian_boson

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {}  # Keys without a default
        self.nullable = {"ells": list, "results_path": str}  # Keys that may stay None



        ### Model
        self.n_sites = 30  # Number of oscillators on the ring
        self.kappa = 1e-3  # Mass, small values approach the conformal massless chain
        self.lattice_const = 1.0  # Lattice spacing a



        ### Scan
        self.ells = None  # Block lengths, None for 1..N-1



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Block entropies of the Klein-Gordon ground state.
    """

    columns = ("ell", "entropy_bits")

    @functools.cached_property
    def state(self):
        c = self.config
        return gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(c.n_sites, c.kappa, c.lattice_const))

    def points(self):
        ells = self.config.ells or range(1, self.config.n_sites)
        return [{"ell": int(ell)} for ell in ells]

    def evaluate(self, point):
        if not 0 < point["ell"] < self.config.n_sites:
            raise ValueError(f"block length must lie in 1..{self.config.n_sites - 1}, got {point['ell']}")
        return {"entropy_bits": gaussian_boson.gaussian_block_entropy(self.state, range(point["ell"]))}

    def finalize(self, rows):
        values = {row["ell"]: row["entropy_bits"] for row in rows if not row["error"]}
        try:
            estimate = criticality.estimate_central_charge(entanglement.EntropyProfile(self.config.n_sites, values))
        except ValueError:
            return {}
        return {"c_est": estimate.c_est, "epsilon": estimate.epsilon, "window": list(estimate.window)}
