import functools

import criticality
import entanglement
import spin_chain

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {"n_sites": int}  # Keys without a default
        self.nullable = {"ells": list, "results_path": str}  # Keys that may stay None



        ### Model
        self.model = "ising"  # "ising", "xx", "xy" or "xyz"
        self.n_sites = None  # Number of sites of the chain
        self.gamma = 1.0  # Anisotropy, f_x = (1 + gamma) / 2 and f_y = (1 - gamma) / 2
        self.delta = 0.0  # zz coupling of the xyz model
        self.lam = 1.0  # Transverse field
        self.boundary = "periodic"  # "periodic" or "open"



        ### Scan
        self.ells = None  # Block lengths, None for 1..N-1
        self.method = "auto"  # "fermion" (correlation matrix), "dense" (exact diagonalization) or "auto"



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Ground-state entropy of the blocks {0, ..., ell - 1}.
    """

    columns = ("ell", "entropy_bits")

    def spec(self):
        c = self.config
        return spin_chain.model_spec(c.model, c.n_sites, c.gamma, c.delta, c.lam, c.boundary)

    def points(self):
        ells = self.config.ells or range(1, self.config.n_sites)
        return [{"ell": int(ell)} for ell in ells]

    @functools.cached_property
    def profile(self):
        ells = [point["ell"] for point in self.points()]
        return entanglement.entropy_profile(self.spec(), ells, self.config.method)

    def evaluate(self, point):
        return {"entropy_bits": self.profile[point["ell"]]}

    def finalize(self, rows):
        values = {row["ell"]: row["entropy_bits"] for row in rows if not row["error"]}
        profile = entanglement.EntropyProfile(self.config.n_sites, values)
        try:
            estimate = criticality.estimate_central_charge(profile)
        except ValueError:
            # Profiles that miss the fit window have no central charge
            return {}
        match = criticality.snap_to_kac(estimate.c_est)
        return {
            "c_est": estimate.c_est,
            "epsilon": estimate.epsilon,
            "window": list(estimate.window),
            "snapped_charge": match.charge,
            "kac_m": match.m,
        }
