import functools

import numpy

import dynamics

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {}  # Keys without a default
        self.nullable = {"block_start": int, "times": list, "results_path": str}  # Keys that may stay None



        ### Model
        self.n_sites = 40  # Number of sites of the periodic chain
        self.gamma = 1.0  # Anisotropy, 1 for the Ising chain
        self.lam = 1.0  # Homogeneous transverse field, 1 is the critical Ising point
        self.impurity_strength = 0.5  # Extra field on the impurity site after the quench
        self.impurity_site = 0  # Site of the impurity



        ### Block
        self.block_start = None  # First block site, None for the site after the impurity
        self.block_size = 8  # Number of adjacent block sites, the block does not wrap around the ring



        ### Scan
        self.t_start = 0.0  # First sampled time
        self.t_stop = 40.0  # Last sampled time
        self.steps = 41  # Number of equally spaced times
        self.times = None  # Explicit times, they replace t_start, t_stop and steps



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Block entropy and thermal fit after switching on a field impurity.
    """

    columns = ("t", "block_entropy", "fidelity_at_beta_star", "beta_star", "total_entropy", "energy")

    def points(self):
        c = self.config
        times = c.times if c.times is not None else numpy.linspace(c.t_start, c.t_stop, c.steps)
        return [{"t": float(t)} for t in times]

    @functools.cached_property
    def protocol(self):
        c = self.config
        return dynamics.QuenchProtocol(
            c.n_sites,
            lam=c.lam,
            impurity_strength=c.impurity_strength,
            impurity_site=c.impurity_site,
            block_start=c.block_start,
            block_size=c.block_size,
            gamma=c.gamma,
        )

    def evaluate(self, point):
        values = self.protocol.sample(point["t"])._asdict()
        del values["t"]
        return values

    def finalize(self, rows):
        valid = [row for row in rows if not row["error"]]
        if not valid:
            return {}
        energies = [row["energy"] for row in valid]
        best = max(valid, key=lambda row: row["fidelity_at_beta_star"])
        return {
            "energy_drift": max(energies) - min(energies),
            "max_total_entropy": max(row["total_entropy"] for row in valid),
            "best_fidelity": best["fidelity_at_beta_star"],
            "best_fidelity_t": best["t"],
        }
