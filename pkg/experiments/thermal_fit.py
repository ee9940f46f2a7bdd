import numpy

import dynamics
import entanglement
import fermion_chain
import spin_chain

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.model = "ising"  # "ising", "xx" or "xy", the block spectrum needs a free-fermion chain
        self.n_sites = 40  # Number of sites of the periodic chain
        self.gamma = 1.0  # Anisotropy of the xy model
        self.block_size = 8  # Sites 0..block_size-1 form the block



        ### Scan
        self.start = 0.5  # First transverse field
        self.stop = 1.5  # Last transverse field
        self.steps = 11  # Number of equally spaced fields
        self.beta_min = 1e-3  # Lower bound of the inverse temperature search
        self.beta_max = 1e3  # Upper bound of the inverse temperature search



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Closest thermal state of the open block Hamiltonian to the ground-state block spectrum.
    """

    columns = ("lambda", "block_entropy", "beta_star", "fidelity")

    def points(self):
        c = self.config
        if not 0 < c.block_size < c.n_sites:
            raise ValueError(f"block_size must lie in 1..{c.n_sites - 1}, got {c.block_size}")
        return [{"lambda": float(lam)} for lam in numpy.linspace(c.start, c.stop, c.steps)]

    def evaluate(self, point):
        c = self.config
        lam = point["lambda"]
        chain = spin_chain.model_spec(c.model, c.n_sites, gamma=c.gamma, lam=lam)
        block = spin_chain.model_spec(c.model, c.block_size, gamma=c.gamma, lam=lam, boundary="open")
        gamma_block = entanglement.block_correlation(fermion_chain.ground_correlation(chain), range(c.block_size))
        occupations = entanglement.block_occupations(gamma_block)
        fit = dynamics.fit_temperature(
            dynamics.product_weights(occupations.lambdas), block, bounds=(c.beta_min, c.beta_max)
        )
        return {
            "block_entropy": entanglement.von_neumann_entropy(occupations),
            "beta_star": fit.beta,
            "fidelity": fit.fidelity,
        }
