import itertools

import gaussian_boson

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.sizes = [6, 8, 10, 20, 30]  # Ring lengths N
        self.kappas = [1e-3, 1.0]  # Masses
        self.lattice_const = 1.0  # Lattice spacing a



        ### Scan
        self.distances = [1, 2, 3]  # Site separations of the two modes



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Entanglement of formation between two sites of the Klein-Gordon ground state.
    """

    columns = ("n", "kappa", "distance", "n_mode", "k_q", "k_p", "eof")

    def points(self):
        c = self.config
        return [
            {"n": int(n), "kappa": float(kappa), "distance": int(distance)}
            for n, kappa, distance in itertools.product(c.sizes, c.kappas, c.distances)
        ]

    def evaluate(self, point):
        n, distance = point["n"], point["distance"]
        if not 0 < distance < n:
            raise ValueError(f"distance must lie in 1..{n - 1}, got {distance}")
        spec = gaussian_boson.KGSpec(n, point["kappa"], self.config.lattice_const)
        form = gaussian_boson.two_mode_matrix(gaussian_boson.kg_ground_state(spec), 0, distance)
        return {
            "n_mode": form.n_a,
            "k_q": form.k_q,
            "k_p": form.k_p,
            "eof": gaussian_boson.symmetric_gaussian_eof(form),
        }
