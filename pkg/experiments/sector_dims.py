import spin_chain

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {"n_sites": int}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.n_sites = None  # Number of sites of the periodic chain



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Dimensions of the translation x spin-flip sectors.
    """

    columns = ("k", "p", "dimension")

    def points(self):
        if self.config.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.config.n_sites}")
        return [{"k": k, "p": p} for k in range(self.config.n_sites) for p in (1, -1)]

    def evaluate(self, point):
        basis = spin_chain.enumerate_sector_basis(self.config.n_sites, (point["k"], point["p"]))
        return {"dimension": basis.dimension}

    def finalize(self, rows):
        return {
            "total_dimension": int(sum(row["dimension"] for row in rows if not row["error"])),
            "hilbert_dimension": 2**self.config.n_sites,
        }
