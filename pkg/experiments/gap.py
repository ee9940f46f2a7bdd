import fermion_chain
import spin_chain

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.model = "ising"  # "ising", "xx" or "xy", the gap needs a free-fermion chain
        self.gamma = 1.0  # Anisotropy of the xy model
        self.lam = 1.0  # Transverse field
        self.boundary = "periodic"  # "periodic" or "open"



        ### Scan
        self.sizes = [10, 50, 100]  # Chain lengths N



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Smallest mode energy of the ground-state sector against the chain length.
    """

    columns = ("n", "gap", "ground_energy", "parity")

    def points(self):
        return [{"n": int(n)} for n in self.config.sizes]

    def evaluate(self, point):
        c = self.config
        spec = spin_chain.model_spec(c.model, point["n"], gamma=c.gamma, lam=c.lam, boundary=c.boundary)
        solution = fermion_chain.solve_chain(spec)
        return {
            "gap": fermion_chain.energy_gap(spec),
            "ground_energy": solution.energy,
            "parity": solution.parity,
        }

    def finalize(self, rows):
        gaps = {row["n"]: row["gap"] for row in rows if not row["error"]}
        ratios = [[n, 2 * n, gaps[2 * n] / gaps[n]] for n in sorted(gaps) if 2 * n in gaps and gaps[n] > 0]
        return {"doubling_ratios": ratios}
