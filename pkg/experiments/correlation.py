import entanglement
import spin_chain

from .abstract_experiment import AbstractExperiment


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {"n_sites": int}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.model = "ising"  # "ising", "xx", "xy" or "xyz"
        self.n_sites = None  # Number of sites of the chain
        self.gamma = 1.0  # Anisotropy, f_x = (1 + gamma) / 2 and f_y = (1 - gamma) / 2
        self.delta = 0.0  # zz coupling of the xyz model
        self.lam = 1.5  # Transverse field
        self.boundary = "periodic"  # "periodic" or "open"



        ### Scan
        self.reference = 0  # Site k of the correlator <s_k s_l>
        self.method = "auto"  # "fermion", "dense" or "auto"



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Magnetization and connected zz correlator at distances 1..N//2 from a reference site.
    """

    columns = ("distance", "sigma_z", "zz_connected")

    def spec(self):
        c = self.config
        return spin_chain.model_spec(c.model, c.n_sites, c.gamma, c.delta, c.lam, c.boundary)

    def points(self):
        if not 0 <= self.config.reference < self.config.n_sites:
            raise ValueError(f"reference must lie in 0..{self.config.n_sites - 1}, got {self.config.reference}")
        return [{"distance": r} for r in range(1, self.config.n_sites // 2 + 1)]

    def evaluate(self, point):
        c = self.config
        spec = self.spec()
        site = (c.reference + point["distance"]) % c.n_sites
        return {
            "sigma_z": entanglement.sigma_z_expectation(spec, site, c.method),
            "zz_connected": entanglement.zz_correlation(spec, c.reference, site, c.method),
        }

    def finalize(self, rows):
        length = entanglement.correlation_length(self.spec(), self.config.method, self.config.reference)
        return length._asdict()
