import criticality

from .abstract_experiment import AbstractExperiment
from .cest_scan import COLUMN_NAMES, model_family


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy, the scan workers and the evolution strategy
        self.required = {"n_sites": int, "start": float, "stop": float}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.model = "xyz"  # "ising", "xx", "xy" or "xyz"
        self.n_sites = None  # Number of sites of the periodic chain
        self.gamma = 1.0  # Anisotropy, f_x = (1 + gamma) / 2 and f_y = (1 - gamma) / 2
        self.delta = 0.0  # zz coupling of the xyz model
        self.lam = 0.0  # Transverse field
        self.boundary = "periodic"  # The conformal signature assumes a ring



        ### Search
        self.param = "lam"  # Searched parameter: "lam" (or "lambda"), "gamma" or "delta"
        self.start = None  # Lower bound of the searched parameter
        self.stop = None  # Upper bound of the searched parameter
        self.budget = 30  # Number of c_est evaluations of the (1+1) evolution strategy
        self.method = "auto"  # "fermion", "dense" or "auto"
        self.m_max = 12  # Largest minimal model the result is snapped to



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


class Experiment(AbstractExperiment):
    """
    Sequential search of the c_est maximum along a parameter line.

    The search is a single point; its rows are the evaluation history followed
    by the recommended value.
    """

    def __init__(self, config):
        super().__init__(config)
        self.family = model_family(config)
        self.value_column = COLUMN_NAMES[self.family.parameter]
        self.columns = ("evaluation", self.value_column, "c_est", "recommended")

    def points(self):
        if self.config.budget < 1:
            raise ValueError(f"budget must be positive, got {self.config.budget}")
        return [{}]

    def evaluate(self, point):
        c = self.config
        search = criticality.locate_critical_point(
            self.family, (c.start, c.stop), c.n_sites, c.budget, c.method, c.seed
        )
        rows = [
            {"evaluation": i, self.value_column: value, "c_est": c_est, "recommended": 0}
            for i, (value, c_est) in enumerate(search.history)
        ]
        rows.append({"evaluation": len(rows), self.value_column: search.theta, "c_est": search.c_est, "recommended": 1})
        return rows

    def finalize(self, rows):
        best = [row for row in rows if row["recommended"] == 1 and not row["error"]]
        if not best:
            return {}
        match = criticality.snap_to_kac(best[0]["c_est"], self.config.m_max)
        return {
            "critical_value": best[0][self.value_column],
            "c_est": best[0]["c_est"],
            "snapped_charge": match.charge,
            "kac_m": match.m,
        }
