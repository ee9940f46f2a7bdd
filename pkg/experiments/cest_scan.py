import numpy

import criticality

from .abstract_experiment import AbstractExperiment

PARAMETERS = {"lam": "lam", "lambda": "lam", "gamma": "gamma", "delta": "delta"}
COLUMN_NAMES = {"lam": "lambda", "gamma": "gamma", "delta": "delta"}


class ExperimentConfig:
    def __init__(self):
        self.seed = 0  # Seed for numpy and the scan workers
        self.required = {"n_sites": int, "start": float, "stop": float, "steps": int}  # Keys without a default
        self.nullable = {"results_path": str}  # Keys that may stay None



        ### Model
        self.model = "xyz"  # "ising", "xx", "xy" or "xyz"
        self.n_sites = None  # Number of sites of the periodic chain
        self.gamma = 1.0  # Anisotropy, f_x = (1 + gamma) / 2 and f_y = (1 - gamma) / 2
        self.delta = 0.0  # zz coupling of the xyz model
        self.lam = 0.0  # Transverse field
        self.boundary = "periodic"  # The conformal signature assumes a ring



        ### Scan
        self.param = "lam"  # Scanned parameter: "lam" (or "lambda"), "gamma" or "delta", the others stay fixed
        self.start = None  # First value of the scanned parameter
        self.stop = None  # Last value of the scanned parameter
        self.steps = None  # Number of equally spaced values, at least 5
        self.method = "auto"  # "fermion", "dense" or "auto"
        self.m_max = 12  # Largest minimal model the maxima are snapped to



        ### Workers
        self.results_path = None  # Directory of the TensorBoard logs, None disables them


def model_family(config):
    if config.param not in PARAMETERS:
        raise ValueError(f"param must be one of {', '.join(PARAMETERS)}, got {config.param!r}")
    parameter = PARAMETERS[config.param]
    fixed = {name: getattr(config, name) for name in ("gamma", "delta", "lam") if name != parameter}
    return criticality.ModelFamily(config.model, parameter, fixed, config.boundary)


class Experiment(AbstractExperiment):
    """
    Central charge estimate c_est along a line of one model parameter.
    """

    def __init__(self, config):
        super().__init__(config)
        self.family = model_family(config)
        self.value_column = COLUMN_NAMES[self.family.parameter]
        self.columns = (self.value_column, "c_est", "epsilon")

    def points(self):
        c = self.config
        if c.steps < criticality.MIN_SCAN_POINTS:
            raise ValueError(f"steps must be at least {criticality.MIN_SCAN_POINTS}, got {c.steps}")
        return [{self.value_column: float(value)} for value in numpy.linspace(c.start, c.stop, c.steps)]

    def evaluate(self, point):
        estimate = criticality.central_charge_at(
            self.family, point[self.value_column], self.config.n_sites, self.config.method
        )
        return {"c_est": estimate.c_est, "epsilon": estimate.epsilon}

    def finalize(self, rows):
        thetas = numpy.array([row[self.value_column] for row in rows], dtype=float)
        values = numpy.array([row["c_est"] for row in rows], dtype=float)
        maxima = criticality.find_maxima(thetas, values, self.config.m_max)
        return {"maxima": [maximum._asdict() for maximum in maxima]}
