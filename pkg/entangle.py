import argparse
import importlib
import json
import logging
import math
import os
import sys
import time

import numpy
import pandas
import ray
from torch.utils.tensorboard import SummaryWriter

import scan_worker
import shared_storage

__version__ = "1.0.0"

logger = logging.getLogger(__name__)

COMMANDS = (
    "entropy-profile",
    "cest-scan",
    "gap",
    "correlation",
    "boson-entropy",
    "boson-eof",
    "quench",
    "thermal-fit",
    "fqhe-scan",
    "sector-dims",
    "critical-search",
)
ALIASES = {"from": "start", "to": "stop", "lambda": "lam", "n": "n_sites"}
OUTPUTS = ("csv", "json")
NUM_WORKERS_ENV = "ENTANGLE_NUM_WORKERS"
FLOAT_FORMAT = "%.11e"  # 12 significant digits


def load_command(command):
    """
    Experiment class and default config of a command.

    Args:
        command (str): Command name, it should match the name of a .py file in the
        "./experiments" directory with dashes instead of underscores.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}, expected one of {', '.join(COMMANDS)}")
    try:
        experiment_module = importlib.import_module("experiments." + command.replace("-", "_"))
    except ModuleNotFoundError as err:
        print(f'{command} is not a supported command, try "entropy-profile" or refer to the documentation.')
        raise err
    return experiment_module.Experiment, experiment_module.ExperimentConfig()


def config_params(config):
    """Parameters of an ExperimentConfig, sorted by name."""
    return {key: value for key, value in sorted(vars(config).items()) if key not in ("required", "nullable")}


def expected_type(config, key):
    if key in config.required:
        return config.required[key]
    if key in config.nullable:
        return config.nullable[key]
    return type(getattr(config, key))


def check_value(config, key, value):
    """
    Value of a parameter converted to the type its config declares.

    Ints are accepted where floats are expected and tuples where lists are.
    """
    expected = expected_type(config, key)
    if value is None:
        if key in config.nullable:
            return None
        raise TypeError(f"{key} must be a {expected.__name__}, got None")
    if expected is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if expected is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if expected is list and isinstance(value, (list, tuple)):
        return list(value)
    if expected in (bool, str) and isinstance(value, expected):
        return value
    raise TypeError(f"{key} must be a {expected.__name__}, got {type(value).__name__} {value!r}")


def _parse_scalar(text):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_value(config, key, text):
    """Convert a command-line string to the type of `key`."""
    expected = expected_type(config, key)
    try:
        if expected is bool:
            lowered = text.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return lowered in ("true", "1", "yes")
        if expected is list:
            return [_parse_scalar(item) for item in text.split(",") if item]
        return expected(text)
    except ValueError:
        raise TypeError(f"{key} must be a {expected.__name__}, got {text!r}") from None


def default_parallelism():
    value = os.environ.get(NUM_WORKERS_ENV, "1")
    try:
        parallelism = int(value)
    except ValueError:
        raise ValueError(f"{NUM_WORKERS_ENV} must be a positive integer, got {value!r}") from None
    if parallelism < 1:
        raise ValueError(f"{NUM_WORKERS_ENV} must be a positive integer, got {parallelism}")
    return parallelism


class Entangle:
    """
    Main class to run the entanglement commands.

    Args:
        command (str): Name of the command, one of COMMANDS.

        config (dict, ExperimentConfig, optional): Override the default config of the command.

        parallelism (int, optional): Number of scan workers, 1 evaluates in process.
        Defaults to the ENTANGLE_NUM_WORKERS environment variable.

        output (str): "csv" or "json".

        output_path (str, optional): Path of the records, defaults to results/<command>.<output>.

    Example:
        >>> entangle = Entangle("gap", {"sizes": [10, 50, 100]})
        >>> frame = entangle.run()
    """

    def __init__(self, command, config=None, parallelism=None, output="csv", output_path=None):
        self.command = command
        self.Experiment, self.config = load_command(command)

        # Overwrite the config
        if config:
            if type(config) is dict:
                for param, value in config.items():
                    self.set_param(param, value)
            else:
                self.config = config
        self.check_required()

        if output not in OUTPUTS:
            raise ValueError(f"output must be one of {', '.join(OUTPUTS)}, got {output!r}")
        self.output = output
        self.output_path = output_path or os.path.join("results", f"{command}.{output}")
        self.parallelism = default_parallelism() if parallelism is None else parallelism
        if type(self.parallelism) is not int or self.parallelism < 1:
            raise ValueError(f"parallelism must be a positive integer, got {self.parallelism!r}")

        # Fix random generator seed
        numpy.random.seed(self.config.seed)

        self.experiment = self.Experiment(self.config)
        self.points = self.experiment.points()
        self.info = {
            "num_evaluated_points": 0,
            "num_failed_points": 0,
            "last_point": None,
            "last_point_seconds": 0.0,
            "terminate": False,
        }
        self.wall_clock_seconds = None
        self.summary = {}

        # Workers
        self.scan_workers = None
        self.shared_storage_worker = None

    def set_param(self, param, value):
        param = ALIASES.get(param, param)
        accepted = config_params(self.config)
        if param not in accepted:
            raise ValueError(
                f"unknown key {param!r} for {self.command}, accepted keys: {', '.join(accepted)}"
            )
        setattr(self.config, param, check_value(self.config, param, value))

    def check_required(self):
        missing = [key for key in self.config.required if getattr(self.config, key) is None]
        if missing:
            flags = ", ".join(f"--{key.replace('_', '-')}" for key in missing)
            raise ValueError(f"{self.command} is missing the required key(s) {', '.join(missing)} ({flags})")

    @classmethod
    def from_dict(cls, document):
        """Build from the JSON config schema {"command", "params", "output", "output_path", "parallelism"}."""
        if not isinstance(document, dict):
            raise TypeError(f"a run config must be a JSON object, got {type(document).__name__}")
        extra = set(document) - {"command", "params", "output", "output_path", "parallelism"}
        if extra:
            raise ValueError(f"unknown top-level key(s) {', '.join(sorted(extra))}")
        if "command" not in document:
            raise ValueError("the run config is missing its command")
        params = document.get("params", {})
        if not isinstance(params, dict):
            raise TypeError(f"params must be a JSON object, got {type(params).__name__}")
        return cls(
            document["command"],
            params,
            document.get("parallelism"),
            document.get("output", "csv"),
            document.get("output_path"),
        )

    @classmethod
    def from_json_file(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def canonical_config(self):
        """The run config with every default filled, in the JSON config schema."""
        return {
            "command": self.command,
            "params": config_params(self.config),
            "output": self.output,
            "output_path": self.output_path,
            "parallelism": self.parallelism,
        }

    def run(self, log_in_tensorboard=True):
        """
        Evaluate every scan point.

        Args:
            log_in_tensorboard (bool): Write progress and scan values to TensorBoard
            when the config has a results_path.

        Returns:
            pandas.DataFrame with the command's columns and a final error column, in point order.
        """
        points = self.points
        writer = None
        if log_in_tensorboard and self.config.results_path:
            os.makedirs(self.config.results_path, exist_ok=True)
            writer = SummaryWriter(self.config.results_path)
            self.log_config(writer)

        start = time.time()
        if self.parallelism == 1 or len(points) < 2:
            rows = self.scan_in_process(points, writer)
        else:
            rows = self.scan_with_workers(points, writer)
        self.wall_clock_seconds = time.time() - start

        try:
            self.summary = self.experiment.finalize(rows)
        except (ValueError, RuntimeError, ArithmeticError) as err:
            logger.warning(f"summary of {self.command} failed: {err}")
            self.summary = {"error": f"{type(err).__name__}: {err}"}

        frame = pandas.DataFrame(rows, columns=[*self.experiment.columns, "error"])
        if writer:
            self.log_results(writer, frame)
            writer.close()
        return frame

    def scan_in_process(self, points, writer=None):
        rows = []
        for index, point in enumerate(points):
            point_rows = self.experiment.evaluate_point(point)
            rows.extend(point_rows)
            self.info["num_evaluated_points"] = index + 1
            self.info["num_failed_points"] += any(row["error"] for row in point_rows)
            if writer:
                writer.add_scalar("1.Progress/1.Evaluated_points", index + 1, index)
            print(
                f'Evaluated points: {index + 1}/{len(points)}. Failed: {self.info["num_failed_points"]}',
                end="\r",
            )
        print()
        return rows

    def scan_with_workers(self, points, writer=None):
        """
        Spawn ray workers and dispatch the points to them round-robin.

        Rows come back ordered by point index whatever the completion order.
        """
        ray.init(num_cpus=self.parallelism, ignore_reinit_error=True)

        self.shared_storage_worker = shared_storage.SharedStorage.remote(self.info, self.config)
        self.shared_storage_worker.set_info.remote("terminate", False)

        self.scan_workers = [
            scan_worker.ScanWorker.remote(self.Experiment, self.config, self.config.seed + seed)
            for seed in range(self.parallelism)
        ]
        indexed_points = list(enumerate(points))
        tasks = [
            worker.continuous_scan.remote(self.shared_storage_worker, indexed_points[seed :: self.parallelism])
            for seed, worker in enumerate(self.scan_workers)
        ]
        self.logging_loop(tasks, len(points), writer)

        # Surface worker crashes
        ray.get(tasks)
        rows = ray.get(self.shared_storage_worker.get_results.remote())
        self.terminate_workers()
        return rows

    def logging_loop(self, tasks, num_points, writer=None):
        """
        Keep track of the scan progress.
        """
        keys = ["num_evaluated_points", "num_failed_points", "last_point_seconds"]
        counter = 0
        ready = []
        try:
            while len(ready) < len(tasks):
                ready, _ = ray.wait(tasks, num_returns=len(tasks), timeout=0.5)
                info = ray.get(self.shared_storage_worker.get_info.remote(keys))
                if writer:
                    writer.add_scalar("1.Progress/1.Evaluated_points", info["num_evaluated_points"], counter)
                    writer.add_scalar("1.Progress/2.Failed_points", info["num_failed_points"], counter)
                    writer.add_scalar("1.Progress/3.Seconds_per_point", info["last_point_seconds"], counter)
                print(
                    f'Evaluated points: {info["num_evaluated_points"]}/{num_points}. Failed: {info["num_failed_points"]}',
                    end="\r",
                )
                counter += 1
        except KeyboardInterrupt:
            self.shared_storage_worker.set_info.remote("terminate", True)
        print()
        if self.config.results_path:
            ray.get(self.shared_storage_worker.save_info.remote())

    def terminate_workers(self):
        """
        Softly terminate the running tasks and garbage collect the workers.
        """
        if self.shared_storage_worker:
            self.shared_storage_worker.set_info.remote("terminate", True)
            self.info = ray.get(self.shared_storage_worker.get_info.remote(list(self.info)))

        self.scan_workers = None
        self.shared_storage_worker = None

    def log_config(self, writer):
        hp_table = [f"| {key} | {value} |" for key, value in config_params(self.config).items()]
        writer.add_text(
            "Hyperparameters",
            "| Parameter | Value |\n|-------|-------|\n" + "\n".join(hp_table),
        )

    def log_results(self, writer, frame):
        for number, column in enumerate(self.experiment.columns, 1):
            values = pandas.to_numeric(frame[column], errors="coerce")
            for step, value in enumerate(values):
                if not math.isnan(value):
                    writer.add_scalar(f"2.Scan/{number}.{column}", value, step)

    def metadata(self, frame):
        return {
            "command": self.command,
            "config": self.canonical_config(),
            "version": __version__,
            "wall_clock_seconds": self.wall_clock_seconds,
            "columns": list(frame.columns),
            "num_rows": len(frame),
            "num_failed_rows": int((frame["error"] != "").sum()),
            "summary": _jsonable(self.summary),
        }

    def save(self, frame):
        """
        Write the records and their metadata sidecar.

        Returns:
            (records path, sidecar path).
        """
        directory = os.path.dirname(self.output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        if self.output == "csv":
            frame.to_csv(self.output_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        else:
            frame.to_json(self.output_path, orient="records", indent=2, double_precision=12)
        sidecar = metadata_path(self.output_path)
        with open(sidecar, "w") as f:
            json.dump(self.metadata(frame), f, indent=2, sort_keys=True)
        return self.output_path, sidecar

    def execute(self):
        """
        Run, save and report.

        Returns:
            Exit status, 1 when every point failed and 0 otherwise.
        """
        frame = self.run()
        records, sidecar = self.save(frame)
        print(f"Wrote {len(frame)} rows to {records} and the metadata to {sidecar}")
        if len(frame) and (frame["error"] != "").all():
            print(f"Every point of {self.command} failed, see the error column", file=sys.stderr)
            return 1
        return 0


def metadata_path(output_path):
    return os.path.splitext(output_path)[0] + ".meta.json"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, numpy.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def read_results(path):
    """
    Records written by Entangle.save, as a DataFrame with an empty-string error column.
    """
    if path.endswith(".json"):
        frame = pandas.read_json(path, orient="records")
    else:
        frame = pandas.read_csv(path)
    if "error" in frame:
        frame["error"] = frame["error"].fillna("").astype(str)
    return frame


def read_metadata(path):
    with open(metadata_path(path)) as f:
        return json.load(f)


### Command line


RUN_FLAGS = ("--config", "--output", "--output-path", "--parallelism", "--log-level")


def _split_arguments(argv):
    """Separate the driver flags from the --key value parameter pairs."""
    run_args, pairs = [], []
    tokens = list(argv)
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token in ("-h", "--help") or not token.startswith("--"):
            run_args.append(token)
            i += 1
            continue
        if "=" in token:
            flag, value = token.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ValueError(f"{token} needs a value")
            flag, value = token, tokens[i + 1]
            i += 2
        if flag in RUN_FLAGS:
            run_args.extend([flag, value])
        else:
            pairs.append((flag[2:].replace("-", "_"), value))
    return run_args, pairs


def build_parser():
    parser = argparse.ArgumentParser(
        prog="entangle",
        allow_abbrev=False,
        description="Entanglement scans of spin chains, Gaussian boson chains and FQHE tori. "
        "Command parameters are passed as --key value pairs.",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="Command to run")
    parser.add_argument("--config", help="JSON run config, command-line pairs override its params")
    parser.add_argument("--output", choices=OUTPUTS, help="Records format, csv by default")
    parser.add_argument("--output-path", help="Records path, results/<command>.<output> by default")
    parser.add_argument("--parallelism", type=int, help=f"Number of scan workers, ${NUM_WORKERS_ENV} by default")
    parser.add_argument("--log-level", default="WARNING", help="Logging level of the library modules")
    return parser


def parse_config(argv):
    """
    Build an Entangle run from command-line arguments.

    Example:
        >>> parse_config("cest-scan --model xyz --n 10 --gamma 1 --delta -0.5 --param lambda --from 1 --to 3 --steps 80".split())
    """
    run_args, pairs = _split_arguments(argv)
    args = build_parser().parse_args(run_args)
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    document = {}
    if args.config:
        with open(args.config) as f:
            document = json.load(f)
        if not isinstance(document, dict):
            raise TypeError(f"{args.config} must hold a JSON object")
    command = args.command or document.get("command")
    if command is None:
        raise ValueError(f"no command given, expected one of {', '.join(COMMANDS)}")
    if args.command and document.get("command", args.command) != args.command:
        raise ValueError(f"command {args.command!r} differs from {document['command']!r} in {args.config}")

    _, defaults = load_command(command)
    params = dict(document.get("params", {}))
    for key, text in pairs:
        key = ALIASES.get(key, key)
        if key not in config_params(defaults):
            raise ValueError(
                f"unknown key {key!r} for {command}, accepted keys: {', '.join(config_params(defaults))}"
            )
        params[key] = parse_value(defaults, key, text)

    document = {**document, "command": command, "params": params}
    for key in ("output", "output_path", "parallelism"):
        if getattr(args, key) is not None:
            document[key] = getattr(args, key)
    return Entangle.from_dict(document)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        entangle = parse_config(argv)
    except (ValueError, TypeError, OSError) as err:
        print(f"entangle: error: {err}", file=sys.stderr)
        return 2
    return entangle.execute()


if __name__ == "__main__":
    status = main()
    ray.shutdown()
    sys.exit(status)
