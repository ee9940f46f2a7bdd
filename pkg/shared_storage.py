import copy
import json
import os

import ray


@ray.remote
class SharedStorage:
    """
    Class which run in a dedicated thread to collect scan records and progress information.
    """

    def __init__(self, info, config):
        self.config = config
        self.current_info = copy.deepcopy(info)
        self.records = {}

    def save_result(self, index, rows):
        self.records[index] = rows
        self.current_info["num_evaluated_points"] = len(self.records)
        self.current_info["num_failed_points"] = sum(
            1 for point_rows in self.records.values() if any(row["error"] for row in point_rows)
        )
        self.current_info["last_point"] = index

    def get_results(self):
        """Rows of every evaluated point, in point order."""
        return [row for index in sorted(self.records) for row in self.records[index]]

    def save_info(self, path=None):
        if not path:
            path = os.path.join(self.config.results_path, "progress.json")

        with open(path, "w") as f:
            json.dump(self.current_info, f, indent=2, sort_keys=True)

    def get_info(self, keys):
        if isinstance(keys, str):
            return self.current_info[keys]

        elif isinstance(keys, list):
            return {key: self.current_info[key] for key in keys}

        else:
            raise TypeError(f"keys must be a str or a list, got {type(keys).__name__}")

    def set_info(self, keys, values=None):
        if isinstance(keys, str) and values is not None:
            self.current_info[keys] = values
        elif isinstance(keys, dict):
            self.current_info.update(keys)
        else:
            raise TypeError(f"keys must be a str with a value or a dict, got {type(keys).__name__}")
