import time

import numpy
import ray


@ray.remote
class ScanWorker:
    """
    Class which run in a dedicated thread to evaluate scan points and save them to the shared storage.
    """

    def __init__(self, Experiment, config, seed):
        self.config = config
        self.experiment = Experiment(config)

        # Fix random generator seed
        numpy.random.seed(seed)

    def continuous_scan(self, shared_storage, indexed_points):
        """
        Evaluate the assigned (index, point) pairs until they run out or the run is terminated.
        """
        for index, point in indexed_points:
            if ray.get(shared_storage.get_info.remote("terminate")):
                break
            start = time.time()
            rows = self.experiment.evaluate_point(point)
            ray.get(shared_storage.save_result.remote(index, rows))
            shared_storage.set_info.remote("last_point_seconds", time.time() - start)
