import logging
import math
from abc import ABC, abstractmethod

logger = logging.getLogger(__name__)


class AbstractExperiment(ABC):
    """
    Inherit this class for entangle to run a command.

    A command is a list of scan points. Each point is a dict holding the key
    columns of its rows; evaluating it returns the remaining columns.
    """

    columns = ()  # Fixed column order of the output, without the final error column

    def __init__(self, config):
        self.config = config

    @abstractmethod
    def points(self):
        """
        Scan points in output order.

        Returns:
            A list of dicts, the key columns of every point.
        """
        pass

    @abstractmethod
    def evaluate(self, point):
        """
        Compute one scan point.

        Args:
            point (dict): One of the dicts returned by points.

        Returns:
            A dict of the non-key columns, or a list of such dicts for a point
            producing several rows.
        """
        pass

    def finalize(self, rows):
        """
        Summary of the whole scan, stored in the metadata sidecar.

        Args:
            rows (list): Every output row, in order.

        Returns:
            A JSON serializable dict.
        """
        return {}

    def evaluate_point(self, point):
        """
        Rows of a point with the error column filled.

        A failing point yields one row with nan values and the error message.
        """
        try:
            values = self.evaluate(point)
        except (ValueError, TypeError, RuntimeError, ArithmeticError) as err:
            logger.warning(f"point {point} failed: {err}")
            row = {column: point.get(column, math.nan) for column in self.columns}
            row["error"] = f"{type(err).__name__}: {err}"
            return [row]
        if isinstance(values, dict):
            values = [values]
        rows = []
        for value in values:
            row = {**point, **value}
            missing = [column for column in self.columns if column not in row]
            assert not missing, f"{type(self).__name__} did not produce the columns {missing}"
            rows.append({**{column: row[column] for column in self.columns}, "error": ""})
        return rows
