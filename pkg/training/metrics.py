import json
import logging
import os

logger = logging.getLogger(__name__)


class MetricsLog:
    """Line-delimited JSON records, one per optimization step"""

    def __init__(self, path: str = None):
        self.path = path
        self._handle = None
        if path:
            os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
            self._handle = open(path, 'a')

    def write(self, record: dict):
        logger.debug("Step record: %s", record)
        if self._handle:
            self._handle.write(json.dumps(record) + '\n')
            self._handle.flush()

    def close(self):
        if self._handle:
            self._handle.close()
            self._handle = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
