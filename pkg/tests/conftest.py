import json
import os

import pytest

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def frozen():
    with open(os.path.join(DATA, "oracle_values.json")) as fh:
        return json.load(fh)
