import os
import sys

import pytest

# Ensure repository root is on sys.path for imports like `transmap.*`
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

FIXTURES = os.path.join(ROOT, "tests", "fixtures")


@pytest.fixture
def wos_fixture():
    def _read(name: str) -> bytes:
        with open(os.path.join(FIXTURES, "wos", name), "rb") as f:
            return f.read()

    return _read


@pytest.fixture
def golden():
    def _read(name: str) -> bytes:
        with open(os.path.join(FIXTURES, "golden", name), "rb") as f:
            return f.read()

    return _read
