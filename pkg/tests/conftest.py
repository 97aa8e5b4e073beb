import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blockgraph import build  # noqa: E402

FIB8 = b"abaababaabaababaababa"


@pytest.fixture(scope="session")
def fib():
    return FIB8


@pytest.fixture(scope="session")
def fib_graph():
    return build(FIB8, bookmark_boundaries=True)
