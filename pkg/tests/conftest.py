import sys
from pathlib import Path

import pytest

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
sys.path.insert(0, str(Path(__file__).parent))

CORPUS = Path(__file__).parent / "corpus"
VERIFIED = [
    "countdown", "abs_value", "count_up", "halve", "max2", "trunc_div",
    "clamp", "subtract_gcd", "early_exit", "third",
]
FAILING = ["overflow", "div_zero", "div_overflow", "missing_return", "wrong_post"]


@pytest.fixture
def corpus():
    return CORPUS
