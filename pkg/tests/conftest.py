"""
Shared fixtures: the four reference parameter sets and cached oracle tables
"""
import sys
import os

import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.oracle.stieltjes import stieltjes
from src.qcore.context import ModelContext

# (q, alpha, c)
PARAMETER_SETS = [
    ("0.9", "5", "-1"),
    ("0.5", "2", "-1/3"),
    ("0.7", "0", "0"),
    ("0.5", "2", "-5/2"),
]
PARAMETER_IDS = ["quartic", "third", "c0", "below_minus_one"]

_tables = {}


def make_ctx(params, digits=50, **kwargs) -> ModelContext:
    q, alpha, c = params
    return ModelContext(q=q, alpha=alpha, c=c, digits=digits, **kwargs)


def oracle_table(params, N=30, digits=100):
    """Stieltjes tables are expensive; build each (params, N, digits) once per session"""
    key = (params, N, digits)
    if key not in _tables:
        _tables[key] = stieltjes(make_ctx(params, digits), N)
    return _tables[key]


@pytest.fixture(params=PARAMETER_SETS, ids=PARAMETER_IDS)
def params(request):
    return request.param


@pytest.fixture
def quartic_ctx():
    return ModelContext(q="0.9", alpha="5", c="-1", digits=50)
