import functools
import pathlib

import pytest

from twistfact.curve import load_curve
from twistfact.dirichlet import build_char
from twistfact.lvalue import script_L_algebraic

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "twistfact" / "data"


def chi11():
    """Order-5 character mod 11 with chi(2) = zeta^2."""
    return build_char(11, 5, [(2, 2)])


def chi31():
    return build_char(31, 5, [(3, 3)])


@functools.lru_cache(maxsize=None)
def cached_scriptL(label, modulus=11):
    chi = chi11() if modulus == 11 else chi31()
    return script_L_algebraic(load_curve(label), chi, 11)


@pytest.fixture
def data_dir():
    return DATA
