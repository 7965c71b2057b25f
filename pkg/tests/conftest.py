import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fomlkit.m2fol import m2fol_signature  # noqa: E402
from fomlkit.textio import parse_language, parse_model  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def read(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def language(name: str):
    return parse_language(read(name), name)


def model(name: str, sig):
    return parse_model(read(name), sig, name)


@pytest.fixture(scope="session")
def pn():
    return language("petri.m2l")


@pytest.fixture(scope="session")
def barber(pn):
    return model("barber.m2m", pn)


@pytest.fixture(scope="session")
def m2fol():
    return m2fol_signature()
