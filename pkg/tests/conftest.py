import pytest

from blowup_rigidity.cone import EffectiveCone
from blowup_rigidity.fieldgeom import Config, build_delta
from blowup_rigidity.lattice import BlowupLattice
from blowup_rigidity.report import product_cases, resolve_case


@pytest.fixture(scope="session")
def c0() -> Config:
    """The worked fixture: n=2, r=2, s=(2,3) over F_13."""
    return Config(n=2, r=2, s=(2, 3), q=13, zeta=12, base=((1, 2), (3, 4, 5)))


@pytest.fixture(scope="session")
def c1() -> Config:
    """n=3, r=3, s=(1,2,3) over F_13 (the smallest field that fits: nine
    distinct coordinates are needed on axis 3, which no smaller q = 1 mod 3
    provides while staying generic)."""
    return Config(n=3, r=3, s=(1, 2, 3), q=13, zeta=3, base=((1,), (1, 2), (1, 2, 4)))


@pytest.fixture(scope="session")
def lat0(c0) -> BlowupLattice:
    return BlowupLattice(c0)


@pytest.fixture(scope="session")
def lat1(c1) -> BlowupLattice:
    return BlowupLattice(c1)


@pytest.fixture(scope="session")
def cone0(lat0) -> EffectiveCone:
    return EffectiveCone(lat0)


@pytest.fixture(scope="session")
def delta0(c0):
    return build_delta(c0)


@pytest.fixture(scope="session")
def sweep_configs() -> list[Config]:
    """24 generic configurations: n in {2..5}, r in {2..4}, two s-variants
    each, smallest workable prime per case."""
    cases = product_cases([2, 3, 4, 5], [2, 3, 4], seed=1, variants=2)
    return [resolve_case(case) for case in cases]
