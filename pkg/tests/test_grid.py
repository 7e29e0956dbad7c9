import math

import numpy as np
import pytest

from pyadiabaton.errors import InvalidGrid
from pyadiabaton.grid import TauGrid, ZetaGrid
from pyadiabaton.medium import MediumSpec, ThetaEffectiveK


def test_tau_grid():
    grid = TauGrid(-40.0, 40.0, 4096)
    assert grid.tau[0] == -40.0
    assert grid.tau[-1] == 40.0
    assert len(grid.tau) == 4096
    assert math.isclose(grid.dtau, 80.0 / 4095)
    with pytest.raises(ValueError):
        grid.tau[0] = 1.0


def test_tau_grid_checks():
    tests = [
        (dict(tau_min=1.0, tau_max=1.0, n_tau=32), r"tau_max must be > tau_min"),
        (dict(tau_min=-math.inf, tau_max=1.0, n_tau=32), r"must be finite"),
        (dict(tau_min=-1.0, tau_max=1.0, n_tau=15), r"n_tau must be an integer >= 16"),
        (dict(tau_min=-1.0, tau_max=1.0, n_tau=32.5), r"n_tau must be an integer"),
    ]
    for kwargs, match in tests:
        with pytest.raises(InvalidGrid, match=match):
            TauGrid(**kwargs)


def test_tau_grid_refined():
    grid = TauGrid(-12.0, 12.0, 257)
    fine = grid.refined()
    assert fine.n_tau == 513
    assert math.isclose(fine.dtau, grid.dtau / 2)
    assert np.allclose(fine.tau[::2], grid.tau, rtol=0, atol=1e-12)


def test_tau_grid_as_dict():
    grid = TauGrid(-1.0, 1.0, 17.0)
    assert grid.as_dict() == dict(tau_min=-1.0, tau_max=1.0, n_tau=17)
    assert isinstance(grid.n_tau, int)
    assert TauGrid(**grid.as_dict()) == grid


def test_zeta_grid():
    grid = ZetaGrid(100.0, 2000, 100)
    assert grid.dzeta == 0.05
    assert grid.zeta_at(0) == 0.0
    assert grid.zeta_at(2000) == 100.0
    assert len(grid.snapshot_steps()) == 21
    assert grid.snapshot_zetas()[-1] == 100.0


def test_zeta_grid_keeps_last_step():
    grid = ZetaGrid(10.0, 10, 4)
    assert grid.snapshot_steps() == [0, 4, 8, 10]
    assert grid.snapshot_zetas() == [0.0, 4.0, 8.0, 10.0]


def test_zeta_grid_checks():
    tests = [
        (dict(zeta_max=0.0, n_zeta=10), r"zeta_max must be > 0"),
        (dict(zeta_max=math.nan, n_zeta=10), r"zeta_max must be > 0"),
        (dict(zeta_max=1.0, n_zeta=0), r"n_zeta must be an integer >= 1"),
        (dict(zeta_max=1.0, n_zeta=10, snapshot_stride=0), r"snapshot_stride must be in 1..10"),
        (dict(zeta_max=1.0, n_zeta=10, snapshot_stride=11), r"snapshot_stride must be in 1..10"),
    ]
    for kwargs, match in tests:
        with pytest.raises(InvalidGrid, match=match):
            ZetaGrid(**kwargs)


def test_medium():
    medium = MediumSpec(kappa_c=4.0)
    assert medium.kappa_p == 1.0
    assert medium.as_dict() == dict(kappa_p=1.0, kappa_c=4.0)

    with pytest.raises(InvalidGrid, match=r"kappa_p is fixed to 1"):
        MediumSpec(kappa_c=1.0, kappa_p=2.0)
    for kappa_c in (0.0, -1.0, math.inf):
        with pytest.raises(InvalidGrid, match=r"kappa_c must be > 0"):
            MediumSpec(kappa_c=kappa_c)


def test_effective_k():
    k_eff = MediumSpec(kappa_c=4.0).effective_k()
    assert isinstance(k_eff, ThetaEffectiveK)
    assert k_eff(0.0) == 1.0
    assert math.isclose(k_eff(math.pi / 2), 4.0)
    assert math.isclose(k_eff(math.pi / 4), 2.5)

    theta = np.linspace(0, math.pi / 2, 9)
    k = k_eff(theta)
    assert np.all((k >= 1.0) & (k <= 4.0 + 1e-12))


def test_effective_k_speed():
    k_eff = MediumSpec(kappa_c=4.0).effective_k()
    assert math.isclose(k_eff.speed(0.0), 0.25)
    assert math.isclose(k_eff.speed(math.pi / 2), 4.0)

    equal = MediumSpec(kappa_c=1.0).effective_k()
    theta = np.linspace(0, math.pi / 2, 9)
    assert np.all(equal(theta) == 1.0)
    assert np.all(equal.speed(theta) == 1.0)
