import math

import numpy as np
import pytest

from pyadiabaton.adiabatic import (
    _bright_estimate, _pair_crossing_depths, build_characteristics, characteristic_tau,
    crossing_tau0, detect_crossing, reconstruct, solve, trace_back,
)
from pyadiabaton.errors import MultivaluedError, WindowExceeded, WindowTooSmall
from pyadiabaton.grid import TauGrid, ZetaGrid
from pyadiabaton.medium import MediumSpec
from pyadiabaton.pulse import pulse_metrics
from pyadiabaton.quantities import mixing_angle, photon_invariant
from pyadiabaton.scenarios import get_scenario

from .test_helper import gaussian_fields, pedestal_fields, small_grid


def test_build_characteristics():
    fields = pedestal_fields()
    chi = build_characteristics(fields, MediumSpec())

    assert chi.W[0] == 0.0
    assert np.all(np.diff(chi.W) >= 0)
    assert np.allclose(chi.V, photon_invariant(fields, MediumSpec()))
    assert chi.w_max == chi.W[-1]
    assert np.all(chi.speed == 1.0)


def test_characteristic_tau_equal_constants():
    chi = build_characteristics(pedestal_fields(), MediumSpec())
    assert characteristic_tau(-1.0, 0.0, chi) == -1.0

    tau = characteristic_tau(-1.0, 200.0, chi)
    w0 = np.interp(-1.0, chi.grid.tau, chi.W)
    assert math.isclose(np.interp(tau, chi.grid.tau, chi.W), w0 + 200.0, rel_tol=1e-9)
    # The pedestal carries a flux of 100 per unit time.
    assert math.isclose(tau, 1.0, abs_tol=1e-3)


def test_characteristic_tau_checks():
    chi = build_characteristics(pedestal_fields(), MediumSpec())
    with pytest.raises(ValueError, match=r"tau0=13.0 outside"):
        characteristic_tau(13.0, 1.0, chi)
    with pytest.raises(ValueError, match=r"zeta must be >= 0"):
        characteristic_tau(0.0, -1.0, chi)
    with pytest.raises(WindowExceeded, match=r"leaves the window"):
        characteristic_tau(0.0, 10 * chi.w_max, chi)


def test_trace_back_inverts_characteristic_tau():
    for kappa_c in (1.0, 4.0, 0.25):
        chi = build_characteristics(pedestal_fields(), MediumSpec(kappa_c=kappa_c))
        for tau0 in (-3.0, -0.5, 0.0, 1.0):
            tau = characteristic_tau(tau0, 20.0, chi)
            assert math.isclose(trace_back(tau, 20.0, chi), tau0, abs_tol=1e-6)


def test_trace_back_before_first_characteristic():
    chi = build_characteristics(pedestal_fields(), MediumSpec())
    assert trace_back(-5.0, 0.0, chi) == -5.0
    # Nothing has reached tau = -5 yet: it still sees the quiescent entry state.
    assert trace_back(-5.0, chi.w_max, chi) == chi.grid.tau_min

    with pytest.raises(ValueError, match=r"zeta must be >= 0"):
        trace_back(0.0, -1.0, chi)


def test_no_crossing_for_equal_constants():
    chi = build_characteristics(pedestal_fields(), MediumSpec())
    assert detect_crossing(chi, 1e6) is None
    assert crossing_tau0(chi, 1e6) is None


def _shock(kappa_c):
    chi = build_characteristics(pedestal_fields(), MediumSpec(kappa_c=kappa_c))
    return chi, detect_crossing(chi, 1e5)


def test_detect_crossing_trailing_edge():
    chi, shock = _shock(4.0)
    assert shock is not None and 0 < shock < 1e5

    assert crossing_tau0(chi, 0.98 * shock) is None
    assert crossing_tau0(chi, shock) > 0.0
    assert detect_crossing(chi, 0.98 * shock) is None


def test_detect_crossing_leading_edge():
    chi, shock = _shock(0.25)
    assert shock is not None
    assert crossing_tau0(chi, 0.98 * shock) is None
    assert crossing_tau0(chi, shock) < 0.0


def test_detect_crossing_rtol():
    chi, shock = _shock(4.0)
    earliest = float(np.min(_pair_crossing_depths(chi)))
    assert earliest <= shock <= 1.0102 * earliest

    fine = detect_crossing(chi, 1e5, rtol=1e-6)
    assert earliest <= fine <= (1 + 2e-6) * earliest


def test_reconstruct_at_entry():
    fields = pedestal_fields()
    for kappa_c in (1.0, 4.0):
        chi = build_characteristics(fields, MediumSpec(kappa_c=kappa_c))
        out, atoms = reconstruct(chi, 0.0)
        assert np.allclose(np.abs(out.g_p), np.abs(fields.g_p), rtol=1e-12, atol=1e-12)
        assert np.allclose(np.abs(out.g_c), np.abs(fields.g_c), rtol=1e-12, atol=1e-12)
        assert np.allclose(atoms.a1 ** 2 + atoms.a2 ** 2, 1.0)


def test_reconstruct_keeps_photon_flux():
    chi = build_characteristics(pedestal_fields(), MediumSpec(kappa_c=4.0))
    shock = detect_crossing(chi, 1e5)
    fields, _ = reconstruct(chi, 0.5 * shock)
    v = photon_invariant(fields, chi.medium)
    assert np.allclose(v, chi.V, rtol=0, atol=1e-12 * chi.V.max())


def test_reconstruct_delays_probe():
    fields = pedestal_fields()
    chi = build_characteristics(fields, MediumSpec())
    out, atoms = reconstruct(chi, 200.0)

    m_in = pulse_metrics(fields.g_p, fields.grid)
    m_out = pulse_metrics(out.g_p, out.grid)
    # Delay is zeta / V on the flat pedestal.
    assert math.isclose(m_out.centroid - m_in.centroid, 2.0, abs_tol=0.05)
    assert math.isclose(m_out.peak, m_in.peak, rel_tol=1e-2)
    assert out.zeta == 200.0
    assert np.all(np.abs(atoms.a3) < 0.1)


def test_reconstruct_past_crossing():
    chi, shock = _shock(4.0)
    with pytest.raises(MultivaluedError, match=r"have crossed") as excinfo:
        reconstruct(chi, 1.01 * shock)
    assert excinfo.value.zeta == 1.01 * shock
    assert excinfo.value.tau > 0


def test_reconstruct_checks():
    chi = build_characteristics(pedestal_fields(), MediumSpec())
    with pytest.raises(ValueError, match=r"zeta must be >= 0"):
        reconstruct(chi, -1.0)
    with pytest.raises(ValueError, match=r"grid the characteristics were built on"):
        reconstruct(chi, 1.0, TauGrid(-12.0, 12.0, 129))


def test_bright_estimate():
    grid = small_grid()
    zero = np.zeros(grid.n_tau)
    assert np.all(_bright_estimate(zero, zero, grid) == 0.0)

    one = np.ones(grid.n_tau)
    assert np.allclose(_bright_estimate(zero, 2.0 * one, grid), 0.0)

    # A lone coupling pulse leaves the atoms dark however fast it changes.
    coupling = np.exp(-grid.tau ** 2)
    assert np.all(_bright_estimate(zero, coupling, grid) == 0.0)

    # |g| = 2 with the mixing angle turning at 0.1 per unit time.
    fine = TauGrid(-5.0, 5.0, 2001)
    phi = 0.1 * fine.tau
    a3 = _bright_estimate(2.0 * np.sin(phi), 2.0 * np.cos(phi), fine)
    assert np.allclose(a3[1:-1], 0.05, rtol=1e-4)


def test_solve():
    fields = pedestal_fields()
    medium = MediumSpec()
    result = solve(fields, medium, ZetaGrid(200.0, 10, 5))

    assert result.valid
    assert result.solver == "adiabatic"
    assert result.shock_depth is None
    assert result.zetas == [0.0, 100.0, 200.0]
    for snap in result.snapshots:
        assert snap.diagnostics["conservation_residual"] <= 1e-12
    assert result.manifest["solver"] == "adiabatic"


def test_solve_stops_before_crossing():
    fields = pedestal_fields()
    chi, shock = _shock(4.0)
    result = solve(fields, MediumSpec(kappa_c=4.0), ZetaGrid(2.0 * shock, 20, 1))

    assert result.shock_depth == pytest.approx(shock, rel=0.02)
    assert result.valid
    assert len(result.snapshots) < 21
    assert max(result.zetas) < result.shock_depth


def test_solve_checks_window():
    with pytest.raises(WindowTooSmall):
        solve(gaussian_fields(coupling_width=6.0), MediumSpec(), ZetaGrid(1.0, 2))


def _sharpen_trailing():
    s = get_scenario("sharpen_trailing")
    chi = build_characteristics(s.input_fields(), s.medium)
    return chi, detect_crossing(chi, 1e5)


def test_trace_back_past_crossing():
    chi, shock = _sharpen_trailing()
    taus = chi.grid.tau[::4]

    for tau in taus:
        trace_back(float(tau), 0.5 * shock, chi)

    crossed = []
    for tau in taus:
        try:
            trace_back(float(tau), 1.5 * shock, chi)
        except MultivaluedError as err:
            assert err.zeta == 1.5 * shock
            crossed.append(err.tau)
    assert crossed
    assert trace_back(chi.grid.tau_min, 1.5 * shock, chi) == chi.grid.tau_min


def test_mixing_angle_rides_characteristics():
    chi, shock = _sharpen_trailing()
    zeta = 0.5 * shock
    fields, _ = reconstruct(chi, zeta)
    theta = mixing_angle(fields)

    for tau0 in np.linspace(-3.0, 3.0, 25):
        tau = characteristic_tau(tau0, zeta, chi)
        want = np.interp(tau0, chi.grid.tau, chi.theta0)
        assert abs(np.interp(tau, chi.grid.tau, theta) - want) <= 1e-3, tau0
