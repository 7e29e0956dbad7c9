import numpy as np
import pytest

from pyadiabaton.direct import SolverConfig, evolve_atoms, field_rhs, propagate, step_zeta
from pyadiabaton.errors import Blowup, NonUnitary, WindowTooSmall
from pyadiabaton.grid import TauGrid, ZetaGrid
from pyadiabaton.medium import MediumSpec
from pyadiabaton.pulse import pulse_energy
from pyadiabaton.state import AtomState, FieldState

from .test_helper import energies_of, gaussian_fields, short_scenario, zero_probe_fields


def test_solver_config_defaults():
    config = SolverConfig()
    assert config.atom_substeps == 4
    assert config.unitarity_tol == 1e-6
    assert config.max_field == 1e6
    assert config.edge_tol == 1e-6
    assert config.as_dict()["max_phase_step"] == 0.02
    assert SolverConfig(atom_substeps=8) != config
    assert SolverConfig(atom_substeps=4.0) == config


def test_solver_config_checks():
    with pytest.raises(TypeError, match=r"unknown solver options: \['substeps'\]"):
        SolverConfig(substeps=3)
    with pytest.raises(ValueError, match=r"atom_substeps must be an integer >= 1"):
        SolverConfig(atom_substeps=0)
    with pytest.raises(ValueError, match=r"unitarity_tol must be > 0"):
        SolverConfig(unitarity_tol=0.0)
    with pytest.raises(AttributeError):
        SolverConfig().tolerance  # pylint: disable=expression-not-assigned


def test_solver_config_substeps():
    config = SolverConfig(max_phase_step=0.5)
    assert config.substeps(0.25, 4.0) == 4
    assert config.substeps(0.25, 30.0) == 15


def test_evolve_atoms_constant_probe():
    # A constant probe alone Rabi-flops |1> <-> |3>: a1 = cos(tau), a3 = i sin(tau).
    grid = TauGrid(0.0, 2.0, 201)
    fields = FieldState(grid=grid, g_p=np.ones(grid.n_tau), g_c=np.zeros(grid.n_tau))
    atoms = evolve_atoms(fields)

    assert np.allclose(atoms.a1, np.cos(grid.tau), atol=1e-10)
    assert np.allclose(atoms.a3, 1j * np.sin(grid.tau), atol=1e-10)
    assert np.all(atoms.a2 == 0.0)


def test_evolve_atoms_is_unitary():
    fields = gaussian_fields(probe=8.0, coupling=8.0)
    atoms = evolve_atoms(fields)
    assert atoms.unitarity_residual <= 1e-6
    assert atoms.a1[0] == 1.0
    # Dark-state following: the atoms end up back in |1>.
    assert abs(atoms.a1[-1]) > 0.95


def test_evolve_atoms_without_probe_stays_in_ground_state():
    atoms = evolve_atoms(zero_probe_fields())
    assert np.all(atoms.a1 == 1.0)
    assert np.all(atoms.a2 == 0.0)
    assert np.all(atoms.a3 == 0.0)


def test_evolve_atoms_relabeling():
    fields = gaussian_fields(probe=4.0, coupling=6.0, probe_width=2.0)
    atoms = evolve_atoms(fields)
    swapped = evolve_atoms(fields.swapped(), initial=[0.0, 1.0, 0.0])

    expected = atoms.swapped()
    for name in ("a1", "a2", "a3"):
        assert np.allclose(getattr(swapped, name), getattr(expected, name),
                           rtol=0, atol=1e-12)


def test_evolve_atoms_non_unitary():
    config = SolverConfig(unitarity_tol=1e-30)
    with pytest.raises(NonUnitary, match=r"refine the tau grid") as excinfo:
        evolve_atoms(gaussian_fields(), config)
    assert excinfo.value.residual > 0


def test_field_rhs():
    atoms = AtomState(a1=[1.0], a2=[0.5j], a3=[0.2])
    d_p, d_c = field_rhs(atoms, MediumSpec(kappa_c=4.0))
    assert np.allclose(d_p, [0.2j])
    assert np.allclose(d_c, [4.0 * 1j * (-0.5j) * 0.2])


def test_step_zeta_without_probe():
    fields = zero_probe_fields()
    out = step_zeta(fields, 0.5, MediumSpec())
    assert out.zeta == 0.5
    assert np.array_equal(out.g_p, fields.g_p)
    assert np.array_equal(out.g_c, fields.g_c)


def test_step_zeta_energy_change_is_small():
    # With equal K the first-order exchange vanishes; what is left is step error.
    fields = gaussian_fields()
    before = pulse_energy(fields.g_p, fields.grid)
    for dzeta in (0.05, 0.5):
        out = step_zeta(fields, dzeta, MediumSpec())
        after = pulse_energy(out.g_p, out.grid)
        assert abs(after - before) <= 1e-2 * dzeta * before


def test_step_zeta_checks_dzeta():
    for dzeta in (0.0, -1.0):
        with pytest.raises(ValueError, match=r"dzeta must be > 0"):
            step_zeta(gaussian_fields(), dzeta, MediumSpec())


def test_propagate():
    s = short_scenario()
    result = propagate(s.input_fields(), s.medium, s.zeta_grid)

    assert result.valid
    assert result.error is None
    assert result.solver == "direct"
    assert result.zetas == [0.0, 1.0, 2.0, 3.0, 4.0]
    for snap in result.snapshots:
        assert snap.diagnostics["unitarity_residual"] <= 1e-6
        assert snap.atoms.unitarity_residual <= 1e-6

    total = [p + c for p, c in zip(energies_of(result, "g_p"), energies_of(result, "g_c"))]
    assert np.allclose(total, total[0], rtol=2e-2)

    assert result.manifest["solver"] == "direct"
    assert result.manifest["zeta_grid"] == s.zeta_grid.as_dict()
    assert "context" in result.manifest


def test_propagate_timing():
    s = short_scenario(n_zeta=4, zeta_max=1.0, snapshot_stride=4)
    result = propagate(s.input_fields(), s.medium, s.zeta_grid)

    steps = result.timing["steps"]
    assert steps["count"] == 4
    assert result.timing["wall_time_s"] > 0
    groups = steps["groups"]
    assert set(groups) == {"heun", "atoms", "field_rhs", "diagnostics"}
    for name in ("heun", "atoms", "field_rhs"):
        assert groups[name]["count"] == 4, name
    # The entry snapshot is taken before the first step is timed.
    assert groups["diagnostics"]["count"] == 1
    for stat in groups.values():
        assert stat["sum"] <= steps["sum"]


def test_propagate_without_probe():
    s = short_scenario(probe=0.0)
    result = propagate(s.input_fields(), s.medium, s.zeta_grid)
    assert result.valid
    for snap in result.snapshots:
        assert np.array_equal(snap.fields.g_c, result.input_fields.g_c)
        assert snap.diagnostics["conservation_residual"] == 0.0


def test_propagate_checks_window():
    fields = gaussian_fields(coupling_width=6.0)
    with pytest.raises(WindowTooSmall, match=r"widen the tau window"):
        propagate(fields, MediumSpec(), ZetaGrid(1.0, 2))


def test_propagate_keeps_snapshots_on_failure(caplog):
    s = short_scenario()
    result = propagate(s.input_fields(), s.medium, s.zeta_grid,
                       SolverConfig(max_field=1.0))

    assert not result.valid
    assert isinstance(result.error, Blowup)
    assert result.zetas == [0.0]
    assert "propagate aborted at step 0 of 16" in caplog.text


def test_propagate_non_unitary_is_reported():
    s = short_scenario()
    result = propagate(s.input_fields(), s.medium, s.zeta_grid,
                       SolverConfig(unitarity_tol=1e-30))
    assert not result.valid
    assert isinstance(result.error, NonUnitary)
    assert result.snapshots == []
    assert result.error_info()["code"] == "NON_UNITARY"
