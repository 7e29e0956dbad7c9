from pyadiabaton.plots import (
    PROFILES_SCRIPT, SPACETIME_SCRIPT, plot_scripts, profiles_script, spacetime_script,
)

from .test_helper import small_grid

FILES = ["snapshot_00000.csv", "snapshot_00001.csv", "snapshot_00002.csv"]
ZETAS = [0.0, 0.5, 1]


def test_spacetime_script():
    text = spacetime_script(FILES, ZETAS)
    assert 'files = "snapshot_00000.csv snapshot_00001.csv snapshot_00002.csv"' in text
    assert 'zetas = "0.0 0.5 1.0"' in text
    assert text.count("splot for [i=1:n]") == 3
    assert 'set title "|rho21|"' in text
    assert "using 1:(word(zetas, i)+0):14" in text
    assert text.endswith("unset multiplot\n")


def test_profiles_script():
    text = profiles_script(FILES, ZETAS, small_grid())
    assert "set xrange [-12.0:12.0]" in text
    assert 'for [i in "1 2 3"]' in text
    assert "(sqrt($2**2 + $3**2))" in text
    assert "(sqrt($4**2 + $5**2))" in text


def test_profiles_of_one_snapshot():
    text = profiles_script(FILES[:1], ZETAS[:1], small_grid())
    assert 'for [i in "1 1 1"]' in text


def test_plot_scripts():
    scripts = plot_scripts(FILES, ZETAS, small_grid())
    assert set(scripts) == {SPACETIME_SCRIPT, PROFILES_SCRIPT}
    assert scripts[SPACETIME_SCRIPT] == spacetime_script(FILES, ZETAS)
