"""gnuplot scripts that redraw a persisted run from its snapshot files."""

SPACETIME_SCRIPT = "spacetime.gp"
PROFILES_SCRIPT = "profiles.gp"

# 1-based columns of the snapshot files.
_PROBE = "(sqrt($2**2 + $3**2))"
_COUPLING = "(sqrt($4**2 + $5**2))"
_RHO21 = "14"

_HEADER = """\
set datafile separator ","
set key autotitle columnhead
files = "{files}"
zetas = "{zetas}"
n = words(files)
"""

_SPACETIME = """\
set terminal pngcairo size 1500,450
set output "spacetime.png"
set view map
set xlabel "tau"
set ylabel "zeta"
set multiplot layout 1,3
{panels}unset multiplot
"""

_PANEL = """\
set title "{title}"
splot for [i=1:n] word(files, i) using 1:(word(zetas, i)+0):{column} \\
    with lines palette notitle
"""

_PROFILES = """\
set terminal pngcairo size 1000,450
set output "profiles.png"
set xlabel "tau"
set ylabel "amplitude"
set xrange [{tau_min}:{tau_max}]
set multiplot layout 1,2
set title "probe"
plot for [i in "1 {mid} {last}"] word(files, i+0) using 1:{probe} with lines \\
    title sprintf("zeta=%s", word(zetas, i+0))
set title "coupling"
plot for [i in "1 {mid} {last}"] word(files, i+0) using 1:{coupling} with lines \\
    title sprintf("zeta=%s", word(zetas, i+0))
unset multiplot
"""


def spacetime_script(files, zetas):
    """|g_p|, |g_c| and |rho21| over the (tau, zeta) plane."""
    header = _HEADER.format(files=" ".join(files),
                            zetas=" ".join(repr(float(z)) for z in zetas))
    panels = "".join(
        _PANEL.format(title=title, column=column)
        for title, column in (("|g_p|", _PROBE), ("|g_c|", _COUPLING),
                              ("|rho21|", _RHO21))
    )
    return header + _SPACETIME.format(panels=panels)


def profiles_script(files, zetas, tau_grid):
    """Probe and coupling at the entry, the middle snapshot and the exit."""
    header = _HEADER.format(files=" ".join(files),
                            zetas=" ".join(repr(float(z)) for z in zetas))
    n = len(files)
    return header + _PROFILES.format(
        tau_min=tau_grid.tau_min, tau_max=tau_grid.tau_max,
        mid=(n + 1) // 2, last=n, probe=_PROBE, coupling=_COUPLING,
    )


def plot_scripts(files, zetas, tau_grid):
    """{script name: text} for every figure layout."""
    return {
        SPACETIME_SCRIPT: spacetime_script(files, zetas),
        PROFILES_SCRIPT: profiles_script(files, zetas, tau_grid),
    }
