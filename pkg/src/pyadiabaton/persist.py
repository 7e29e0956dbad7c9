"""
Text persistence of runs.

A run directory holds one CSV per snapshot, metrics.json, timing.json and
manifest.json. Every file except timing.json is hashed into the manifest,
so two runs of one config on one platform give byte-identical manifests.
"""
import collections
import hashlib
import io
import json
import os
import tempfile

import numpy as np

from . import errors
from .constant import (
    ERROR_FILE, MANIFEST_FILE, METRICS_FILE, SNAPSHOT_FORMAT, TIMING_FILE,
)
from .diagnostics import build_report
from .errors import DegeneratePulse, IoError
from .grid import TauGrid, ZetaGrid
from .medium import MediumSpec
from .plots import plot_scripts
from .pulse import pulse_metrics
from .quantities import mixing_angle, photon_invariant
from .shaping import compression_report, energies
from .state import AtomState, FieldState, SimulationResult, Snapshot
from .utils import logger

MANIFEST_VERSION = 1

SNAPSHOT_COLUMNS = (
    "tau", "re_g_p", "im_g_p", "re_g_c", "im_g_c",
    "re_a1", "im_a1", "re_a2", "im_a2", "re_a3", "im_a3",
    "theta", "V", "abs_rho21",
)


def _set_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, tuple)):
        return list(obj)
    if isinstance(obj, collections.UserDict):
        return obj.data
    return str(obj)


def jsonify(obj):
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, default=_set_default, sort_keys=True, indent=2) + "\n"


def _atomic_write(path, text):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(text):
    return hashlib.sha256(text.encode("utf8")).hexdigest()


def snapshot_table(snapshot, medium):
    """The snapshot as CSV text, 17 significant digits per value."""
    fields = snapshot.fields
    atoms = snapshot.atoms
    cols = [fields.grid.tau]
    for z in (fields.g_p, fields.g_c, atoms.a1, atoms.a2, atoms.a3):
        cols.extend((z.real, z.imag))
    cols.extend((mixing_angle(fields), photon_invariant(fields, medium),
                 np.abs(atoms.rho21)))

    buf = io.StringIO()
    np.savetxt(buf, np.column_stack(cols), fmt="%.17g", delimiter=",",
               header=",".join(SNAPSHOT_COLUMNS), comments="")
    return buf.getvalue()


def _metrics_or_none(amplitude, grid):
    try:
        return pulse_metrics(amplitude, grid).as_dict()
    except DegeneratePulse:
        return None


def metrics_document(result, chi=None):
    """Pulse metrics per snapshot plus the run's diagnostics report."""
    grid = result.tau_grid
    snaps = []
    for snap in result.snapshots:
        snaps.append(dict(
            zeta=snap.zeta,
            probe=_metrics_or_none(snap.fields.g_p, grid),
            coupling=_metrics_or_none(snap.fields.g_c, grid),
            energies=energies(snap.fields, result.medium, grid),
            diagnostics=dict(snap.diagnostics),
        ))

    doc = dict(solver=result.solver, valid=result.valid, error=result.error_info(),
               shock_depth=result.shock_depth, snapshots=snaps)
    if result.snapshots:
        doc["report"] = build_report(result, chi).as_dict()
        try:
            doc["compression"] = compression_report(result).as_dict()
        except DegeneratePulse:
            doc["compression"] = None
    return doc


def persist_result(result, directory, *, config=None, emit_plots=False, chi=None):
    """
    Writes result under directory and returns the manifest path.
    :param config: plain-data config echo stored in the manifest.
    :param chi: characteristics to cross-validate against, optional.
    """
    try:
        os.makedirs(directory, exist_ok=True)
        return _persist(result, directory, config, emit_plots, chi)
    except OSError as err:
        raise IoError(f"cannot write results to {directory}: {err}") from err


def _persist(result, directory, config, emit_plots, chi):
    texts = {}
    snapshot_index = []
    for i, snap in enumerate(result.snapshots):
        name = SNAPSHOT_FORMAT.format(i)
        texts[name] = snapshot_table(snap, result.medium)
        snapshot_index.append(dict(file=name, zeta=snap.zeta))

    texts[METRICS_FILE] = jsonify(metrics_document(result, chi))
    if emit_plots and snapshot_index:
        texts.update(plot_scripts([s["file"] for s in snapshot_index],
                                  [s["zeta"] for s in snapshot_index],
                                  result.tau_grid))

    for name, text in texts.items():
        _atomic_write(os.path.join(directory, name), text)
    _atomic_write(os.path.join(directory, TIMING_FILE), jsonify(result.timing))

    manifest = dict(
        version=MANIFEST_VERSION,
        config=config,
        run=result.manifest,
        snapshots=snapshot_index,
        files=[dict(name=name, sha256=_sha256(text))
               for name, text in sorted(texts.items())],
        result=dict(valid=result.valid, error=result.error_info(),
                    shock_depth=result.shock_depth),
    )
    path = os.path.join(directory, MANIFEST_FILE)
    _atomic_write(path, jsonify(manifest))
    logger.info("wrote %d files to %s", len(texts) + 2, directory)
    return path


def write_text(directory, name, text):
    """Atomically writes one extra document next to a run."""
    path = os.path.join(directory, name)
    try:
        os.makedirs(directory, exist_ok=True)
        _atomic_write(path, text)
    except OSError as err:
        raise IoError(f"cannot write {path}: {err}") from err
    return path


def write_json(directory, name, obj):
    return write_text(directory, name, jsonify(obj))


def write_error(directory, record):
    return write_json(directory, ERROR_FILE, record)


def _read(path):
    try:
        with open(path, "r", encoding="utf8") as f:
            return f.read()
    except OSError as err:
        raise IoError(f"cannot read {path}: {err}") from err


def load_result(directory):
    """Rebuilds the SimulationResult persisted in directory."""
    manifest = json.loads(_read(os.path.join(directory, MANIFEST_FILE)))
    metrics = json.loads(_read(os.path.join(directory, METRICS_FILE)))
    run = manifest["run"]

    tau_grid = TauGrid(**run["tau_grid"])
    zeta_grid = ZetaGrid(**run["zeta_grid"])
    medium = MediumSpec(**run["medium"])
    info = manifest["result"]
    result = SimulationResult(
        tau_grid=tau_grid,
        zeta_grid=zeta_grid,
        medium=medium,
        manifest=run,
        solver=run.get("solver", "direct"),
        valid=info["valid"],
        error=errors.from_info(info["error"]),
        shock_depth=info["shock_depth"],
    )

    diagnostics = {m["zeta"]: m["diagnostics"] for m in metrics["snapshots"]}
    for entry in manifest["snapshots"]:
        table = np.loadtxt(io.StringIO(_read(os.path.join(directory, entry["file"]))),
                           delimiter=",", skiprows=1, ndmin=2)
        if table.shape != (tau_grid.n_tau, len(SNAPSHOT_COLUMNS)):
            raise IoError(f"{entry['file']} has shape {table.shape}")
        zeta = entry["zeta"]
        fields = FieldState(grid=tau_grid, g_p=table[:, 1] + 1j * table[:, 2],
                            g_c=table[:, 3] + 1j * table[:, 4], zeta=zeta)
        atoms = AtomState(a1=table[:, 5] + 1j * table[:, 6],
                          a2=table[:, 7] + 1j * table[:, 8],
                          a3=table[:, 9] + 1j * table[:, 10])
        result.append(Snapshot(fields=fields, atoms=atoms,
                               diagnostics=diagnostics.get(zeta, {})))

    try:
        result.timing = json.loads(_read(os.path.join(directory, TIMING_FILE)))
    except IoError:
        logger.warning("no timing summary in %s", directory)
    return result
