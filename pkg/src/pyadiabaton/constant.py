# Package name
package_name = "pyadiabaton"

# Package version
version = "0.3.0"

# Config document schema version.
CONFIG_VERSION = 1

# Reference resolution for acceptance runs.
DEFAULT_TAU_MIN = -40.0
DEFAULT_TAU_MAX = 40.0
DEFAULT_N_TAU = 4096
DEFAULT_N_ZETA = 2000

MIN_N_TAU = 16

# Below this |g| a point counts as field-free.
QUIESCENT_FIELD = 1e-9

# |rho21| above this marks an excited cell of the coherence map.
COHERENCE_THRESHOLD = 0.01

# Feasibility margin under which designs are not forward-verified.
MARGIN_THRESHOLD = 0.1

SNAPSHOT_FORMAT = "snapshot_{:05d}.csv"
MANIFEST_FILE = "manifest.json"
METRICS_FILE = "metrics.json"
TIMING_FILE = "timing.json"
ERROR_FILE = "error.json"
