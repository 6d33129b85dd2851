TOL_STRUCT = 1e-10
TOL_CHECK = 1e-9
KERNEL_EPS = 1e-8
FAT_EPS = 1e-6

FD_STEP = 1e-5
FD_CURVATURE_STEP = 1e-4
FD_MIN_STEP = 1e-9

HORIZON = 10.0
GRID_SIZE = 64
N_SAMPLES = 10
N_DIRECTIONS = 20
N_DEFORMATIONS = 10
DEFAULT_SEED = 0

REFINE_STEPS = 200
REFINE_STEP_SIZE = 1e-2

REPORT_VERSION = "v1"

CHECK_ORDER = [
    "validate",
    "tensors",
    "wnn",
    "invariance",
    "fat",
    "flatgeo",
    "gronwall",
    "eqK",
    "dualrel",
    "bounded",
    "obstruction",
]
ORACLE_CHECK = "oracles"

DUAL_TIMES = [0.1, 1.0, 5.0, 10.0]
DEFECTIVE_COND = 1e8
ORACLE_TOL = 1e-4
N_ORACLE_SAMPLES = 50

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_CONFIG = 3
