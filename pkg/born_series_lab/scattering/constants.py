DEFAULT_HALF_WIDTH = 2.1
MIN_GRID_POINTS = 8

DEFAULT_TRUNCATION_RADIUS = 2.1
RESONANCE_RTOL = 1e-6
SYMBOL_CACHE_RTOL = 1e-12
SYMBOL_CACHE_BYTES = 512 * 1024 * 1024

DEFAULT_CUTOFF_INNER = 1.45
DEFAULT_CUTOFF_OUTER = 2.0

DEFAULT_SOLVER_TOL = 1e-8
GMRES_RESTART = 50
GMRES_MAX_ITERATIONS = 200

DEFAULT_FINE_FACTOR = 2
DEGENERATE_CELL_FRACTION = 0.5  # of one frequency cell pi/L
RECORD_RTOL = 1e-9
DEFAULT_THETA0 = (0.0, 1.0)

FIELD_CSV_COLUMNS = ["i", "j", "x1", "x2", "re", "im"]
DATASET_CSV_COLUMNS = ["i", "j", "xi1", "xi2", "k", "theta1", "theta2", "sign", "uinf_re", "uinf_im"]
CSV_FLOAT_FORMAT = "%.17g"
MANIFEST_SUFFIX = ".manifest.json"
