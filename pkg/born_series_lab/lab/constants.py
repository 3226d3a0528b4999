REPORT_COLUMNS = ["example", "algorithm", "n", "m", "l", "l2_error", "log10_error", "wall_seconds"]

DEFAULT_CACHE_DIR = ".born_lab_cache"
CACHE_DIR_ENV = "BORN_LAB_CACHE_DIR"
WORKERS_ENV = "BORN_LAB_WORKERS"

TIER_GRID_SIZES = {
    "quick": [32],
    "full": [32, 64],
    "paper": [32, 64, 128],
}

RECOVERY_META_SUFFIX = ".meta.json"
