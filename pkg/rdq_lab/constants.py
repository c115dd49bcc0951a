"""Shared constants for RDQ Lab."""

APP_NAME = "RDQ Lab"
APP_VERSION = "0.1.0"

# Logging defaults
LOG_DIR = "logs"
DEFAULT_LOG_LEVEL = "INFO"

# Output defaults
DEFAULT_OUT_DIR = "runs"

# Domains
FROZENLAKE = "frozenlake"
CROSSROAD = "crossroad"
DOMAINS = (FROZENLAKE, CROSSROAD)

# Episode truncation
DEFAULT_MAX_STEPS = 200

# FrozenLake geometry (standard 4x4, non-slippery)
FROZENLAKE_ROWS = 4
FROZENLAKE_COLS = 4
FROZENLAKE_START = (0, 0)
FROZENLAKE_GOAL = (3, 3)
FROZENLAKE_HOLES = ((1, 1), (1, 3), (2, 3), (3, 0))

# FrozenLake rewards
FROZENLAKE_GOAL_REWARD = 1.0
FROZENLAKE_STEP_REWARD = 0.0
FROZENLAKE_DEATH_REWARD = -1.0

# Crossroad geometry: row 0 is the goal, rows 2..8 are lanes, row 10 is the start
CROSSROAD_ROWS = 11
CROSSROAD_COLS = 15
CROSSROAD_GOAL_ROW = 0
CROSSROAD_LANES = (2, 3, 4, 5, 6, 7, 8)
CROSSROAD_START = (10, 7)
CROSSROAD_BASELINE_SPEEDS = (1, -1, 2, -2, 1, -1, 2)
CROSSROAD_BASELINE_COLUMNS = (0, 14, 3, 11, 6, 9, 12)
CROSSROAD_MAX_SPEED = 3

# Crossroad rewards
CROSSROAD_GOAL_REWARD = 1.0
CROSSROAD_DEATH_REWARD = -1.0
CROSSROAD_STEP_REWARD = -0.01

# Per-domain defaults for settings the config leaves unset (None)
DOMAIN_DEFAULTS = {
    FROZENLAKE: {
        "novelty_threshold": 0.5,
        "recovery_threshold": 1.0,
    },
    CROSSROAD: {
        "novelty_threshold": 0.0,
        "recovery_threshold": 0.8,
    },
}

# Checkpoint archive format
CHECKPOINT_FORMAT_VERSION = 1

# Rule file
RULE_FILE_HEADER = "# RDQ Lab rule file"
