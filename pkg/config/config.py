"""
Configuration file for the digraph kernel toolkit
"""

import os
from pathlib import Path

# Project paths
PROJECT_ROOT = Path(__file__).parent.parent
DATA_DIR = PROJECT_ROOT / "data"
LOG_DIR = PROJECT_ROOT / "logs"

# Ensure directories exist
LOG_DIR.mkdir(exist_ok=True)

# ========== NUMERIC CONFIGURATION ==========
NUMERIC_CONFIG = {
    'mode': None,  # 'rational', 'float' or None (rational up to rational_max_vertices)
    'rational_max_vertices': 512,
    'residual_tol': 1e-10,  # L gamma = 0, gamma_bar S = gamma_bar in float mode
    'heat_tol': 1e-13,  # Heat-kernel truncation bound at t = 1
    'spectrum_tol': 1e-9,
}

# DGK_MODE overrides the default arithmetic; command-line flags still win
_env_mode = os.environ.get('DGK_MODE', '').strip().lower()
if _env_mode in ('rational', 'float'):
    NUMERIC_CONFIG['mode'] = _env_mode

# ========== RANKING CONFIGURATION ==========
RANK_CONFIG = {
    'beta': '0.85',  # Damping; parsed as an exact rational
    'tol': 1e-10,  # l1 change that stops power iteration
    'max_iter': 1000,
    'teleport': 'none',  # 'none' or 'uniform'
}

# ========== SIMULATION CONFIGURATION ==========
SIMULATION_CONFIG = {
    'steps': 50,  # Discrete steps when --steps is not given
    'time': 10.0,  # Final time for continuous runs
    'samples': 11,  # Sampled times in [0, time]
    'heat_tol': 1e-10,  # Truncation bound per sampled time
    'seed': 0,  # Absorption walks (--absorb-from)
    'walks': 10000,
    'max_walk_steps': 10000,
}

# ========== APPENDIX CHECK CONFIGURATION ==========
APPENDIX_CONFIG = {
    'eps': 1e-12,  # Positivity threshold for the pattern of e^{-L}
    'kernel_tol': 1e-8,  # ||Pi - Pi~|| bound
}

# ========== OUTPUT CONFIGURATION ==========
OUTPUT_CONFIG = {
    'json_indent': 2,
    'format': 'json',  # 'json' or 'csv' (csv only for simulate)
}

# ========== LOGGING CONFIGURATION ==========
LOGGING_CONFIG = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'standard': {
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        },
        'detailed': {
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'level': 'INFO',
            'formatter': 'standard',
            'stream': 'ext://sys.stderr',  # stdout carries JSON/CSV only
        },
        'file': {
            'class': 'logging.FileHandler',
            'level': 'DEBUG',
            'formatter': 'detailed',
            'filename': str(LOG_DIR / 'dgk.log'),
        },
    },
    'loggers': {
        '': {
            'level': 'INFO',
            'handlers': ['console', 'file'],
            'propagate': False,
        },
    },
}
