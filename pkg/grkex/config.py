#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Configuration utilities for grkex.

This module provides the default settings and loads a user JSON file on top
of them. Command-line flags override whatever is loaded here.
"""

import os
import copy
import json
import logging
from typing import Any, Dict, Optional, Tuple

# Initialize logger
logger = logging.getLogger("grkex.config")

DEFAULT_CONFIG = {
    "params": {
        "n": 7,
        "m": 5,
        "k": 3
    },
    "exponents": {
        # powers of ten
        "private_lo": 22,
        "private_hi": 28,
        "wide_lo": 44,
        "wide_hi": 55
    },
    "fast_exponents": {
        "private_lo": 4,
        "private_hi": 6,
        "wide_lo": 8,
        "wide_hi": 12
    },
    "experiments": {
        "exp1_trials": 500,
        "exp2_trials": 500,
        "exp3_trials": 30000,
        "p_threshold": 0.01,
        "qq_threshold": 0.25,
        "workers": 1,
        "batches": 1
    },
    "search": {
        "budget": 1000000,
        "wall_seconds": 600,
        "bsgs_entry_cap": 1048576
    },
    "bench": {
        "reps": 250,
        "exp_digits": 100
    },
    "logging": {
        "level": "info",
        "file": None
    }
}


def get_default_config_path() -> str:
    """
    Get the default path for the configuration file.

    Returns:
        str: Path to the default configuration file
    """
    if os.name == 'nt':  # Windows
        app_data = os.environ.get('APPDATA', os.path.expanduser('~'))
        config_dir = os.path.join(app_data, 'grkex')
    else:
        config_dir = os.path.expanduser('~/.config/grkex')
    return os.path.join(config_dir, 'config.json')


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from a file or use default configuration.

    Args:
        config_path (str, optional): Path to the configuration file

    Returns:
        Dict[str, Any]: Configuration dictionary
    """
    # If no config path specified, use default path
    if not config_path:
        config_path = get_default_config_path()

    config = copy.deepcopy(DEFAULT_CONFIG)

    try:
        if os.path.exists(config_path):
            with open(config_path, 'r', encoding='utf-8') as f:
                user_config = json.load(f)

            # Deep merge user config with default config
            for section, section_config in user_config.items():
                if section in config and isinstance(config[section], dict) and isinstance(section_config, dict):
                    config[section].update(section_config)
                else:
                    config[section] = section_config

            logger.debug(f"Configuration loaded from {config_path}")
        else:
            logger.debug("No configuration file found, using defaults")

    except Exception as e:
        logger.error(f"Error loading configuration from {config_path}: {e}")
        logger.info("Using default configuration")
        config = copy.deepcopy(DEFAULT_CONFIG)

    return config


def exponent_range(config: Dict[str, Any], fast: bool, which: str) -> Tuple[int, int]:
    """
    Inclusive exponent range (lo, hi) from the configuration.

    Args:
        config (Dict[str, Any]): Loaded configuration
        fast (bool): Use the shrunk ranges
        which (str): "private" for a and b, "wide" for c and the M^a experiment

    Returns:
        Tuple[int, int]: (10^lo, 10^hi)
    """
    section = config["fast_exponents" if fast else "exponents"]
    return 10 ** int(section[f"{which}_lo"]), 10 ** int(section[f"{which}_hi"])
