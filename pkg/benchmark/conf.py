"""
Option resolution for the management commands.

Precedence, highest first:
- CLI flags given on the command line
- the --config file (flat ``key=value`` lines, keys are lowercase flag names)
- the IEC_* settings (environment / .env)
"""
import logging
from pathlib import Path

from django.conf import settings
from dotenv import dotenv_values

from benchmark.exceptions import InvalidConfig, MissingFile
from benchmark.forms import BenchmarkOptionsForm

logger = logging.getLogger(__name__)

# Option name -> setting holding its default
SETTING_DEFAULTS = {
    "black_level": "IEC_BLACK_LEVEL",
    "saturation_level": "IEC_SATURATION_LEVEL",
    "saturation_fraction": "IEC_SATURATION_FRACTION",
    "minkowski_p": "IEC_MINKOWSKI_P",
    "derivative_sigma": "IEC_DERIVATIVE_SIGMA",
    "epsilon_floor": "IEC_EPSILON_FLOOR",
    "face_angle_threshold": "IEC_FACE_ANGLE_THRESHOLD",
    "face_angle_metric": "IEC_FACE_ANGLE_METRIC",
    "threads": "IEC_THREADS",
}

# Flag spellings that differ from the option name
ALIASES = {
    "sigma": "derivative_sigma",
}


def _option_name(key):
    name = key.strip().lower().lstrip("-").replace("-", "_")
    return ALIASES.get(name, name)


def read_config_file(path):
    """
    Parse a --config file into option names and raw string values.

    Unknown keys are rejected so a typo cannot silently fall back to a default.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"Config file {path} does not exist.")

    values = {}
    for key, value in dotenv_values(path).items():
        name = _option_name(key)
        if name not in SETTING_DEFAULTS:
            raise InvalidConfig(f"{path}: unknown option {key!r}.")
        if value is None or value == "":
            raise InvalidConfig(f"{path}: option {key!r} has no value.")
        values[name] = value
    return values


def resolve_options(cli_options, config_path=None):
    """
    Merge settings, the config file and CLI flags and validate the result.

    ``cli_options`` maps option names to flag values; None means "not given".
    Returns the cleaned values for every known option.
    """
    merged = {name: getattr(settings, setting) for name, setting in SETTING_DEFAULTS.items()}

    if config_path:
        file_values = read_config_file(config_path)
        logger.debug("Options from %s: %s", config_path, sorted(file_values))
        merged.update(file_values)

    merged.update(
        {
            _option_name(key): value
            for key, value in cli_options.items()
            if value is not None and _option_name(key) in SETTING_DEFAULTS
        }
    )

    form = BenchmarkOptionsForm(data=merged)
    if not form.is_valid():
        raise InvalidConfig(form.first_error())
    return form.cleaned_data
