"""
Django settings for the iec-bench project.

The project has no web surface: Django hosts the benchmark app, its
management commands (the batch CLI), the text-report templates and the
test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import os
import sys
from pathlib import Path
from dotenv import load_dotenv
from django.core.exceptions import ImproperlyConfigured

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from the .env file located in BASE_DIR.
load_dotenv(BASE_DIR / ".env")


def _env_number(name, default, cast=float):
    """
    Read a numeric setting from the environment, or fail with ImproperlyConfigured.
    """
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ImproperlyConfigured(f"{name} must be a number, got {raw!r}.") from exc


# No sessions, signing or auth are used; the key only satisfies Django.
SECRET_KEY = os.environ.get("SECRET_KEY", "iec-bench-local-only")

DEBUG = os.environ.get("DEBUG", "False").lower() == "true"

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    # Local apps
    "benchmark.apps.BenchmarkConfig",
]

TEMPLATES = [
    {
        # Plain-text leaderboard tables are rendered from app templates
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [],
        },
    },
]

# Nothing is persisted in a database; leaderboards live in JSON/CSV files.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = "Europe/Berlin"

USE_I18N = False

USE_TZ = True


# --- Benchmark defaults ---
# Precedence at run time: CLI flags > --config file > these values.

# Sensor black level in raw counts, used when a sidecar does not declare one
IEC_BLACK_LEVEL = _env_number("IEC_BLACK_LEVEL", 2048, int)

# Sensor saturation level in raw counts, used when a sidecar does not declare one
IEC_SATURATION_LEVEL = _env_number("IEC_SATURATION_LEVEL", 65535, int)

# Pixels at or above this fraction of the saturation level count as clipped
IEC_SATURATION_FRACTION = _env_number("IEC_SATURATION_FRACTION", 0.95)

# Minkowski norm for Shades-of-Gray and Gray-Edge
IEC_MINKOWSKI_P = _env_number("IEC_MINKOWSKI_P", 6.0)

# Gaussian pre-smoothing for Gray-Edge, in pixels
IEC_DERIVATIVE_SIGMA = _env_number("IEC_DERIVATIVE_SIGMA", 2.0)

# Opt-in component floor (fraction of the largest component); 0 disables it
IEC_EPSILON_FLOOR = _env_number("IEC_EPSILON_FLOOR", 0.0)

# Face-angle rule separating single- and two-illuminant scenes, in degrees
IEC_FACE_ANGLE_THRESHOLD = _env_number("IEC_FACE_ANGLE_THRESHOLD", 2.0)

# Angle used for the face rule: "recovery" or "reproduction"
IEC_FACE_ANGLE_METRIC = os.environ.get("IEC_FACE_ANGLE_METRIC", "recovery")

# Worker threads for loading, estimation and scoring
IEC_THREADS = _env_number("IEC_THREADS", 1, int)

if not 0 < IEC_SATURATION_FRACTION <= 1:
    raise ImproperlyConfigured("IEC_SATURATION_FRACTION must be in (0, 1].")

if IEC_FACE_ANGLE_METRIC not in {"recovery", "reproduction"}:
    raise ImproperlyConfigured("IEC_FACE_ANGLE_METRIC must be 'recovery' or 'reproduction'.")

if IEC_THREADS < 1:
    raise ImproperlyConfigured("IEC_THREADS must be at least 1.")


# --- Logging ---
# Run logs go to stderr; stdout only carries command results.
# Under the test runner only errors are shown unless IEC_LOG_LEVEL says otherwise.
TESTING = sys.argv[1:2] == ["test"] or "pytest" in sys.modules

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "{levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "benchmark": {
            "handlers": ["console"],
            "level": os.environ.get("IEC_LOG_LEVEL", "ERROR" if TESTING else "INFO").upper(),
            "propagate": False,
        },
    },
}

