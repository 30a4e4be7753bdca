from pathlib import Path

from django.utils.text import slugify

# Separator between team and algorithm in submission file names
SUBMISSION_SEPARATOR = "__"


def record_paths(directory, record_id):
    """
    Build the three file paths that make up one dataset record.

    Resulting path pattern:
    <directory>/<id>.png  - 16-bit linear raster used for estimation
    <directory>/<id>.json - ground truths, labels and capture metadata
    <directory>/<id>.jpg  - preview (optional, never read)
    """
    directory = Path(directory)
    return {
        "png": directory / f"{record_id}.png",
        "json": directory / f"{record_id}.json",
        "jpg": directory / f"{record_id}.jpg",
    }


def list_record_ids(directory):
    """
    Return the ids of every record in a flat dataset directory, sorted.

    A record is identified by its JSON sidecar; previews alone do not count.
    """
    return sorted(path.stem for path in Path(directory).glob("*.json"))


def manifest_path(out_dir, track):
    """
    Build the manifest path for a track.

    Example:
    manifests/general.json
    """
    return Path(out_dir) / f"{track}.json"


def submission_filename(team, algorithm):
    """
    Build the submission file name for a team and algorithm.

    Both parts are slugified so they are filesystem-safe; the team and
    algorithm are recovered from the stem by ``parse_submission_name``.

    Example:
    baseline__gray-world.csv
    """
    team_part = slugify(team) or "team"
    algorithm_part = slugify(algorithm) or "algorithm"
    return f"{team_part}{SUBMISSION_SEPARATOR}{algorithm_part}.csv"


def parse_submission_name(path):
    """
    Recover (team, algorithm) from a submission file name.

    - "<team>__<algorithm>.csv" -> (team, algorithm)
    - any other stem is used for both
    """
    stem = Path(path).stem
    if SUBMISSION_SEPARATOR in stem:
        team, algorithm = stem.split(SUBMISSION_SEPARATOR, 1)
        if team and algorithm:
            return team, algorithm
    return stem, stem


def plot_data_paths(out_dir, rank, team, algorithm):
    """
    Build the per-row plot data file paths written by the report command.

    The rank prefix keeps rows of the same team and algorithm apart.

    Example:
    plots/03-baseline__gray-world.cdf.csv
    """
    stem = f"{rank:02d}-" + Path(submission_filename(team, algorithm)).stem
    out_dir = Path(out_dir)
    return {
        "errors": out_dir / f"{stem}.errors.csv",
        "cdf": out_dir / f"{stem}.cdf.csv",
    }
