"""
Submission files, per-image scoring and ranked leaderboards.

Submission CSV (UTF-8, LF line endings):
- single-illuminant tracks: ``image_id,r,g,b``
- two-illuminant track:     ``image_id,r1,g1,b1,r2,g2,b2``

Estimates are normalized before scoring; the metrics are scale-invariant.
"""
import csv
import io
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace

from django.template.loader import render_to_string

from benchmark.color import RawEstimate, normalize, recovery_errors, reproduction_errors, two_illuminant_error
from benchmark.dataset import TrackId
from benchmark.exceptions import (
    ArityMismatch,
    ExtraImageId,
    MalformedLeaderboard,
    MalformedSubmission,
    MissingFile,
    MissingImageId,
    SubmissionLimitExceeded,
)
from benchmark.pool import ordered_map
from benchmark.stats import ErrorSample, ErrorSummary, summarize
from benchmark.utils import parse_submission_name

logger = logging.getLogger(__name__)

# --rank-by choices and the summary column each one selects
RANK_COLUMNS = {
    "worst25": "worst25_mean",
    "mean": "mean",
    "median": "median",
    "mean-squared": "mean_squared",
    "worst5": "worst5_mean",
    "worst1": "worst1_mean",
    "trimean": "trimean",
}

# Ranking column of each track when --rank-by is not given
DEFAULT_RANK_BY = {
    TrackId.GENERAL: "worst25",
    TrackId.INDOOR: "mean",
    TrackId.TWO: "mean-squared",
}

# Summary columns in leaderboard CSV / text output order
SUMMARY_COLUMNS = (
    "worst25_mean",
    "worst5_mean",
    "worst1_mean",
    "worst_re",
    "mean",
    "median",
    "trimean",
    "mean_squared",
)

# Missing ids listed in a coverage error before truncating
MAX_LISTED_IDS = 5


def submission_header(arity):
    if arity == 1:
        return ["image_id", "r", "g", "b"]
    return ["image_id", "r1", "g1", "b1", "r2", "g2", "b2"]


@dataclass(frozen=True)
class Submission:
    """
    Illuminant estimates of one team/algorithm for one track.

    estimates maps every image id to a tuple of one or two RawEstimates.
    """

    team: str
    algorithm: str
    track: TrackId
    estimates: dict

    def __post_init__(self):
        arity = TrackId(self.track).arity
        for image_id, estimates in self.estimates.items():
            if len(estimates) != arity:
                raise ArityMismatch(
                    f"{image_id}: {len(estimates)} estimates for the {self.track} track "
                    f"(expected {arity})."
                )


def read_submission(path, track, team=None, algorithm=None):
    """
    Read a submission CSV for a track.

    Team and algorithm default to the ``<team>__<algorithm>`` file stem.
    """
    track = TrackId(track)
    default_team, default_algorithm = parse_submission_name(path)
    expected = submission_header(track.arity)

    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except FileNotFoundError as exc:
        raise MissingFile(f"Submission {path} does not exist.") from exc
    except UnicodeDecodeError as exc:
        raise MalformedSubmission(f"{path} is not UTF-8 text.") from exc

    if not rows:
        raise MalformedSubmission(f"{path} is empty.")

    header = [cell.strip() for cell in rows[0]]
    if header != expected:
        other = submission_header(2 if track.arity == 1 else 1)
        if header == other:
            raise ArityMismatch(
                f"{path} has {len(other) - 1} components per row; the {track} track needs "
                f"{len(expected) - 1}."
            )
        raise MalformedSubmission(f"{path}: header must be {','.join(expected)}.")

    estimates = {}
    for line_number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(expected):
            raise MalformedSubmission(f"{path}:{line_number}: expected {len(expected)} columns.")

        image_id = row[0].strip()
        if image_id in estimates:
            raise MalformedSubmission(f"{path}:{line_number}: {image_id} appears more than once.")

        try:
            values = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise MalformedSubmission(f"{path}:{line_number}: {exc}") from exc

        estimates[image_id] = tuple(
            RawEstimate.from_iterable(values[start:start + 3])
            for start in range(0, len(values), 3)
        )

    return Submission(
        team=team or default_team,
        algorithm=algorithm or default_algorithm,
        track=track,
        estimates=estimates,
    )


def write_submission(path, submission):
    """
    Write a submission CSV with ids in lexicographic order.
    """
    arity = TrackId(submission.track).arity
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(submission_header(arity))
        for image_id in sorted(submission.estimates):
            row = [image_id]
            for estimate in submission.estimates[image_id]:
                row.extend(repr(value) for value in estimate.as_tuple())
            writer.writerow(row)
    return path


def check_coverage(instance, submission):
    """
    Refuse submissions that do not cover the track's id set exactly.
    """
    expected = set(instance.ids)
    given = set(submission.estimates)
    label = f"{submission.team}/{submission.algorithm}"

    missing = sorted(expected - given)
    if missing:
        raise MissingImageId(f"{label}: {len(missing)} image ids missing ({_listing(missing)}).")

    extra = sorted(given - expected)
    if extra:
        raise ExtraImageId(f"{label}: {len(extra)} unknown image ids ({_listing(extra)}).")


def _listing(ids):
    listed = ", ".join(ids[:MAX_LISTED_IDS])
    return listed + ", ..." if len(ids) > MAX_LISTED_IDS else listed


def check_submission_limit(submissions, max_per_team):
    """
    Enforce the per-team cap on submissions for one track.
    """
    if not max_per_team:
        return
    counts = Counter(submission.team for submission in submissions)
    over = sorted(team for team, count in counts.items() if count > max_per_team)
    if over:
        raise SubmissionLimitExceeded(
            f"More than {max_per_team} submissions for: {', '.join(over)}."
        )


def two_illuminant_image_error(truths, estimates):
    """
    Square root of the squared-sum error of one two-illuminant image, in degrees.
    """
    gt1, gt2 = truths
    e1, e2 = estimates
    return math.sqrt(two_illuminant_error(gt1, gt2, e1, e2))


@dataclass(frozen=True)
class ScoredSubmission:
    team: str
    algorithm: str
    samples: tuple
    recovery: tuple | None
    summary: ErrorSummary


def normalized_estimates(instance, submission):
    """
    Normalize every estimate in track order; raises on the first invalid one.
    """
    return [
        tuple(normalize(estimate) for estimate in submission.estimates[image_id])
        for image_id in instance.ids
    ]


def score_submission(instance, submission, threads=1):
    """
    Compute per-image errors and their summary for one submission.

    - One illuminant: reproduction errors, with recovery errors alongside.
    - Two illuminants: square root of each image's squared-sum error.
    """
    instance.require_images()
    check_coverage(instance, submission)
    estimates = normalized_estimates(instance, submission)

    recovery = None
    if instance.arity == 1:
        gts = [instance.ground_truth[image_id][0].as_tuple() for image_id in instance.ids]
        ests = [estimate.as_tuple() for (estimate,) in estimates]
        # tolist() keeps plain floats so serialized errors stay repr-exact
        errors = reproduction_errors(gts, ests).tolist()
        recovery = tuple(recovery_errors(gts, ests).tolist())
    else:
        def _score(index):
            return two_illuminant_image_error(instance.ground_truth[instance.ids[index]], estimates[index])

        errors = ordered_map(_score, range(len(instance.ids)), threads)

    samples = tuple(ErrorSample(image_id, error) for image_id, error in zip(instance.ids, errors))

    return ScoredSubmission(
        team=submission.team,
        algorithm=submission.algorithm,
        samples=samples,
        recovery=recovery,
        summary=summarize(samples),
    )


@dataclass(frozen=True)
class LeaderboardRow:
    """
    One ranked entry; ranking_metric is the rank column of ``summary``.
    """

    team: str
    algorithm: str
    ranking_metric: float
    summary: ErrorSummary
    rank: int = 0
    errors: tuple = field(default=(), compare=False)
    recovery: tuple | None = field(default=None, compare=False)

    @classmethod
    def from_summary(cls, team, algorithm, summary, rank_by, errors=(), recovery=None):
        return cls(
            team=team,
            algorithm=algorithm,
            ranking_metric=summary.column(RANK_COLUMNS[rank_by]),
            summary=summary,
            errors=tuple(errors),
            recovery=recovery,
        )


def rank_rows(rows, rank_by=None):
    """
    Sort rows ascending by ranking metric (lower error is better), ties broken
    by (team, algorithm), and number them from 1.

    With ``rank_by`` the ranking metric is re-read from each row's summary.
    """
    if rank_by is not None:
        column = RANK_COLUMNS[rank_by]
        rows = [replace(row, ranking_metric=row.summary.column(column)) for row in rows]

    for row in rows:
        if not math.isfinite(row.ranking_metric):
            raise ValueError(f"{row.team}/{row.algorithm}: ranking metric is not finite.")

    ordered = sorted(rows, key=lambda row: (row.ranking_metric, row.team, row.algorithm))
    return [replace(row, rank=rank) for rank, row in enumerate(ordered, start=1)]


@dataclass(frozen=True)
class Leaderboard:
    track: TrackId
    rank_by: str
    rows: tuple

    def to_dict(self):
        return {
            "track": str(TrackId(self.track).value),
            "rank_by": self.rank_by,
            "rows": [_row_to_dict(row) for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data):
        """
        Rebuild a leaderboard from its JSON form; malformed input raises
        MalformedLeaderboard.
        """
        try:
            track = TrackId(data["track"])
            rank_by = data["rank_by"]
            if rank_by not in RANK_COLUMNS:
                raise ValueError(f"unknown rank_by {rank_by!r}")
            rows = tuple(_row_from_dict(row) for row in data["rows"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedLeaderboard(f"Malformed leaderboard: {exc}") from exc
        return cls(track=track, rank_by=rank_by, rows=rows)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["rank", "team", "algorithm", "ranking_metric", "n", *SUMMARY_COLUMNS])
        for row in self.rows:
            writer.writerow([
                row.rank,
                row.team,
                row.algorithm,
                repr(row.ranking_metric),
                row.summary.n,
                *(_format_value(row.summary.column(name)) for name in SUMMARY_COLUMNS),
            ])
        return buffer.getvalue()

    def to_text(self):
        return render_to_string("benchmark/leaderboard.txt", table_context(self))


def _format_value(value):
    return "" if math.isnan(value) else repr(value)


def _json_number(value):
    return None if math.isnan(value) else value


def _row_to_dict(row):
    errors = []
    for index, sample in enumerate(row.errors):
        entry = {"image_id": sample.image_id, "error": sample.error}
        if row.recovery is not None:
            entry["recovery"] = row.recovery[index]
        errors.append(entry)

    summary = {key: _json_number(value) for key, value in row.summary.as_dict().items()}
    return {
        "rank": row.rank,
        "team": row.team,
        "algorithm": row.algorithm,
        "ranking_metric": row.ranking_metric,
        "summary": summary,
        "errors": errors,
    }


def _row_from_dict(data):
    summary = ErrorSummary.from_dict(
        {key: (math.nan if value is None else value) for key, value in data["summary"].items()}
    )
    entries = data.get("errors", [])
    errors = tuple(ErrorSample(str(e["image_id"]), float(e["error"])) for e in entries)
    recovery = None
    if entries and all("recovery" in e for e in entries):
        recovery = tuple(float(e["recovery"]) for e in entries)
    return LeaderboardRow(
        team=str(data["team"]),
        algorithm=str(data["algorithm"]),
        ranking_metric=float(data["ranking_metric"]),
        summary=summary,
        rank=int(data["rank"]),
        errors=errors,
        recovery=recovery,
    )


def build_leaderboard(track, scored, rank_by=None):
    """
    Rank scored submissions by the track's metric (or ``rank_by``).
    """
    track = TrackId(track)
    rank_by = rank_by or DEFAULT_RANK_BY[track]
    logger.debug("Ranking %d rows on %s by %s", len(scored), track.value, rank_by)
    rows = [
        LeaderboardRow.from_summary(
            item.team, item.algorithm, item.summary, rank_by, item.samples, item.recovery
        )
        for item in scored
    ]
    return Leaderboard(track=track, rank_by=rank_by, rows=tuple(rank_rows(rows)))


def table_context(leaderboard):
    """
    Column-aligned cells for the plain-text leaderboard template.
    """
    ranking_column = RANK_COLUMNS[leaderboard.rank_by]
    columns = [ranking_column] + [name for name in SUMMARY_COLUMNS if name != ranking_column]

    header = ["#", "Team", "Algorithm", *columns]
    body = [
        [str(row.rank), row.team, row.algorithm]
        + [row.summary.column(name) for name in columns]
        for row in leaderboard.rows
    ]
    texts = [header] + [
        cells[:3] + [_metric_text(value) for value in cells[3:]] for cells in body
    ]

    widths = [max(len(line[index]) for line in texts) for index in range(len(header))]
    aligns = ["right", "left", "left"] + ["right"] * len(columns)

    def cells(line):
        return [
            {"text": text, "width": width, "align": align}
            for text, width, align in zip(line, widths, aligns)
        ]

    return {
        "title": f"{TrackId(leaderboard.track).label} track, ranked by {leaderboard.rank_by}",
        "header": cells(texts[0]),
        "rule": "-" * (sum(widths) + 2 * (len(widths) - 1)),
        "rows": [cells(line) for line in texts[1:]],
    }


def _metric_text(value):
    return "-" if math.isnan(value) else f"{value:.6f}"


def cumulative_curve(errors):
    """
    (error, fraction of images with error <= it) pairs, sorted by error.
    """
    values = sorted(sample.error for sample in errors)
    count = len(values)
    return [(value, (index + 1) / count) for index, value in enumerate(values)]


def write_error_csv(path, row):
    """
    Per-image errors of one leaderboard row: ``image_id,error[,recovery]``.
    """
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if row.recovery is None:
            writer.writerow(["image_id", "error"])
            for sample in row.errors:
                writer.writerow([sample.image_id, repr(sample.error)])
        else:
            writer.writerow(["image_id", "error", "recovery"])
            for sample, recovery in zip(row.errors, row.recovery):
                writer.writerow([sample.image_id, repr(sample.error), repr(recovery)])
    return path


def write_cdf_csv(path, row):
    """
    Cumulative error distribution of one leaderboard row: ``error,fraction``.
    """
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["error", "fraction"])
        for error, fraction in cumulative_curve(row.errors):
            writer.writerow([repr(error), repr(fraction)])
    return path
