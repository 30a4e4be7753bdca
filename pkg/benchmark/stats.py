"""
Aggregate per-image errors into the leaderboard statistic columns.

Quartiles use linear interpolation between closest ranks at zero-indexed
position p * (n - 1). Worst-k% means average the ceil(k * n) largest values.
Sums go through ``math.fsum`` on sorted data, so every statistic is
independent of input order.
"""
import math
from dataclasses import asdict, dataclass, fields

from benchmark.exceptions import EmptySample, InvalidFraction

# Fractions behind the worst-k% columns
WORST_FRACTIONS = {"worst25_mean": 0.25, "worst5_mean": 0.05, "worst1_mean": 0.01}


@dataclass(frozen=True)
class ErrorSample:
    """One image's error: degrees, or root squared-sum degrees for the two track."""

    image_id: str
    error: float

    def __post_init__(self):
        if not math.isfinite(self.error) or self.error < 0:
            raise ValueError(f"Invalid error value for {self.image_id!r}: {self.error!r}")


@dataclass(frozen=True)
class ErrorSummary:
    """
    Statistic columns of a leaderboard row.

    - Values computed by ``summarize`` are always finite.
    - Published, pre-summarized rows may leave columns unknown (NaN).
    """

    mean: float
    median: float
    trimean: float
    worst25_mean: float
    worst5_mean: float
    worst1_mean: float
    worst_re: float
    mean_squared: float
    n: int

    @classmethod
    def partial(cls, n=0, **columns):
        """
        Build a summary from a subset of columns (e.g. a published table row).
        """
        known = {field.name for field in fields(cls)} - {"n"}
        unknown = set(columns) - known
        if unknown:
            raise ValueError(f"Unknown summary columns: {sorted(unknown)}")
        values = {name: float(columns.get(name, math.nan)) for name in known}
        return cls(n=n, **values)

    @classmethod
    def from_dict(cls, data):
        values = {name: float(data[name]) for name in data if name != "n"}
        return cls.partial(n=int(data.get("n", 0)), **values)

    def as_dict(self):
        return asdict(self)

    def column(self, name):
        return getattr(self, name)


def _values(samples):
    """
    Accept ErrorSample objects or bare numbers and return them sorted.
    """
    values = [s.error if isinstance(s, ErrorSample) else float(s) for s in samples]
    if not values:
        raise EmptySample("Cannot summarize an empty sample.")
    return sorted(values)


def _mean_sorted(values):
    return math.fsum(values) / len(values)


def _quantile_sorted(values, p):
    position = p * (len(values) - 1)
    lower = math.floor(position)
    upper = min(lower + 1, len(values) - 1)
    weight = position - lower
    return values[lower] + (values[upper] - values[lower]) * weight


def _worst_count(n, fraction):
    # round() absorbs float noise such as 0.05 * 60 = 3.0000000000000004
    return max(1, math.ceil(round(fraction * n, 9)))


def _worst_mean_sorted(values, fraction):
    if not 0 < fraction <= 1:
        raise InvalidFraction(f"Fraction must be in (0, 1], got {fraction!r}.")
    count = _worst_count(len(values), fraction)
    return _mean_sorted(values[-count:])


def mean(samples):
    return _mean_sorted(_values(samples))


def median(samples):
    values = _values(samples)
    return _quantile_sorted(values, 0.5)


def quartiles(samples):
    """
    Return (Q1, median, Q3).
    """
    values = _values(samples)
    return tuple(_quantile_sorted(values, p) for p in (0.25, 0.5, 0.75))


def trimean(samples):
    q1, q2, q3 = quartiles(samples)
    return (q1 + 2 * q2 + q3) / 4


def worst_k_mean(samples, fraction):
    """
    Mean of the ceil(fraction * n) largest errors, fraction in (0, 1].
    """
    return _worst_mean_sorted(_values(samples), fraction)


def summarize(samples):
    """
    Compute every statistic column over the same sample set.
    """
    values = _values(samples)
    q1, q2, q3 = (_quantile_sorted(values, p) for p in (0.25, 0.5, 0.75))

    worst = {
        column: _worst_mean_sorted(values, fraction)
        for column, fraction in WORST_FRACTIONS.items()
    }

    return ErrorSummary(
        mean=_mean_sorted(values),
        median=q2,
        trimean=(q1 + 2 * q2 + q3) / 4,
        worst_re=values[-1],
        mean_squared=math.fsum(value * value for value in values) / len(values),
        n=len(values),
        **worst,
    )
