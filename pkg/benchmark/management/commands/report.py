import json
import logging
from pathlib import Path

from benchmark.exceptions import MalformedLeaderboard, MissingFile
from benchmark.leaderboard import Leaderboard, write_cdf_csv, write_error_csv
from benchmark.utils import plot_data_paths

from ._base import BenchmarkCommand

logger = logging.getLogger(__name__)


def read_leaderboard(path):
    """
    Load a leaderboard JSON written by ``evaluate --json``.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"Leaderboard {path} does not exist.")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedLeaderboard(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedLeaderboard(f"{path} must hold a JSON object.")
    return Leaderboard.from_dict(data)


class Command(BenchmarkCommand):
    help = "Render a leaderboard JSON as a table and optionally write plot data CSVs."

    def add_arguments(self, parser):
        parser.add_argument("leaderboard", help="Leaderboard JSON written by evaluate --json.")
        parser.add_argument(
            "--format",
            choices=["text", "csv", "json"],
            default="text",
            help="Output format.",
        )
        parser.add_argument("--out", help="Write the table to this file instead of stdout.")
        parser.add_argument(
            "--plot-data",
            help="Directory for per-image error and cumulative distribution CSVs.",
        )

    def run_command(self, *args, **options):
        leaderboard = read_leaderboard(options["leaderboard"])

        renderers = {
            "text": leaderboard.to_text,
            "csv": leaderboard.to_csv,
            "json": leaderboard.to_json,
        }
        rendered = renderers[options["format"]]()

        if options["plot_data"]:
            self.write_plot_data(Path(options["plot_data"]), leaderboard)

        if options["out"]:
            Path(options["out"]).write_text(rendered, encoding="utf-8")
            logger.info("Wrote %s", options["out"])
        else:
            self.emit(rendered)

    def write_plot_data(self, out_dir, leaderboard):
        """
        Write an errors CSV and a CDF CSV per leaderboard row.
        """
        out_dir.mkdir(parents=True, exist_ok=True)
        for row in leaderboard.rows:
            if not row.errors:
                logger.warning("%s/%s has no per-image errors; skipped", row.team, row.algorithm)
                continue
            paths = plot_data_paths(out_dir, row.rank, row.team, row.algorithm)
            write_error_csv(paths["errors"], row)
            write_cdf_csv(paths["cdf"], row)
        logger.info("Wrote plot data for %d rows to %s", len(leaderboard.rows), out_dir)
