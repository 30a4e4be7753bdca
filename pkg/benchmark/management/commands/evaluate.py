import logging
from pathlib import Path

from benchmark.dataset import TrackId
from benchmark.leaderboard import (
    RANK_COLUMNS,
    build_leaderboard,
    check_coverage,
    check_submission_limit,
    normalized_estimates,
    read_submission,
    score_submission,
)

from ._base import BenchmarkCommand

logger = logging.getLogger(__name__)


class Command(BenchmarkCommand):
    help = "Score submission CSVs against one track and print the ranked leaderboard."

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_track_argument(parser)
        parser.add_argument("submissions", nargs="+", help="Submission CSV files.")
        parser.add_argument(
            "--rank-by",
            choices=sorted(RANK_COLUMNS),
            help="Ranking column (default: the track's own metric).",
        )
        parser.add_argument(
            "--format",
            choices=["text", "csv", "json"],
            default="text",
            help="Format printed on stdout.",
        )
        parser.add_argument("--json", help="Also write the leaderboard JSON to this path.")
        parser.add_argument("--csv", help="Also write the leaderboard CSV to this path.")
        parser.add_argument(
            "--max-per-team",
            type=int,
            default=0,
            help="Refuse more than N submissions per team (0 disables the cap).",
        )
        self.add_threads_argument(parser)
        self.add_config_argument(parser)

    def run_command(self, *args, **options):
        resolved = self.resolve(options)
        threads = resolved["threads"]
        track = TrackId(options["track"])

        _, tracks = self.load_tracks(options["dataset"], resolved)
        instance = tracks[track].require_images()

        submissions = [read_submission(path, track) for path in options["submissions"]]
        check_submission_limit(submissions, options["max_per_team"])

        # Every submission must be complete and valid before anything is scored
        for submission in submissions:
            check_coverage(instance, submission)
            normalized_estimates(instance, submission)

        scored = [score_submission(instance, submission, threads) for submission in submissions]
        leaderboard = build_leaderboard(track, scored, options["rank_by"])
        logger.info(
            "Ranked %d submissions on the %s track by %s",
            len(scored), track.value, leaderboard.rank_by,
        )

        if options["json"]:
            Path(options["json"]).write_text(leaderboard.to_json(), encoding="utf-8")
        if options["csv"]:
            Path(options["csv"]).write_text(leaderboard.to_csv(), encoding="utf-8")

        renderers = {
            "text": leaderboard.to_text,
            "csv": leaderboard.to_csv,
            "json": leaderboard.to_json,
        }
        self.emit(renderers[options["format"]]())
