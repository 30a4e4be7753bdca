"""
Shared plumbing for the benchmark management commands.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from benchmark.conf import resolve_options
from benchmark.dataset import TrackId, load_dataset, split_tracks
from benchmark.exceptions import BenchmarkError

logger = logging.getLogger(__name__)


class BenchmarkCommand(BaseCommand):
    """
    Base class for commands of the batch CLI.

    - Subclasses implement ``run_command`` instead of ``handle``.
    - Any BenchmarkError becomes a CommandError carrying the error's exit
      code (1 data, 2 usage, 3 validation).
    """

    requires_system_checks = []

    def handle(self, *args, **options):
        try:
            self.run_command(*args, **options)
        except BenchmarkError as exc:
            logger.debug("%s failed", self.__class__.__module__, exc_info=True)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def run_command(self, *args, **options):
        raise NotImplementedError

    def emit(self, text):
        """
        Write a command result to stdout exactly as given.
        """
        self.stdout.write(text, ending="")

    # --- argument groups ---

    def add_config_argument(self, parser):
        parser.add_argument(
            "--config",
            help="Flat key=value file with option defaults (keys are flag names).",
        )

    def add_threads_argument(self, parser):
        parser.add_argument("--threads", type=int, help="Worker threads (default IEC_THREADS).")

    def add_dataset_arguments(self, parser):
        parser.add_argument("--dataset", required=True, help="Cube++-style dataset directory.")
        parser.add_argument("--black-level", type=int, help="Fallback black level.")
        parser.add_argument("--saturation-level", type=int, help="Fallback saturation level.")
        parser.add_argument(
            "--face-angle-threshold",
            type=float,
            help="Face angle in degrees separating the two-illuminant track.",
        )
        parser.add_argument(
            "--face-angle-metric",
            help="Angle used for the face rule: recovery or reproduction.",
        )

    def add_track_argument(self, parser, required=True):
        parser.add_argument(
            "--track",
            required=required,
            choices=TrackId.values,
            help="Challenge track.",
        )

    # --- shared steps ---

    def resolve(self, options):
        """
        Merge CLI flags with the --config file and settings.
        """
        return resolve_options(options, options.get("config"))

    def load_tracks(self, directory, resolved, daytime=None):
        """
        Load a dataset and split it into tracks.

        Records with invalid ground truths are skipped with a warning.
        """
        records = load_dataset(
            directory,
            threads=resolved["threads"],
            skip_invalid=True,
            black_level=resolved["black_level"],
            saturation_level=resolved["saturation_level"],
        )
        tracks = split_tracks(
            records,
            threshold=resolved["face_angle_threshold"],
            metric=resolved["face_angle_metric"],
            daytime=daytime,
        )
        return records, tracks
