import logging

from django.core.management.base import CommandError

from benchmark.synthetic import build_dataset

from ._base import BenchmarkCommand

logger = logging.getLogger(__name__)


class Command(BenchmarkCommand):
    help = "Write a synthetic Cube++-style dataset with planted illuminants."

    def add_arguments(self, parser):
        parser.add_argument("--out", required=True, help="Target dataset directory.")
        parser.add_argument("--count", type=int, default=20, help="Number of records.")
        parser.add_argument("--seed", type=int, default=0, help="Random seed.")
        parser.add_argument(
            "--two-fraction",
            type=float,
            default=0.2,
            help="Share of two-region scenes (face angle >= 3 degrees).",
        )
        parser.add_argument(
            "--indoor-fraction", type=float, default=0.3, help="Share of indoor-labeled scenes."
        )
        parser.add_argument("--height", type=int, default=32, help="Raster height in pixels.")
        parser.add_argument("--width", type=int, default=48, help="Raster width in pixels.")

    def run_command(self, *args, **options):
        if options["count"] < 1:
            raise CommandError("--count must be at least 1.", returncode=2)
        if options["height"] < 8 or options["width"] < 8:
            raise CommandError("--height and --width must be at least 8.", returncode=2)
        for name in ("two_fraction", "indoor_fraction"):
            if not 0 <= options[name] <= 1:
                raise CommandError(f"--{name.replace('_', '-')} must be in [0, 1].", returncode=2)

        records = build_dataset(
            options["out"],
            count=options["count"],
            seed=options["seed"],
            two_fraction=options["two_fraction"],
            indoor_fraction=options["indoor_fraction"],
            height=options["height"],
            width=options["width"],
        )
        logger.info("Wrote %d synthetic records to %s", len(records), options["out"])
        self.emit(f"{len(records)}\t{options['out']}\n")
