import csv
import io
import json
import logging
from pathlib import Path

from benchmark.utils import manifest_path

from ._base import BenchmarkCommand

logger = logging.getLogger(__name__)

SUMMARY_FIELDS = ("track", "count", "manifest")


def render_summary(rows, output_format):
    """
    Render the (track, count, manifest) lines printed after a split.

    - text: tab-separated, no header
    - csv: header plus one row per track
    - json: list of objects with sorted keys
    """
    if output_format == "json":
        data = [dict(zip(SUMMARY_FIELDS, row)) for row in rows]
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(SUMMARY_FIELDS)
        writer.writerows(rows)
        return buffer.getvalue()

    return "".join(f"{track}\t{count}\t{path}\n" for track, count, path in rows)


class Command(BenchmarkCommand):
    help = (
        "Split a dataset into the General, Indoor and two-illuminant track manifests. "
        "Manifests are always JSON; --format only selects the printed summary."
    )

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        parser.add_argument("--out", required=True, help="Directory for the track manifests.")
        parser.add_argument(
            "--daytime",
            help="Keep only records with this time-of-day label (e.g. day, night).",
        )
        parser.add_argument(
            "--format",
            choices=["text", "csv", "json"],
            default="text",
            help="Format of the summary printed on stdout.",
        )
        self.add_threads_argument(parser)
        self.add_config_argument(parser)

    def run_command(self, *args, **options):
        resolved = self.resolve(options)
        _, tracks = self.load_tracks(options["dataset"], resolved, daytime=options["daytime"])

        out_dir = Path(options["out"])
        out_dir.mkdir(parents=True, exist_ok=True)

        rows = []
        for track, instance in tracks.items():
            path = manifest_path(out_dir, track.value)
            path.write_text(
                json.dumps(instance.to_manifest(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            logger.info("Wrote %s (%d images)", path, len(instance))
            rows.append((track.value, len(instance), str(path)))

        self.emit(render_summary(rows, options["format"]))
