import logging
from pathlib import Path

from benchmark.algorithms import EstimatorConfig, duplicate, estimator_names, get_estimator
from benchmark.color import DEFAULT_EPSILON_FLOOR, RawEstimate, mean_chromaticity, normalize
from benchmark.correction import apply_white_balance, write_preview
from benchmark.dataset import TrackId, load_dataset, single_ground_truth, split_tracks
from benchmark.exceptions import ArityMismatch, DataError, ValidationFailure
from benchmark.leaderboard import Submission, write_submission
from benchmark.pool import ordered_map
from benchmark.utils import submission_filename

from ._base import BenchmarkCommand

logger = logging.getLogger(__name__)


class Command(BenchmarkCommand):
    help = "Run a built-in estimator over one track of a dataset and write a submission CSV."

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_track_argument(parser)
        parser.add_argument(
            "--estimator",
            required=True,
            help=f"Estimator name: {', '.join(estimator_names())}.",
        )
        parser.add_argument(
            "--out",
            required=True,
            help="Submission CSV path, or an existing directory for <team>__<algorithm>.csv.",
        )
        parser.add_argument("--team", default="BASELINE", help="Team name (default BASELINE).")
        parser.add_argument("--algorithm", help="Algorithm name (default: the estimator name).")
        parser.add_argument("--minkowski-p", type=float, help="Minkowski norm (>= 1).")
        parser.add_argument("--sigma", type=float, help="Gray-Edge smoothing sigma in pixels.")
        parser.add_argument("--saturation-fraction", type=float, help="Clipping threshold in (0, 1].")
        parser.add_argument(
            "--epsilon-floor",
            type=float,
            nargs="?",
            const=DEFAULT_EPSILON_FLOOR,
            help=f"Floor zero components at this fraction of the largest (default {DEFAULT_EPSILON_FLOOR}).",
        )
        parser.add_argument(
            "--duplicate",
            action="store_true",
            help="Answer the two-illuminant track with the single estimate twice.",
        )
        parser.add_argument(
            "--training-dataset",
            help="Dataset whose General-track ground truths train the constant estimator.",
        )
        parser.add_argument("--previews", help="Directory for corrected 8-bit PNG previews.")
        self.add_threads_argument(parser)
        self.add_config_argument(parser)

    def run_command(self, *args, **options):
        resolved = self.resolve(options)
        threads = resolved["threads"]
        track = TrackId(options["track"])

        config = EstimatorConfig(
            minkowski_p=resolved["minkowski_p"],
            derivative_sigma=resolved["derivative_sigma"],
            saturation_fraction=resolved["saturation_fraction"],
            epsilon_floor=resolved["epsilon_floor"],
        )

        records, tracks = self.load_tracks(options["dataset"], resolved)
        instance = tracks[track]
        training_gts = self.training_ground_truths(options, resolved, records, instance)

        estimator = get_estimator(options["estimator"], config, training_gts)
        if options["duplicate"]:
            if estimator.arity != 1:
                raise ArityMismatch(f"--duplicate needs a single-illuminant estimator, got {estimator.name}.")
            estimator = duplicate(estimator)

        if estimator.arity != instance.arity:
            raise ArityMismatch(
                f"{estimator.name} returns {estimator.arity} estimate(s) per image; the {track} "
                f"track needs {instance.arity}. Use --duplicate or a split_ estimator."
            )
        instance.require_images()

        fallback = mean_chromaticity(training_gts)
        by_id = {record.id: record for record in records}

        def _estimate(image_id):
            record = by_id[image_id]
            try:
                estimates = estimator.estimate(record)
                return tuple(normalize(e, config.epsilon_floor) for e in estimates), False
            except (DataError, ValidationFailure) as exc:
                logger.warning("%s: %s; using the constant fallback", image_id, exc)
                return (fallback,) * estimator.arity, True

        results = ordered_map(_estimate, instance.ids, threads)

        failures = sum(1 for _, failed in results if failed)
        if failures:
            logger.warning(
                "%d of %d images fell back to the constant estimate", failures, len(results)
            )

        estimates = {
            image_id: tuple(RawEstimate.from_iterable(c.as_tuple()) for c in chromaticities)
            for image_id, (chromaticities, _) in zip(instance.ids, results)
        }
        algorithm = options["algorithm"] or estimator.name
        submission = Submission(
            team=options["team"], algorithm=algorithm, track=track, estimates=estimates
        )

        out = Path(options["out"])
        if out.is_dir():
            out = out / submission_filename(submission.team, algorithm)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_submission(out, submission)
        logger.info("Wrote %d estimates to %s", len(estimates), out)

        if options["previews"]:
            self.write_previews(options["previews"], by_id, instance.ids, results, threads)

        self.emit(f"{out}\n")

    def training_ground_truths(self, options, resolved, records, instance):
        """
        Ground truths the constant estimator (and the failure fallback) averages.
        """
        if options["training_dataset"]:
            training = load_dataset(
                options["training_dataset"],
                threads=resolved["threads"],
                skip_invalid=True,
                black_level=resolved["black_level"],
                saturation_level=resolved["saturation_level"],
            )
            general = split_tracks(
                training,
                threshold=resolved["face_angle_threshold"],
                metric=resolved["face_angle_metric"],
            )[TrackId.GENERAL]
            if len(general):
                return [truths[0] for truths in general.ground_truth.values()]
            logger.warning("Training dataset has no General-track images; using all its records")
            return [single_ground_truth(record) for record in training]

        logger.warning(
            "No --training-dataset given; the constant estimate is trained on the evaluated images"
        )
        truths = [gt for pair in instance.ground_truth.values() for gt in pair]
        return truths or [single_ground_truth(record) for record in records]

    def write_previews(self, directory, by_id, ids, results, threads):
        """
        Write one corrected preview per image.

        Two-illuminant images are corrected by the mean of their two estimates.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)

        def _preview(index):
            chromaticities, _ = results[index]
            illuminant = mean_chromaticity(chromaticities)
            image = apply_white_balance(by_id[ids[index]], illuminant)
            return write_preview(image, directory / f"{ids[index]}.png")

        ordered_map(_preview, range(len(ids)), threads)
        logger.info("Wrote %d previews to %s", len(ids), directory)
