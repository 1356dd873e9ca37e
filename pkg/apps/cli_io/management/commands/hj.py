"""
Django management command running the Hamilton-Jacobi workflows on a scenario.
"""

import logging

from django.core.management.base import BaseCommand, CommandError
from django.utils import timezone

from apps.cli_io.runner import COMMANDS, run
from apps.cli_io.scenario import load_scenario
from apps.cli_io.serializers import ORIENTATIONS
from apps.core.exceptions import HJGraphError, InternalError

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    """
    Solve, verify, transform or refine a scenario.

    Usage:
        python manage.py hj solve apps/cli_io/scenarios/eikonal_star.scn
        python manage.py hj verify apps/cli_io/scenarios/constant.scn --out /tmp/run
        python manage.py hj verify scenario.scn --seed=7 --corrupt
        python manage.py hj transform scenario.scn --orientation=max

    Exit codes: 0 success, 1 failed verification, 2 configuration error,
    3 internal error.
    """

    help = "Run a Hamilton-Jacobi workflow on a scenario file"

    def add_arguments(self, parser):
        parser.add_argument("workflow", choices=COMMANDS, help="Workflow to run")
        parser.add_argument("scenario", help="Path of the scenario file")
        parser.add_argument("--out", help="Output directory (overrides [output] dir)")
        parser.add_argument("--seed", type=int, help="Verification seed")
        parser.add_argument(
            "--orientation",
            choices=ORIENTATIONS,
            help="Minimize or maximize the cost (overrides [solver] orientation)",
        )
        parser.add_argument(
            "--corrupt",
            action="store_true",
            help="Lower one grid entry before verifying",
        )

    def handle(self, *args, **options):
        start_time = timezone.now()
        workflow = options["workflow"]
        overrides = {
            "output_dir": options["out"],
            "seed": options["seed"],
            "orientation": options["orientation"],
            "corrupt": options["corrupt"],
        }

        try:
            scenario = load_scenario(options["scenario"], overrides)
            code = run(workflow, scenario)
        except HJGraphError as exc:
            logger.error("%s failed: %s", workflow, exc)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except Exception as exc:
            logger.exception("%s crashed", workflow)
            raise CommandError(f"Internal error: {exc}", returncode=InternalError.exit_code) from exc

        elapsed = (timezone.now() - start_time).total_seconds()
        if code:
            self.stdout.write(
                self.style.ERROR(f"Verification failed; report written to {scenario.output_dir}")
            )
            raise CommandError("Verification failed", returncode=code)
        self.stdout.write(
            self.style.SUCCESS(
                f"{workflow} finished in {elapsed:.2f}s; outputs in {scenario.output_dir}"
            )
        )
