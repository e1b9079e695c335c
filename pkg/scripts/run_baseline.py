#!/usr/bin/env python3
"""
Baseline runner for the pconvex experiments.
Runs the distance trend study and the volume/envelope sanity tables through the
command line, then summarises the diameter table.
"""

import sys
import csv
import json
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)
# pconvex resets the root level on every run
logger.setLevel(logging.INFO)


class BaselineRunner:
    """Runs the baseline commands and checks the diameter trend"""

    def __init__(self, output_dir: Path, seed: int, threads: Optional[int] = None):
        self.output_dir = output_dir
        self.seed = seed
        self.threads = threads

    def check_python_version(self) -> bool:
        """Check if Python version is compatible"""
        min_version = (3, 8)
        current_version = sys.version_info[:2]

        if current_version < min_version:
            logger.error(f"Python {min_version[0]}.{min_version[1]}+ required, "
                         f"got {current_version[0]}.{current_version[1]}")
            return False

        logger.info(f"Python version check passed: {current_version[0]}.{current_version[1]}")
        return True

    def check_dependencies(self) -> bool:
        """Check that the numerical stack is importable"""
        required_packages = ["numpy", "scipy", "pydantic", "psutil"]
        missing_packages = []
        for package in required_packages:
            try:
                __import__(package)
            except ImportError:
                missing_packages.append(package)

        if missing_packages:
            logger.error(f"Missing packages: {', '.join(missing_packages)}; "
                         f"install them with: pip install -r requirements.txt")
            return False

        logger.info("All required packages are available")
        return True

    def run_command(self, name: str, argv: List[str]) -> bool:
        """Run one pconvex command with the shared seed and thread options"""
        from pconvex.cli import main as pconvex_main

        argv = argv + ["--seed", str(self.seed)]
        if self.threads is not None:
            argv += ["--threads", str(self.threads)]
        logger.info(f"Running {name}: pconvex {' '.join(argv)}")
        exit_code = pconvex_main(argv)
        if exit_code != 0:
            logger.error(f"{name} failed with exit code {exit_code}")
            return False
        return True

    def run_diameter(self, n_values: List[int], pairs: int, budget: int, restarts: int) -> Path:
        target = self.output_dir / "diameter.csv"
        ok = self.run_command("diameter", [
            "experiment", "diameter",
            "--n", ",".join(str(n) for n in n_values),
            "--p", "0.5",
            "--pairs", str(pairs),
            "--budget", str(budget),
            "--restarts", str(restarts),
            "--output", str(target),
        ])
        if not ok:
            raise RuntimeError("diameter experiment failed")
        return target

    def run_sanity_tables(self) -> bool:
        """Volume of the l_{1/2}^2 ball and the envelope sandwich on random spaces"""
        volume = self.run_command("volume", [
            "experiment", "volume", "--n", "2", "--p", "0.5", "--samples", "1000000",
            "--output", str(self.output_dir / "volume.csv"),
        ])
        envelope = self.run_command("envelope", [
            "experiment", "envelope", "--n", "2,3", "--p", "0.5", "--q", "1",
            "--spaces", "5", "--samples", "2000",
            "--output", str(self.output_dir / "envelope.csv"),
        ])
        return volume and envelope

    def summarize_diameter(self, table: Path) -> Dict[str, object]:
        """
        Median distance per n, the monotonicity of the medians and the
        comparison with n^(2/p-1).
        """
        import numpy as np
        from pconvex.services.norm_service import peck_diameter_bound

        with open(table, encoding="utf-8", newline="") as handle:
            rows = list(csv.DictReader(handle))

        by_n: Dict[int, List[float]] = {}
        within_reference = True
        for row in rows:
            n, value = int(row["n"]), float(row["distance_upper"])
            by_n.setdefault(n, []).append(value)
            if value > peck_diameter_bound(n, float(row["p"])) * (1.0 + 1e-9):
                logger.warning(f"n={n} pair={row['pair']}: {value:.6g} exceeds n^(2/p-1)")
                within_reference = False

        medians = {n: float(np.median(values)) for n, values in sorted(by_n.items())}
        ordered = list(medians.values())
        non_decreasing = all(a <= b for a, b in zip(ordered, ordered[1:]))

        for n, median in medians.items():
            logger.info(f"n={n}: median distance {median:.6g} over {len(by_n[n])} pairs")
        logger.info(f"Medians non-decreasing in n: {non_decreasing}; "
                    f"all estimates below n^(2/p-1): {within_reference}")
        return {"medians": medians, "non_decreasing": non_decreasing,
                "within_reference": within_reference}

    def compare_with_baseline(self, summary: Dict[str, object], baseline_file: Path) -> bool:
        """Compare the medians with recorded ones (tests/data/diameter_baseline.json)"""
        with open(baseline_file, encoding="utf-8") as handle:
            baseline = json.load(handle)
        rel_tol = float(baseline["median_rel_tol"])
        matches = True
        for n, median in summary["medians"].items():
            recorded = baseline["medians"].get(str(n))
            if recorded is None:
                logger.warning(f"n={n}: no recorded median in {baseline_file}")
                continue
            if abs(median - recorded) > rel_tol * abs(recorded):
                logger.error(f"n={n}: median {median:.6g} differs from recorded {recorded:.6g}")
                matches = False
        logger.info(f"Medians match {baseline_file}: {matches}")
        return matches


def main():
    """Main entry point"""
    parser = argparse.ArgumentParser(description="pconvex baseline runner")
    parser.add_argument("--output-dir", default="baseline", help="Directory for tables and manifests")
    parser.add_argument("--seed", type=int, default=0, help="Seed shared by every experiment")
    parser.add_argument("--n", default="2,3,4", help="Dimensions of the diameter study")
    parser.add_argument("--pairs", type=int, default=10, help="Pairs per dimension")
    parser.add_argument("--budget", type=int, default=2000, help="Distance evaluations per pair")
    parser.add_argument("--restarts", type=int, default=4, help="Random starts per pair")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads")
    parser.add_argument("--baseline", default=None,
                        help="Recorded medians to compare with, e.g. tests/data/diameter_baseline.json")
    parser.add_argument("--skip-sanity", action="store_true", help="Only run the diameter study")
    parser.add_argument("--check-only", action="store_true",
                        help="Only perform environment checks")

    args = parser.parse_args()

    output_dir = Path(args.output_dir)
    runner = BaselineRunner(output_dir, args.seed, args.threads)

    if not runner.check_python_version() or not runner.check_dependencies():
        sys.exit(1)
    if args.check_only:
        logger.info("All checks passed")
        return

    output_dir.mkdir(parents=True, exist_ok=True)
    if not args.skip_sanity and not runner.run_sanity_tables():
        sys.exit(1)

    try:
        n_values = [int(n) for n in args.n.split(",")]
        table = runner.run_diameter(n_values, args.pairs, args.budget, args.restarts)
    except (ValueError, RuntimeError) as e:
        logger.error(f"Baseline failed: {e}")
        sys.exit(1)

    summary = runner.summarize_diameter(table)
    if not summary["within_reference"]:
        sys.exit(1)
    if args.baseline and not runner.compare_with_baseline(summary, Path(args.baseline)):
        sys.exit(1)
    if not summary["non_decreasing"]:
        logger.warning("Median trend is not monotone for this seed; record it in the baseline notes")


if __name__ == "__main__":
    main()
