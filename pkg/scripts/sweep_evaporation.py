"""
Parameter sweep script for the entropy calculus toolkit.
Evaporates black holes over a grid of starting masses and step fractions and
writes one summary row per run to a CSV file.
"""
import os
import sys
import logging
import argparse
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Any, Dict, List, Tuple

import pandas as pd

# Add parent directory to path to import from src
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.black_hole import evaporate, ledger_from_mass
from src.config import LOG_FORMAT

# Configure logging
logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


def run_one(params: Tuple[float, float, float]) -> Dict[str, Any]:
    """
    Evaporate one black hole and summarize the run.

    Args:
        params: (initial mass, step fraction, cutoff as a fraction of the initial mass)

    Returns:
        Dict[str, Any]: Summary row
    """
    mass, fraction, cutoff = params
    result = evaporate(ledger_from_mass(mass), fraction, cutoff * mass)
    summary = result.summary
    zurek = [r.zurek_ratio for r in result.trajectory]
    return {
        "mass": mass,
        "fraction": fraction,
        "m_min": cutoff * mass,
        "steps": summary.steps,
        "total_s_rad": summary.total_s_rad,
        "sigma_account": summary.sigma_account,
        "s_rad_over_sigma": summary.total_s_rad / summary.sigma_account,
        "defect": summary.defect,
        "tolerance": summary.tolerance,
        "max_zurek_ratio": max(zurek) if zurek else float("nan"),
    }


def sweep(masses: List[float], fractions: List[float], cutoff: float, jobs: int) -> pd.DataFrame:
    """
    Run every (mass, fraction) pair, in parallel when jobs > 1.

    Output rows are in grid order regardless of the job count.
    """
    grid = [(m, f, cutoff) for m, f in product(masses, fractions)]
    logger.info(f"Sweeping {len(grid)} runs with {jobs} job(s)")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_one, grid))
    else:
        rows = [run_one(params) for params in grid]
    return pd.DataFrame(rows)


def main():
    """
    Main function to run the evaporation sweep.
    """
    parser = argparse.ArgumentParser(description="Sweep black hole evaporation parameters")
    parser.add_argument("--masses", type=float, nargs="+", default=[0.5, 1.0, 2.0],
                        help="Initial masses")
    parser.add_argument("--fractions", type=float, nargs="+", default=[1e-3, 5e-3, 1e-2],
                        help="Energy fraction per step")
    parser.add_argument("--cutoff", type=float, default=1e-3,
                        help="Stop when M falls below this fraction of the initial mass")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes")
    parser.add_argument("--out", default="evaporation_sweep.csv", help="Output CSV file")
    args = parser.parse_args()

    frame = sweep(args.masses, args.fractions, args.cutoff, args.jobs)
    frame.to_csv(args.out, index=False, float_format="%.17g")
    logger.info(f"Wrote {len(frame)} rows to {args.out}")


if __name__ == "__main__":
    main()
