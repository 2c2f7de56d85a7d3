"""Cross-validated QDA error on the UCI sonar data for each penalty setting.

    python scripts/sonar_qda.py path/to/sonar.all-data
"""
import argparse

from ridgecov.evaluate import PENALTY_MODES
from ridgecov.experiments import load_sonar, sonar_error


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--modes", nargs="+", choices=PENALTY_MODES, default=list(PENALTY_MODES))
    args = ap.parse_args()

    X, labels = load_sonar(args.data)
    print("graph,mode,error_pct")
    for banded in (True, False):
        for mode in args.modes:
            err = sonar_error(X, labels, banded=banded, mode=mode, seed=args.seed)
            print(f"{'banded' if banded else 'unstructured'},{mode},{err:.2f}")


if __name__ == "__main__":
    main()
