#!/usr/bin/env python3
"""Write the Iris dataset as a headerless UCI-style CSV (4 attributes + species).

Uses the copy bundled with scikit-learn, so no network access is needed.
Usage: fetch_iris.py OUTPUT.csv
"""
import sys


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    try:
        from sklearn.datasets import load_iris
    except ImportError:
        print("scikit-learn is not installed; download iris.data from the UCI "
              "repository instead", file=sys.stderr)
        return 1
    iris = load_iris()
    with open(sys.argv[1], "w", encoding="ascii") as f:
        for row, target in zip(iris.data, iris.target):
            values = ",".join(f"{v:.1f}" for v in row)
            f.write(f"{values},Iris-{iris.target_names[target]}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
