"""Smoke test for the pyfinsum extension.

Uses an installed `pyfinsum` if there is one (e.g. after `maturin develop`),
otherwise the library built by `cargo build --release -p finsum-py`.
"""

import importlib
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("pyfinsum")
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libpyfinsum.so")
        if os.path.exists(lib):
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(tmp, "pyfinsum.so"))
            sys.path.insert(0, tmp)
            return importlib.import_module("pyfinsum")
    sys.exit("pyfinsum not found; run `cargo build --release -p finsum-py` first")


def main():
    fs = load()

    odds = fs.NaturalSet("odds", 10_000)
    assert len(odds) == 5_000 and 7 in odds and 8 not in odds
    assert abs(odds.upper_banach_density([10, 100]) - 0.5) < 1e-12

    bad = fs.verify(odds, 0, [1, 3], 2)
    assert not bad["accepted"] and bad["failing_subset"] == [1, 3]

    report = fs.pipeline(odds, k=2)
    cert = report["certificate"]
    assert report["pass"] and cert["t"] % 2 == 1
    assert fs.verify(odds, cert["t"], cert["B"], 2)["accepted"]

    circle = fs.System.circle(fs.GOLDEN)
    prog = fs.progression(circle, [0.2], 3)
    assert prog["check"]["pass"] and prog["distance_to_arithmetic"] <= 3e-3

    ex = fs.extract_rotation(fs.GOLDEN, 0.0, 0.2, 3, 6, 0.1)
    assert len(ex["generators"]) == 6 and ex["inclusion"]["subsets_checked"] == 41

    assert fs.gowers([1, -1, 1, -1], 1) < 1e-12
    assert abs(fs.gowers([1j, 1j, 1j], 2) - 1.0) < 1e-12
    skew = fs.System.skew(fs.GOLDEN)
    assert fs.seminorm(skew, [0.1, 0.2], "char:0,1", 2, 20_000) <= 0.1
    try:
        fs.seminorm(skew, [0.1, 0.2], "char:0,1", 4, 100_000)
        raise AssertionError("expected budget exhaustion")
    except fs.BudgetExhausted:
        pass

    assert fs.vdc([[1, 0], [0, 1]], [1, 1])["pass"]
    assert fs.marginal_domination(circle, [0.0], 3, 20_000)["pass"]
    assert fs.recurrence(fs.GOLDEN, [2, 1], [1, 2], [(0.2, 0.1), (0.4, 0.1)], window=500)["positive"]
    assert fs.counterexample(fs.GOLDEN)["all_empty"]

    try:
        fs.NaturalSet("nope", 10)
        raise AssertionError("expected an error")
    except fs.FinsumError:
        pass

    print("pyfinsum smoke test passed")


if __name__ == "__main__":
    main()
