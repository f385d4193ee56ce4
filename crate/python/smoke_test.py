"""Smoke test for the Python bindings.

Builds the extension with cargo, loads it from a temporary directory and
checks a few values against independent closed forms. Runs under pytest or
as a plain script.
"""

import importlib.util
import json
import math
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    subprocess.run(["cargo", "build", "-q", "-p", "trace-geom-py"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "debug" / "libtrace_geom_py.so"
    tmp = Path(tempfile.mkdtemp())
    target = tmp / "trace_geom_py.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("trace_geom_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


tg = load_module()


def test_covolume_of_rational_order():
    # Eichler order of level 1 in the algebra ramified at 2 and 3.
    lo, hi = tg.covolume("Q-2-3")
    assert lo <= math.pi / 3 <= hi
    assert hi - lo < 1e-5


def test_split_orbital_integral_counts_vertices():
    # Modulo the split torus, the vertices within distance nu of the
    # apartment number 1 + sum_{k<=nu} (q-1) q^(k-1) = q^nu.
    for q, nu in [(2, 1), (3, 2), (5, 3)]:
        num, den = tg.orbital_integral(q, "split", str(nu), 0, 0)
        assert Fraction(num, den) == q**nu


def test_cli_round_trip():
    code, out = tg.run(["local-orbital", "--q", "3", "--type", "split", "--nu", "0", "--r", "0", "--j", "0"])
    assert code == 0
    report = json.loads(out)
    assert report["config"]["command"]["name"] == "local-orbital"
    assert report["result"]["count"] == 1


def test_config_errors_raise_value_error():
    try:
        tg.run(["volume", "--preset", "no-such-preset"])
    except ValueError as e:
        assert "no-such-preset" in str(e)
    else:
        raise AssertionError("expected ValueError")


def test_density_bound_report():
    report = json.loads(tg.density_bound("Q-2-3", 0.25))
    assert report["checks"]["self_normalization"]
    assert report["final_bound"]["lo"] <= report["final_bound"]["hi"]


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    sys.exit(0)
