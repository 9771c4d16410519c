"""Smoke test for the anisoflow_py extension.

Build first:
    cargo build --release -p anisoflow-py --features extension-module
then run:
    python3 python/smoke_test.py
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libanisoflow_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libanisoflow_py.so not found; build the extension first (see module docstring)")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "anisoflow_py.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("anisoflow_py", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    af = load()
    n = 16
    h = 2 * math.pi / n
    samples = [math.sin(i * h) for i in range(n) for _ in range(n) for _ in range(n)]
    l2 = af.norm(samples, (n, n, n), "L2")
    expect = (2 * math.pi) ** 1.5 / math.sqrt(2)
    assert abs(l2 - expect) < 1e-12 * expect, (l2, expect)
    assert abs(af.norm(samples, (n, n, n), "H(1)") - math.sqrt(0.5)) < 1e-14

    assert abs(af.alpha(1.8) - (1 / 1.8 - 0.5)) < 1e-16
    af.check_parameters(5.0, 1.8, 0.03)
    try:
        af.check_parameters(4.0, 1.8, 0.03)
    except ValueError as e:
        assert "]4, 2r/(2-r)[" in str(e), e
    else:
        raise AssertionError("p = 4 accepted")

    rep = af.check("k", count=4, resolution=16)
    assert rep["passed"] and len(rep["max_ratio"]) == 2, rep

    with tempfile.TemporaryDirectory() as d:
        cfg = pathlib.Path(d) / "run.cfg"
        cfg.write_text(
            "grid.n = 16\nsolver.nu = 0.1\nsolver.dt = 0.01\nsolver.t_end = 0.03\n"
            "init.kind = taylor_green\noutput.dir = out\n"
        )
        csv = pathlib.Path(af.run(str(cfg)))
        assert len(csv.read_text().splitlines()) == 5

    print("anisoflow_py smoke test passed")


if __name__ == "__main__":
    main()
