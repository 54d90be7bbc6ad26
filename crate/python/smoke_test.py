"""Smoke test for the bergman_py extension module.

Install the module with

    pip install --no-build-isolation -e crates/bergman-py

or build it with

    cargo build --release -p bergman-py --features extension-module

and run `python3 python/smoke_test.py`. When the package is not installed
the script loads target/release/libbergman_py.so, or the library named by
BERGMAN_PY_LIB.
"""

import importlib.machinery
import importlib.util
import json
import math
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    if "BERGMAN_PY_LIB" not in os.environ:
        try:
            import bergman_py

            return bergman_py
        except ImportError:
            pass
    path = os.environ.get("BERGMAN_PY_LIB") or os.path.join(ROOT, "target", "release", "libbergman_py.so")
    if not os.path.exists(path):
        sys.exit(f"extension not found at {path}; build it with cargo first")
    loader = importlib.machinery.ExtensionFileLoader("bergman_py", path)
    spec = importlib.util.spec_from_loader("bergman_py", loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    bp = load()

    # Distance from the origin is atanh |z|.
    assert close(bp.bergman_distance([0j], [0.5 + 0j]), math.atanh(0.5), 1e-14)
    z, w = [0.3 + 0.1j, -0.2j], [0.1 - 0.4j, 0.25 + 0j]
    a = [0.2 + 0.2j, 0.1 + 0j]
    moved = bp.bergman_distance(bp.mobius_map(a, z), bp.mobius_map(a, w))
    assert close(moved, bp.bergman_distance(z, w), 1e-12)

    zbar = bp.Symbol.zbar()
    assert repr(zbar).startswith("Symbol(")
    assert close(bp.mean_oscillation(zbar, [0j]), 2 ** -0.5, 1e-12)
    for s in (0.5, 0.1, 0.02):
        assert close(bp.mean_oscillation_polar(zbar, s), bp.mo_zbar_closed_form(s), 1e-9)
    # A symbol vanishing on the circle keeps MO / s² steady far below machine epsilon.
    deep = bp.Symbol("[[0, 1, 1.0, 0.0, 4]]")
    ratios = [bp.mean_oscillation_polar(deep, s, gamma=2.0) / s**2 for s in (1e-12, 1e-30, 1e-60)]
    assert max(ratios) - min(ratios) < 1e-9 * ratios[0]

    f = bp.Symbol("[[0, 1, 1.0, 0.0, 4]]")
    assert not f.is_constant() and f.dim == 1
    assert bp.Symbol("[[0, 0, 2.0, 0.0]]").is_constant()

    numeric = bp.hankel_singular_values(zbar, 64, 2.0)
    exact = bp.hankel_zbar_spectrum_exact(2.0, 20)
    assert max(abs(x - y) for x, y in zip(numeric, exact)) < 1e-10

    direct = sum(((k + 1) * (k + 2)) ** -0.6 for k in range(5000))
    assert close(bp.commutator_schatten_partial_sum(zbar, 1.2, 5000.0), direct, 1e-9 * direct)

    tree = bp.Tree.dyadic(1, 6)
    assert tree.depth == 6 and len(tree) == sum(tree.level_size(l) for l in range(7))
    child = tree.children(0)[0]
    assert tree.parent(child) == 0
    assert tree.locate(tree.center(child)) == child
    lines = tree.to_jsonl().splitlines()
    assert len(lines) == len(tree) and json.loads(lines[0])["level"] == 0

    assert close(bp.cutoff('{"gamma": 2.0}'), 0.5, 1e-15)
    assert "mo-eval" in bp.checks()
    report = json.loads(bp.verify("mo-eval"))
    assert report["experiment"] == "mo-eval"
    assert all(a["passed"] for a in report["assertions"])

    try:
        bp.verify("no-such-check")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown check accepted")

    print("bergman_py smoke test passed")


if __name__ == "__main__":
    main()
