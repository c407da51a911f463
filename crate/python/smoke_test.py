"""Smoke test for the polyinv extension module.

Build and run from the repository root:

    cargo build --release -p polyinv-py --features extension-module
    cp target/release/libpolyinv.so python/polyinv.so
    python3 python/smoke_test.py
"""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import polyinv  # noqa: E402


def main():
    square = polyinv.Polytope.unit_box(2)
    assert len(square.vertices()) == 4
    assert math.isclose(square.gauge([0.5, -2.0]), 2.0)
    assert math.isclose(polyinv.inclusion_ratio(square, square), 1.0)

    rotation = polyinv.SwitchedLinearSystem([[[0.0, -0.9], [0.9, 0.0]]])
    assert rotation.apply(1, [1.0, 0.0]) == [0.0, 0.9]

    system = polyinv.SwitchedLinearSystem.generate(2, 4, decay=0.95, seed=1)
    samples = system.sample(2000, seed=2)
    assert len(samples) == 2000
    x, sigma, y = samples.pairs()[0]
    assert 1 <= sigma <= 4 and math.isclose(math.hypot(*x), 1.0)

    learned, k_tilde = polyinv.synthesize(samples)
    model, k_star = polyinv.model_based(system)
    ratio = polyinv.inclusion_ratio(learned, model)
    assert 0.9 < ratio <= 1.0 + 1e-9, ratio
    restored = polyinv.Polytope.from_json(learned.to_json())
    assert restored.vertices() == learned.vertices()

    lam, report = polyinv.certify_contraction(learned, 0.05, len(samples), samples.mode_count)
    assert lam is not None and json.loads(report)["type"] == "contraction"
    lam_eps, report, certified = polyinv.certify_scenario(samples, beta=0.001)
    assert json.loads(report)["type"] == "scenario"
    assert certified.vertices() == learned.vertices()

    try:
        polyinv.Polytope.unit_box(9)
    except ValueError:
        pass
    else:
        raise AssertionError("dimension 9 accepted")

    print(f"k_tilde={k_tilde} k_star={k_star} lambda_star={ratio:.4f} "
          f"lambda_B={lam:.4f} lambda_eps={lam_eps:.4f}")
    print("smoke test passed")


if __name__ == "__main__":
    main()
