"""The compiled trajectory kernels must agree with the field-generic path."""

import os
import subprocess
import sys

import numpy as np

from braidvol import kernels
from braidvol.braid import parse_braid, run_pattern
from braidvol.kernels import letters_to_arrays, residual_arrays, trajectory_arrays

BRAIDS = ["1 1 1", "1 -2 1 -2", "n=4; 1 2 3", "-1 -1 -1 2 -1 2"]


def test_kernel_matches_generic_path():
    rng = np.random.default_rng(42)
    for text in BRAIDS:
        braid = parse_braid(text)
        gens, signs = letters_to_arrays(braid.letters)
        for _ in range(10):
            x0 = rng.normal(0.5, 1.0, 3 * braid.n + 1) + 1j * rng.normal(0, 1.0, 3 * braid.n + 1)
            traj = run_pattern(braid, tuple(x0))
            xs, centers = trajectory_arrays(x0, gens, signs)
            assert np.allclose(xs, np.array(traj.seeds), rtol=1e-12, atol=1e-12)
            assert np.allclose(centers, np.array(traj.centers), rtol=1e-12, atol=1e-12)
            res = residual_arrays(x0, gens, signs)
            assert np.allclose(res, np.array(traj.residual()), rtol=1e-12, atol=1e-12)


def test_kernel_empty_word():
    x0 = np.array([1 + 2j, 3.0, 4.0, 5.0])
    gens, signs = letters_to_arrays(())
    xs, centers = trajectory_arrays(x0, gens, signs)
    assert xs.shape == (1, 4)
    assert centers.shape == (0,)
    assert np.all(residual_arrays(x0, gens, signs) == 0)


def test_kernel_degenerate_goes_nonfinite():
    braid = parse_braid("1 1 1")
    gens, signs = letters_to_arrays(braid.letters)
    x0 = np.ones(7, dtype=complex)
    x0[1] = 0.0
    res = residual_arrays(x0, gens, signs)
    assert not np.all(np.isfinite(res))


def test_numpy_fallback_selected_by_env_flag():
    code = (
        "import numpy as np\n"
        "from braidvol import kernels\n"
        "from braidvol.kernels import letters_to_arrays, trajectory_arrays\n"
        "from braidvol.braid import parse_braid\n"
        "assert not kernels.USING_NUMBA\n"
        "b = parse_braid('1 -2 1 -2')\n"
        "g, s = letters_to_arrays(b.letters)\n"
        "rng = np.random.default_rng(0)\n"
        "x0 = rng.normal(1, 0.5, 10) + 1j * rng.normal(0, 0.5, 10)\n"
        "xs, c = trajectory_arrays(x0, g, s)\n"
        "print(complex(xs[-1][4]))\n"
    )
    env = dict(os.environ, BRAIDVOL_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    # same computation on this side (numba allowed); paths may differ by
    # instruction scheduling, so compare numerically rather than bitwise
    braid = parse_braid("1 -2 1 -2")
    g, s = letters_to_arrays(braid.letters)
    rng = np.random.default_rng(0)
    x0 = rng.normal(1, 0.5, 10) + 1j * rng.normal(0, 0.5, 10)
    xs, _ = trajectory_arrays(x0, g, s)
    fallback_value = complex(out.stdout.strip())
    assert abs(fallback_value - complex(xs[-1][4])) < 1e-12 * abs(fallback_value)
