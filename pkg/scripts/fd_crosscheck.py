#!/usr/bin/env python3
"""Jet derivatives against central finite differences across the presets.

Prints the worst relative deviation per preset for the connection
coefficients and for second-fundamental-form components.  The same comparison
runs (with assertions) in the test suite; this script is for eyeballing the
margins.
"""

import sys

sys.path.insert(0, "tests")

import numpy as np

from confsub.geometry import christoffel
from confsub.scenes import load_preset, preset_names, sample_points
from confsub.submersion import FrameField, second_fundamental_form

from fdtools import fd_christoffel, fd_sff  # noqa: E402


def main() -> int:
    print(f"{'preset':<12} {'christoffel':>14} {'sff':>14}")
    for name in preset_names():
        sc = load_preset(name)
        worst_g = worst_s = 0.0
        for p in sample_points(sc, count=5, seed=11):
            got = christoffel(sc.source, p).gamma
            want = fd_christoffel(sc.source, p)
            scale = max(1.0, float(np.max(np.abs(want))))
            worst_g = max(worst_g, float(np.max(np.abs(got - want))) / scale)
            X = FrameField(sc.fmap, "horizontal", 0)
            V = FrameField(sc.fmap, "vertical", 0)
            for pair in ((X, X), (X, V)):
                a = second_fundamental_form(sc.fmap, p, *pair)
                b = fd_sff(sc.fmap, p, *pair)
                s = max(1.0, float(np.max(np.abs(b))))
                worst_s = max(worst_s, float(np.max(np.abs(a - b))) / s)
        print(f"{name:<12} {worst_g:>14.3e} {worst_s:>14.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
