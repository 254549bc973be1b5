"""From the wave equation to the heat semigroup and the extension solution.

The cosine family C(t) f = cos(t sqrt(-A)) f (wave evolution with zero
initial velocity) determines the holomorphic semigroup through a Weyl-
transformed Gaussian average, and the extension solution through Poisson-
type kernels with algebraic tails.  At sigma = 1/2 the fractional-data
wave form switches to a logarithmic kernel.
"""

import numpy as np

from fracext import (
    build_laplacian_1d,
    cosine_family,
    cosine_to_semigroup,
    heat_semigroup,
    integrate_family,
    solve_cosine_form,
    solve_cosine_fractional,
    solve_semigroup_form,
)

A = build_laplacian_1d(3, 1.0, "dirichlet")
rng = np.random.default_rng(1)
f = rng.normal(size=3)

print("cosine family -> semigroup (Gaussian Weyl average):")
heat = heat_semigroup(A)
for alpha, fam in ((0.0, cosine_family(A)),
                   (1.0, integrate_family(cosine_family(A), 1.0))):
    for z in (0.5, 1.0):
        got = cosine_to_semigroup(fam, z, f)
        ref = heat.evaluate(z, f)
        err = np.linalg.norm(got - ref) / np.linalg.norm(ref)
        print(f"  alpha={alpha:g}, z={z}: deviation from exp(zA) f = {err:.2e}")

print("\nextension solution, wave-side vs heat-side kernels:")
c0 = cosine_family(A)
for sigma in (0.25, 0.5, 0.75):
    for y in (0.7, 1.3):
        base = solve_semigroup_form(heat, sigma, y, f).value
        wave = solve_cosine_form(c0, sigma, y, f).value
        frac = solve_cosine_fractional(c0, sigma, y, f).value
        tag = " (log kernel)" if sigma == 0.5 else ""
        print(f"  sigma={sigma}, y={y}: |wave-heat| = "
              f"{np.linalg.norm(wave - base):.2e}, |wave-frac-heat| = "
              f"{np.linalg.norm(frac - base):.2e}{tag}")
