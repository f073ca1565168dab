"""
The Dyson equation and the cusp at the unit circle
==================================================

On the imaginary axis the Stieltjes transform of the Hermitized matrix is
approximated by ``i y`` where ``y`` solves a scalar cubic. Inside the unit
disk ``y`` tends to a positive constant as ``eta -> 0``, outside it vanishes
linearly, and exactly on the circle it decays like ``eta^(1/3)``.
"""

import numpy as np

from edgelab import dyson
from edgelab.stats import fit_power_law

# Solve on a log grid of eta for three values of |z|.
etas = np.geomspace(1e-9, 1e-1, 9)
print("eta        |z|=0.5     |z|=1       |z|=1.5")
for eta in etas:
    ys = [dyson.solve_mhat(z, eta).mhat.imag for z in (0.5, 1.0, 1.5)]
    print(f"{eta:8.1e}   " + "  ".join(f"{y:10.3e}" for y in ys))

# At |z| = 1 the slope of log y against log eta is 1/3.
small = np.geomspace(1e-9, 1e-3, 40)
fit = fit_power_law(small, dyson.im_mhat(1.0, small))
print(f"\nfitted exponent at |z|=1: {fit.slope:.4f}")

# The solver reports the residual of the equation it solved.
sol = dyson.solve_mhat(1.0, 1e-6)
print(f"residual at eta=1e-6: {sol.residual:.1e}, u = {sol.u:.6f}")
print("M matrix:\n", dyson.build_M(sol))
