"""Convergence-rate check for the heat-conduction solve.

Pick theta*(x, y) = cos(pi x) (1 - y)^2, which satisfies the natural
(zero-flux) condition on the left, right, and top edges, and manufacture
the source Q = k cos(pi x) (pi^2 (1 - y)^2 - 2) that makes theta* the
exact solution with theta = cos(pi x) prescribed on the bottom edge.

Solving on a ladder of uncracked grids and measuring the error of the
dof values (a discrete L2 norm over the nodes) gives h^2 for bilinear
elements and h^4 for biquadratic: on this tensor-product grid the
biquadratic nodal values superconverge one order past the true-L2 rate
of h^3.

Run:  python3 demos/thermal_convergence.py
"""

import numpy as np

from sltfem import FESpace, MaterialParams, ThermalBC, build_grid, solve_thermal
from sltfem.assembly import l2_norm

k = 1.0
p = MaterialParams(k=k)

theta_exact = lambda x, y: np.cos(np.pi * x) * (1.0 - y) ** 2
Q = lambda x, y: k * np.cos(np.pi * x) * (np.pi ** 2 * (1.0 - y) ** 2 - 2.0)
bc = ThermalBC(value=lambda x, y: np.cos(np.pi * x))

for order in (1, 2):
    print(f"element order {order}:")
    errors = []
    for n in (16, 32, 64, 128):
        space = FESpace(build_grid(n, n), order=order, components=1)
        theta = solve_thermal(space, p, Q_source=Q, bc=bc)
        exact = theta_exact(space.dof_coords[:, 0], space.dof_coords[:, 1])
        err = l2_norm(space, theta.values - exact)
        rate = np.log2(errors[-1] / err) if errors else float("nan")
        errors.append(err)
        print(f"  n={n:4d}  L2 error = {err:.4e}  rate = {rate:5.2f}")
    print()
