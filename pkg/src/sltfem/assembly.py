"""Q1/Q2 finite element spaces on quads and system assembly.

Geometry is bilinear (the four mesh corners); Q2 fields add edge-midpoint
and cell-center degrees of freedom on top of the mesh nodes. Crack-face
edges split automatically because the seam duplicates their corner nodes,
which changes the edge keys. Dirichlet conditions are imposed by symmetric
elimination so the reduced matrix stays SPD.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .constitutive import MaterialParams, relaxation_factor_m
from .errors import EmptyDirichlet
from .mesh import GAMMA1, GAMMA3, CrackedMesh
from .tensors import SQRT2


# ---------------------------------------------------------------------------
# Reference shape functions on [-1, 1]^2


def _lagrange_1d(order: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the 1D Lagrange basis at points x.

    Order 1: nodes {-1, 1}; order 2: nodes {-1, 0, 1}. Returns (vals, ders)
    with shape (npts, order+1).
    """
    x = np.asarray(x, dtype=float)
    if order == 1:
        vals = np.stack([0.5 * (1 - x), 0.5 * (1 + x)], axis=-1)
        ders = np.stack([-0.5 * np.ones_like(x), 0.5 * np.ones_like(x)], axis=-1)
    elif order == 2:
        vals = np.stack([0.5 * x * (x - 1), 1 - x**2, 0.5 * x * (x + 1)], axis=-1)
        ders = np.stack([x - 0.5, -2 * x, x + 0.5], axis=-1)
    else:
        raise ValueError(f"unsupported order {order}")
    return vals, ders


# Local node layout: corners CCW, then edge midpoints (bottom, right, top,
# left), then center. Entries are (i, j) indices into the 1D bases.
_Q1_LAYOUT = [(0, 0), (1, 0), (1, 1), (0, 1)]
_Q2_LAYOUT = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1), (1, 1)]


def shape_functions(order: int, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shape values (npts, nloc) and reference gradients (npts, nloc, 2)."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    vx, dx = _lagrange_1d(order, pts[:, 0])
    vy, dy = _lagrange_1d(order, pts[:, 1])
    layout = _Q1_LAYOUT if order == 1 else _Q2_LAYOUT
    N = np.stack([vx[:, i] * vy[:, j] for i, j in layout], axis=1)
    dN = np.stack(
        [np.stack([dx[:, i] * vy[:, j], vx[:, i] * dy[:, j]], axis=-1) for i, j in layout],
        axis=1,
    )
    return N, dN


def gauss_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product Gauss rule on [-1,1]^2: points (n*n, 2), weights (n*n,)."""
    x, w = np.polynomial.legendre.leggauss(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    return np.column_stack([X.ravel(), Y.ravel()]), W.ravel()


# ---------------------------------------------------------------------------
# FE spaces


@dataclass
class FESpace:
    """Scalar or 2-vector Lagrange space of order 1 or 2 on a quad mesh."""

    mesh: CrackedMesh
    order: int = 2
    components: int = 1
    n_quad: int | None = None

    # filled by __post_init__
    element_dofs: np.ndarray = field(init=False, repr=False)   # (ne, nloc) scalar dofs
    dof_coords: np.ndarray = field(init=False, repr=False)     # (n_scalar_dofs, 2)
    edge_dof: dict = field(init=False, repr=False)             # sorted corner pair -> edge dof
    qp_ref: np.ndarray = field(init=False, repr=False)
    qp_w: np.ndarray = field(init=False, repr=False)
    N: np.ndarray = field(init=False, repr=False)              # (nqp, nloc)
    dNdx: np.ndarray = field(init=False, repr=False)           # (ne, nqp, nloc, 2)
    detJxW: np.ndarray = field(init=False, repr=False)         # (ne, nqp)
    qp_xy: np.ndarray = field(init=False, repr=False)          # (ne, nqp, 2)

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.components not in (1, 2):
            raise ValueError("components must be 1 or 2")
        mesh = self.mesh
        nn = mesh.n_nodes
        if self.order == 1:
            self.element_dofs = mesh.elements.copy()
            self.dof_coords = mesh.nodes.copy()
            self.edge_dof = {}
        else:
            edge_dof: dict[tuple[int, int], int] = {}
            coords = [mesh.nodes]
            elem_dofs = np.zeros((mesh.n_elements, 9), dtype=int)
            elem_dofs[:, :4] = mesh.elements
            next_dof = nn
            edge_coords = []
            local_edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
            for e, conn in enumerate(mesh.elements):
                for le, (la, lb) in enumerate(local_edges):
                    key = tuple(sorted((int(conn[la]), int(conn[lb]))))
                    if key not in edge_dof:
                        edge_dof[key] = next_dof
                        edge_coords.append(0.5 * (mesh.nodes[key[0]] + mesh.nodes[key[1]]))
                        next_dof += 1
                    elem_dofs[e, 4 + le] = edge_dof[key]
            cell_coords = mesh.nodes[mesh.elements].mean(axis=1)
            elem_dofs[:, 8] = np.arange(next_dof, next_dof + mesh.n_elements)
            self.element_dofs = elem_dofs
            self.dof_coords = np.vstack([mesh.nodes, np.array(edge_coords), cell_coords])
            self.edge_dof = edge_dof

        nq1 = self.n_quad if self.n_quad is not None else self.order + 1
        self.qp_ref, self.qp_w = gauss_points(nq1)
        self.N, dN = shape_functions(self.order, self.qp_ref)
        Ngeo, dNgeo = shape_functions(1, self.qp_ref)
        X = mesh.nodes[mesh.elements]                           # (ne, 4, 2)
        # J[e,q,i,k] = d x_i / d xi_k
        J = np.einsum("eai,qak->eqik", X, dNgeo)
        detJ = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        if np.any(detJ <= 0):
            raise ValueError("non-positive Jacobian determinant in mesh")
        invJ = np.empty_like(J)
        invJ[..., 0, 0] = J[..., 1, 1] / detJ
        invJ[..., 1, 1] = J[..., 0, 0] / detJ
        invJ[..., 0, 1] = -J[..., 0, 1] / detJ
        invJ[..., 1, 0] = -J[..., 1, 0] / detJ
        # dN/dx_i = dN/dxi_k * (J^-1)[k,i]
        self.dNdx = np.einsum("qak,eqki->eqai", dN, invJ)
        self.detJxW = detJ * self.qp_w[None, :]
        self.qp_xy = np.einsum("eai,qa->eqi", X, Ngeo)

    @property
    def n_scalar_dofs(self) -> int:
        return self.dof_coords.shape[0]

    @property
    def n_dofs(self) -> int:
        return self.components * self.n_scalar_dofs

    @property
    def nqp(self) -> int:
        return self.qp_w.shape[0]

    def vector_dofs(self, scalar_dofs: np.ndarray) -> np.ndarray:
        """Interleaved (2*sdof + comp) ids for all components, shape (..., 2)."""
        s = np.asarray(scalar_dofs)
        return np.stack([2 * s, 2 * s + 1], axis=-1)

    def boundary_scalar_dofs(self, tag: str) -> np.ndarray:
        """Scalar dofs lying on facets with the given tag (corners + Q2 midpoints)."""
        dofs = set()
        for (na, nb), t in self.mesh.facet_tags.items():
            if t != tag:
                continue
            dofs.add(na)
            dofs.add(nb)
            if self.order == 2:
                dofs.add(self.edge_dof[tuple(sorted((na, nb)))])
        return np.array(sorted(dofs), dtype=int)


@dataclass
class FEField:
    """Degree-of-freedom vector bound to its space."""

    space: FESpace
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.space.n_dofs,):
            raise ValueError(
                f"field length {self.values.shape} != space dofs {self.space.n_dofs}")

    @classmethod
    def zero(cls, space: FESpace) -> "FEField":
        return cls(space, np.zeros(space.n_dofs))

    def element_values(self) -> np.ndarray:
        """Per-element dof values: (ne, nloc) scalar or (ne, nloc, 2) vector."""
        ed = self.space.element_dofs
        if self.space.components == 1:
            return self.values[ed]
        return self.values[self.space.vector_dofs(ed)]


@dataclass
class LinearSystem:
    """Reduced sparse system; SPD after Dirichlet elimination."""

    matrix: sp.csr_matrix
    rhs: np.ndarray


# ---------------------------------------------------------------------------
# Boundary condition specs


@dataclass(frozen=True)
class ThermalBC:
    """Dirichlet temperature on the bottom boundary; zero flux elsewhere.

    value is a constant or a callable (x, y) -> theta evaluated at dof
    coordinates of the tagged boundary.
    """

    value: object = 100.0
    tag: str = GAMMA1


@dataclass(frozen=True)
class MechanicalBC:
    """Prescribed displacement components per tag; None leaves a component free.

    Defaults: top boundary u = (0, top_uy); bottom boundary u_y = 0.
    """

    top_uy: float = 0.0
    extra: dict = field(default_factory=dict)

    def component_values(self) -> dict[str, tuple]:
        spec = {GAMMA3: (0.0, self.top_uy), GAMMA1: (None, 0.0)}
        spec.update(self.extra)
        return spec


def _evaluate_bc(value, coords: np.ndarray) -> np.ndarray:
    if callable(value):
        return np.array([float(value(x, y)) for x, y in coords])
    return np.full(coords.shape[0], float(value))


# ---------------------------------------------------------------------------
# Dirichlet elimination


def _eliminate_dirichlet(K: sp.csr_matrix, f: np.ndarray,
                         dirichlet: dict[int, float]) -> LinearSystem:
    """Symmetric elimination: zero row/col, unit diagonal, rhs lift."""
    if not dirichlet:
        raise EmptyDirichlet("no Dirichlet degrees of freedom; system is singular")
    n = f.shape[0]
    dofs = np.fromiter(dirichlet.keys(), dtype=int)
    vals = np.fromiter((dirichlet[d] for d in dofs), dtype=float)
    g = np.zeros(n)
    g[dofs] = vals
    f = f - K @ g
    f[dofs] = vals
    keep = np.ones(n, dtype=bool)
    keep[dofs] = False
    diag = sp.diags(keep.astype(float))
    K_red = diag @ K @ diag
    K_red = (K_red + sp.diags((~keep).astype(float))).tocsr()
    return LinearSystem(matrix=K_red, rhs=f)


def _assemble_csr(space: FESpace, k_local: np.ndarray, block: int) -> sp.csr_matrix:
    """Scatter per-element matrices (ne, m, m) into a global CSR matrix."""
    ed = space.element_dofs
    if block == 1:
        dofs = ed
    else:
        ne, nloc = ed.shape
        dofs = space.vector_dofs(ed).reshape(ne, 2 * nloc)
    rows = np.repeat(dofs, dofs.shape[1], axis=1).ravel()
    cols = np.tile(dofs, (1, dofs.shape[1])).ravel()
    n = block * space.n_scalar_dofs
    K = sp.coo_matrix((k_local.ravel(), (rows, cols)), shape=(n, n))
    return K.tocsr()


# ---------------------------------------------------------------------------
# Thermal problem


def thermal_dirichlet(space: FESpace, bc: ThermalBC) -> dict[int, float]:
    dofs = space.boundary_scalar_dofs(bc.tag)
    if dofs.size == 0:
        raise EmptyDirichlet(f"no boundary dofs tagged {bc.tag}")
    vals = _evaluate_bc(bc.value, space.dof_coords[dofs])
    return {int(d): float(v) for d, v in zip(dofs, vals)}


def assemble_thermal(space: FESpace, p: MaterialParams, Q_source=0.0,
                     bc: ThermalBC = ThermalBC()) -> LinearSystem:
    """Steady heat conduction: K_ij = int k grad(phi_i).grad(phi_j), f_i = int Q phi_i."""
    if space.components != 1:
        raise ValueError("thermal problem needs a scalar space")
    k_local = p.k * np.einsum("eqai,eqbi,eq->eab", space.dNdx, space.dNdx, space.detJxW)
    K = _assemble_csr(space, k_local, block=1)
    if callable(Q_source):
        Qq = np.vectorize(Q_source)(space.qp_xy[..., 0], space.qp_xy[..., 1])
    else:
        Qq = np.full((space.mesh.n_elements, space.nqp), float(Q_source))
    f_local = np.einsum("eq,qa,eq->ea", Qq, space.N, space.detJxW)
    f = np.zeros(space.n_scalar_dofs)
    np.add.at(f, space.element_dofs.ravel(), f_local.ravel())
    return _eliminate_dirichlet(K, f, thermal_dirichlet(space, bc))


def scalar_gradients(field: FEField) -> np.ndarray:
    """Gradient of a scalar field at all quadrature points, (ne, nqp, 2)."""
    vals = field.element_values()
    return np.einsum("ea,eqai->eqi", vals, field.space.dNdx)


def thermal_gradient_at_qp(theta: FEField, element: int, qp: int) -> np.ndarray:
    """grad(theta_h) at one quadrature point of one element."""
    vals = theta.element_values()[element]
    return np.einsum("a,ai->i", vals, theta.space.dNdx[element, qp])


# ---------------------------------------------------------------------------
# Mechanical problem


def strain_displacement(space: FESpace) -> np.ndarray:
    """Mandel B-matrices: (ne, nqp, 3, 2*nloc) with eps_mandel = B @ u_local."""
    ne, nqp, nloc, _ = space.dNdx.shape
    B = np.zeros((ne, nqp, 3, 2 * nloc))
    dN = space.dNdx
    B[:, :, 0, 0::2] = dN[..., 0]
    B[:, :, 1, 1::2] = dN[..., 1]
    B[:, :, 2, 0::2] = dN[..., 1] / SQRT2
    B[:, :, 2, 1::2] = dN[..., 0] / SQRT2
    return B


def strains_at_qps(u: FEField, B: np.ndarray | None = None) -> np.ndarray:
    """Mandel strain at every quadrature point, (ne, nqp, 3)."""
    space = u.space
    if B is None:
        B = strain_displacement(space)
    u_loc = u.element_values().reshape(space.mesh.n_elements, -1)
    return np.einsum("eqim,em->eqi", B, u_loc)


def evaluate_strain(u: FEField, element: int, qp: int):
    """Symmetric gradient of a vector field at one quadrature point."""
    from .tensors import SymTensor2

    eps = strains_at_qps(u)[element, qp]
    return SymTensor2.from_mandel(eps)


def mechanical_dirichlet(space: FESpace, bc: MechanicalBC) -> dict[int, float]:
    dirichlet: dict[int, float] = {}
    for tag, comps in bc.component_values().items():
        sdofs = space.boundary_scalar_dofs(tag)
        for comp, value in enumerate(comps):
            if value is None:
                continue
            vals = _evaluate_bc(value, space.dof_coords[sdofs])
            for d, v in zip(sdofs, vals):
                dirichlet[int(2 * d + comp)] = float(v)
    if not dirichlet:
        raise EmptyDirichlet("mechanical problem needs displacement Dirichlet data")
    return dirichlet


def assemble_mechanical(space: FESpace, p: MaterialParams, theta: FEField | None,
                        u_prev: FEField, bc: MechanicalBC,
                        B: np.ndarray | None = None) -> tuple[LinearSystem, int]:
    """Picard-linearized elasticity with the thermal-gradient body force.

    The nonlinear multiplier phi is evaluated from u_prev at each quadrature
    point. Returns the reduced system and the number of clamp events.
    """
    if space.components != 2:
        raise ValueError("mechanical problem needs a 2-vector space")
    if B is None:
        B = strain_displacement(space)
    from .tensors import energy_norm_m

    eps_prev = strains_at_qps(u_prev, B)
    t_prev = energy_norm_m(eps_prev, p.E.entries)
    phi, clamps = relaxation_factor_m(t_prev, p)
    scale = phi * space.detJxW
    k_local = np.einsum("eqim,eq,ij,eqjn->emn", B, scale, p.E.entries, B, optimize=True)
    K = _assemble_csr(space, k_local, block=2)

    f = np.zeros(space.n_dofs)
    if theta is not None:
        grad_t = scalar_gradients(theta)
        f_local = -p.alpha * np.einsum("eqi,qa,eq->eai", grad_t, space.N, space.detJxW)
        vdofs = space.vector_dofs(space.element_dofs)          # (ne, nloc, 2)
        np.add.at(f, vdofs.ravel(), f_local.ravel())
    sys = _eliminate_dirichlet(K, f, mechanical_dirichlet(space, bc))
    return sys, clamps


def mass_matrix(space: FESpace) -> sp.csr_matrix:
    """Consistent scalar mass matrix of the space (per component)."""
    m_local = np.einsum("qa,qb,eq->eab", space.N, space.N, space.detJxW)
    return _assemble_csr(space, m_local, block=1)


def l2_norm(space: FESpace, dof_values: np.ndarray, M: sp.csr_matrix | None = None) -> float:
    """L2 norm of a field given by dof values, via the consistent mass matrix."""
    if M is None:
        M = mass_matrix(space)
    if space.components == 1:
        return float(np.sqrt(max(dof_values @ (M @ dof_values), 0.0)))
    total = 0.0
    for c in range(2):
        v = dof_values[c::2]
        total += v @ (M @ v)
    return float(np.sqrt(max(total, 0.0)))
