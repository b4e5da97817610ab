"""Derived-field recovery, crack profiles, parameter sweeps, and file output."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .assembly import FEField, strains_at_qps
from .constitutive import (
    MaterialParams,
    strain_energy_density_m,
    stress_from_strain_m,
    thermal_stress_m,
)
from .mesh import CrackedMesh
from .tensors import SQRT2


@dataclass
class NodalField:
    """Per-mesh-node values; crack-face duplicates carry independent values."""

    mesh: CrackedMesh
    values: np.ndarray        # (n_nodes,) scalar or (n_nodes, 3) Mandel
    name: str
    units: str = ""

    @property
    def is_tensor(self) -> bool:
        return self.values.ndim == 2


@dataclass
class SweepRow:
    """Headline scalars of one solve in a parameter sweep."""

    parameter: str
    value: float
    max_stress_norm: float
    max_strain_norm: float
    max_principal_stress: float
    min_principal_stress: float
    max_principal_strain: float
    min_principal_strain: float
    converged: bool
    iterations: int


def _principal_values(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (max, min) of an array of Mandel vectors."""
    mean = 0.5 * (m[..., 0] + m[..., 1])
    rad = np.hypot(0.5 * (m[..., 0] - m[..., 1]), m[..., 2] / SQRT2)
    return mean + rad, mean - rad


def _project_to_nodes(mesh: CrackedMesh, space, qp_values: np.ndarray) -> np.ndarray:
    """Volume-weighted average of adjacent quadrature values at each mesh node.

    Each quadrature value enters with weight w*detJ*N_a(qp), the bilinear
    shape value of the node (a lumped L2 projection), so quadrature points
    nearest a node dominate its average. Exact for element-wise constants.
    qp_values has shape (ne, nqp) or (ne, nqp, m).
    """
    from .assembly import shape_functions

    Ngeo, _ = shape_functions(1, space.qp_ref)          # (nqp, 4)
    scalar = qp_values.ndim == 2
    vals = qp_values[..., None] if scalar else qp_values
    acc = np.zeros((mesh.n_nodes, vals.shape[-1]))
    wacc = np.zeros(mesh.n_nodes)
    for loc in range(4):
        w = Ngeo[:, loc][None, :] * space.detJxW        # (ne, nqp)
        np.add.at(acc, mesh.elements[:, loc], (w[..., None] * vals).sum(axis=1))
        np.add.at(wacc, mesh.elements[:, loc], w.sum(axis=1))
    out = acc / wacc[:, None]
    return out[:, 0] if scalar else out


def recover_fields(u: FEField, theta: FEField | None, p: MaterialParams
                   ) -> dict[str, NodalField]:
    """Nodal strain, stress, thermal stress, energy density, norms, principals.

    Raises InadmissibleStrain if any quadrature strain violates the bound,
    which signals a clamped, non-physical converged state.
    """
    space = u.space
    mesh = space.mesh
    eps = strains_at_qps(u)                              # (ne, nqp, 3)
    sig = stress_from_strain_m(eps, p)
    theta_qp = (np.einsum("ea,qa->eq", theta.element_values(), theta.space.N)
                if theta is not None else np.zeros(eps.shape[:2]))
    sig_th = thermal_stress_m(sig, theta_qp, p)
    W = strain_energy_density_m(eps, p)

    out: dict[str, NodalField] = {}

    def tensor_field(name, qp_vals, units):
        out[name] = NodalField(mesh, _project_to_nodes(mesh, space, qp_vals), name, units)

    def scalar_field(name, qp_vals, units=""):
        out[name] = NodalField(mesh, _project_to_nodes(mesh, space, qp_vals), name, units)

    tensor_field("strain", eps, "-")
    tensor_field("stress", sig, "stress")
    tensor_field("thermal_stress", sig_th, "stress")
    scalar_field("energy_density", W, "stress")
    scalar_field("strain_norm", np.linalg.norm(eps, axis=-1))
    scalar_field("stress_norm", np.linalg.norm(sig, axis=-1), "stress")
    smax, smin = _principal_values(sig)
    emax, emin = _principal_values(eps)
    scalar_field("principal_stress_max", smax, "stress")
    scalar_field("principal_stress_min", smin, "stress")
    scalar_field("principal_strain_max", emax)
    scalar_field("principal_strain_min", emin)
    return out


def crack_opening_profile(u: FEField, mesh: CrackedMesh) -> list[tuple[float, float]]:
    """Vertical jump u_y(upper) - u_y(lower) per face pair, mouth to tip."""
    rows = []
    for upper, lower in mesh.face_pairs:
        x = float(mesh.nodes[upper, 0])
        jump = float(u.values[2 * upper + 1] - u.values[2 * lower + 1])
        rows.append((x, jump))
    return rows


def run_sweep(base_config, parameter: str, values) -> list["SweepRow"]:
    """One full solve per parameter value on the identical mesh."""
    from .config import run_single  # deferred: config imports postprocess

    if parameter not in ("a", "b"):
        raise ValueError("sweep parameter must be 'a' or 'b'")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    rows = []
    for v in values:
        cfg = base_config.with_material(**{parameter: float(v)})
        result = run_single(cfg)
        fields = result.fields
        rows.append(SweepRow(
            parameter=parameter,
            value=float(v),
            max_stress_norm=float(fields["stress_norm"].values.max()),
            max_strain_norm=float(fields["strain_norm"].values.max()),
            max_principal_stress=float(fields["principal_stress_max"].values.max()),
            min_principal_stress=float(fields["principal_stress_min"].values.min()),
            max_principal_strain=float(fields["principal_strain_max"].values.max()),
            min_principal_strain=float(fields["principal_strain_min"].values.min()),
            converged=result.report.converged,
            iterations=result.report.iterations,
        ))
    return rows


# ---------------------------------------------------------------------------
# File emission


def write_vtk(fields: dict[str, NodalField], mesh: CrackedMesh, path) -> None:
    """Legacy ASCII VTK unstructured grid with per-point data."""
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("sltfem output\n")
        fh.write("ASCII\n")
        fh.write("DATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {mesh.n_nodes} double\n")
        for x, y in mesh.nodes:
            fh.write(f"{x:.17g} {y:.17g} 0\n")
        ne = mesh.n_elements
        fh.write(f"CELLS {ne} {5 * ne}\n")
        for conn in mesh.elements:
            fh.write(f"4 {conn[0]} {conn[1]} {conn[2]} {conn[3]}\n")
        fh.write(f"CELL_TYPES {ne}\n")
        for _ in range(ne):
            fh.write("9\n")
        fh.write(f"POINT_DATA {mesh.n_nodes}\n")
        for name, fld in fields.items():
            vals = fld.values
            if fld.is_tensor and vals.shape[1] == 3:
                fh.write(f"TENSORS {name} double\n")
                for m in vals:
                    off = m[2] / SQRT2
                    fh.write(f"{m[0]:.17g} {off:.17g} 0\n")
                    fh.write(f"{off:.17g} {m[1]:.17g} 0\n")
                    fh.write("0 0 0\n")
            elif vals.ndim == 2 and vals.shape[1] == 2:
                fh.write(f"VECTORS {name} double\n")
                for v in vals:
                    fh.write(f"{v[0]:.17g} {v[1]:.17g} 0\n")
            else:
                fh.write(f"SCALARS {name} double 1\n")
                fh.write("LOOKUP_TABLE default\n")
                for v in vals:
                    fh.write(f"{v:.17g}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(rows, path) -> None:
    """Full-precision CSV. Accepts SweepRow lists or (x, value) pair lists."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows and isinstance(rows[0], SweepRow):
        header = ["parameter", "value", "max_stress_norm", "max_strain_norm",
                  "max_principal_stress", "min_principal_stress",
                  "max_principal_strain", "min_principal_strain",
                  "converged", "iterations"]
        writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(getattr(r, h)) for h in header])
    else:
        writer.writerow(["x", "value"])
        for x, v in rows:
            writer.writerow([_fmt(float(x)), _fmt(float(v))])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
