"""Run configuration: parsing, validation, orchestration of a full solve.

Config files are line-based `key = value` pairs with `#` comments and
dotted keys (e.g. `material.b = 0.02`). Every omitted key has a documented
default; command-line `--key value` flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .assembly import FESpace, MechanicalBC, ThermalBC
from .constitutive import MaterialParams
from .errors import InvariantViolation, TypeMismatch, UnknownKey
from .mesh import CrackedMesh, CrackSpec, build_cracked_grid, build_grid
from .solver import FEField, PicardConfig, SolveReport, picard_solve, solve_thermal


@dataclass(frozen=True)
class RunConfig:
    """Fully validated configuration of one solve (or sweep)."""

    nx: int = 32
    ny: int = 32
    crack: CrackSpec | None = CrackSpec()
    element_order: int = 2
    lam: float = 1.0
    mu: float = 1.0
    gamma: float = 1.0
    fiber_angle: float = 0.0
    a: float = 0.5
    b: float = 0.02
    alpha_T: float = 0.01
    k: float = 1.0
    thermal_kind: str = "constant"      # constant | parabolic
    theta0: float = 100.0               # constant boundary temperature
    thermal_c: float = 400.0            # parabolic coefficient: c*x*(1-x)
    Q: float = 0.0                      # internal heat source
    top_uy: float = 0.0                 # prescribed vertical displacement d on top
    tol: float = 1e-8
    max_iter: int = 100
    damping: float = 1.0
    vtk_path: str | None = None
    csv_path: str | None = None
    sweep_parameter: str | None = None
    sweep_values: tuple[float, ...] = ()

    def material(self) -> MaterialParams:
        return MaterialParams(lam=self.lam, mu=self.mu, gamma=self.gamma,
                              fiber_angle=self.fiber_angle, a=self.a, b=self.b,
                              alpha_T=self.alpha_T, k=self.k)

    def build_mesh(self) -> CrackedMesh:
        if self.crack is None:
            return build_grid(self.nx, self.ny)
        return build_cracked_grid(self.nx, self.ny, self.crack)

    def thermal_bc(self) -> ThermalBC:
        if self.thermal_kind == "constant":
            return ThermalBC(value=self.theta0)
        c = self.thermal_c
        return ThermalBC(value=lambda x, y: c * x * (1.0 - x))

    def mechanical_bc(self) -> MechanicalBC:
        return MechanicalBC(top_uy=self.top_uy)

    def picard(self) -> PicardConfig:
        return PicardConfig(tol=self.tol, max_iter=self.max_iter, damping=self.damping)

    def with_material(self, **kw) -> "RunConfig":
        return replace(self, **kw)


# key -> (attribute, parser)
def _parse_bool(s: str) -> bool:
    if s.lower() in ("true", "yes", "1", "on"):
        return True
    if s.lower() in ("false", "no", "0", "off", "none"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_values(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.replace(",", " ").split())


_KEYS: dict[str, tuple[str, object]] = {
    "mesh.nx": ("nx", int),
    "mesh.ny": ("ny", int),
    "mesh.crack": ("_crack_on", _parse_bool),
    "mesh.crack_y": ("_crack_y", float),
    "mesh.crack_mouth": ("_crack_mouth", str),
    "mesh.crack_tip_x": ("_crack_tip_x", float),
    "element_order": ("element_order", int),
    "material.lambda": ("lam", float),
    "material.mu": ("mu", float),
    "material.gamma": ("gamma", float),
    "material.fiber_angle": ("fiber_angle", float),
    "material.a": ("a", float),
    "material.b": ("b", float),
    "material.alpha_T": ("alpha_T", float),
    "material.k": ("k", float),
    "thermal_bc.kind": ("thermal_kind", str),
    "thermal_bc.theta0": ("theta0", float),
    "thermal_bc.c": ("thermal_c", float),
    "thermal_bc.Q": ("Q", float),
    "mechanical_bc.top_uy": ("top_uy", float),
    "picard.tol": ("tol", float),
    "picard.max_iter": ("max_iter", int),
    "picard.damping": ("damping", float),
    "outputs.vtk_path": ("vtk_path", str),
    "outputs.csv_path": ("csv_path", str),
    "sweep.parameter": ("sweep_parameter", str),
    "sweep.values": ("sweep_values", _parse_values),
}


def _validate(cfg: RunConfig, lines: dict[str, int] | None = None) -> RunConfig:
    lines = lines or {}

    def bad(key, msg):
        raise InvariantViolation(key, lines.get(key, 0), msg)

    if cfg.nx < 1 or cfg.ny < 1:
        bad("mesh.nx", f"mesh {cfg.nx}x{cfg.ny} must be at least 1x1")
    if cfg.element_order not in (1, 2):
        bad("element_order", f"{cfg.element_order} must be 1 or 2")
    if cfg.thermal_kind not in ("constant", "parabolic"):
        bad("thermal_bc.kind", f"{cfg.thermal_kind!r} must be constant or parabolic")
    if cfg.sweep_parameter not in (None, "a", "b"):
        bad("sweep.parameter", f"{cfg.sweep_parameter!r} must be a or b")
    checks = [
        ("material.mu", cfg.mu > 0, f"mu={cfg.mu} must be positive"),
        ("material.a", cfg.a > 0, f"a={cfg.a} must be positive"),
        ("material.b", cfg.b >= 0, f"b={cfg.b} must be nonnegative"),
        ("material.alpha_T", cfg.alpha_T >= 0, f"alpha_T={cfg.alpha_T} must be nonnegative"),
        ("material.k", cfg.k > 0, f"k={cfg.k} must be positive"),
        ("picard.tol", cfg.tol > 0, f"tol={cfg.tol} must be positive"),
        ("picard.max_iter", cfg.max_iter >= 1, f"max_iter={cfg.max_iter} must be >= 1"),
        ("picard.damping", 0 < cfg.damping <= 1, f"damping={cfg.damping} must lie in (0, 1]"),
    ]
    for key, ok, msg in checks:
        if not ok:
            bad(key, msg)
    try:
        cfg.material()   # SPD check of the stiffness
    except Exception as exc:
        bad("material.gamma", str(exc))
    return cfg


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse `key = value` text plus CLI-style overrides into a RunConfig."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise TypeMismatch(stripped, lineno, "expected 'key = value'")
        key, value = (s.strip() for s in stripped.split("=", 1))
        raw[key] = (value, lineno)
    for key, value in (overrides or {}).items():
        raw[key] = (value, 0)

    fields: dict[str, object] = {}
    crack_extra: dict[str, object] = {}
    crack_on = True
    for key, (value, lineno) in raw.items():
        if key not in _KEYS:
            raise UnknownKey(key, lineno, "not a recognized configuration key")
        attr, parser = _KEYS[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise TypeMismatch(key, lineno, str(exc)) from exc
        if attr == "_crack_on":
            crack_on = parsed
        elif attr == "_crack_y":
            crack_extra["y_line"] = parsed
        elif attr == "_crack_mouth":
            crack_extra["mouth_edge"] = parsed
        elif attr == "_crack_tip_x":
            crack_extra["tip_x"] = parsed
        else:
            fields[attr] = parsed

    if not crack_on:
        fields["crack"] = None
    elif crack_extra:
        try:
            fields["crack"] = CrackSpec(**crack_extra)
        except ValueError as exc:
            raise InvariantViolation("mesh.crack_*", 0, str(exc)) from exc

    cfg = RunConfig(**fields)
    return _validate(cfg, lines={k: ln for k, (_, ln) in raw.items()})


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of parse_config: emits every key so a round trip is identity."""
    lines = []

    def emit(key, value):
        lines.append(f"{key} = {value}")

    emit("mesh.nx", cfg.nx)
    emit("mesh.ny", cfg.ny)
    emit("mesh.crack", "true" if cfg.crack is not None else "false")
    if cfg.crack is not None:
        emit("mesh.crack_y", f"{cfg.crack.y_line:.17g}")
        emit("mesh.crack_mouth", cfg.crack.mouth_edge)
        emit("mesh.crack_tip_x", f"{cfg.crack.tip_x:.17g}")
    emit("element_order", cfg.element_order)
    emit("material.lambda", f"{cfg.lam:.17g}")
    emit("material.mu", f"{cfg.mu:.17g}")
    emit("material.gamma", f"{cfg.gamma:.17g}")
    emit("material.fiber_angle", f"{cfg.fiber_angle:.17g}")
    emit("material.a", f"{cfg.a:.17g}")
    emit("material.b", f"{cfg.b:.17g}")
    emit("material.alpha_T", f"{cfg.alpha_T:.17g}")
    emit("material.k", f"{cfg.k:.17g}")
    emit("thermal_bc.kind", cfg.thermal_kind)
    emit("thermal_bc.theta0", f"{cfg.theta0:.17g}")
    emit("thermal_bc.c", f"{cfg.thermal_c:.17g}")
    emit("thermal_bc.Q", f"{cfg.Q:.17g}")
    emit("mechanical_bc.top_uy", f"{cfg.top_uy:.17g}")
    emit("picard.tol", f"{cfg.tol:.17g}")
    emit("picard.max_iter", cfg.max_iter)
    emit("picard.damping", f"{cfg.damping:.17g}")
    if cfg.vtk_path:
        emit("outputs.vtk_path", cfg.vtk_path)
    if cfg.csv_path:
        emit("outputs.csv_path", cfg.csv_path)
    if cfg.sweep_parameter:
        emit("sweep.parameter", cfg.sweep_parameter)
        emit("sweep.values", ",".join(f"{v:.17g}" for v in cfg.sweep_values))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Orchestration


@dataclass
class RunResult:
    """Everything produced by one sequential thermo-mechanical solve."""

    config: RunConfig
    mesh: CrackedMesh
    theta: FEField
    u: FEField
    report: SolveReport
    fields: dict


def run_single(cfg: RunConfig) -> RunResult:
    """Thermal solve, Picard mechanical solve, field recovery."""
    from .postprocess import recover_fields

    mesh = cfg.build_mesh()
    p = cfg.material()
    theta_space = FESpace(mesh, order=cfg.element_order, components=1)
    u_space = FESpace(mesh, order=cfg.element_order, components=2)
    theta = solve_thermal(theta_space, p, Q_source=cfg.Q, bc=cfg.thermal_bc())
    u, report = picard_solve(u_space, p, theta, cfg.mechanical_bc(), cfg.picard())
    fields = recover_fields(u, theta, p)
    return RunResult(config=cfg, mesh=mesh, theta=theta, u=u, report=report, fields=fields)
