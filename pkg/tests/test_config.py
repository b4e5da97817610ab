import math

import pytest

from sltfem import InvariantViolation, TypeMismatch, UnknownKey
from sltfem.config import RunConfig, parse_config, run_single, serialize_config
from sltfem.mesh import CrackSpec


class TestDefaults:
    def test_empty_text_gives_documented_defaults(self):
        cfg = parse_config("")
        assert cfg.nx == 32 and cfg.ny == 32
        assert cfg.element_order == 2
        assert cfg.fiber_angle == 0.0
        assert cfg.a == 0.5 and cfg.b == 0.02
        assert cfg.tol == 1e-8 and cfg.max_iter == 100
        assert cfg.lam == 1.0 and cfg.mu == 1.0 and cfg.gamma == 1.0
        assert cfg.alpha_T == 0.01 and cfg.k == 1.0
        assert cfg.crack == CrackSpec()
        assert cfg.top_uy == 0.0 and cfg.Q == 0.0

    def test_parabolic_profile_peaks_at_100(self):
        cfg = parse_config("thermal_bc.kind = parabolic\n")
        f = cfg.thermal_bc().value
        assert f(0.5, 0.0) == pytest.approx(100.0)
        assert f(0.0, 0.0) == 0.0


class TestParsing:
    def test_comments_and_blank_lines(self):
        cfg = parse_config("# leading comment\n\nmesh.nx = 8  # trailing\n")
        assert cfg.nx == 8

    def test_dotted_keys(self):
        cfg = parse_config("material.lambda = 2.5\nmaterial.fiber_angle = 1.5707963\n")
        assert cfg.lam == 2.5
        assert cfg.fiber_angle == pytest.approx(math.pi / 2, rel=1e-6)

    def test_overrides_win(self):
        cfg = parse_config("mesh.nx = 8\n", overrides={"mesh.nx": "16"})
        assert cfg.nx == 16

    def test_crack_disabled(self):
        cfg = parse_config("mesh.crack = false\n")
        assert cfg.crack is None
        assert cfg.build_mesh().tip_node is None

    def test_crack_geometry_keys(self):
        cfg = parse_config("mesh.crack_tip_x = 0.75\nmesh.crack_mouth = right\n")
        assert cfg.crack.tip_x == 0.75
        assert cfg.crack.mouth_edge == "right"

    def test_sweep_values_list(self):
        cfg = parse_config("sweep.parameter = b\nsweep.values = 0, 0.01, 0.02\n")
        assert cfg.sweep_values == (0.0, 0.01, 0.02)


class TestErrors:
    def test_unknown_key_names_key_and_line(self):
        with pytest.raises(UnknownKey) as exc:
            parse_config("# comment\nmesh.nz = 4\n")
        assert "mesh.nz" in str(exc.value)
        assert exc.value.line == 2

    def test_type_mismatch_names_key_and_line(self):
        with pytest.raises(TypeMismatch) as exc:
            parse_config("mesh.nx = four\n")
        assert "mesh.nx" in str(exc.value)
        assert exc.value.line == 1

    def test_malformed_line(self):
        with pytest.raises(TypeMismatch):
            parse_config("just some words\n")

    def test_negative_b_rejected(self):
        with pytest.raises(InvariantViolation) as exc:
            parse_config("material.b = -1\n")
        assert "material.b" in str(exc.value)
        assert exc.value.line == 1

    @pytest.mark.parametrize("text,key", [
        ("mesh.nx = 0\n", "mesh.nx"),
        ("element_order = 3\n", "element_order"),
        ("thermal_bc.kind = cubic\n", "thermal_bc.kind"),
        ("material.mu = -2\n", "material.mu"),
        ("picard.tol = 0\n", "picard.tol"),
        ("picard.damping = 2\n", "picard.damping"),
        ("sweep.parameter = k\n", "sweep.parameter"),
    ])
    def test_invariants_name_offending_key(self, text, key):
        with pytest.raises(InvariantViolation) as exc:
            parse_config(text)
        assert key in str(exc.value)

    def test_indefinite_stiffness_rejected(self):
        with pytest.raises(InvariantViolation):
            parse_config("material.lambda = -10\nmaterial.gamma = 0\n")


class TestRoundTrip:
    def test_serialize_parse_identity(self):
        cfg = parse_config(
            "mesh.nx = 12\nmesh.ny = 8\nmesh.crack_tip_x = 0.25\n"
            "material.b = 0.03\nmaterial.fiber_angle = 0.7853981633974483\n"
            "thermal_bc.kind = parabolic\nmechanical_bc.top_uy = 0.1\n"
            "picard.damping = 0.9\nsweep.parameter = a\nsweep.values = 0.1, 0.5\n")
        again = parse_config(serialize_config(cfg))
        assert again == cfg

    def test_default_round_trip(self):
        cfg = RunConfig()
        assert parse_config(serialize_config(cfg)) == cfg


class TestRunSingle:
    def test_zero_load_zero_displacement(self):
        cfg = parse_config(
            "mesh.nx = 4\nmesh.ny = 4\nmaterial.b = 0\n"
            "thermal_bc.theta0 = 0\nthermal_bc.Q = 0\nmechanical_bc.top_uy = 0\n")
        result = run_single(cfg)
        assert result.report.converged
        assert abs(result.u.values).max() == 0.0

    def test_constant_theta_no_gradient_force(self):
        # a uniform temperature exerts no thermal body force
        cfg = parse_config("mesh.nx = 4\nmesh.ny = 4\n")
        result = run_single(cfg)
        assert abs(result.theta.values - 100.0).max() < 1e-10
        assert abs(result.u.values).max() < 1e-10
