"""Scenario presets and the command-line front end."""

import json
import math

import pytest

from convfactor.config import DEFAULTS
from convfactor.errors import BadScenarioParameter, SearchExhausted
from convfactor.geometry import Disk, contains, geometry_from_dict
from convfactor.presets import (
    ExpectedFact,
    ex31_bound,
    ex32_constants,
    get_preset,
    preset_ex31,
    preset_ex32,
)

# two-disk model constants, frozen from tools/oracle_green_ex31.py
EX31_ROBIN = -1.446726697516327


class TestTwoDiskPreset:
    def test_ceiling_first_drops_below_half_at_eighteen(self):
        hits = [t for t in range(5, 31) if ex31_bound(float(t)) < 0.5]
        assert hits[0] == 18

    def test_ceiling_closed_form_value(self):
        assert ex31_bound(18.0) == pytest.approx(0.487340, abs=1e-6)
        assert ex31_bound(17.0) >= 0.5

    def test_doubling_fact_gated_on_ceiling(self):
        wide = preset_ex31(18.0)
        assert "verdict:lambda=2" in [f.quantity for f in wide.expected_facts]
        narrow = preset_ex31(17.0)
        assert "verdict:lambda=2" not in [f.quantity
                                          for f in narrow.expected_facts]

    def test_fact_provenance_tags(self, ex31):
        tags = {(f.quantity, f.relation): f.provenance
                for f in ex31.expected_facts}
        assert tags[("rho", "le")] == "paper"
        assert tags[("rho", "ge")] == "derived"

    def test_small_separation_rejected(self):
        with pytest.raises(BadScenarioParameter):
            preset_ex31(4.0)

    def test_geometry_layout(self, ex31):
        assert len(ex31.L.components) == 2
        assert all(isinstance(s, Disk) and s.radius == 1.0
                   for s in ex31.L.components)
        assert ex31.L.components[1].center == 18.0 + 0j


class TestRingedDiskConstants:
    def test_reference_values_default_ring(self):
        c = ex32_constants(0.5, 9)
        assert c["l0"] == pytest.approx(6.803220e-4, rel=1e-5)
        assert c["h0"] == pytest.approx(1.541294e9, rel=1e-5)
        assert not c["cap_binds"]
        assert c["l0_eff"] == c["l0"]

    def test_intermediate_cap_binds_for_seven_disks(self):
        c = ex32_constants(0.5, 7)
        assert c["cap_binds"]
        assert c["l0_eff"] == 2.0 ** -8

    @pytest.mark.parametrize("m0", [7, 8, 9, 10, 12])
    def test_separation_beats_ring_disjointness(self, m0):
        c = ex32_constants(0.5, m0)
        assert c["h0"] > 2.0 / math.sin(math.pi / m0)

    def test_search_ceiling_enforced(self):
        with pytest.raises(SearchExhausted):
            preset_ex32(0.5, 9, h_search_max=100.0)

    def test_ring_too_small_rejected(self):
        with pytest.raises(BadScenarioParameter):
            preset_ex32(0.5, 6)

    @pytest.mark.parametrize("beta0", [0.0, 1.0, -0.2, 1.3])
    def test_bad_target_factor_rejected(self, beta0):
        with pytest.raises(BadScenarioParameter):
            preset_ex32(beta0, 9)

    def test_geometry_layout(self, ex32):
        L = ex32.L
        assert len(L.components) == 10
        assert all(s.radius == 1.0 for s in L.components)
        assert L.components[0].center == 0j
        h0 = ex32_constants(0.5, 9)["h0"]
        for ring_disk in L.components[1:]:
            assert abs(ring_disk.center) == pytest.approx(h0, rel=1e-12)


class TestPolygonPreset:
    def test_expansion_point_interior_to_hexagon(self, ex33):
        assert ex33.z0 == -7.0
        assert contains(ex33.L.components[0], complex(ex33.z0))

    def test_component_shapes(self, ex33):
        hexagon, square = ex33.L.components
        assert len(hexagon.vertices) == 6
        assert len(square.vertices) == 4

    def test_reference_factor_fact(self, ex33):
        fact = next(f for f in ex33.expected_facts if f.quantity == "rho")
        assert fact.relation == "within"
        assert fact.value == pytest.approx(0.529966)
        assert fact.tolerance == pytest.approx(0.01)
        assert fact.provenance == "paper"

    def test_unit_weight_fact(self, ex33):
        fact = next(f for f in ex33.expected_facts
                    if f.quantity == "verdict:lambda=1")
        assert fact.relation == "eq"
        assert fact.value == "NONEMPTY"


class TestGetPreset:
    def test_dispatch(self):
        assert get_preset("ex31", theta0=20.0).params["theta0"] == 20.0
        assert get_preset("ex33").name == "ex33"

    def test_unknown_name(self):
        with pytest.raises(BadScenarioParameter):
            get_preset("ex99")

    def test_expected_fact_is_plain_record(self):
        f = ExpectedFact("rho", "le", 0.5, "derived")
        assert f.tolerance == 0.0 and f.note == ""


# ---------------------------------------------------------------------------
# command-line front end


def _json_out(proc):
    assert proc.returncode == 0, proc.stderr.decode()
    return json.loads(proc.stdout.decode())


class TestCliGreen:
    def test_model_payload_and_level_grid(self, cli, geom_files, tmp_path):
        csv = tmp_path / "levels.csv"
        proc = cli(["green", geom_files["ex31"], "--csv", str(csv),
                    "--csv-resolution", "16"])
        data = _json_out(proc)
        assert set(data) == {"robin_constant", "capacity", "residual_norm",
                             "n_components", "charges_per_component",
                             "provenance"}
        assert data["robin_constant"] == pytest.approx(EX31_ROBIN, abs=1e-9)
        assert data["capacity"] == pytest.approx(math.exp(-EX31_ROBIN),
                                                 rel=1e-9)
        assert data["n_components"] == 2
        assert data["provenance"] == "derived"
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "x,y,g"
        assert len(lines) == 1 + 16 * 16
        for row in lines[1:]:
            x, y, g = (float(v) for v in row.split(","))
            assert math.isfinite(x) and math.isfinite(y)

    def test_reproducibility_header_on_stderr(self, cli, geom_files):
        proc = cli(["green", geom_files["ex31"]])
        assert proc.returncode == 0
        header = proc.stderr.decode().splitlines()[0]
        assert header.startswith("convfactor 0.1.0 | args: green ")
        assert "| tolerances: " in header
        assert "=" in header.split("| tolerances: ")[1]


class TestCliRho:
    def test_green_route_on_polygon_pair(self, cli, geom_files):
        proc = cli(["rho", geom_files["ex33"], "--method", "green"])
        data = _json_out(proc)
        assert 0.519966 <= data["value"] <= 0.539966
        assert data["lower"] <= data["value"] <= data["upper"]
        assert "green" in data["method"]

    def test_deviation_route_writes_records(self, cli, geom_files, tmp_path):
        csv = tmp_path / "records.csv"
        proc = cli(["rho", geom_files["ex31"], "--method", "deviation",
                    "--nmax", "12", "--csv", str(csv)])
        data = _json_out(proc)
        assert "deviation" in data["method"]
        assert data["value"] < 0.5
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "n,d_hat,lower_bound"
        ns = [int(float(r.split(",")[0])) for r in lines[1:]]
        assert ns == list(range(DEFAULTS.deviation_n_min, 13))
        d_hats = [float(r.split(",")[1]) for r in lines[1:]]
        assert all(b <= a + 1e-12 for a, b in zip(d_hats, d_hats[1:]))


class TestCliClassify:
    def test_doubling_weights_admissible(self, cli, geom_files):
        proc = cli(["classify", geom_files["ex31"], "--lambda", "2"])
        data = _json_out(proc)
        assert data["outcome"] == "NONEMPTY"
        assert data["rule"] == "limit_point_in_window"
        assert data["bounds"]["r0"] == 1.0
        assert data["bounds"]["R0"] == 17.0
        assert data["chain_check"]["pass"] is True

    def test_rational_generator_decays(self, cli, geom_files):
        proc = cli(["classify", geom_files["ex31"], "--lambda", "1/20"])
        data = _json_out(proc)
        assert data["outcome"] == "EMPTY"
        assert data["rule"] == "decay_below_distance_ratio"
        assert data["sequence"]["limsup"] == pytest.approx(0.05)

    def test_gap_sequence_left_undecided(self, cli, geom_files):
        proc = cli(["classify", geom_files["ex31"],
                    "--limit-points", "2.5"])
        data = _json_out(proc)
        assert data["outcome"] == "UNKNOWN"
        assert data["rule"] == "undecided_gap"

    def test_exterior_expansion_point_is_input_error(self, cli, geom_files):
        proc = cli(["classify", geom_files["ex31"], "--z0", "5,0",
                    "--lambda", "2"])
        assert proc.returncode == 2
        assert b"input error" in proc.stderr


class TestCliConstruct:
    def test_step_payload_and_trajectory(self, cli, geom_files, tmp_path):
        csv = tmp_path / "trajectory.csv"
        proc = cli(["construct", geom_files["ex31"], "--p0", "0", "--u", "1",
                    "--eps0", "0.1", "--s0", "10", "--lambda", "2",
                    "--nmax", "8", "--csv", str(csv)])
        data = _json_out(proc)
        assert data["N0"] >= 1
        assert data["beta_N0"] == [2.0 ** data["N0"], 0.0]
        assert data["S"]["degree"] <= data["N0"]
        assert data["err_K0"] < 0.1
        assert data["err_Pi"] < 0.1
        assert data["rate_c0"] < 1.0
        lo, hi = data["window"]
        assert lo < 2.0 < hi
        assert hi == pytest.approx(1.0 / lo)
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "N,d_hat,err_K0,err_Pi,weighted"
        assert len(lines) == 1 + 8  # measured past the hit for the rate fit


class TestCliTrace:
    def test_exact_first_value_inline(self, cli):
        proc = cli(["trace", "--coeffs", "1,1", "--lambda", "1/20",
                    "--w", "18", "--nmax", "1"])
        data = _json_out(proc)
        assert data["values"] == [[1, 0.95]]
        assert data["first"] == {"n": 1, "modulus": 0.95}

    def test_ones_trace_to_csv(self, cli, tmp_path):
        csv = tmp_path / "trace.csv"
        proc = cli(["trace", "--ones", "500", "--lambda", "1/20",
                    "--w", "18", "--csv", str(csv)])
        data = _json_out(proc)
        assert "values" not in data  # table went to the CSV instead
        assert data["n_points"] == 500
        assert data["last"]["modulus"] < 1e-6
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "n,modulus"
        assert len(lines) == 1 + 500


class TestCliExample:
    def test_two_disk_scenario_facts_pass(self, cli, tmp_path):
        geo = tmp_path / "scenario.json"
        proc = cli(["example", "ex31", "--method", "green",
                    "--write-geometry", str(geo)])
        data = _json_out(proc)
        assert data["scenario"] == "ex31"
        assert data["all_pass"] is True
        assert len(data["facts"]) == 3
        assert all(f["provenance"] in ("paper", "derived", "trivial")
                   for f in data["facts"])
        L = geometry_from_dict(json.loads(geo.read_text()))
        assert len(L.components) == 2
        assert all(s.radius == 1.0 for s in L.components)

    def test_unreachable_separation_is_numerical_failure(self, cli):
        proc = cli(["example", "ex32", "--h-search-max", "100"])
        assert proc.returncode == 3
        assert b"numerical failure" in proc.stderr

    def test_bad_scenario_parameter_is_input_error(self, cli):
        proc = cli(["example", "ex31", "--theta0", "4"])
        assert proc.returncode == 2
        assert b"input error" in proc.stderr


class TestCliErrors:
    def test_missing_geometry_file(self, cli):
        proc = cli(["green", "/nonexistent/geometry.json"])
        assert proc.returncode == 2
        assert b"input error" in proc.stderr

    def test_usage_error_without_arguments(self, cli):
        proc = cli([])
        assert proc.returncode == 2

    def test_unknown_scenario_name_rejected_by_parser(self, cli):
        proc = cli(["example", "ex99"])
        assert proc.returncode == 2
