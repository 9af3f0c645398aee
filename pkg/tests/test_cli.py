import json
import math

import pytest

import geofermat.cli as cli
import geofermat.verify as verify_mod
from geofermat import ScenarioError, load_scenario
from geofermat.scenario import scenario_from_dict
from geofermat.verify import SuiteResult


def minimal_scenario(**extra):
    data = {
        "schema": "geofermat/1",
        "surface": {"kind": "sphere", "radius": 1.0},
        "points": {
            "A1": {"u": 1.0, "v": 0.1},
            "A2": {"u": 1.5, "v": 0.9},
            "A3": {"u": 1.8, "v": -0.4},
        },
        "weights": [2.0, 3.0, 4.0],
    }
    data.update(extra)
    return data


class TestScenarioLoading:
    def test_minimal_defaults(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(minimal_scenario()))
        scn = load_scenario(path)
        assert scn.surface.kind == "sphere"
        assert scn.weights.astuple() == (2.0, 3.0, 4.0)
        assert scn.connect_opts.n_starts == 16
        assert scn.fermat_opts.angle_tol == 1e-5

    def test_negative_weight_names_field(self):
        with pytest.raises(ScenarioError) as err:
            scenario_from_dict(minimal_scenario(weights=[-1.0, 2.0, 3.0]))
        assert err.value.field == "weights[0]"

    def test_point_on_axis_guard(self):
        data = minimal_scenario()
        data["points"]["A1"] = {"u": 1e-9, "v": 0.0}
        with pytest.raises(ScenarioError) as err:
            scenario_from_dict(data)
        assert "axis guard" in str(err.value)

    def test_unknown_surface_kind(self):
        with pytest.raises(ScenarioError) as err:
            scenario_from_dict(minimal_scenario(surface={"kind": "moebius"}))
        assert err.value.field == "surface"

    def test_degrees_accepted(self):
        data = minimal_scenario()
        data["points"]["A1"] = {"u": 1.0, "v": {"deg": 90.0}}
        scn = scenario_from_dict(data)
        assert scn.points["A1"].v == pytest.approx(math.pi / 2)

    def test_schema_required(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict(minimal_scenario(schema="other/9"))

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioError):
            load_scenario(path)


class TestRun:
    def test_shoot(self):
        scn = scenario_from_dict(minimal_scenario(
            shoot={"from": "A1", "heading": {"deg": 45.0}, "length": 1.0}))
        code, report = cli.run("shoot", scn)
        assert code == 0
        assert report["results"]["path"]["length"] == 1.0
        assert report["results"]["path"]["clairaut_c"] == pytest.approx(
            math.sin(1.0) * math.cos(math.pi / 4))

    def test_connect_with_ambiguity_warning(self):
        scn = scenario_from_dict({
            "schema": "geofermat/1",
            "surface": {"kind": "cylinder", "radius": 1.0},
            "points": {"P": {"u": 0.0, "v": 0.0},
                       "Q": {"u": 0.7, "v": {"deg": 180.0}}},
            "connect": {"from": "P", "to": "Q"},
        })
        code, report = cli.run("connect", scn)
        assert code == 0
        assert report["results"]["path"]["ambiguous"]
        assert any(w["kind"] == "ambiguous" for w in report["warnings"])
        assert report["results"]["path"]["length"] == pytest.approx(
            math.hypot(0.7, math.pi), rel=1e-10)

    def test_fermat_solve_and_paths(self, tmp_path):
        scn = scenario_from_dict(minimal_scenario())
        code, report = cli.run("fermat-solve", scn, paths_dir=tmp_path / "p")
        assert code == 0
        fer = report["results"]["fermat"]
        assert fer["mode"] == "interior"
        assert sum(fer["sector_angles"]) == pytest.approx(2 * math.pi,
                                                          abs=1e-9)
        for i in (1, 2, 3):
            csv = (tmp_path / "p" / f"branch_{i}.csv").read_text()
            assert csv.splitlines()[0] == \
                "s,u,v,du,dv,x,y,z,clairaut_c"

    def test_fermat_inverse_angles(self):
        scn = scenario_from_dict(minimal_scenario(
            inverse={"angles": [{"deg": 120.0}] * 3, "total": 1.0}))
        code, report = cli.run("fermat-inverse", scn)
        assert code == 0
        assert report["results"]["inverse"]["weights"] == pytest.approx(
            [1 / 3] * 3)

    def test_fermat_inverse_measured(self):
        scn = scenario_from_dict(minimal_scenario(
            inverse={"center": {"u": 1.4, "v": 0.3}, "total": 9.0}))
        code, report = cli.run("fermat-inverse", scn)
        assert code == 0
        w = report["results"]["inverse"]["weights"]
        assert sum(w) == pytest.approx(9.0, abs=1e-9)
        assert all(x > 0 for x in w)

    def test_clairaut_report(self):
        scn = scenario_from_dict(minimal_scenario())
        code, report = cli.run("clairaut-report", scn)
        assert code == 0
        rep = report["results"]["clairaut"]
        assert len(rep["branches"]) == 3
        assert rep["sphere_probe"] is not None
        for br in rep["branches"]:
            assert abs(abs(br["c_cos"]) - abs(br["c_sin"])) <= 1e-12

    def test_rotate_experiment(self):
        scn = scenario_from_dict(minimal_scenario(
            points={"C": {"u": 1.2, "v": 0.5}},
            experiment={"center": "C", "theta0": 0.7,
                        "lengths": [0.3, 0.4, 0.5],
                        "deltas": [{"deg": d} for d in (0, 10, 20)]}))
        code, report = cli.run("rotate-experiment", scn)
        assert code == 0
        exp = report["results"]["experiment"]
        assert exp["weight_spread"] <= 1e-6
        assert len(exp["steps"]) == 3

    def test_missing_section_is_config_error(self):
        scn = scenario_from_dict(minimal_scenario())
        code, report = cli.run("shoot", scn)
        assert code == 1
        assert report["error"]["kind"] == "ScenarioError"

    def test_numerical_failure_exit_code(self):
        scn = scenario_from_dict({
            "schema": "geofermat/1",
            "surface": {"kind": "cone", "slope": 1.0},
            "points": {"P": {"u": 1.0, "v": 0.0}},
            "shoot": {"from": "P", "heading": {"deg": -90.0}, "length": 3.0},
        })
        code, report = cli.run("shoot", scn)
        assert code == 2
        assert report["error"]["kind"] == "ChartExitError"

    def test_determinism_modulo_wall_time(self):
        scn = scenario_from_dict(minimal_scenario())
        code1, rep1 = cli.run("fermat-solve", scn)
        code2, rep2 = cli.run("fermat-solve", scn)
        rep1.pop("wall_time_ms")
        rep2.pop("wall_time_ms")
        assert code1 == code2 == 0
        assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2,
                                                              sort_keys=True)


class TestVerifyCommand:
    def test_subset_passes(self):
        code, report = cli.run("verify", None,
                               suites=["inverse-round-trip",
                                       "sine-rule-diameter"])
        assert code == 0
        names = [r["name"] for r in report["results"]["verify"]]
        assert names == ["inverse-round-trip", "sine-rule-diameter"]
        assert all(r["passed"] for r in report["results"]["verify"])

    def test_failing_suite_maps_to_exit_3(self, monkeypatch):
        def broken():
            return SuiteResult("broken", 99, False, "synthetic failure",
                               0.0, {})
        monkeypatch.setitem(verify_mod.SUITES, "broken", broken)
        code, report = cli.run("verify", None, suites=["broken"])
        assert code == 3
        assert not report["results"]["verify"][0]["passed"]

    def test_unknown_suite_is_config_error(self):
        code, report = cli.run("verify", None, suites=["no-such-suite"])
        assert code == 1


class TestBundledScenarios:
    SCENARIOS = __import__("pathlib").Path(__file__).parent.parent / "scenarios"

    def test_plane_equilateral_fixture(self):
        scn = load_scenario(self.SCENARIOS / "plane_equilateral.json")
        code, report = cli.run("fermat-solve", scn)
        assert code == 0
        fer = report["results"]["fermat"]
        u, v = fer["point"]["u"], fer["point"]["v"]
        assert u * math.cos(v) == pytest.approx(2.0, abs=1e-7)
        assert u * math.sin(v) == pytest.approx(0.0, abs=1e-7)
        assert fer["sector_angles"] == pytest.approx([2 * math.pi / 3] * 3,
                                                     abs=1e-7)

    @pytest.mark.parametrize("name,command", [
        ("sphere_triangle.json", "fermat-solve"),
        ("cylinder_pair.json", "connect"),
        ("rotate_paraboloid.json", "rotate-experiment"),
        ("shoot_sphere.json", "shoot"),
    ])
    def test_fixtures_run_clean(self, name, command):
        scn = load_scenario(self.SCENARIOS / name)
        code, _ = cli.run(command, scn)
        assert code == 0


class TestMain:
    def test_out_file_and_exit(self, tmp_path):
        scn_path = tmp_path / "s.json"
        scn_path.write_text(json.dumps(minimal_scenario(
            shoot={"from": "A1", "heading": 0.3, "length": 0.5})))
        out = tmp_path / "report.json"
        code = cli.main(["shoot", "--scenario", str(scn_path),
                         "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["command"] == "shoot"
        assert report["scenario_digest"]

    def test_missing_scenario_file(self, tmp_path, capsys):
        code = cli.main(["connect", "--scenario",
                         str(tmp_path / "nope.json")])
        assert code == 1

    def test_scenario_required_for_solves(self, capsys):
        assert cli.main(["fermat-solve"]) == 1
