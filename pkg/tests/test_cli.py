import csv
import subprocess
import sys

import numpy as np
import pytest

from screwgrasp.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, main
from screwgrasp.contacts import EnvironmentContact, Pcwf, PcwfParams
from screwgrasp.problem import ExternalWrench
from screwgrasp.scenarios import Scenario, save_scenario
from screwgrasp.screws import INFINITE_PITCH, TaskScrew


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows_of(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def infeasible_file(tmp_path):
    # a ceiling contact can only push down; gravity also pulls down
    ceiling = EnvironmentContact(rotation=np.diag([1.0, -1.0, -1.0]), position=np.zeros(3),
                                 model=Pcwf(PcwfParams(mu=0.3)))
    s = Scenario(
        name="ceiling",
        manipulator_contacts=(),
        environment_contacts=(ceiling,),
        external=ExternalWrench(force=[0, 0, -5.0]),
        tasks=(("S", TaskScrew(l=[0, 0, 1], pitch=INFINITE_PITCH)),),
    )
    path = tmp_path / "ceiling.scenario"
    save_scenario(s, path)
    return str(path)


class TestEval:
    def test_door_handle_optimal(self, capsys):
        code, out, _ = run(capsys, "eval", "--builtin", "door_handle",
                           "--set", "x_c=0", "--set", "theta=0deg", "--dir", "+")
        assert code == EXIT_OK
        assert "status: Optimal" in out
        eta = float(next(l for l in out.splitlines() if l.startswith("eta:")).split()[1])
        assert abs(eta - 0.12) < 1e-5

    def test_dash_direction_parses(self, capsys):
        code, out, _ = run(capsys, "eval", "--builtin", "door_handle", "--dir", "-")
        assert code == EXIT_OK

    def test_infeasible_exit_code(self, capsys, infeasible_file):
        code, out, _ = run(capsys, "eval", "--scenario", infeasible_file)
        assert code == EXIT_INFEASIBLE
        assert "Infeasible" in out

    def test_slide_asymmetry(self, capsys, tmp_path):
        etas = {}
        for d in ("+", "-"):
            out_path = tmp_path / f"slide{d}.csv"
            code, _, _ = run(capsys, "eval", "--builtin", "cuboid_slide",
                             "--set", "alpha=50deg", "--set", "x_E=0.4L",
                             "--dir", d, "--format", "csv", "--out", str(out_path))
            assert code == EXIT_OK
            etas[d] = float(rows_of(out_path)[0]["eta"])
        assert etas["+"] > etas["-"]

    def test_tolerance_flags_forwarded(self, capsys):
        code, out, _ = run(capsys, "eval", "--builtin", "door_handle",
                           "--tol-feas", "1e-7", "--tol-gap", "1e-4")
        assert code == EXIT_OK
        assert "status: Optimal" in out

    def test_unknown_set_key(self, capsys):
        code, _, err = run(capsys, "eval", "--builtin", "door_handle", "--set", "bogus=1")
        assert code == EXIT_INPUT
        assert "bogus" in err

    def test_requires_exactly_one_source(self, capsys):
        assert run(capsys, "eval")[0] == EXIT_INPUT
        assert run(capsys, "eval", "--builtin", "door_handle", "--scenario", "x")[0] == EXIT_INPUT

    def test_set_on_family_less_file(self, capsys, infeasible_file):
        code, _, err = run(capsys, "eval", "--scenario", infeasible_file, "--set", "x_c=0")
        assert code == EXIT_INPUT
        assert "family" in err

    def test_task_selection_from_multi_task_file(self, capsys, tmp_path):
        from screwgrasp.scenarios import CuboidParams, cuboid_scenario

        path = tmp_path / "both.scenario"
        save_scenario(cuboid_scenario(CuboidParams(alpha=0.5)), path)
        etas = {}
        for label in ("S1", "S2"):
            out_csv = tmp_path / f"{label}.csv"
            code, _, _ = run(capsys, "eval", "--scenario", str(path), "--task", label,
                             "--format", "csv", "--out", str(out_csv))
            assert code == EXIT_OK
            etas[label] = float(rows_of(out_csv)[0]["eta"])
        assert etas["S1"] != pytest.approx(etas["S2"], rel=1e-3)
        code, _, err = run(capsys, "eval", "--scenario", str(path), "--task", "S9")
        assert code == EXIT_INPUT
        assert "unknown task" in err


class TestSweep:
    def test_csv_shape_and_monotone_theta(self, capsys, tmp_path):
        out_path = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", "--builtin", "door_handle", "--set", "x_c=0",
                           "--sweep", "theta=0deg:40deg:41", "--out", str(out_path))
        assert code == EXIT_OK
        assert "eta_star:" in out
        rows = rows_of(out_path)
        assert len(rows) == 41
        assert list(rows[0].keys()) == ["param", "eta", "status", "iterations", "wall_ms"]
        etas = [float(r["eta"]) for r in rows]
        assert all(a >= b - 1e-9 for a, b in zip(etas, etas[1:]))

    def test_deterministic_apart_from_wall_clock(self, capsys, tmp_path):
        frames = []
        for run_idx in range(2):
            out_path = tmp_path / f"s{run_idx}.csv"
            code, _, _ = run(capsys, "sweep", "--builtin", "cuboid_pivot",
                             "--sweep", "alpha=0deg:40deg:5", "--out", str(out_path))
            assert code == EXIT_OK
            text = out_path.read_text()
            assert "\r" not in text
            stripped = [",".join(line.split(",")[:-1]) for line in text.splitlines()]
            frames.append(stripped)
        assert frames[0] == frames[1]

    def test_count_one_matches_eval(self, capsys, tmp_path):
        sweep_path = tmp_path / "one.csv"
        code, _, _ = run(capsys, "sweep", "--builtin", "door_handle", "--set", "x_c=0.1",
                         "--sweep", "theta=5deg:5deg:1", "--out", str(sweep_path))
        assert code == EXIT_OK
        eval_path = tmp_path / "eval.csv"
        code, _, _ = run(capsys, "eval", "--builtin", "door_handle", "--set", "x_c=0.1",
                         "--set", "theta=5deg", "--format", "csv", "--out", str(eval_path))
        assert code == EXIT_OK
        assert rows_of(sweep_path)[0]["eta"] == rows_of(eval_path)[0]["eta"]

    def test_unknown_sweep_parameter(self, capsys):
        code, _, err = run(capsys, "sweep", "--builtin", "door_handle", "--sweep", "zeta=0:1:3")
        assert code == EXIT_INPUT

    def test_malformed_sweep_spec(self, capsys):
        code, _, _ = run(capsys, "sweep", "--builtin", "door_handle", "--sweep", "theta=0:1")
        assert code == EXIT_INPUT

    def test_failed_points_recorded_not_fatal(self, capsys, tmp_path):
        # past ~11.5deg eta goes negative but stays Optimal; the status
        # column is the record, the sweep itself succeeds
        out_path = tmp_path / "wide.csv"
        code, out, _ = run(capsys, "sweep", "--builtin", "door_handle", "--set", "x_c=0",
                           "--sweep", "theta=0deg:40deg:9", "--out", str(out_path))
        assert code == EXIT_OK
        assert any(float(r["eta"]) < 0 for r in rows_of(out_path))


class TestOracleCheck:
    def test_door_handle_within_threshold(self, capsys):
        code, out, _ = run(capsys, "oracle-check", "--builtin", "door_handle", "--facets", "64")
        assert code == EXIT_OK
        assert "relative:" in out

    def test_gap_shrinks_with_facets(self, capsys):
        rels = {}
        for facets in ("8", "64"):
            code, out, _ = run(capsys, "oracle-check", "--builtin", "cuboid_slide",
                               "--set", "alpha=50deg", "--facets", facets,
                               "--max-rel-gap", "0.5")
            assert code == EXIT_OK
            rels[facets] = float(next(l for l in out.splitlines() if l.startswith("gap:")).split("relative:")[1])
        assert rels["64"] <= rels["8"] + 1e-12

    def test_agreement_on_infeasible(self, capsys, infeasible_file):
        code, out, _ = run(capsys, "oracle-check", "--scenario", infeasible_file)
        assert code == EXIT_OK
        assert "both paths report infeasible" in out


class TestGws:
    def test_boundary_cloud_is_convex_and_consistent(self, capsys, tmp_path):
        out_path = tmp_path / "gws.csv"
        code, _, _ = run(capsys, "gws", "--builtin", "cuboid_slide",
                         "--set", "alpha=50deg", "--set", "x_E=0.4L",
                         "--subspace", "fx,fz,ty", "--rays", "16", "--out", str(out_path))
        assert code == EXIT_OK
        rows = rows_of(out_path)
        pts, dirs, etas = [], [], []
        for r in rows:
            assert r["status"] == "Optimal"
            d = np.array([float(r["fx"]), float(r["fz"]), float(r["ty"])])
            eta = float(r["eta"])
            dirs.append(d)
            etas.append(eta)
            pts.append(eta * d)
        # convexity: ray-exit points of a convex set are never interior to
        # the hull of the sampled boundary, so each must touch a hull facet
        from scipy.spatial import ConvexHull

        hull = ConvexHull(np.vstack(pts))
        scale = np.max(np.abs(pts))
        for p in pts:
            closest = np.max(hull.equations[:, :3] @ p + hull.equations[:, 3])
            assert closest >= -1e-6 * scale

        # cardinal rays reproduce the per-task eval metrics
        def eta_at(v):
            return next(e for d, e in zip(dirs, etas) if np.allclose(d, v, atol=1e-12))

        def eval_eta(builtin, direction):
            out_csv = tmp_path / f"{builtin}{direction}.csv"
            code, _, _ = run(capsys, "eval", "--builtin", builtin,
                             "--set", "alpha=50deg", "--set", "x_E=0.4L",
                             "--dir", direction, "--format", "csv", "--out", str(out_csv))
            assert code == EXIT_OK
            return float(rows_of(out_csv)[0]["eta"])

        # the slide axis points toward the edge (-x), so dir + is the -fx ray
        assert eta_at([-1, 0, 0]) == pytest.approx(eval_eta("cuboid_slide", "+"), rel=1e-6)
        assert eta_at([1, 0, 0]) == pytest.approx(eval_eta("cuboid_slide", "-"), rel=1e-6)
        assert eta_at([0, 0, 1]) == pytest.approx(eval_eta("cuboid_pivot", "+"), rel=1e-6)
        assert eta_at([0, 0, -1]) == pytest.approx(eval_eta("cuboid_pivot", "-"), rel=1e-6)

    def test_unbounded_rays_tagged_not_fatal(self, capsys, tmp_path):
        # the door-handle hinge reacts with unbounded force: force rays fail,
        # moment rays about the hinge axis succeed
        out_path = tmp_path / "door_gws.csv"
        code, _, _ = run(capsys, "gws", "--builtin", "door_handle",
                         "--subspace", "fx,tz", "--rays", "8", "--out", str(out_path))
        assert code == EXIT_OK
        rows = rows_of(out_path)
        by_dir = {(float(r["fx"]), float(r["tz"])): r for r in rows}
        assert by_dir[(1.0, 0.0)]["status"] == "Unbounded"
        assert by_dir[(0.0, 1.0)]["status"] == "Optimal"
        assert float(by_dir[(0.0, 1.0)]["eta"]) == pytest.approx(0.12, abs=1e-5)
        assert float(by_dir[(0.0, -1.0)]["eta"]) == pytest.approx(0.12, abs=1e-5)

    def test_bad_subspace(self, capsys):
        assert run(capsys, "gws", "--builtin", "door_handle", "--subspace", "fx")[0] == EXIT_INPUT
        assert run(capsys, "gws", "--builtin", "door_handle", "--subspace", "fx,zz")[0] == EXIT_INPUT


def test_console_entry_point_smoke():
    proc = subprocess.run(
        [sys.executable, "-m", "screwgrasp.cli", "eval", "--builtin", "door_handle"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "status: Optimal" in proc.stdout
