import json

import numpy as np
import pytest

from jetcones.cli import canonical_json, main
from jetcones.gridcheck import GridFunction, read_grid, write_grid


@pytest.fixture()
def workspace(tmp_path):
    files = {}

    def add(name, payload):
        p = tmp_path / name
        if isinstance(payload, str):
            p.write_text(payload)
        else:
            p.write_text(json.dumps(payload))
        files[name] = str(p)
        return str(p)

    add("lap.json", {"n": 2, "kind": "builtin_laplacian"})
    add(
        "diag.json",
        {
            "n": 2,
            "kind": "halfspace_list",
            "halfspaces": [
                {"a": [1.0, 0.0, 0.0], "b": [0.0, 0.0], "c": 0.0, "lambda": 0.0}
            ],
        },
    )
    add("parabola_set.json", {"d": 2, "kind": "builtin_parabola_a9"})
    add(
        "quadrant.json",
        {
            "d": 2,
            "kind": "halfspace_list",
            "halfspaces": [{"normal": [1.0, 0.0]}, {"normal": [0.0, 1.0]}],
        },
    )
    add(
        "wedge.json",
        {"d": 2, "kind": "generators", "generators": [[0.0, 1.0], [1.0, 1.0]]},
    )
    add(
        "op.json",
        {"n": 2, "a": [[1.0, 0.0], [0.0, 1.0]], "b": [0.0, 0.0], "c": 0.0, "lambda": 0.0},
    )
    add(
        "points.json",
        {
            "jets": [
                {"r": 0.0, "p": [0.0, 0.0], "a": [1.0, 0.0, 1.0]},
                {"r": 0.0, "p": [0.0, 0.0], "a": [-1.0, 0.0, -2.0]},
            ]
        },
    )
    h = 1.0 / 32.0
    origin = (-0.5 + h / 2, -0.5 + h / 2)
    bowl = GridFunction.from_callable(lambda x, y: x**2 + y**2, origin, h, (32, 32))
    write_grid(bowl, str(tmp_path / "bowl.grid"))
    files["bowl.grid"] = str(tmp_path / "bowl.grid")
    cap = GridFunction(origin, h, -bowl.values)
    write_grid(cap, str(tmp_path / "cap.grid"))
    files["cap.grid"] = str(tmp_path / "cap.grid")
    spike = np.zeros((32, 32))
    spike[10, 12] = 3.0
    write_grid(GridFunction(origin, h, spike), str(tmp_path / "spike.grid"))
    files["spike.grid"] = str(tmp_path / "spike.grid")
    files["dir"] = str(tmp_path)
    return files


def test_canonical_json_formatting():
    doc = {
        "b_first": 1,
        "a_second": [1.5, float("inf"), float("-inf"), float("nan")],
        "nested": {"x": True, "y": None},
        "tiny": 1e-17,
    }
    text = canonical_json(doc)
    assert text.index('"b_first"') < text.index('"a_second"')
    assert '"inf"' in text and '"-inf"' in text and '"nan"' in text
    assert "9.9999999999999998e-18" in text or "1e-17" in text
    with pytest.raises(TypeError):
        canonical_json(object())


def test_analyze_laplacian(workspace, capsys):
    code = main(["analyze", workspace["lap.json"], "--seed", "3", "--samples", "2"])
    out = capsys.readouterr().out
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "analyze"
    assert set(report.keys()) == {
        "command",
        "inputs",
        "seed",
        "verdicts",
        "witnesses",
        "timings",
    }
    assert report["verdicts"]["complete"] is True
    assert report["witnesses"]["edge_dim"] == 5
    assert report["timings"] is None


def test_analyze_incomplete_fixture(workspace, capsys):
    code = main(["analyze", workspace["diag.json"], "--seed", "1"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["verdicts"]["valid"] is True
    assert report["verdicts"]["complete"] is False
    witness = np.array(report["witnesses"]["completeness"]["witness_e"])
    assert abs(abs(witness[1]) - 1.0) <= 1e-9


def test_cones_parabola_fixture(workspace, capsys):
    code = main(["cones", workspace["parabola_set.json"], "--seed", "5", "--samples", "8"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    ray = np.array(report["witnesses"]["recession"]["rays"][0])
    assert np.linalg.norm(ray - np.array([0.0, 1.0])) <= 1e-6
    for probe in report["witnesses"]["stab_probes"]:
        assert probe["stable"] == (probe["w"][1] > 0.05)
    assert report["witnesses"]["bipolar"]["mismatches"] == 0


def test_cones_quadrant_self_polar(workspace, capsys):
    code = main(["cones", workspace["quadrant.json"], "--seed", "5", "--samples", "4"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    gens = report["witnesses"]["polar"]["generators"]
    assert gens == [[1.0, 0.0], [0.0, 1.0]]
    assert report["witnesses"]["bipolar"]["mode"] == "exact_polar"
    assert report["witnesses"]["bipolar"]["mismatches"] == 0


def test_cones_generated_set_reports_stability(workspace, capsys):
    code = main(["cones", workspace["wedge.json"], "--seed", "5", "--samples", "16"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["witnesses"]["polar"]["exact"] is True
    assert report["witnesses"]["bipolar"]["mismatches"] == 0
    for probe in report["witnesses"]["stab_probes"]:
        w = probe["w"]
        assert probe["stable"] == (w[1] > 1e-9 and w[0] + w[1] > 1e-9)


def test_check_modes_and_exit_codes(workspace, capsys):
    for mode, seed_args in (("c2", []), ("visc", []), ("dist", ["--seed", "2"])):
        code = main(
            ["check", workspace["lap.json"], workspace["bowl.grid"], mode] + seed_args
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0, mode
        assert report["verdicts"]["ok"] is True
    code = main(["check", workspace["lap.json"], workspace["cap.grid"], "c2"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["verdicts"]["ok"] is False
    assert report["witnesses"]["failed"] > 0


def test_check_dimension_mismatch_is_input_error(workspace, tmp_path, capsys):
    spec3 = tmp_path / "lap3.json"
    spec3.write_text(json.dumps({"n": 3, "kind": "builtin_laplacian"}))
    code = main(["check", str(spec3), workspace["bowl.grid"], "c2"])
    capsys.readouterr()
    assert code == 2


def test_check_dist_requires_seed(workspace, capsys):
    code = main(["check", workspace["lap.json"], workspace["bowl.grid"], "dist"])
    capsys.readouterr()
    assert code == 2


def test_regularize_writes_grid_and_audit(workspace, tmp_path, capsys):
    out = tmp_path / "envelope.grid"
    code = main(
        [
            "regularize",
            workspace["spike.grid"],
            "--radii",
            "0.2,0.1",
            "--out",
            str(out),
        ]
    )
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["verdicts"] == {"monotone": True, "dominates": True}
    tight = read_grid(str(out))
    assert float(np.max(tight.values)) == 3.0
    assert tight.values.shape == (32, 32)
    levels = report["witnesses"]["levels"]
    assert levels[0]["radius"] == 0.2 and levels[1]["radius"] == 0.1


def test_regularize_rejects_bad_radii(workspace, capsys):
    code = main(
        ["regularize", workspace["spike.grid"], "--radii", "0.1,0.2", "--out", "/tmp/x"]
    )
    capsys.readouterr()
    assert code == 2


def test_linear_subset_and_negation(workspace, capsys):
    code = main(
        [
            "linear",
            workspace["op.json"],
            "paraboloid,neg:paraboloid",
            "--seed",
            "4",
        ]
    )
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    members = report["witnesses"]["members"]
    assert members["paraboloid"]["verdicts"] == {
        "classical": True,
        "viscosity": True,
        "distributional": True,
    }
    assert members["paraboloid_negated"]["verdicts"] == {
        "classical": False,
        "viscosity": False,
        "distributional": False,
    }
    assert report["verdicts"]["all_agree"] is True


def test_linear_rejects_degenerate_operator(workspace, tmp_path, capsys):
    bad = tmp_path / "degenerate.json"
    bad.write_text(json.dumps({"n": 2, "a": [[1e-12, 0.0], [0.0, 1.0]]}))
    code = main(["linear", str(bad), "--seed", "1"])
    capsys.readouterr()
    assert code == 2


def test_linear_rejects_unknown_member(workspace, capsys):
    code = main(["linear", workspace["op.json"], "nonsense", "--seed", "1"])
    capsys.readouterr()
    assert code == 2


def test_decompose_roundtrip(workspace, capsys):
    code = main(
        [
            "decompose",
            workspace["lap.json"],
            workspace["points.json"],
            "--seed",
            "6",
            "--samples",
            "4",
        ]
    )
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["verdicts"] == {"ok": True, "inside": 1, "outside": 1}
    assert report["witnesses"]["outside"][0]["excluded"] is True


def test_decompose_rejects_non_sampleable_spec(workspace, tmp_path, capsys):
    spec = tmp_path / "parab_spec.json"
    spec.write_text(json.dumps({"n": 2, "kind": "builtin_parabola_a9"}))
    code = main(["decompose", str(spec), workspace["points.json"], "--seed", "1"])
    capsys.readouterr()
    assert code == 2


def test_malformed_and_unknown_key_files_exit_2(workspace, tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text('{"n": 2, "kind": ')
    assert main(["analyze", str(broken), "--seed", "1"]) == 2
    err = capsys.readouterr().err
    assert "line 1" in err and "column" in err
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"n": 2, "kind": "builtin_laplacian", "bogus": 1}))
    assert main(["analyze", str(extra), "--seed", "1"]) == 2
    capsys.readouterr()


def test_empty_set_file_exits_2(workspace, tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text(
        json.dumps(
            {
                "d": 2,
                "kind": "halfspace_list",
                "halfspaces": [
                    {"normal": [1.0, 0.0], "offset": 1.0},
                    {"normal": [-1.0, 0.0], "offset": 1.0},
                ],
            }
        )
    )
    assert main(["cones", str(empty), "--seed", "1"]) == 2
    capsys.readouterr()


def test_missing_seed_for_sampling_commands(workspace, capsys):
    assert main(["analyze", workspace["lap.json"]]) == 2
    assert main(["cones", workspace["quadrant.json"]]) == 2
    assert main(["linear", workspace["op.json"]]) == 2
    assert main(["decompose", workspace["lap.json"], workspace["points.json"]]) == 2
    capsys.readouterr()


def test_reports_are_byte_identical(workspace, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    argv = ["analyze", workspace["lap.json"], "--seed", "3", "--out"]
    assert main(argv + [str(a)]) == 0
    assert main(argv + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    d = tmp_path / "d.json"
    argv = [
        "check",
        workspace["lap.json"],
        workspace["bowl.grid"],
        "dist",
        "--seed",
        "2",
        "--out",
    ]
    assert main(argv + [str(c)]) == 0
    assert main(argv + [str(d)]) == 0
    assert c.read_bytes() == d.read_bytes()
