"""Exit-code contract, round-trip serialization, and determinism, one command
per subcommand."""

import json

import pytest

from coarsekit import serialization
from coarsekit.cli import run


@pytest.fixture
def specs(tmp_path):
    paths = {}
    for name, spec in {
        "z": {"kind": "grid", "dim": 1},
        "z2": {"kind": "grid", "dim": 2},
        "fg2": {"kind": "free_group", "rank": 2},
        "pl": {"kind": "point_line", "coords": [2**k for k in range(13)]},
    }.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(spec))
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def payload_bytes(result):
    return serialization.canonical_dumps(result.payload)


def test_space_command(specs):
    res = run(["space", "--space", specs["z"], "--window-radius", "10", "--r", "1"])
    assert res.exit_code == 0
    assert res.payload["bounded_geometry_profile"] == 3
    assert res.payload["metric_check"]["ok"]


def test_space_command_malformed(specs, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "grid", "dim": 0}))
    assert run(["space", "--space", str(bad), "--window-radius", "2"]).exit_code == 3


def test_components_round_trip(specs):
    res = run(["components", "--space", specs["pl"], "--r", "3"])
    assert res.exit_code == 0
    ok, _ = serialization.verify_payload(res.payload)
    assert ok


def test_components_profile_tags(specs):
    res = run(["components", "--space", specs["z"], "--r", "1",
               "--profile-radii", "2,5,9"])
    assert res.exit_code == 0
    assert res.payload["profile"] == [5, 11, 19]
    assert res.payload["tag"] == "growing"
    res2 = run(["components", "--space", specs["pl"], "--r", "3",
                "--profile-radii", "20,200,2000"])
    assert res2.payload["profile"] == [3, 3, 3]
    assert res2.payload["tag"] == "bounded so far"


def test_segments_command(specs, tmp_path):
    res = run(
        ["segments", "--space", specs["z"], "--r", "1", "--count", "4", "--budget-radius", "400"]
    )
    assert res.exit_code == 0
    assert res.payload["verification"]["passed"]
    saved = tmp_path / "segs.json"
    saved.write_text(serialization.canonical_dumps(res.payload))
    assert run(["verify", "--file", str(saved)]).exit_code == 0
    res2 = run(
        ["segments", "--space", specs["pl"], "--r", "1", "--count", "2", "--budget-radius", "1"]
    )
    assert res2.exit_code == 2


def test_asdim_witness_verify_cycle(specs, tmp_path):
    cover_file = tmp_path / "cover.json"
    res = run(
        [
            "asdim", "witness", "--construction", "line", "--space", specs["z"],
            "--window-radius", "40", "--r", "2", "--out", str(cover_file),
        ]
    )
    assert res.exit_code == 0
    res2 = run(["asdim", "verify", "--cover", str(cover_file)])
    assert res2.exit_code == 0
    # corrupt the cover: drop a piece, partition must fail
    data = json.loads(cover_file.read_text())
    data["colors"][0] = data["colors"][0][1:]
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(data))
    assert run(["asdim", "verify", "--cover", str(broken)]).exit_code == 1


def test_asdim_greedy(specs):
    res = run(
        ["asdim", "greedy", "--space", specs["z"], "--window-radius", "30",
         "--r", "2", "--d", "1", "--bound", "10"]
    )
    assert res.exit_code == 0
    res2 = run(
        ["asdim", "greedy", "--space", specs["z"], "--window-radius", "30",
         "--r", "2", "--d", "0", "--bound", "10"]
    )
    assert res2.exit_code == 2


def test_folner_exit_codes(specs):
    res = run(["folner", "--space", specs["z"], "--r", "1", "--eps", "1/10"])
    assert res.exit_code == 0
    ok, _ = serialization.verify_payload(res.payload)
    assert ok
    res2 = run(
        ["folner", "--space", specs["fg2"], "--r", "1", "--eps", "1/10",
         "--budget", "subsets-of-ball:1"]
    )
    assert res2.exit_code == 2


def test_paradox_command(specs):
    res = run(["paradox", "--space", specs["fg2"], "--window-radius", "4"])
    assert res.exit_code == 0
    ok, _ = serialization.verify_payload(res.payload)
    assert ok


def test_matching_command(specs):
    res = run(["matching", "--space", specs["fg2"], "--window-radius", "4", "--r", "1"])
    assert res.exit_code == 0
    ok, _ = serialization.verify_payload(res.payload)
    assert ok
    res2 = run(["matching", "--space", specs["z"], "--window-radius", "50", "--r", "1"])
    assert res2.exit_code == 2
    assert res2.payload["cut_neighborhood_size"] < 2 * len(res2.payload["cut"])
    # the infeasibility cut is itself a re-checkable certificate
    ok2, _ = serialization.verify_payload(res2.payload)
    assert ok2


def test_op_commands(specs, tmp_path):
    op_file = tmp_path / "a.json"
    op_file.write_text(json.dumps({"entries": [[[0], [0], 0.9, 0], [[1], [1], 0.9, 0]]}))
    base = ["--space", specs["z"], "--window-radius", "1", "--a", str(op_file)]
    res = run(["op", *base, "--action", "norm"])
    assert res.exit_code == 0
    assert abs(res.payload["value"] - 0.9) < 1e-12
    res2 = run(["op", *base, "--action", "quasi-projection", "--r", "0"])
    assert res2.exit_code == 0
    half = tmp_path / "b.json"
    half.write_text(json.dumps({"entries": [[[0], [0], 0.5, 0], [[1], [1], 0.5, 0]]}))
    res3 = run(["op", "--space", specs["z"], "--window-radius", "1", "--a", str(half),
                "--action", "quasi-projection", "--r", "0"])
    assert res3.exit_code == 1


def test_op_arithmetic_actions(specs, tmp_path):
    a = tmp_path / "a.json"
    a.write_text(json.dumps({"entries": [[[1], [0], 1, 0]]}))
    b = tmp_path / "b.json"
    b.write_text(json.dumps({"entries": [[[0], [1], 0, 1]]}))
    base = ["--space", specs["z"], "--window-radius", "2"]
    res = run(["op", *base, "--a", str(a), "--b", str(b), "--action", "mul"])
    assert res.exit_code == 0
    assert res.payload["entries"] == [[[1], [1], 0.0, 1.0]]
    res2 = run(["op", *base, "--a", str(a), "--b", str(b), "--action", "add"])
    assert res2.exit_code == 0 and len(res2.payload["entries"]) == 2
    res3 = run(["op", *base, "--a", str(a), "--action", "adjoint"])
    assert res3.exit_code == 0
    assert res3.payload["entries"] == [[[0], [1], 1.0, 0.0]]
    res4 = run(["op", *base, "--a", str(a), "--action", "mul"])  # missing --b
    assert res4.exit_code == 3


def test_window_file_form(specs, tmp_path):
    wf = tmp_path / "w.json"
    wf.write_text(json.dumps({"points": [[0], [1], [2], [10]]}))
    res = run(["components", "--space", specs["z"], "--window-file", str(wf), "--r", "1"])
    assert res.exit_code == 0
    assert [len(c) for c in res.payload["classes"]] == [3, 1]


def test_classify_without_target_window(specs, tmp_path):
    mp = tmp_path / "map.json"
    mp.write_text(json.dumps({"pairs": [[[x], [x]] for x in range(-5, 6)]}))
    res = run(["classify", "--space", specs["z"], "--window-radius", "5",
               "--map", str(mp), "--target-space", specs["z"]])
    assert res.exit_code == 0
    assert res.payload["equivalence"] is None
    assert res.payload["uniformly_expansive"]


def test_af_approx_command(specs, tmp_path):
    op_file = tmp_path / "a.json"
    op_file.write_text(json.dumps({"entries": [[[x], [x], 1, 0] for x in range(-5, 6)]}))
    res = run(
        ["af-approx", "--space", specs["z"], "--window-radius", "5", "--a", str(op_file),
         "--r", "1", "--eps", "0.25"]
    )
    assert res.exit_code == 0
    assert res.payload["error"] < 0.25


def test_mv_split_command(specs, tmp_path):
    cover_file = tmp_path / "cover.json"
    run(
        ["asdim", "witness", "--construction", "line", "--space", specs["z"],
         "--window-radius", "50", "--r", "5", "--out", str(cover_file)]
    )
    op_file = tmp_path / "shift.json"
    op_file.write_text(
        json.dumps({"entries": [[[x + 1], [x], 1, 0] for x in range(-50, 50)]})
    )
    res = run(
        ["mv-split", "--space", specs["z"], "--window-radius", "50",
         "--a", str(op_file), "--cover", str(cover_file)]
    )
    assert res.exit_code == 0
    assert res.payload["sum_exact"]


def test_classify_command(specs, tmp_path):
    map_file = tmp_path / "map.json"
    map_file.write_text(json.dumps({"pairs": [[[x], [2 * x]] for x in range(-10, 11)]}))
    res = run(
        ["classify", "--space", specs["z"], "--window-radius", "10", "--map", str(map_file),
         "--target-space", specs["z"], "--target-window-radius", "20", "--c", "1"]
    )
    assert res.exit_code == 0
    assert res.payload["equivalence"] and res.payload["bi_lipschitz"]


def test_verify_dispatch_and_unknown_kind(specs, tmp_path):
    res = run(["folner", "--space", specs["z"], "--r", "1", "--eps", "1/10"])
    cert = tmp_path / "cert.json"
    cert.write_text(serialization.canonical_dumps(res.payload))
    assert run(["verify", "--file", str(cert)]).exit_code == 0
    junk = tmp_path / "junk.json"
    junk.write_text(json.dumps({"schema": "coarsekit/1", "kind": "mystery"}))
    assert run(["verify", "--file", str(junk)]).exit_code == 3


def test_byte_identical_reruns(specs):
    argv = ["matching", "--space", specs["fg2"], "--window-radius", "4", "--r", "1"]
    first = payload_bytes(run(argv))
    second = payload_bytes(run(argv))
    assert first == second
    argv2 = ["components", "--space", specs["pl"], "--r", "3"]
    assert payload_bytes(run(argv2)) == payload_bytes(run(argv2))
