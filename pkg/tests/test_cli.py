import dataclasses
import json

import pytest

from avgtverberg import io, planner
from avgtverberg.cli import main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _field(text, name):
    for line in text.splitlines():
        if line.startswith(name + " ") or line.startswith(name + "\t"):
            return line.split()[1]
    raise AssertionError(f"no {name!r} line in output:\n{text}")


@pytest.mark.parametrize("argv,n,tight", [
    (["--theorem", "1.3", "-p", 3, "-k", 2, "-r", 1, "-a", 0, "-d", 2], 16, 24),
    (["--theorem", "1.3", "-p", 3, "-k", 2, "-r", 2, "-a", 1, "-d", 1], 31, 34),
    (["--theorem", "1.4", "-p", 2, "-k", 1, "-r", 3, "-d", 2], 7, 15),
])
def test_plan_dimensions(capsys, argv, n, tight):
    code, out, _ = _run(capsys, "plan", *argv)
    assert code == 0
    assert int(_field(out, "n")) == n
    assert int(_field(out, "N(q,d)")) == tight


def test_plan_identities_listing(capsys):
    code, out, _ = _run(capsys, "plan", "--theorem", "1.3", "-p", 3, "-k", 1, "-r", 3, "-d", 1,
                        "--ell", 3, "--identities")
    assert code == 0
    assert "Avg(x_0, x_4, x_8) = Avg(x_0, x_5, x_7)" in out


def test_plan_file_round_trip(tmp_path, capsys):
    path = tmp_path / "plan.json"
    code, _, _ = _run(capsys, "plan", "--theorem", "1.3", "-p", 3, "-k", 2, "-r", 2, "-a", 1,
                      "-d", 1, "--ell", 2, "-o", path)
    assert code == 0
    raw = path.read_text()
    doc = json.loads(raw)
    plan, ell = io.plan_from_dict(doc)
    assert io.dumps(io.plan_document(plan, doc["manifest"], ell)) == raw
    assert doc["n"] == 31 and doc["certificate"]["nonzero"]
    assert "Avg(x_0, x_1) = Avg(x_3, x_4)" in doc["schedule"]["identities"]


def test_tampered_plan_is_rejected(tmp_path, capsys):
    path = tmp_path / "plan.json"
    _run(capsys, "plan", "--theorem", "1.4", "-p", 2, "-k", 1, "-r", 2, "-d", 2, "-o", path)
    doc = json.loads(path.read_text())
    doc["n"] = 4
    path.write_text(json.dumps(doc))
    code, _, _ = _run(capsys, "solve", "--plan", path, "--random-map")
    assert code == 1


def test_invalid_plan_parameters(capsys):
    code, _, err = _run(capsys, "plan", "--theorem", "1.3", "-p", 4, "-k", 1, "-d", 1)
    assert code == 1 and "prime" in err


def test_uncertifiable_exit_code(capsys, monkeypatch):
    real = planner._certify
    monkeypatch.setattr(planner, "_certify",
                        lambda *args: dataclasses.replace(real(*args), nonzero=False))
    planner.plan_orbit_averages.cache_clear()
    try:
        code, out, _ = _run(capsys, "plan", "--theorem", "1.3", "-p", 5, "-k", 1, "-a", 1, "-d", 1)
    finally:
        planner.plan_orbit_averages.cache_clear()
    assert code == 3 and "h = " in out


def _plan(tmp_path, capsys, *argv):
    path = tmp_path / "plan.json"
    assert _run(capsys, "plan", *argv, "-o", path)[0] == 0
    return path


def test_solve_block_plan(tmp_path, capsys):
    plan = _plan(tmp_path, capsys, "--theorem", "1.4", "-p", 2, "-k", 1, "-r", 2, "-d", 2)
    cfg, rep, mp = tmp_path / "cfg.json", tmp_path / "rep.json", tmp_path / "map.json"
    code, _, err = _run(capsys, "solve", "--plan", plan, "--random-map", "--seed", 3,
                        "--map-out", mp, "-o", cfg, "--report", rep)
    assert code == 0 and "converged" in err
    report = io.read(rep)
    assert report["alternating_sum"] < 1e-6
    assert report["planar_case"] in ("a", "b")
    code, _, _ = _run(capsys, "verify", "--plan", plan, "--map", mp, "--config", cfg,
                      "--report", tmp_path / "v.json")
    assert code == 0 and io.read(tmp_path / "v.json")["within_tolerance"]


def test_solve_is_reproducible(tmp_path, capsys):
    plan = _plan(tmp_path, capsys, "--theorem", "1.3", "-p", 3, "-k", 1, "-a", 1, "-d", 2)

    def payload(name):
        out = tmp_path / name
        assert _run(capsys, "solve", "--plan", plan, "--random-map", "--seed", 5, "--n", 8,
                    "-o", out)[0] == 0
        doc = io.read(out)
        doc["manifest"].pop("wall_clock_s")
        return io.dumps(doc)

    assert payload("a.json") == payload("b.json")


def test_solve_unconverged_exit_code(tmp_path, capsys):
    plan = _plan(tmp_path, capsys, "--theorem", "1.3", "-p", 3, "-k", 1, "-a", 1, "-d", 2)
    out = tmp_path / "cfg.json"
    code, _, err = _run(capsys, "solve", "--plan", plan, "--random-map", "--n", 5, "--quiet", "-o", out)
    assert code == 2 and "NOT converged" in err
    assert out.exists()


def test_verify_rejects_overlapping_faces(tmp_path, capsys):
    plan = _plan(tmp_path, capsys, "--theorem", "1.3", "-p", 2, "-k", 1, "-a", 1, "-d", 2)
    mp = tmp_path / "map.json"
    io.write(mp, {"n": 3, "d": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "post_map": None})
    cfg = tmp_path / "cfg.json"
    io.write(cfg, {"orders": [2, 1], "groups": [
        {"index": 0, "support": [0, 1], "weights": [0.5, 0.5]},
        {"index": 1, "support": [1, 2], "weights": [0.5, 0.5]}]})
    code, _, err = _run(capsys, "verify", "--plan", plan, "--map", mp, "--config", cfg)
    assert code == 1 and "overlaps" in err


def test_verify_out_of_tolerance(tmp_path, capsys):
    plan = _plan(tmp_path, capsys, "--theorem", "1.3", "-p", 2, "-k", 1, "-a", 1, "-d", 2)
    mp = tmp_path / "map.json"
    io.write(mp, {"n": 3, "d": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "post_map": None})
    cfg = tmp_path / "cfg.json"
    io.write(cfg, {"orders": [2, 1], "groups": [
        {"index": 0, "support": [0, 1], "weights": [0.5, 0.5]},
        {"index": 1, "support": [2, 3], "weights": [0.5, 0.5]}]})
    code, _, _ = _run(capsys, "verify", "--plan", plan, "--map", mp, "--config", cfg,
                      "--report", tmp_path / "r.json")
    assert code == 2


def test_missing_file(capsys, tmp_path):
    code, _, _ = _run(capsys, "solve", "--plan", tmp_path / "nope.json", "--random-map")
    assert code == 1


@pytest.mark.parametrize("orders,d,verdict", [([6], 1, "zero"), ([4], 1, "nonzero"), ([2, 2], 3, "nonzero")])
def test_obstruction_all_nonzero(capsys, orders, d, verdict):
    code, out, _ = _run(capsys, "obstruction", "--orders", *orders, "--all-nonzero", "-d", d)
    assert code == 0
    assert out.splitlines()[0].split(":")[1].split()[0] == verdict


def test_obstruction_both_parts(tmp_path, capsys):
    chars = tmp_path / "chars.json"
    chars.write_text("[[1]]")
    out_file = tmp_path / "obs.json"
    code, out, _ = _run(capsys, "obstruction", "--orders", 2, "--characters", chars, "-d", 5,
                        "-o", out_file)
    assert code == 0
    doc = io.read(out_file)
    assert doc["complex"]["n"] == 11 and doc["complex"]["nonzero"]
    assert doc["real"]["n"] == 6 and doc["real"]["m"] == doc["real"]["m_prime"] == 1
    assert doc["real"]["orientable"] is False
    assert doc["manifest"]["input_digests"]


def test_obstruction_malformed_characters(tmp_path, capsys):
    chars = tmp_path / "chars.json"
    chars.write_text("[[7]]")
    assert _run(capsys, "obstruction", "--orders", 3, "--characters", chars, "-d", 1)[0] == 1
    chars.write_text("{not json")
    assert _run(capsys, "obstruction", "--orders", 3, "--characters", chars, "-d", 1)[0] == 1


def test_oracle_unit_square(capsys):
    code, out, _ = _run(capsys, "oracle", "--radon", "--unit-square")
    assert code == 0
    doc = json.loads(out)
    assert sorted(map(sorted, doc["partition"])) == [[0, 2], [1, 3]]
    assert doc["witness"] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_oracle_tverberg_file(tmp_path, capsys):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[1, 0], [0.5, 0.87], [-0.5, 0.87], [-1, 0], [-0.5, -0.87],
                               [0.5, -0.87], [0, 0]]))
    code, out, _ = _run(capsys, "oracle", "--tverberg", 3, "--points", pts)
    assert code == 0 and json.loads(out)["found"]
    code, _, _ = _run(capsys, "oracle", "--tverberg", 3, "--unit-square")
    assert code == 1
