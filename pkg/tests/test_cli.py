import json

import numpy as np
import pytest

from fredlag import io
from fredlag.cli import main
from fredlag.maslov import generator_loop
from fredlag.spectral_flow import SymmetricPath
from fredlag.symplectic import SymplecticSpace, random_lagrangian


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def frame(Q):
    Q = np.asarray(Q, dtype=float)
    return {"n": Q.shape[1], "frame": Q.tolist()}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def machine(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "machine")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def plane(tmp_path):
    c = np.sqrt(0.5)
    return {
        "L0": write(tmp_path, "L0.json", frame([[1], [0]])),
        "L1": write(tmp_path, "L1.json", frame([[0], [1]])),
        "diag": write(tmp_path, "diag.json", frame([[c], [c]])),
    }


def test_gen_then_maslov(tmp_path, capsys, plane):
    out = tmp_path / "loop.json"
    assert main(["gen", "1", "2", "64", "-o", str(out)]) == 0
    rep = machine(capsys, "maslov", str(out), plane["L1"])
    assert rep["results"]["maslov_index"] == -2
    assert rep["results"]["det2_winding"] == 2
    assert rep["verdicts"] == {"certificate_valid": True, "oracle_consistent": True}
    assert len(rep["inputs"]["path"]["sha256"]) == 64


def test_gen_to_stdout_roundtrips(capsys):
    code, out, _ = run(capsys, "gen", "2", "-1", "40")
    assert code == 0
    path = io.lagrangian_path_from_record(json.loads(out))
    ref = generator_loop(SymplecticSpace(2), -1, 40)
    assert np.array_equal(path.times, ref.times)
    assert all(np.array_equal(a.Q, b.Q) for a, b in zip(path.frames, ref.frames))


def test_maslov_rotation_record(tmp_path, capsys, plane):
    rec = write(tmp_path, "rot.json", {"type": "rotation", "n": 1, "k": 2, "samples": 64})
    assert machine(capsys, "maslov", rec, plane["L1"])["results"]["maslov_index"] == -2


def test_coarse_rotation_exits_2(tmp_path, capsys, plane):
    rec = write(tmp_path, "rot.json", {"type": "rotation", "n": 1, "k": 2, "samples": 2})
    code, _, err = run(capsys, "maslov", rec, plane["L1"])
    assert code == 2 and "interval" in err


def test_gap_diagonal_line(capsys, plane):
    rep = machine(capsys, "gap", plane["L0"], plane["L1"], plane["diag"])
    r = rep["results"]
    assert r["kernel_dim"] == 0
    assert r["min_modulus"] == pytest.approx(1.0)
    assert r["graph_norm"] == pytest.approx(np.sqrt(2))
    assert r["gap_L_L0"] == pytest.approx(np.sqrt(0.5))
    assert rep["verdicts"] == {"lower_inequality": True, "upper_inequality": True}


def test_gap_requires_complementary_pair(capsys, plane):
    code, _, _ = run(capsys, "gap", plane["L0"], plane["L0"], plane["diag"])
    assert code == 2


def test_transport_identity_and_J(capsys, plane):
    rep = machine(capsys, "transport", plane["L0"], plane["L0"])
    assert rep["results"]["rank_U_minus_I"] == 0
    rep = machine(capsys, "transport", plane["L0"], plane["L1"])
    assert np.allclose(rep["results"]["U"], [[0, -1], [1, 0]], atol=1e-9)
    assert rep["results"]["K_rank"] == 1


def test_complement(tmp_path, capsys):
    space = SymplecticSpace(2)
    L0 = write(tmp_path, "a.json", frame(space.horizontal().Q))
    Q = np.zeros((4, 2))
    Q[0, 0] = 1.0
    Q[3, 1] = 1.0  # span{e1, e4} meets the horizontal plane in a line
    L1 = write(tmp_path, "b.json", frame(Q))
    rep = machine(capsys, "complement", L0, L1)
    assert rep["results"]["dim_L0_cap_L1"] == 1
    assert rep["results"]["dim_L0_cap_L1_prime"] == 0
    assert rep["results"]["rank_P_diff"] <= 2
    assert io.frame_from_record(rep["results"]["L1_prime"]).n == 2


def test_specflow(tmp_path, capsys):
    path = SymmetricPath.from_function(lambda t: np.array([[t - 0.5]]), 11)
    f = write(tmp_path, "sf.json", io.symmetric_path_to_record(path))
    rep = machine(capsys, "specflow", f)
    assert rep["results"]["spectral_flow"] == 1
    assert sum(rep["certificates"]["intervals"]["contribution"]) == 1
    code, out, _ = run(capsys, "specflow", f)
    assert code == 0 and "spectral_flow: 1" in out


def test_check_accepts_and_rejects(tmp_path, capsys, plane):
    assert run(capsys, "check", plane["diag"])[0] == 0
    Q = np.zeros((4, 2))
    Q[0, 0] = Q[2, 1] = 1.0
    bad = write(tmp_path, "bad.json", frame(Q))
    code, out, _ = run(capsys, "check", bad)
    assert code == 1 and "isotropy" in out


def test_check_path_step_cap(tmp_path, capsys):
    space = SymplecticSpace(1)
    rec = {"n": 1, "samples": [{"t": 0.0, "frame": space.horizontal().Q.tolist()},
                               {"t": 1.0, "frame": space.vertical().Q.tolist()}]}
    code, out, _ = run(capsys, "check", write(tmp_path, "p.json", rec))
    assert code == 1 and "step_cap" in out


def test_invalid_input_exit_codes(tmp_path, capsys, plane):
    assert run(capsys, "maslov", str(tmp_path / "missing.json"), plane["L0"])[0] == 1
    notjson = tmp_path / "x.json"
    notjson.write_text("{")
    assert run(capsys, "check", str(notjson))[0] == 1
    assert main(["nonsense"]) == 1
    assert main(["gen", "1", "x", "64"]) == 1


def test_dumps_keeps_17_digits():
    x = 0.1 + 0.2
    assert json.loads(io.dumps({"x": x}))["x"] == x
    assert io.dumps([float("inf")]) == "[Infinity]"
    L = random_lagrangian(SymplecticSpace(3), 0)
    back = io.frame_from_record(json.loads(io.dumps(io.frame_to_record(L))))
    assert np.array_equal(back.Q, L.Q)


def test_constant_path_has_index_zero(tmp_path, capsys, plane):
    Q = [[np.cos(0.3)], [np.sin(0.3)]]
    rec = {"n": 1, "samples": [{"t": t, "frame": Q} for t in (0.0, 0.5, 1.0)]}
    rep = machine(capsys, "maslov", write(tmp_path, "c.json", rec), plane["L0"])
    assert rep["results"]["maslov_index"] == 0


def test_machine_output_is_deterministic(tmp_path, capsys, plane):
    space = SymplecticSpace(3)
    a = write(tmp_path, "a.json", io.frame_to_record(random_lagrangian(space, 1)))
    b = write(tmp_path, "b.json", io.frame_to_record(random_lagrangian(space, 2)))
    for argv in (["complement", a, b, "--seed", "5"], ["transport", a, b]):
        first = run(capsys, *argv, "--format", "machine")
        assert run(capsys, *argv, "--format", "machine") == first


def test_text_and_machine_report_the_same_numbers(capsys, plane):
    rep = machine(capsys, "gap", plane["L0"], plane["L1"], plane["diag"])
    code, text, _ = run(capsys, "gap", plane["L0"], plane["L1"], plane["diag"])
    assert code == 0
    for key in ("gap_L_L0", "min_modulus", "graph_norm", "gap_L0_L1"):
        assert f"{key}: {io.format_number(rep['results'][key])}" in text
    assert "ok: True" in run(capsys, "check", plane["diag"])[1]
