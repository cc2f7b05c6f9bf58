import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ebtimes import __version__
from ebtimes.channel import encode_matrix, gallery, to_json_dict
from ebtimes.cli import main
from ebtimes.structure import classify


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), (json.loads(err) if err.strip() else None)


@pytest.fixture
def make(tmp_path, capsys):
    def _make(name, *params):
        path = tmp_path / f"{name}.json"
        code, rep, _ = run(capsys, "gallery", name, *params, "--out", path)
        assert code == 0 and rep["payload"]["cptp"]
        return path

    return _make


def test_gallery_writes_valid_channel(make):
    path = make("depolarizing", "--d", 3, "--p", 0.9)
    obj = json.loads(path.read_text())
    assert obj["dim"] == 3 and obj["repr"] == "transfer"


def test_gallery_rejects_bad_lambda(capsys):
    code, _, err = run(capsys, "gallery", "irreducible_period2", "--lambda", 2.0)
    assert code == 2 and "lambda" in err["error"]


def test_gallery_rejects_unknown_name(capsys):
    assert main(["gallery", "nope"]) == 2


def test_report_envelope(make, capsys):
    path = make("depolarizing", "--d", 2, "--p", 0.5)
    code, rep, _ = run(capsys, "--seed", 3, "classify", path)
    assert code == 0
    assert rep["schema_version"] == 1 and rep["command"] == "classify" and rep["version"] == __version__
    assert rep["seed"] == 3
    assert rep["tolerances"]["psd"] == 1e-9
    assert rep["channel_digest"]["dim"] == 2 and len(rep["channel_digest"]["checksum"]) == 64
    assert rep["payload"]["primitive"] is True


def test_classify_period2(make, capsys):
    code, rep, _ = run(capsys, "classify", make("irreducible_period2", "--lambda", 0.5))
    assert code == 0 and rep["payload"]["irreducible"] and rep["payload"]["z"] == 2


def test_classify_hadamard_cycle_period(make, capsys):
    code, rep, _ = run(capsys, "classify", make("hadamard_cycle", "--d", 4, "--eps", 0.5))
    assert code == 0 and rep["payload"]["lcm_period"] == 4 and len(rep["payload"]["peripheral_eigenvalues"]) == 4


def test_round_trip_matches_in_memory(make, capsys):
    path = make("hadamard_cycle", "--d", 3, "--eps", 0.4)
    _, a, _ = run(capsys, "classify", path)
    _, b, _ = run(capsys, "classify", path)
    assert a == b
    st = classify(gallery("hadamard_cycle", d=3, eps=0.4))
    assert a["payload"]["lcm_period"] == st.lcm_period
    assert a["payload"]["sigma_tr_spectrum"] == [float(x) for x in np.linalg.eigvalsh(st.sigma_tr)]


def test_seed_from_environment(make, capsys, monkeypatch):
    path = make("depolarizing")
    monkeypatch.setenv("EBTIMES_SEED", "17")
    assert run(capsys, "classify", path)[1]["seed"] == 17
    assert run(capsys, "--seed", 2, "classify", path)[1]["seed"] == 2
    monkeypatch.setenv("EBTIMES_SEED", "x")
    assert main(["classify", str(path)]) == 2


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "classify", bad)
    assert code == 2 and err["exit_code"] == 2
    assert main(["classify", str(tmp_path / "missing.json")]) == 2


def test_non_cptp_input(tmp_path, capsys):
    path = tmp_path / "two.json"
    path.write_text(json.dumps({"dim": 2, "repr": "transfer", "matrices": [encode_matrix(2 * np.eye(4))]}))
    code, _, err = run(capsys, "classify", path)
    assert code == 3 and "residuals" in err


def test_eb_index_examples(make, capsys):
    _, rep, _ = run(capsys, "eb-index", make("depolarizing", "--d", 2, "--p", 0.5))
    assert rep["payload"]["ppt_lower"] == 2 and rep["payload"]["theorem_bound"] == pytest.approx(3.0)
    _, rep, _ = run(capsys, "eb-index", make("qubit_nilpotent"), "--trace")
    assert rep["payload"]["interval"] == [1, 2] and len(rep["payload"]["trace"]) == 2
    _, rep, _ = run(capsys, "eb-index", make("irreducible_period2", "--lambda", 0.5), "--n-max", 20)
    assert rep["payload"]["verdict"] == "not_eeb_detected" and rep["payload"]["ball_upper"] is None


def test_poincare_command(make, capsys):
    _, rep, _ = run(capsys, "poincare", make("qubit_nilpotent"))
    assert rep["payload"]["k"] == 2 and rep["payload"]["algebra_coincides_at_1"] is False


def test_poincare_on_non_faithful_input(make, capsys):
    code, _, _ = run(capsys, "poincare", make("point"))
    assert code == 3


def test_bounds_examples(make, capsys):
    dep = make("depolarizing", "--d", 2, "--p", math.exp(-1))
    _, rep, _ = run(capsys, "bounds", dep, "--bound", "t_eb_lower")
    assert rep["payload"]["value"] == pytest.approx(math.log(3))
    _, rep, _ = run(capsys, "bounds", "--bound", "t_aqmc", "--K", 1, "--gamma", 1, "--dimB", 2, "--eps", 1)
    assert rep["payload"]["value"] == pytest.approx(2.031, abs=5e-4)


def test_bounds_inapplicable_exits_zero(tmp_path, capsys):
    rng = np.random.default_rng(0)
    from ebtimes.sampling import random_channel

    path = tmp_path / "rand.json"
    path.write_text(json.dumps(to_json_dict(random_channel(2, rng=rng))))
    code, rep, _ = run(capsys, "bounds", path, "--bound", "n_mu_upper")
    assert code == 0 and rep["payload"]["applicable"] is False


def test_bounds_all_and_missing_inputs(make, capsys):
    path = make("qubit_nilpotent")
    code, rep, _ = run(capsys, "bounds", path, "--all")
    assert code == 0
    by_name = {b["name"]: b for b in rep["payload"]["bounds"]}
    assert by_name["t_eb_lower"]["applicable"] is False
    assert by_name["n_eb_upper_discrete"]["value"] == 2
    assert main(["bounds", "--bound", "t_eb_upper"]) == 2
    assert main(["bounds"]) == 2


def test_sep_check(tmp_path, capsys):
    omega = np.array([1, 0, 0, 1]) / math.sqrt(2)
    bell = np.outer(omega, omega)
    path = tmp_path / "bell.json"
    path.write_text(json.dumps({"matrix": encode_matrix(bell)}))
    _, rep, _ = run(capsys, "sep-check", path, "--dims", "2,2")
    assert rep["payload"]["verdict"] == "entangled_certified"
    path.write_text(json.dumps({"matrix": encode_matrix(np.eye(4) / 4)}))
    _, rep, _ = run(capsys, "sep-check", path, "--dims", "2,2")
    assert rep["payload"]["verdict"] == "separable_certified"
    assert main(["sep-check", str(path), "--dims", "3,2"]) == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ebtimes", "--json-indent", "2", "gallery", "depolarizing"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["payload"]["cptp"] is True
