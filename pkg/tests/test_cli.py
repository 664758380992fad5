import json
import time

import pytest

import asympt.catalogue as cat
from asympt import __version__
from asympt.catalogue import Catalogue
from asympt.cli import DEFAULT_SEED, main, resolve_seed

TRIPLE = "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3\n"


@pytest.fixture
def write(tmp_path):
    def make(text, name="map.txt"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_facon_count(capsys):
    t = time.perf_counter()
    code, out, _ = run(capsys, "facons", "--dim", "3", "--count-only")
    assert (code, out) == (0, "19\n")
    assert time.perf_counter() - t < 0.1


def test_facons_json(capsys):
    code, out, _ = run(capsys, "facons", "--dim", "3", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["n"] == 3 and data["count"] == 19
    assert {"inf": [1, 2, 3], "fixed": []} in data["facons"]
    assert [len(v) for v in data["groups"].values()] == [1, 3, 3, 3, 6, 3]


def test_facons_text(capsys):
    code, out, _ = run(capsys, "facons")
    assert code == 0 and out.startswith("19 facons for n = 3")
    assert "VI: (1)[2,3] (2)[1,3] (3)[1,2]" in out


def test_classify_with_probe(capsys, write):
    code, out, _ = run(capsys, "classify", write(TRIPLE), "--probe")
    data = json.loads(out)
    assert code == 0
    assert [c["equation"] for c in data["components"]] == ["alpha1 = 0", "alpha2 = 0"]
    assert data["oracle_residual"] < 1e-6
    assert data["seed"] == DEFAULT_SEED and data["version"] == __version__
    assert data["tolerances"]["oracle_tol"] == 1e-5


def test_classify_identity(capsys, write):
    code, out, _ = run(capsys, "classify", "-i", write("dim 3\nF1 = x1\nF2 = x2\nF3 = x3"), "--format", "text")
    assert code == 0 and "S_F empty (proper)" in out


def test_classify_not_dominant(capsys, write):
    code, out, _ = run(capsys, "classify", write("dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2"))
    data = json.loads(out)
    assert code == 0 and data["dominant"] is False and data["matched_type"] is None


def test_oracle_mismatch_exit_code(capsys, write):
    code, out, err = run(capsys, "classify", write(TRIPLE), "--probe", "--tol", "1e-30")
    assert code == 3
    assert "exceeds --tol" in err
    assert json.loads(out)["oracle_residual"] > 1e-30


@pytest.mark.parametrize("text", ["dim 2\nF1 = x1\nF2 = x1*x2", "dim 3\nF1 = x1^4\nF2 = x2\nF3 = x3"])
def test_unsupported_input_exit_two(capsys, write, text):
    code, _, err = run(capsys, "classify", write(text))
    assert code == 2 and "supports" in err


def test_parse_error_exit_one(capsys, write):
    code, _, err = run(capsys, "classify", write("dim 3\nF1 = x1 +\nF2 = x2\nF3 = x3"))
    assert code == 1 and "line 2" in err


def test_missing_file_exit_one(capsys, tmp_path):
    code, _, err = run(capsys, "classify", str(tmp_path / "nope.txt"))
    assert code == 1 and "cannot read" in err
    assert run(capsys, "classify")[0] == 1


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["facons", "--dimension", "3"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_seed_precedence(monkeypatch):
    monkeypatch.delenv("ASYMPT_SEED", raising=False)
    assert resolve_seed(None) == DEFAULT_SEED
    monkeypatch.setenv("ASYMPT_SEED", "77")
    assert resolve_seed(None) == 77
    assert resolve_seed(5) == 5


def test_seed_from_environment(capsys, write, monkeypatch):
    monkeypatch.setenv("ASYMPT_SEED", "77")
    code, out, _ = run(capsys, "classify", write(TRIPLE))
    assert json.loads(out)["seed"] == 77
    code, out, _ = run(capsys, "classify", write(TRIPLE), "--seed", "3")
    assert json.loads(out)["seed"] == 3
    monkeypatch.setenv("ASYMPT_SEED", "abc")
    assert run(capsys, "classify", write(TRIPLE))[0] == 1


def test_output_file_is_written_atomically(capsys, write, tmp_path):
    target = tmp_path / "out" / "report.json"
    code, out, _ = run(capsys, "classify", write(TRIPLE), "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["mapping"] == "(x1, x2, x1*x2*x3)"
    assert [p.name for p in target.parent.iterdir()] == ["report.json"]


def test_classify_is_byte_deterministic(capsys, write):
    path = write("dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2")
    _, one, _ = run(capsys, "classify", path, "--probe")
    _, two, _ = run(capsys, "classify", path, "--probe")
    assert one == two


def test_probe(capsys, write, tmp_path):
    export = tmp_path / "cloud.jsonl"
    code, out, _ = run(capsys, "probe", "--input", write(TRIPLE), "--samples", "200", "--export", str(export))
    data = json.loads(out)
    assert code == 0 and data["points"] > 0
    assert {f["equation"] for f in data["fits"]} == {"alpha1 = 0", "alpha2 = 0"}
    lines = export.read_text().splitlines()
    assert len(lines) == data["points"]
    assert set(json.loads(lines[0])) == {"alpha", "sig"}


def test_probe_rejects_bad_config(capsys, write):
    assert run(capsys, "probe", write(TRIPLE), "--radius-start", "1")[0] == 1


@pytest.fixture
def fast_catalogue(monkeypatch):
    calls = []

    def fake(n, d, cfg):
        calls.append(cfg.seed)
        return Catalogue(n, d, [], seed=cfg.seed)
    monkeypatch.setattr(cat, "catalogue", fake)
    return calls


def test_catalogue_cache(capsys, tmp_path, fast_catalogue):
    code1, out1, _ = run(capsys, "catalogue", "--cache-dir", str(tmp_path))
    code2, out2, _ = run(capsys, "catalogue", "--cache-dir", str(tmp_path))
    assert code1 == code2 == 0
    assert out1 == out2
    assert len(fast_catalogue) == 1
    code, out, _ = run(capsys, "catalogue", "--cache-dir", str(tmp_path), "--format", "text")
    assert out.startswith("realizable asymptotic sets, n = 3, degree 2")


def test_catalogue_other_dimensions(capsys, tmp_path):
    assert run(capsys, "catalogue", "--dim", "4", "--cache-dir", str(tmp_path))[0] == 2


def test_check_quick(capsys):
    t = time.perf_counter()
    code, out, _ = run(capsys, "check", "--quick")
    assert time.perf_counter() - t < 5
    assert code == 0 and "checks passed" in out
    assert "FAIL" not in out


@pytest.mark.parametrize("fault, name", [("golden", "golden mappings"), ("facon-count", "facon counts"),
                                         ("homomorphism", "substitution homomorphism")])
def test_check_fault_injection(capsys, fault, name):
    code, out, err = run(capsys, "check", "--quick", "--inject-fault", fault)
    assert code == 2
    assert name in err


def test_check_unknown_fault(capsys):
    assert run(capsys, "check", "--quick", "--inject-fault", "nope")[0] == 1


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


@pytest.mark.slow
def test_check_full(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0
    assert "7/7 checks passed" in out
