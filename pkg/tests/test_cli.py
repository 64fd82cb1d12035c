import json

import pytest

from qhcodes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_field_dump(capsys):
    code, out, _ = run(capsys, "field-dump", "--e", "3")
    body = json.loads(out)
    assert code == 0
    assert body["delta"] == "0x0f" and body["epsilon"] == "0x2c" and body["reduction"] == "0x43"
    assert body["roots_of_unity_n"] == [1, 58, 59]


def test_even_e_rejected(capsys):
    code, _, err = run(capsys, "field-dump", "--e", "4")
    assert code == 2 and "odd" in err


def test_weights_json_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["weights", "--e", "3", "--r", "3", "--cache-dir", str(tmp_path / "cache")]
    assert main(argv + ["--json", str(a), "--csv", str(tmp_path / "w.csv")]) == 0
    assert main(argv + ["--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    body = json.loads(a.read_text())
    assert body["length"] == 32961 and body["dimension"] == 4 and body["mode"] == "exhaustive"
    assert [w["w"] for w in body["weights"]] == [32384, 32390, 32448, 32454, 32768]
    assert body["minimal"] == "sufficient" and body["d_k"] == {"1": 32384}
    assert list(body) == sorted(body)
    csv = (tmp_path / "w.csv").read_text().splitlines()
    assert csv[0] == "weight,count,mode" and csv[1] == "32384,192,exhaustive"


def test_sampled_weights_need_seed(capsys):
    with pytest.raises(SystemExit, match="--seed"):
        main(["weights", "--e", "3", "--r", "3", "--samples", "5"])


def test_sampled_weights_record_seed(capsys):
    code, out, _ = run(capsys, "weights", "--e", "3", "--r", "3", "--samples", "20", "--seed", "9")
    body = json.loads(out)
    assert code == 0 and body["mode"] == "sampled" and body["seed"] == 9 and body["n_samples"] == 20
    assert body["minimal"] is None
    again = run(capsys, "weights", "--e", "3", "--r", "3", "--samples", "20", "--seed", "9")[1]
    assert again == out


def test_minimality_e5_witness(capsys):
    code, out, _ = run(capsys, "minimality", "--e", "5", "--r", "3", "--samples", "0", "--seed", "1")
    body = json.loads(out)
    assert body["verdict"] == "not cutting"
    assert body["witness"] == [1, 0, 0, 0] and body["witness_span_dim"] == 1


def test_multiset(capsys):
    code, out, _ = run(capsys, "multiset", "--e", "3", "--r", "3", "--j", "56")
    body = json.loads(out)
    assert body["distinct"] == 3 and body["length"] == 32824


def test_cutgap_and_hermitian(capsys):
    code, out, _ = run(capsys, "hermitian-gaps", "--r", "3", "--q", "2")
    assert code == 0
    assert [row["tau"] for row in json.loads(out)["info"]["rows"]] == [0, 1, 1]
    code, _, err = run(capsys, "hermitian-gaps", "--r", "5", "--q", "2")
    assert code == 2 and "outside" in err


def test_cutgap_sampled(capsys):
    code, out, _ = run(capsys, "cutgap", "--e", "3", "--r", "3", "--k", "1", "--samples", "10", "--seed", "2")
    gap = json.loads(out)["gap"]
    assert code == 0 and gap["mode"] == "sampled" and gap["seed"] == 2 and not gap["exact"]


def test_fermat_lines(capsys):
    body = json.loads(run(capsys, "fermat-lines", "--e", "3")[1])
    assert body["spectrum"] == {"0": 1080, "1": 1953, "2": 72, "3": 1056}


def test_verify_paper_rejects_even_e(capsys):
    code, _, err = run(capsys, "verify-paper", "--e", "4")
    assert code != 0


def test_verify_paper_markdown(tmp_path, capsys):
    md = tmp_path / "report.md"
    code = main(["verify-paper", "--e", "3", "--only", "field", "--only", "quadric-gaps",
                 "--markdown", str(md), "--json", str(tmp_path / "r.json")])
    assert code == 0
    lines = md.read_text().splitlines()
    assert lines[0] == "| item | claim | expected | computed | status |"
    assert len(lines) == 4 and all(line.endswith("| PASS |") for line in lines[2:])


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(capsys, "field-dump", "--e", "3", "--json", str(tmp_path / "missing" / "x.json"))
    assert code == 3 and "missing" in err


def test_enumerate_writes_cache(tmp_path, capsys):
    out = tmp_path / "pts.qhvp"
    code, text, _ = run(capsys, "enumerate", "--e", "3", "--r", "2", "--variety", "fermat", "--out", str(out))
    assert code == 0 and json.loads(text)["points"] == 81
    assert out.read_bytes()[:4] == b"QHVP"
