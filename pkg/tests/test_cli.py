"""End-to-end CLI runs: formats, exit codes, tamper detection, figures."""

import json
from pathlib import Path

from almostcircles.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def represent(capsys, tmp_path, geometry, *extra):
    out = tmp_path / "certificate.json"
    code, stdout, stderr = run(
        capsys, "represent", str(CORPUS / geometry), "--out", str(out), *extra
    )
    return code, out, stdout, stderr


def test_represent_chain3(capsys, tmp_path):
    code, cert_path, stdout, _ = represent(
        capsys, tmp_path, "chain3.json", "--epsilon", "0.5", "--family-id", "cli-chain"
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["verdict"] == "pass"
    assert summary["multiplicity"] == 2
    cert = json.loads(cert_path.read_text())
    assert cert["format"] == "almostcircles-certificate"
    assert len(cert["members"]) == 3


def test_represent_powerset2_small_epsilon(capsys, tmp_path):
    code, cert_path, stdout, _ = represent(
        capsys, tmp_path, "powerset2.json", "--epsilon", "0.01", "--family-id", "cli-pow"
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["multiplicity"] == 11
    assert summary["accuracy"] >= 0.99


def test_represent_rejects_non_geometry(capsys, tmp_path):
    code, _, stdout, stderr = represent(capsys, tmp_path, "not_a_geometry.json")
    assert code == 2
    assert stdout == ""
    lines = [json.loads(line) for line in stderr.splitlines()]
    assert any(entry.get("witness") for entry in lines)


def test_verify_round_trip(capsys, tmp_path):
    code, cert_path, _, _ = represent(
        capsys, tmp_path, "diamond3.json", "--family-id", "cli-diamond"
    )
    assert code == 0
    code, stdout, _ = run(capsys, "verify", str(cert_path))
    assert code == 0
    assert json.loads(stdout)["verdict"] == "pass"


def test_verify_flags_tampered_certificate(capsys, tmp_path):
    code, cert_path, _, _ = represent(
        capsys, tmp_path, "chain3.json", "--family-id", "cli-tamper"
    )
    assert code == 0
    cert = json.loads(cert_path.read_text())
    inner = next(m for m in cert["members"] if m["element"] == 1)
    num, den = inner["matrix"][0][0].split("/")
    inner["matrix"][0][0] = f"{num}/{int(den) * 2}"  # halve the value
    cert_path.write_text(json.dumps(cert))
    code, stdout, _ = run(capsys, "verify", str(cert_path))
    assert code == 3
    out = json.loads(stdout)
    assert out["verdict"] == "fail"
    assert out["first_failure"] == "isomorphism"


def test_verify_rejects_malformed_file(capsys, tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("{not json")
    code, _, _ = run(capsys, "verify", str(path))
    assert code == 2


def test_represent_rejects_bad_epsilon(capsys, tmp_path):
    code, _, _, _ = represent(capsys, tmp_path, "chain3.json", "--epsilon", "1.5")
    assert code == 2
    code, _, _, _ = represent(capsys, tmp_path, "chain3.json", "--multiplicity", "0")
    assert code == 2


def test_represent_multiplicity_override(capsys, tmp_path):
    code, cert_path, stdout, _ = represent(
        capsys, tmp_path, "chain3.json", "--multiplicity", "3", "--family-id", "ovr"
    )
    assert code == 0
    assert json.loads(stdout)["multiplicity"] == 3
    code, stdout, _ = run(capsys, "verify", str(cert_path))
    assert code == 0


def test_represent_rejects_undersized_override(capsys, tmp_path):
    # m=1 with t=3 gives accuracy below the default 0.5 target.
    code, _, _, _ = represent(
        capsys, tmp_path, "chain3.json", "--multiplicity", "1", "--family-id", "small"
    )
    assert code == 3


def test_certificates_byte_reproducible(capsys, tmp_path):
    _, first, _, _ = represent(capsys, tmp_path, "powerset2.json", "--family-id", "rep")
    data1 = first.read_bytes()
    first.unlink()
    _, second, _, _ = represent(capsys, tmp_path, "powerset2.json", "--family-id", "rep")
    assert data1 == second.read_bytes()


def test_dim_command(capsys):
    code, stdout, _ = run(capsys, "dim", str(CORPUS / "powerset3.json"))
    assert code == 0
    out = json.loads(stdout)
    assert out["convex_dimension"] == 3
    assert out["maximal_chains"] == 6
    code, _, _ = run(capsys, "dim", str(CORPUS / "not_a_geometry.json"))
    assert code == 2


def test_render_svg_and_png(capsys, tmp_path):
    code, cert_path, _, _ = represent(
        capsys, tmp_path, "chain3.json", "--family-id", "cli-render"
    )
    assert code == 0
    svg = tmp_path / "family.svg"
    code, _, _ = run(
        capsys, "render", str(cert_path), "--out", str(svg), "--triangles"
    )
    assert code == 0
    text = svg.read_text()
    assert text.startswith("<svg")
    assert text.count("<path") == 3
    assert "<polygon" in text
    png = tmp_path / "family.png"
    code, _, _ = run(capsys, "render", str(cert_path), "--out", str(png))
    assert code == 0
    assert png.stat().st_size > 1000


def test_render_exaggeration_changes_geometry(capsys, tmp_path):
    code, cert_path, _, _ = represent(
        capsys, tmp_path, "chain3.json", "--family-id", "cli-exagg"
    )
    plain = tmp_path / "plain.svg"
    loud = tmp_path / "loud.svg"
    assert run(capsys, "render", str(cert_path), "--out", str(plain))[0] == 0
    assert (
        run(capsys, "render", str(cert_path), "--out", str(loud), "--exaggerate", "40")[0]
        == 0
    )
    assert plain.read_text() != loud.read_text()


def test_props_battery(capsys, tmp_path):
    out_dir = tmp_path / "report"
    code, stdout, _ = run(capsys, "props", "--out-dir", str(out_dir), "--seed", "7")
    assert code == 0
    assert "auxiliary-peak" in stdout
    assert "fail" not in stdout.split()
    assert (out_dir / "props.csv").exists()
    for name in ("function_family.png", "accuracy.png", "rigidity.png"):
        assert (out_dir / name).stat().st_size > 1000
    rows = (out_dir / "props.csv").read_text().splitlines()
    assert rows[0] == "check,metric,value,threshold,status"
    assert all(line.endswith("pass") for line in rows[1:])


def test_corpus_represent_verify_all(capsys, tmp_path):
    for name in ("chain3", "powerset2", "diamond3", "powerset3"):
        out = tmp_path / f"{name}.cert.json"
        code, _, _ = run(
            capsys,
            "represent",
            str(CORPUS / f"{name}.json"),
            "--out",
            str(out),
            "--family-id",
            f"corpus-{name}",
        )
        assert code == 0, name
        code, stdout, _ = run(capsys, "verify", str(out))
        assert code == 0, name
        assert json.loads(stdout)["verdict"] == "pass"
