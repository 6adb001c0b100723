import json

import numpy as np
import pytest

from conftest import DATA, random_contraction, random_physical_sdm
from qlti import cli
from qlti.core import FrequencyGrid, GuardError, random_group_element
from qlti.decompose import circuit_eval, mesh_decompose, optical_decomposition
from qlti.io import (
    SchemaError,
    circuit_to_doc,
    dilation_to_doc,
    doc_to_circuit,
    doc_to_dilation,
    doc_to_matfn,
    doc_to_noise,
    dump_json,
    load_json,
    matfn_to_doc,
    noise_to_doc,
    read_csv,
    validate,
    write_csv,
)
from qlti.quantize import dilate, minimal_noise
from qlti.sdm import SpectralDensityMatrix
from qlti.transfer import sample_entry, sample_transfer_function


def _roundtrip(doc):
    return json.loads(dump_json(doc))


def test_matfn_roundtrip_is_lossless():
    M = random_group_element(2, seed=1, grid=FrequencyGrid([0.0, 0.3, 1.0]))
    back = doc_to_matfn(_roundtrip(matfn_to_doc(M)))
    assert np.array_equal(back.samples, M.samples)
    S = random_physical_sdm(2, seed=2, omega=(0.0, 1.0))
    back = doc_to_matfn(_roundtrip(matfn_to_doc(S)))
    assert isinstance(back, SpectralDensityMatrix)
    assert np.array_equal(back.samples, S.samples)


def test_noise_and_dilation_roundtrip():
    model = minimal_noise(random_contraction(5, omega=(0.0, 0.6)))
    back = doc_to_noise(_roundtrip(noise_to_doc(model)))
    assert np.array_equal(back.N.samples, model.N.samples)
    assert np.array_equal(back.ell, model.ell)
    dil = dilate(model)
    dback = doc_to_dilation(_roundtrip(dilation_to_doc(dil)))
    assert np.array_equal(dback.M_ext.samples, dil.M_ext.samples)


def test_circuit_roundtrip():
    M = random_group_element(2, seed=3, grid=FrequencyGrid([0.0, 0.9]))
    circ = optical_decomposition(M)
    meshes = [{"V1": mesh_decompose(circ.V1[k])} for k in range(2)]
    back = doc_to_circuit(_roundtrip(circuit_to_doc(circ, source=M)))
    for w in M.grid.omega:
        assert np.allclose(circuit_eval(back, w), M.at(w), atol=1e-12)
    validate(_roundtrip(circuit_to_doc(circ, meshes=meshes)))


def test_schema_rejects_bad_documents():
    with pytest.raises(SchemaError):
        validate({"schema": "qlti.matfn/1"})
    with pytest.raises(SchemaError):
        validate({"schema": "nope/9"})


def test_csv_roundtrip():
    text = write_csv("t", ["a", "b"], [[0.1, 1 / 3], [2, True]], meta={"seed": 4})
    table, meta, cols, vals = read_csv(text)
    assert (table, meta["seed"], cols) == ("t", "4", ["a", "b"])
    assert vals[0, 1] == 1 / 3 and vals[1, 1] == 1.0


def test_transfer_entries():
    w = np.array([0.0, 1.0, 2.0])
    lowpass = sample_entry({"num": [1], "den": [0.5, 1]}, w)
    assert np.allclose(lowpass, 1 / (1 - 0.5j * w))
    delay = sample_entry({"num": [1], "den": [1], "delay": 0.3}, w)
    assert np.allclose(delay, np.exp(0.3j * w))
    with pytest.raises(GuardError):
        sample_entry({"num": [1], "den": [1, 0]}, w)  # pole at s = 0
    spec = load_json(DATA / "lossy_lowpass.transfer.json")
    G = sample_transfer_function(spec, FrequencyGrid.linear(0.0, 2.0, 5))
    assert G.shape == (2, 2) and np.isrealobj(G.samples[0]) or np.abs(G.samples[0].imag).max() == 0


def test_presets():
    g = FrequencyGrid.linear(0.0, 1.0, 4)
    cav = sample_transfer_function({"preset": "cavity", "R": 0.9, "phi0": 0.2}, g)
    assert cav.shape == (2, 2)
    with pytest.raises(ValueError):
        sample_transfer_function({"preset": "unknown"}, g)


# ---------------------------------------------------------------------------
# command line


def test_cli_pipeline_in_process(tmp_path):
    noise, dil, circ = (tmp_path / f for f in ("n.json", "d.json", "c.json"))
    assert cli.main(["quantize", str(DATA / "contraction.json"), "-o", str(noise)]) == 0
    assert cli.main(["dilate", str(noise), "-o", str(dil)]) == 0
    assert cli.main(["decompose", str(dil), "--mesh", "-o", str(circ)]) == 0
    assert cli.main(["check", str(circ), "-o", str(tmp_path / "check.csv")]) == 0
    _, _, cols, vals = read_csv((tmp_path / "check.csv").read_text())
    assert np.all(vals[:, cols.index("reconstruction_residual")] < 1e-8)


def test_cli_williamson_and_bound(tmp_path, capsys):
    assert cli.main(["williamson", str(DATA / "two_mode_sdm.json"), "-o", "-"]) == 0
    _, _, cols, vals = read_csv(capsys.readouterr().out)
    assert "sigma_1" in cols and np.all(vals[:, cols.index("margin")] >= -1e-10)
    assert cli.main(["bound", str(DATA / "two_mode_sdm.json"), "-o", "-"]) == 0


def test_cli_detect_tomography(tmp_path):
    out = tmp_path / "rec.json"
    code = cli.main(
        ["detect", str(DATA / "two_mode_sdm.json"), "--mode", "homodyne", "--tomography", str(out), "-o", str(tmp_path / "d.csv")]
    )
    assert code == 0
    src = doc_to_matfn(load_json(DATA / "two_mode_sdm.json"))
    rec = doc_to_matfn(load_json(out))
    assert np.allclose(rec.samples, src.samples, atol=1e-10)


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "qlti.matfn/1"}')
    assert cli.main(["check", str(bad)]) == 2
    pole = tmp_path / "pole.json"
    dump_json({"schema": "qlti.transfer/1", "entries": [[{"num": [1], "den": [1, 0]}, 0], [0, 1]]}, pole)
    assert cli.main(["quantize", str(pole), "--start", "0", "--stop", "1", "--count", "3", "-o", "-"]) == 4
    # an SDM violating the uncertainty relation fails the physicality check
    g = FrequencyGrid([0.0, 1.0])
    unphys = tmp_path / "unphys.json"
    dump_json(matfn_to_doc(SpectralDensityMatrix.constant(g, np.eye(2) / 4)), unphys)
    assert cli.main(["check", str(unphys), "-o", "-"]) == 3


def test_demo_output_is_deterministic(tmp_path):
    for demo in ("cavity", "oscillator", "two-mode"):
        a, b = tmp_path / f"{demo}-a.csv", tmp_path / f"{demo}-b.csv"
        assert cli.main(["demo", demo, "-o", str(a)]) == 0
        assert cli.main(["demo", demo, "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        table, _, _, vals = read_csv(a.read_text())
        assert table == f"demo-{demo}" and vals.size
