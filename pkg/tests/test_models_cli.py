import json
from fractions import Fraction as F

import pytest

from quantadist.cli import main
from quantadist.functor import ConstLeaf
from quantadist.models import (DistanceInstance, ModelFormatError,
                               certificate_from_json, certificate_to_json,
                               fixture_certificate, fixture_model,
                               functor_from_json, functor_to_json, load_fixture,
                               model_from_json, model_to_json, term_from_json,
                               term_to_json)
from quantadist.quantale import UNIT_OPLUS


def test_functor_json_roundtrip(probchain, exceptions3):
    for model in (probchain, exceptions3):
        doc = functor_to_json(model.functor)
        assert functor_from_json(doc, model.quantale) == model.functor


def test_model_json_roundtrip(probchain, exceptions3):
    for model in (probchain, exceptions3):
        doc = model_to_json(model)
        back = model_from_json(json.loads(json.dumps(doc)))
        assert back.transitions == model.transitions
        assert back.states == model.states


def test_term_json_roundtrip(probchain):
    term = probchain.transitions["x"]
    doc = term_to_json(probchain.functor, term, "subdist", UNIT_OPLUS)
    assert term_from_json(probchain.functor, doc, "subdist", UNIT_OPLUS) == term


def test_certificate_json_roundtrip(exceptions3):
    cert = fixture_certificate("exceptions_cert.json", exceptions3)
    doc = certificate_to_json(cert, UNIT_OPLUS)
    back = certificate_from_json(doc, exceptions3)
    assert back.candidate.entries == cert.candidate.entries
    assert back.witnesses == cert.witnesses


def test_fixture_models_validate():
    prob = fixture_model("probchain.json")
    exc = fixture_model("exceptions.json")
    assert prob.monad == "subdist" and len(prob.states) == 3
    assert exc.monad == "powerset" and len(exc.states) == 12
    transport = model_from_json(load_fixture("transport.json"))
    assert isinstance(transport, DistanceInstance)
    assert set(transport.distributions) == {"P", "Q"}


def test_model_errors():
    with pytest.raises(ModelFormatError):
        model_from_json({"kind": "mystery"})
    doc = model_to_json(fixture_model("probchain.json"))
    del doc["functor"]
    with pytest.raises(ModelFormatError, match="functor"):
        model_from_json(doc)
    bad = model_to_json(fixture_model("probchain.json"))
    bad["transitions"]["x"] = {"id": {"dist": {"x": "1"}}}
    with pytest.raises(ModelFormatError, match="identity leaf"):
        model_from_json(bad)


def fixture_path(name):
    import quantadist
    from pathlib import Path
    return str(Path(quantadist.__file__).parent / "fixtures" / name)


def run_cli(*argv):
    import contextlib
    import io
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_cli_distance_lp():
    code, out, _err = run_cli("distance", "--model", fixture_path("transport.json"),
                              "--pair", "P|Q", "--method", "lp")
    assert code == 0
    assert out.splitlines()[0] == "21/10  [exact]"


def test_cli_distance_lp_inline_literals():
    code, out, _err = run_cli(
        "distance", "--model", fixture_path("transport.json"),
        "--pair", "A:7/10,B:1/10,C:1/5|A:1/5,B:3/10,C:1/2", "--method", "lp")
    assert code == 0 and out.splitlines()[0] == "21/10  [exact]"


def test_cli_distance_kleene_exceptions():
    code, out, _err = run_cli("distance", "--model", fixture_path("exceptions.json"),
                              "--pair", "{x0,y0}|{z0}", "--method", "kleene")
    assert code == 0
    assert out.splitlines()[0] == "1/4  [exact]"


def test_cli_distance_trace_probchain():
    code, out, _err = run_cli("distance", "--model", fixture_path("probchain.json"),
                              "--pair", "y:1|x:1", "--method", "trace",
                              "--max-words", "5")
    assert code == 0
    first = out.splitlines()[0]
    assert first == "15/32  [lower bound (numeric)]"
    assert F(15, 32) < F(1, 2)


def test_cli_certify_accept_and_reject(tmp_path):
    code, out, _err = run_cli("certify", "--model", fixture_path("probchain.json"),
                              "--cert", fixture_path("probchain_cert.json"))
    assert code == 0 and out.startswith("accepted")
    doc = load_fixture("exceptions_cert.json")
    for row in doc["entries"]:
        if row["value"] == "1/4" and row["lhs"]["set"] == ["x0", "y0"]:
            row["value"] = "1/5"
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc))
    code, out, _err = run_cli("certify", "--model", fixture_path("exceptions.json"),
                              "--cert", str(tampered))
    assert code == 1
    assert "rejected at ({x0,y0}, {z0})" in out


def test_cli_laws_quantale_and_mutant():
    code, out, _err = run_cli("laws", "--scope", "quantale", "--grid", "4")
    assert code == 0
    assert "FAIL" not in out
    code, out, _err = run_cli("laws", "--scope", "distlaw", "--mutant-g")
    assert code == 1
    assert "prioritizer compatible with the unit" in out and "FAIL" in out


def test_cli_repro_all():
    for example in ("pp", "pd", "dp", "dd", "transport", "probchain", "exceptions"):
        code, out, _err = run_cli("repro", example)
        assert code == 0, out
        assert "all values reproduced" in out


def test_named_atom_term_json_roundtrip():
    from quantadist.functor import const_atoms
    func = const_atoms(["lo", "hi"], [{"lo": F(0), "hi": F(1)}])
    term = ConstLeaf("hi")
    doc = term_to_json(func, term, "powerset", UNIT_OPLUS)
    assert doc == {"const": {"atom": "hi"}}
    assert term_from_json(func, doc, "powerset", UNIT_OPLUS) == term


def test_cli_json_reports_deterministic():
    first = run_cli("repro", "transport", "--json")
    second = run_cli("repro", "transport", "--json")
    assert first[0] == 0
    assert first[1] == second[1]
    doc = json.loads(first[1])
    assert doc["matches"] is True
    assert "elapsed" not in first[1]


def test_cli_parse_error_exit_code(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _out, err = run_cli("distance", "--model", str(broken),
                              "--pair", "P|Q", "--method", "lp")
    assert code == 2
    assert "line 1" in err


def test_cli_budget_exit_code(tmp_path):
    code, _out, err = run_cli("distance", "--model", fixture_path("exceptions.json"),
                              "--pair", "{x0,y0}|{z0}", "--method", "kleene",
                              "--max-states", "3")
    assert code == 3
    assert "refused" in err


def test_cli_usage_error():
    code, _out, _err = run_cli("distance", "--model", "nope.json",
                               "--pair", "P|Q", "--method", "warp")
    assert code == 2


def test_cli_zero_denominator_weight(tmp_path):
    doc = load_fixture("probchain.json")
    doc["transitions"]["y"]["tuple"][1]["pow"]["a"]["id"]["dist"]["y"] = "1/0"
    broken = tmp_path / "zero.json"
    broken.write_text(json.dumps(doc))
    code, _out, err = run_cli("distance", "--model", str(broken),
                              "--pair", "y:1|x:1", "--method", "trace")
    assert code == 2
    assert "error" in err


def test_cli_distance_json_deterministic():
    runs = [run_cli("distance", "--model", fixture_path("exceptions.json"),
                    "--pair", "{x0,y0}|{z0}", "--method", "kleene", "--json")
            for _ in range(2)]
    assert runs[0][0] == 0
    assert runs[0][1] == runs[1][1]
    doc = json.loads(runs[0][1])
    assert doc["value"] == "1/4" and doc["soundness"] == "exact"
