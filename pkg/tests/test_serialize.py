"""Document encoding, CSV rendering, and spec-file parsing."""

import csv
import io
import json
import math

import numpy as np
import pytest

from qhist import (
    BridgingSet,
    HistoryState,
    MeasurementSetting,
    OutcomeDistribution,
    TimeGrid,
    hs_inner,
    normalize,
    run_scenario,
    tsirelson_settings,
    s_lgi,
    CorrelatorSpec,
)
from qhist.linalg import identity, maximally_mixed, pauli, projector, qubit_ket
from qhist.serialize import (
    SpecError,
    complex_pair,
    distribution_csv,
    document,
    dumps_csv,
    dumps_json,
    dumps_pretty,
    experiment_from_document,
    format_number,
    history_from_document,
    load_document,
    matrix_document,
    setting_from_document,
    slot_operator_from_document,
    state_from_document,
    to_jsonable,
    trace_csv,
    unitary_from_document,
)


class TestEncoding:
    def test_complex_pair(self):
        assert complex_pair(1.5 - 2.0j) == [1.5, -2.0]

    def test_matrix_document_shape(self):
        doc = matrix_document(pauli("Y"))
        assert doc == [[[0.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [0.0, 0.0]]]

    def test_scalars_pass_through(self):
        assert to_jsonable(np.float64(0.5)) == 0.5
        assert to_jsonable(np.int64(3)) == 3
        assert to_jsonable(np.bool_(True)) is True
        assert to_jsonable(None) is None

    def test_history_state_document(self):
        g = TimeGrid.regular(2)
        h = HistoryState.from_slots(
            g, (projector(qubit_ket("0")), projector(qubit_ket("+"))), 0.5j
        )
        doc = to_jsonable(h)
        assert doc["grid"]["labels"] == [0.0, 1.0]
        assert doc["terms"][0]["coefficient"] == [0.0, 0.5]
        assert len(doc["terms"][0]["slots"]) == 2

    def test_distribution_document_sorted(self):
        d = OutcomeDistribution(("X",), {"-": 0.5, "+": 0.5})
        doc = to_jsonable(d)
        assert list(doc["table"]) == ["+", "-"]

    def test_bell_report_document(self):
        firsts, seconds = tsirelson_settings()
        rep = s_lgi(CorrelatorSpec(maximally_mixed(2), firsts, seconds))
        doc = to_jsonable(rep)
        assert doc["value"] == pytest.approx(2.0 * math.sqrt(2.0))
        assert len(doc["correlators"]) == 2
        assert doc["mode"]

    def test_unknown_type_raises(self):
        with pytest.raises(TypeError):
            to_jsonable(object())

    def test_scenario_document_roundtrips_through_json(self):
        res = run_scenario("mach-zehnder")
        text = dumps_json(to_jsonable(res))
        parsed = json.loads(text)
        assert parsed["name"] == "mach-zehnder"
        assert parsed["artifacts"]["weight_bright_port"] == pytest.approx(0.5)
        assert parsed["notes"]

    def test_dumps_json_deterministic(self):
        doc = document("t", {"b": 1.0, "a": 2.0}, ("n",))
        assert dumps_json(doc) == dumps_json(json.loads(dumps_json(doc)))
        assert dumps_json(doc).endswith("\n")
        assert dumps_json(doc).index('"a"') < dumps_json(doc).index('"b"')


class TestCSV:
    def test_format_number(self):
        assert format_number(0.5) == "0.5"
        assert format_number(1.0 / 3.0) == "0.333333333333"

    def test_dumps_csv_flattens(self):
        doc = document("t", {"x": {"b": 2.0, "a": [1.0, True]}}, ())
        rows = list(csv.reader(io.StringIO(dumps_csv(doc))))
        assert rows[0] == ["key", "value"]
        table = dict((k, v) for k, v in rows[1:])
        assert table["artifacts.x.a[0]"] == "1"
        assert table["artifacts.x.a[1]"] == "true"
        assert table["artifacts.x.b"] == "2"

    def test_distribution_csv(self):
        d = OutcomeDistribution(("X", "Z"), {"++": 0.5, "--": 0.5, "+-": 0.0, "-+": 0.0})
        rows = list(csv.reader(io.StringIO(distribution_csv(d))))
        assert rows[0] == ["outcome", "probability"]
        assert ["++", "0.5"] in rows

    def test_trace_csv_columns(self):
        from qhist import OptimizerConfig, optimize_settings

        res = optimize_settings(
            "s_lgi",
            config=OptimizerConfig(theta_points=4, phi_points=4, max_evals=300),
        )
        rows = list(csv.reader(io.StringIO(trace_csv(res))))
        assert rows[0][0] == "evaluation"
        assert rows[0][-1] == "value"
        assert len(rows) >= 2

    def test_pretty_output_mentions_notes(self):
        res = run_scenario("two-time-hab")
        text = dumps_pretty(to_jsonable(res))
        assert "postselection_probability" in text
        assert "notes" in text or "note" in text.lower()


class TestLoadDocument:
    def test_reads_json_object(self, tmp_path):
        p = tmp_path / "ok.json"
        p.write_text('{"pre": "0"}')
        assert load_document(str(p)) == {"pre": "0"}

    def test_parse_error_is_line_anchored(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{\n  "pre": ,\n}')
        with pytest.raises(SpecError, match=r"broken\.json:2:\d+:"):
            load_document(str(p))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecError, match="nope.json"):
            load_document(str(tmp_path / "nope.json"))

    def test_non_object_top_level(self, tmp_path):
        p = tmp_path / "arr.json"
        p.write_text("[1, 2]")
        with pytest.raises(SpecError, match="top level"):
            load_document(str(p))


class TestFragmentParsers:
    def test_named_state(self):
        assert np.allclose(state_from_document("0"), qubit_ket("0"))
        assert np.allclose(state_from_document("i+"), qubit_ket("i+"))

    def test_vector_state(self):
        v = state_from_document([[1.0, 0.0], [0.0, 1.0]])
        assert np.allclose(v, [1.0, 1.0j])

    def test_bad_state(self):
        with pytest.raises(SpecError, match="unknown named state"):
            state_from_document("psi")
        with pytest.raises(SpecError):
            state_from_document([[1.0, 0.0, 3.0]])

    def test_named_unitary(self):
        assert np.allclose(unitary_from_document("H") @ qubit_ket("0"), qubit_ket("+"))
        with pytest.raises(SpecError, match="known:"):
            unitary_from_document("Q")

    def test_matrix_unitary(self):
        doc = matrix_document(pauli("Y"))
        assert np.allclose(unitary_from_document(doc), pauli("Y"))

    def test_setting_forms(self):
        assert setting_from_document("x").label == "X"
        s = setting_from_document({"theta": math.pi / 2, "phi": 0.0, "label": "mine"})
        assert s.label == "mine"
        assert np.allclose(s.observable, pauli("X"), atol=1e-12)
        with pytest.raises(SpecError):
            setting_from_document("Q")
        with pytest.raises(SpecError):
            setting_from_document({"theta": "up"})

    def test_slot_operator_forms(self):
        assert np.allclose(slot_operator_from_document("I"), identity(2))
        assert np.allclose(
            slot_operator_from_document("z+"), projector(qubit_ket("0"))
        )
        with pytest.raises(SpecError, match="known: I,"):
            slot_operator_from_document("w+")


class TestHistoryFromDocument:
    def test_minimal_single_term(self):
        doc = {"terms": [{"slots": ["x+", "z+"]}]}
        h, b = history_from_document(doc)
        assert h.grid.n_slots == 2
        assert np.allclose(b.unitaries[0], identity(2))

    def test_roundtrip_preserves_state(self):
        g = TimeGrid.regular(3)
        original = normalize(
            HistoryState.from_slots(
                g, [projector(qubit_ket("0"))] * 3, 1.0 / math.sqrt(2)
            )
            + HistoryState.from_slots(
                g, [projector(qubit_ket("1"))] * 3, 1.0 / math.sqrt(2)
            )
        )
        doc = {"history": to_jsonable(original)}
        parsed, bridging = history_from_document(doc)
        assert abs(hs_inner(normalize(parsed), original)) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_bridging_parsed(self):
        doc = {
            "terms": [{"slots": ["z+", "z+"]}],
            "bridging": {"unitaries": ["X"]},
        }
        _, b = history_from_document(doc)
        assert np.allclose(b.unitaries[0], pauli("X"))

    def test_errors(self):
        with pytest.raises(SpecError, match="terms"):
            history_from_document({})
        with pytest.raises(SpecError, match="slots"):
            history_from_document({"terms": [{}]})
        with pytest.raises(SpecError, match="bridging needs 1"):
            history_from_document(
                {"terms": [{"slots": ["z+", "z+"]}], "bridging": {"unitaries": []}}
            )
        with pytest.raises(SpecError, match="coefficient"):
            history_from_document({"terms": [{"slots": ["z+"], "coefficient": 5}]})


class TestExperimentFromDocument:
    def test_minimal(self):
        parsed = experiment_from_document({"pre": "0", "slots": ["X", "X"]})
        assert np.allclose(parsed["pre"], qubit_ket("0"))
        assert parsed["post"] is None
        assert len(parsed["slots"]) == 2
        assert parsed["slots"][0].label == "X"

    def test_mixed_initial(self):
        parsed = experiment_from_document({"initial": "mixed", "slots": ["X"]})
        assert parsed["initial"] == "mixed"
        assert parsed["pre"] is None

    def test_null_slot_means_unmeasured(self):
        parsed = experiment_from_document({"pre": "0", "slots": ["X", None, "Z"]})
        assert parsed["slots"][1] is None

    def test_unitaries_parsed(self):
        parsed = experiment_from_document(
            {"pre": "0", "slots": ["Z"], "unitaries": ["H", "H"]}
        )
        assert len(parsed["unitaries"]) == 2

    def test_errors(self):
        with pytest.raises(SpecError, match="pre"):
            experiment_from_document({"slots": ["X"]})
        with pytest.raises(SpecError, match="slots"):
            experiment_from_document({"pre": "0"})
        with pytest.raises(SpecError):
            experiment_from_document(
                {"pre": "0", "slots": ["X"], "unitaries": ["H"]}
            )
