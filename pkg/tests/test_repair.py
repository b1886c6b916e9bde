"""Tests for the three-stage output repair pipeline."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from mcpintel.analysis.repair import repair_output
from repair_corpus import CORPUS, MANDATORY, RECORD_A, RECORD_B

CLOSERS = set("]}")


def corpus(kind: str):
    return [case for case in CORPUS if case.kind == kind]


def case_ids(cases):
    return [c.name for c in cases]


class TestStageOne:
    @pytest.mark.parametrize("case", corpus("valid"), ids=case_ids(corpus("valid")))
    def test_valid_payloads_pass_unmodified(self, case):
        result = repair_output(case.text, mandatory_fields=MANDATORY)
        assert result.stage == 1
        assert result.repaired_text == case.text
        if case.expected_records is not None:
            assert result.records == case.expected_records
        if case.expected_count is not None:
            assert len(result.records) == case.expected_count

    def test_two_well_formed_records(self):
        result = repair_output(json.dumps([RECORD_A, RECORD_B]))
        assert result.stage == 1
        assert len(result.records) == 2


class TestStageTwo:
    @pytest.mark.parametrize("case", corpus("bracket"), ids=case_ids(corpus("bracket")))
    def test_bracket_truncations_repair_by_appending_closers(self, case):
        result = repair_output(case.text, mandatory_fields=MANDATORY)
        assert result.stage == 2, f"{case.name} repaired at stage {result.stage}"
        # Round-trip: repaired text is the original plus closers only,
        # and a strict parser accepts it.
        assert result.repaired_text.startswith(case.text)
        suffix = result.repaired_text[len(case.text) :]
        assert suffix and set(suffix) <= CLOSERS
        json.loads(result.repaired_text)
        if case.expected_count is not None:
            assert len(result.records) == case.expected_count

    def test_spec_example(self):
        result = repair_output('[{"a":1},{"b":2')
        assert result.stage == 2
        assert result.repaired_text == '[{"a":1},{"b":2}]'
        assert result.records == [{"a": 1}, {"b": 2}]


class TestStageThree:
    @pytest.mark.parametrize("case", corpus("midstring"), ids=case_ids(corpus("midstring")))
    def test_midstring_truncation_yields_complete_record_prefix(self, case):
        result = repair_output(case.text, mandatory_fields=MANDATORY)
        assert result.stage == 3, f"{case.name} resolved at stage {result.stage}"
        assert result.records == case.expected_records
        # Oracle: every extracted record strict-parses on its own.
        for record in result.records:
            assert json.loads(json.dumps(record)) == record

    @pytest.mark.parametrize("case", corpus("other"), ids=case_ids(corpus("other")))
    def test_other_shapes_never_crash(self, case):
        result = repair_output(case.text, mandatory_fields=MANDATORY)
        assert result.stage in (1, 2, 3)
        if case.expected_records is not None:
            assert result.records == case.expected_records
        if case.expected_count is not None:
            assert len(result.records) == case.expected_count

    def test_incomplete_record_dropped_not_patched(self):
        # Garbage around one full record and one partial record.
        text = f"x {json.dumps(RECORD_A)} y {{\"title\": \"only\"}}"
        result = repair_output(text, mandatory_fields=MANDATORY)
        assert result.stage == 3
        assert result.records == [RECORD_A]


class TestProperties:
    @given(
        payload=st.lists(
            st.dictionaries(st.sampled_from(list(MANDATORY)), st.text(max_size=10)),
            max_size=4,
        )
    )
    def test_stage_one_identity_on_valid_json(self, payload):
        text = json.dumps(payload)
        result = repair_output(text)
        assert result.stage == 1
        assert result.repaired_text == text

    @given(cut=st.integers(min_value=0, max_value=200), data=st.data())
    def test_random_truncation_never_crashes(self, cut, data):
        docs = [
            json.dumps([RECORD_A, RECORD_B]),
            json.dumps({"threats": [RECORD_A, RECORD_B]}),
        ]
        doc = data.draw(st.sampled_from(docs))
        text = doc[: min(cut, len(doc))]
        result = repair_output(text, mandatory_fields=MANDATORY)
        assert result.stage in (1, 2, 3)
        if result.stage == 2:
            assert result.repaired_text.startswith(text)
            assert set(result.repaired_text[len(text) :]) <= CLOSERS
            json.loads(result.repaired_text)
        for record in result.records:
            assert isinstance(record, dict)
