"""Tests for taxonomy loading, validation and the framework bridge."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from mcpintel.errors import ParseError, UnknownIdError, ValidationError
from mcpintel.scoring import ThreatFlag
from mcpintel.taxonomy import (
    GRID_CATEGORIES,
    GRID_SURFACES,
    StrideCategory,
    bridge_to_frameworks,
    load_taxonomy,
)

MINIMAL_ENTRY = """\
  - id: {id}
    name: {name}
    description: test entry
    workflow_phase: TaskPlanning
    attack_surface: ServerAPIs
    stride_primary: Spoofing
    flags: []
    baseline_factors: {{L: 3, S: 0.5, I: 0.5, D: 0.66}}
    owasp_llm: [LLM01]
    owasp_agentic: [ASI01]
    matrix_cells: [[0, 0]]
"""

HEADER = """\
version: "test-1"
grid:
  categories: [c0, c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14, c15, c16]
entries:
"""


def write_taxonomy(tmp_path, entries: str, header: str = HEADER):
    path = tmp_path / "tax.yaml"
    path.write_text(header + entries, encoding="utf-8")
    return path


class TestPackagedRegistry:
    def test_loads_complete(self, registry):
        assert len(registry) == 38
        assert not registry.partial
        assert registry.version

    def test_ids_cover_full_range(self, registry):
        assert registry.ids() == [f"MCP-{n:02d}" for n in range(1, 39)]

    def test_direct_prompt_injection_entry(self, registry):
        entry = registry.get("MCP-19")
        assert entry.name == "Direct Prompt Injection"
        assert entry.flags == frozenset({ThreatFlag.SEMANTIC_INFERENCE_TIME})
        factors = entry.baseline_factors
        assert (factors.L, factors.S, factors.I, factors.D) == (6, 0.85, 0.75, 1.0)

    def test_stride_is_always_one_of_six(self, registry):
        assert len(StrideCategory) == 6
        for entry in registry.entries.values():
            assert entry.stride_primary in StrideCategory

    def test_matrix_cells_within_grid(self, registry):
        for entry in registry.entries.values():
            for surface, category in entry.matrix_cells:
                assert 0 <= surface < GRID_SURFACES
                assert 0 <= category < GRID_CATEGORIES

    def test_loading_twice_structurally_equal(self):
        a = load_taxonomy()
        b = load_taxonomy()
        assert a.entries == b.entries
        assert a.version == b.version


class TestBridge:
    def test_incident_union(self, registry):
        mapping = bridge_to_frameworks({"MCP-20", "MCP-24"}, registry)
        assert mapping.owasp_llm == frozenset({"LLM01", "LLM02"})
        assert mapping.owasp_agentic == frozenset({"ASI01", "ASI02"})

    def test_empty_set(self, registry):
        mapping = bridge_to_frameworks(set(), registry)
        assert mapping.owasp_llm == frozenset()
        assert mapping.owasp_agentic == frozenset()

    def test_deterministic(self, registry):
        first = bridge_to_frameworks({"MCP-20"}, registry)
        second = bridge_to_frameworks({"MCP-20"}, registry)
        assert first == second

    def test_unknown_id_named_in_error(self, registry):
        with pytest.raises(UnknownIdError) as excinfo:
            bridge_to_frameworks({"MCP-99"}, registry)
        assert "MCP-99" in str(excinfo.value)

    @given(data=st.data())
    def test_union_homomorphism(self, data, registry):
        ids = registry.ids()
        a = set(data.draw(st.lists(st.sampled_from(ids), max_size=10)))
        b = set(data.draw(st.lists(st.sampled_from(ids), max_size=10)))
        union = bridge_to_frameworks(a | b, registry)
        left = bridge_to_frameworks(a, registry)
        right = bridge_to_frameworks(b, registry)
        assert union.owasp_llm == left.owasp_llm | right.owasp_llm
        assert union.owasp_agentic == left.owasp_agentic | right.owasp_agentic


class TestLoader:
    def test_partial_registry_flagged(self, tmp_path):
        path = write_taxonomy(tmp_path, MINIMAL_ENTRY.format(id="MCP-01", name="One"))
        registry = load_taxonomy(path, allow_partial=True)
        assert registry.partial
        assert len(registry) == 1

    def test_incomplete_strict_mode_rejected(self, tmp_path):
        path = write_taxonomy(tmp_path, MINIMAL_ENTRY.format(id="MCP-01", name="One"))
        with pytest.raises(ValidationError, match="38"):
            load_taxonomy(path)

    def test_empty_entries_strict_mode_rejected(self, tmp_path):
        path = write_taxonomy(tmp_path, "  []\n", header=HEADER.rstrip() + " ")
        with pytest.raises(ValidationError):
            load_taxonomy(path)

    def test_duplicate_id_named(self, tmp_path):
        entries = MINIMAL_ENTRY.format(id="MCP-05", name="A") + MINIMAL_ENTRY.format(id="MCP-05", name="B")
        path = write_taxonomy(tmp_path, entries)
        with pytest.raises(ValidationError, match="MCP-05"):
            load_taxonomy(path, allow_partial=True)

    @pytest.mark.parametrize("bad_id", ["MCP-00", "MCP-39", "MCP-1", "XXX-01"])
    def test_bad_id_rejected(self, tmp_path, bad_id):
        path = write_taxonomy(tmp_path, MINIMAL_ENTRY.format(id=f'"{bad_id}"', name="Bad"))
        with pytest.raises(ValidationError):
            load_taxonomy(path, allow_partial=True)

    def test_out_of_range_factor_named(self, tmp_path):
        entry = MINIMAL_ENTRY.format(id="MCP-02", name="Bad").replace("L: 3", "L: 9")
        path = write_taxonomy(tmp_path, entry)
        with pytest.raises(ValidationError, match="MCP-02"):
            load_taxonomy(path, allow_partial=True)

    def test_out_of_grid_cell_rejected(self, tmp_path):
        entry = MINIMAL_ENTRY.format(id="MCP-03", name="Bad").replace("[[0, 0]]", "[[0, 17]]")
        path = write_taxonomy(tmp_path, entry)
        with pytest.raises(ValidationError, match="MCP-03"):
            load_taxonomy(path, allow_partial=True)

    def test_malformed_yaml_is_parse_error(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("version: [unclosed", encoding="utf-8")
        with pytest.raises(ParseError):
            load_taxonomy(path)

    def test_missing_file_is_parse_error(self, tmp_path):
        with pytest.raises(ParseError):
            load_taxonomy(tmp_path / "nope.yaml")

    def test_wrong_category_count_rejected(self, tmp_path):
        header = 'version: "t"\ngrid:\n  categories: [a, b]\nentries:\n'
        path = write_taxonomy(tmp_path, MINIMAL_ENTRY.format(id="MCP-01", name="One"), header=header)
        with pytest.raises(ValidationError, match="17"):
            load_taxonomy(path, allow_partial=True)
