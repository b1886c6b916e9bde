"""Structured-output record schema for threat classification.

The field order is fixed and embedded verbatim in the classification
system prompt; pattern-based recovery (repair stage 3) keys on the
mandatory subset. Documented in docs/threat-record-schema.md.
"""

# Fixed field order of one threat record as emitted by the model.
THREAT_RECORD_FIELDS = (
    "title",
    "summary",
    "workflow_phase",
    "mcp_ids",
    "stride",
    "factors",
    "rce_or_exfil_or_critical_asset",
    "cve_ids",
    "risk_score",
    "risk_level",
)

# Records missing any of these are dropped, never patched.
MANDATORY_THREAT_FIELDS = ("title", "summary", "workflow_phase", "mcp_ids", "stride")
