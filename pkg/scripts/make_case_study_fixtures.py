#!/usr/bin/env python3
"""Regenerate the case-study replay transcripts.

Runs the full pipeline in Record mode against the packaged search.html
fixture, answering every model call from the scripted responses below.
Because the real prompt builders produce the requests, the recorded
fingerprints always match current prompts; rerun this script after any
prompt change.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

from mcpintel.gateway import LlmGateway
from mcpintel.service.casestudy import case_study_config, _make_sources_hermetic, fixture_dir, replay_case_study
from mcpintel.service.runs import PipelineContext, RunKind, run_pipeline

CLASSIFY_RESPONSE = json.dumps(
    [
        {
            "title": "GitHub MCP prompt injection enables private repository data theft",
            "summary": (
                "A crafted public repository issue carried hidden instructions that acted as an "
                "indirect injection vector; the agent first read the malicious issue through the "
                "GitHub file read tool, then accessed tokens from a separate private repository, "
                "and finally a second tool call exfiltrated the tokens to the attacker."
            ),
            "workflow_phase": "ResponseHandling",
            "mcp_ids": ["MCP-20", "MCP-24"],
            "stride": "InformationDisclosure",
            "factors": {"L": 6, "S": 0.8, "I": 0.75, "D": 1.0},
            "rce_or_exfil_or_critical_asset": True,
            "cve_ids": [],
            "risk_score": 9.8,
            "risk_level": "Critical",
        }
    ]
)

CHAIN_RESPONSE = json.dumps(
    {
        "steps": [
            ["GitHub file read tool", "ParasiticIngestion"],
            ["private repository access tool", "PrivacyCollection"],
            ["issue comment exfiltration call", "PrivacyDisclosure"],
        ],
        "edges": ["T2T", "UPD"],
    }
)

EXTRACT_RESPONSE = json.dumps([{"label": "GitHub MCP prompt injection", "kind": "Threat"}])


def scripted_transport(req):
    system = req.system_prompt
    if "Rate how relevant" in system:
        return "0.94"
    if "chain-of-thought" in system or "classifying security intelligence" in system:
        return CLASSIFY_RESPONSE
    if "parasitic tool-chain model" in system:
        return CHAIN_RESPONSE
    if "extract security entities" in system:
        return EXTRACT_RESPONSE
    if "canonicalize security entity names" in system:
        return "YES"
    raise AssertionError(f"unexpected request: {system[:80]}...")


def main() -> int:
    out_path = fixture_dir() / "transcripts.jsonl"
    work_dir = Path(tempfile.mkdtemp(prefix="mcpintel-record-"))

    config = case_study_config(work_dir)
    _make_sources_hermetic(config)
    config.transcript_mode = "record"
    config.transcript_path = out_path

    ctx = PipelineContext.from_config(config)
    ctx.gateway = LlmGateway(model_id=config.model_id, transport=scripted_transport)
    record = run_pipeline(RunKind.FULL, ctx)
    print(f"recorded run: {record.status.value} counts={record.counts} errors={record.errors}")
    if record.status.value == "Failed":
        return 1
    print(f"wrote {out_path} ({len(ctx.transcript.entries)} entries)")

    report = replay_case_study()
    for check in report.checks:
        mark = "ok " if check.passed else "FAIL"
        print(f"[{mark}] {check.name}: expected {check.expected!r}, got {check.actual!r}")
    shutil.rmtree(work_dir, ignore_errors=True)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
