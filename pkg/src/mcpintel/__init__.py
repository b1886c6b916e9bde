"""mcpintel: threat intelligence platform for MCP agent ecosystems.

Collects security intelligence from RSS feeds, web search, the NVD and
GitHub advisories; classifies items against the MCP-38 taxonomy with an
LLM plus deterministic post-processing; scores threats with a composite
weighted model; stores results in a typed property graph with entity
resolution; and serves analysts through a REST API, CLI and dashboard.
"""

__version__ = "0.1.0"
