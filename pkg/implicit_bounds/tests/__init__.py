"""Unit tests for agentic_systems core modules per PRD-TRD Section 10.1."""


