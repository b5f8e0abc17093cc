"""
Random permutation sorting system (RPSS) and the QPP-RNG pipeline.

Library entry points live in the per-concern modules (analytics, engine,
jitter, pipeline, stats, planner); the CLI lives in management/commands.
"""
