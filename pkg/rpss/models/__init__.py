"""
RPSS value types.
All types are re-exported here so callers import from rpss.models.
"""

from .system import (
    BYTE_ASSEMBLY_BITS,
    MAX_ARRAY_SIZE,
    RpssConfig,
    JitterModel,
    as_tick,
    MomentSet,
    ResidueDistribution,
    TickDistribution,
    ConvergenceReport,
)

from .cycle import (
    Permutation,
    TraceSegment,
    CycleSample,
    OutputSource,
    PipelineState,
)

__all__ = [
    # System
    'BYTE_ASSEMBLY_BITS',
    'MAX_ARRAY_SIZE',
    'RpssConfig',
    'JitterModel',
    'as_tick',
    'MomentSet',
    'ResidueDistribution',
    'TickDistribution',
    'ConvergenceReport',
    # Cycle
    'Permutation',
    'TraceSegment',
    'CycleSample',
    'OutputSource',
    'PipelineState',
]
