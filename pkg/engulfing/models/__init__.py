"""
Models package.
"""
from .config_models import RefineConfig, SamplerConfig
from .function_spec import ConvexBody, FunctionSpec, SlopeInterval, SmoothHint, SubgradientPair
from .report import ExperimentReport, Provenance
from .results import BregmanGap, CharacterizationResidual, ConvexityCheckResult, InterpolationResidual
from .section import Interval1D, RadialBoundary, Section
from .verdict import (EngulfingVerdict, EngulfingWitness, EquivalenceReport, FlatSegmentRecord, KEstimate,
                      KinkRecord, LevelRecord, RegularityReport, SampledTriple)

__all__ = [
    'RefineConfig', 'SamplerConfig',
    'ConvexBody', 'FunctionSpec', 'SlopeInterval', 'SmoothHint', 'SubgradientPair',
    'ExperimentReport', 'Provenance',
    'BregmanGap', 'CharacterizationResidual', 'ConvexityCheckResult', 'InterpolationResidual',
    'Interval1D', 'RadialBoundary', 'Section',
    'EngulfingVerdict', 'EngulfingWitness', 'EquivalenceReport', 'FlatSegmentRecord', 'KEstimate',
    'KinkRecord', 'LevelRecord', 'RegularityReport', 'SampledTriple',
]
