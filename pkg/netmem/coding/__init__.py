"""
Memory-Assisted Coding Package

This package realizes universal coding of Markov sequences with and without
a memorized context, and estimates the resulting per-link gain.
"""

from netmem.coding.markov_source import (
    MarkovSource,
    sample_source,
    generate,
    entropy_rate,
    stationary_distribution
)
from netmem.coding.context_model import (
    ContextModel,
    kt_codelength,
    codelength_no_mem,
    codelength_with_mem
)
from netmem.coding.arithmetic_coder import (
    ArithmeticEncoder,
    ArithmeticDecoder,
    RoundtripResult,
    encode,
    decode,
    roundtrip
)
from netmem.coding.gain_estimator import (
    CodelengthReport,
    GainEstimate,
    SchemeComparison,
    codelength_report,
    compare_schemes,
    estimate_Q,
    estimate_g,
    lower_quantile
)

__all__ = [
    # Sources
    'MarkovSource',
    'sample_source',
    'generate',
    'entropy_rate',
    'stationary_distribution',

    # KT estimator
    'ContextModel',
    'kt_codelength',
    'codelength_no_mem',
    'codelength_with_mem',

    # Arithmetic coder
    'ArithmeticEncoder',
    'ArithmeticDecoder',
    'RoundtripResult',
    'encode',
    'decode',
    'roundtrip',

    # Gain estimation
    'CodelengthReport',
    'GainEstimate',
    'SchemeComparison',
    'codelength_report',
    'compare_schemes',
    'estimate_Q',
    'estimate_g',
    'lower_quantile',
]
