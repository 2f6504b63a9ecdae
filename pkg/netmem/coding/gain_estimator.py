"""
Monte Carlo estimates of the memorization gain.

Q is the ratio of the mean codelength without memory to the mean codelength
with a memorized context, for one source. g(n, m, ε) is the value that a
fraction 1-ε of sources in the family reach or exceed, estimated as a lower
order statistic of Q over sampled sources.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import InsufficientSourcesError, ValidationError
from ..seeding import mix_seed
from .context_model import codelength_no_mem, codelength_with_mem
from .markov_source import MarkovSource, generate, sample_source

logger = logging.getLogger(__name__)

MIN_SOURCES = 20
MEMORY_MODES = ("fresh", "fixed")
Z_95 = 1.96


@dataclass(frozen=True)
class CodelengthReport:
    """Codelengths l_n(x) and l_{n|m}(x) of one sequence."""

    n: int
    m: int
    bits_no_mem: float
    bits_with_mem: float


@dataclass(frozen=True)
class GainEstimate:
    """
    Sampled Q values and the lower ε-quantile g_hat.

    Attributes:
        q_samples: One Q estimate per sampled source, in sampling order
        epsilon: Fraction of sources allowed below g_hat
        g_hat: The (⌊εK⌋+1)-th smallest Q
        n, m: Sequence and memory lengths
        num_sources: K
        seq_draws: T, draws per source
        mean_q: Mean of q_samples
        ci_half_width: 95% normal half width of mean_q
    """

    q_samples: Tuple[float, ...]
    epsilon: float
    g_hat: float
    n: int
    m: int
    num_sources: int
    seq_draws: int
    mean_q: float
    ci_half_width: float

    def coverage(self) -> float:
        """Fraction of sources with Q >= g_hat."""
        return sum(q >= self.g_hat for q in self.q_samples) / len(self.q_samples)


@dataclass(frozen=True)
class SchemeComparison:
    """bit×hop cost of delivering one sequence over S–μ–C under each scheme."""

    ncomp_nmem: float
    ucomp_nmem: float
    ucomp_wmem: float


def codelength_report(x: Sequence[int], y_mem: Sequence[int], alphabet_size: int) -> CodelengthReport:
    return CodelengthReport(
        len(x), len(y_mem),
        codelength_no_mem(x, alphabet_size),
        codelength_with_mem(x, y_mem, alphabet_size),
    )


def compare_schemes(x: Sequence[int], y_mem: Sequence[int], alphabet_size: int) -> SchemeComparison:
    """
    Two-hop costs: no compression sends n·log2(A) bits per hop; universal
    compression sends l_n per hop; with memory the S–μ hop carries l_{n|m}
    and μ forwards the l_n encoding to the client, which has no memory.
    """
    raw = len(x) * math.log2(alphabet_size)
    report = codelength_report(x, y_mem, alphabet_size)
    return SchemeComparison(
        ncomp_nmem=2 * raw,
        ucomp_nmem=2 * report.bits_no_mem,
        ucomp_wmem=report.bits_with_mem + report.bits_no_mem,
    )


def _memory_sequence(src: MarkovSource, m: int, draw: int) -> np.ndarray:
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    return generate(src, m, draw)


def estimate_Q(
    src: MarkovSource,
    n: int,
    m: int,
    draws: int,
    seed: int,
    memory_mode: str = "fresh",
) -> float:
    """
    Q̂ = mean l_n(x) / mean l_{n|m}(x) over ``draws`` sequences x.

    Both means use the same x draws. With ``memory_mode="fresh"`` every draw
    gets its own memorized y; ``"fixed"`` reuses one y for all draws.
    """
    if draws < 1:
        raise ValidationError(f"draws must be >= 1, got {draws}")
    if m < 0:
        raise ValidationError(f"memory length must be >= 0, got {m}")
    if memory_mode not in MEMORY_MODES:
        raise ValidationError(f"memory_mode must be one of {MEMORY_MODES}, got {memory_mode!r}")
    A = src.alphabet_size
    fixed_memory = _memory_sequence(src, m, mix_seed(seed, 0, 1)) if memory_mode == "fixed" else None
    total_no_mem = 0.0
    total_with_mem = 0.0
    for t in range(draws):
        x = generate(src, n, mix_seed(seed, t, 0))
        y = fixed_memory if fixed_memory is not None else _memory_sequence(src, m, mix_seed(seed, t, 1))
        total_no_mem += codelength_no_mem(x, A)
        total_with_mem += codelength_with_mem(x, y, A)
    return total_no_mem / total_with_mem


def _source_q(args: Tuple[int, int, int, int, int, int, str]) -> float:
    k, alphabet_size, n, m, draws, seed, memory_mode = args
    src = sample_source(alphabet_size, mix_seed(seed, k))
    return estimate_Q(src, n, m, draws, mix_seed(seed, k, 0x51), memory_mode)


def lower_quantile(samples: Sequence[float], epsilon: float) -> float:
    """
    The (⌊εK⌋+1)-th smallest sample.

    Raises:
        InsufficientSourcesError: If ⌊εK⌋+1 exceeds the sample count.
    """
    # Rounding first keeps 0.29 * 100 at rank 29
    rank = math.floor(round(epsilon * len(samples), 9))
    if rank + 1 > len(samples):
        raise InsufficientSourcesError(
            f"{len(samples)} samples cannot give the {epsilon} quantile"
        )
    return sorted(samples)[rank]


def estimate_g(
    n: int,
    m: int,
    epsilon: float,
    num_sources: int,
    draws: int,
    alphabet_size: int,
    seed: int,
    memory_mode: str = "fresh",
    workers: int = 1,
) -> GainEstimate:
    """
    Sample ``num_sources`` sources, estimate Q for each, and take the lower ε-quantile.

    Source k is drawn with seed mix_seed(seed, k), so results do not depend on
    ``workers``.

    Raises:
        InsufficientSourcesError: If fewer than 20 sources are requested.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    if num_sources < MIN_SOURCES:
        raise InsufficientSourcesError(f"need at least {MIN_SOURCES} sources, got {num_sources}")
    if n < 1:
        raise ValidationError(f"sequence length must be >= 1, got {n}")

    tasks = [(k, alphabet_size, n, m, draws, seed, memory_mode) for k in range(num_sources)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            q_samples: List[float] = list(pool.map(_source_q, tasks))
    else:
        q_samples = [_source_q(task) for task in tasks]

    g_hat = lower_quantile(q_samples, epsilon)
    q = np.array(q_samples)
    mean_q = float(q.mean())
    ci = Z_95 * float(q.std(ddof=1)) / math.sqrt(len(q))
    logger.info(f"g(n={n}, m={m}, eps={epsilon}) ~ {g_hat:.6g} over {num_sources} sources (mean Q {mean_q:.6g})")
    return GainEstimate(tuple(q_samples), epsilon, g_hat, n, m, num_sources, draws, mean_q, ci)
