"""
First-order Markov sources for memory-assisted coding experiments.

Sources are drawn from the family of all A-ary first-order chains with a
symmetric Dirichlet(1/2) prior on each transition row, started from their
stationary distribution.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from ..exceptions import NonErgodicChainError, ValidationError
from ..seeding import mix_seed

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 100
DIRICHLET_ALPHA = 0.5
STOCHASTIC_TOL = 1e-12
STATIONARY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MarkovSource:
    """
    First-order Markov chain over symbols 0..A-1.

    Attributes:
        transitions: A×A row-stochastic matrix
        initial_dist: Distribution of the first symbol
        seed: 64-bit seed; sequence draws are keyed by (seed, draw index)
    """

    transitions: np.ndarray
    initial_dist: np.ndarray
    seed: int = 0

    def __post_init__(self):
        transitions = np.array(self.transitions, dtype=float)
        initial = np.array(self.initial_dist, dtype=float)
        if transitions.ndim != 2 or transitions.shape[0] != transitions.shape[1]:
            raise ValidationError(f"transitions must be square, got shape {transitions.shape}")
        if transitions.shape[0] < 2:
            raise ValidationError("alphabet must have at least 2 symbols")
        if initial.shape != (transitions.shape[0],):
            raise ValidationError("initial_dist length must match the alphabet size")
        if (transitions < 0).any() or (initial < 0).any():
            raise ValidationError("probabilities must be nonnegative")
        if np.abs(transitions.sum(axis=1) - 1.0).max() > STOCHASTIC_TOL:
            raise ValidationError("each transition row must sum to 1")
        if abs(initial.sum() - 1.0) > STOCHASTIC_TOL:
            raise ValidationError("initial_dist must sum to 1")
        transitions.flags.writeable = False
        initial.flags.writeable = False
        object.__setattr__(self, 'transitions', transitions)
        object.__setattr__(self, 'initial_dist', initial)

    @property
    def alphabet_size(self) -> int:
        return self.transitions.shape[0]


def stationary_distribution(transitions: np.ndarray) -> np.ndarray:
    """
    Unique stationary distribution π with π·P = π.

    Raises:
        NonErgodicChainError: If eigenvalue 1 is not simple or π is not a fixed point.
    """
    size = transitions.shape[0]
    eigenvalues = np.linalg.eigvals(transitions.T)
    if np.count_nonzero(np.abs(eigenvalues - 1.0) < STATIONARY_TOL) != 1:
        raise NonErgodicChainError("eigenvalue 1 is not simple")
    system = transitions.T - np.eye(size)
    system[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise NonErgodicChainError(f"stationary system is singular: {e}") from e
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.abs(pi @ transitions - pi).max() > STATIONARY_TOL:
        raise NonErgodicChainError("stationary solve did not reach a fixed point")
    return pi


def sample_source(alphabet_size: int, seed: int) -> MarkovSource:
    """
    Draw a source with Dirichlet(1/2) transition rows.

    Raises:
        NonErgodicChainError: If 100 draws in a row are not ergodic.
    """
    if alphabet_size < 2:
        raise ValidationError(f"alphabet_size must be >= 2, got {alphabet_size}")
    for attempt in range(MAX_RESAMPLES):
        draw_seed = seed if attempt == 0 else mix_seed(seed, attempt)
        rng = np.random.default_rng(draw_seed)
        rows = rng.dirichlet(np.full(alphabet_size, DIRICHLET_ALPHA), size=alphabet_size)
        rows /= rows.sum(axis=1, keepdims=True)
        try:
            pi = stationary_distribution(rows)
        except NonErgodicChainError as e:
            logger.debug(f"Resampling source {seed} (attempt {attempt}): {e}")
            continue
        return MarkovSource(rows, pi, seed)
    raise NonErgodicChainError(f"no ergodic chain in {MAX_RESAMPLES} draws for seed {seed}")


def _cumulative(probabilities: np.ndarray) -> list:
    cum = np.cumsum(probabilities, axis=-1)
    cum[..., -1] = 1.0
    return cum.tolist()


def generate(src: MarkovSource, n: int, draw: int = 0) -> np.ndarray:
    """
    Draw x_1..x_n from the chain; deterministic in (src.seed, draw).
    """
    if n < 1:
        raise ValidationError(f"sequence length must be >= 1, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([src.seed, draw]))
    uniforms = rng.random(n).tolist()
    rows = _cumulative(src.transitions)
    state = bisect_right(_cumulative(src.initial_dist), uniforms[0])
    out = [state]
    append = out.append
    for u in uniforms[1:]:
        state = bisect_right(rows[state], u)
        append(state)
    return np.array(out, dtype=np.int64)


def entropy_rate(src: MarkovSource) -> float:
    """
    Σ_i π_i·H(row_i) in bits per symbol.

    π is the source's initial distribution, which sample_source sets to the
    stationary one.
    """
    p = src.transitions
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return float(src.initial_dist @ terms.sum(axis=1))
