"""
Krichevsky–Trofimov (add-1/2) sequential estimator over order-0/order-1 contexts.

The coding probability of symbol a in context c is
(count[c][a] + 1/2) / (total[c] + A/2), i.e. the integer frequency ratio
(2·count + 1) / (2·total + A), with counts updated after every symbol.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import SymbolOutOfRangeError, ValidationError

LN2 = math.log(2.0)


class ContextModel:
    """
    KT counts for one coder.

    Order 1 keeps one context per previous symbol plus a start context for
    the first symbol of a sequence; order 0 keeps a single context.
    Instances are mutable and must stay confined to one task.
    """

    def __init__(self, alphabet_size: int, order: int = 1):
        if alphabet_size < 2:
            raise ValidationError(f"alphabet_size must be >= 2, got {alphabet_size}")
        if order not in (0, 1):
            raise ValidationError(f"order must be 0 or 1, got {order}")
        self.alphabet_size = alphabet_size
        self.order = order
        num_contexts = alphabet_size + 1 if order == 1 else 1
        self.counts = np.zeros((num_contexts, alphabet_size), dtype=np.int64)

    @property
    def start_context(self) -> int:
        return self.alphabet_size if self.order == 1 else 0

    def context_of(self, previous: Optional[int]) -> int:
        """Context index for a symbol preceded by ``previous`` (None at the start)."""
        if self.order == 0:
            return 0
        return self.start_context if previous is None else int(previous)

    def total(self, context: int) -> int:
        return int(self.counts[context].sum())

    def probability(self, context: int, symbol: int) -> float:
        return (self.counts[context, symbol] + 0.5) / (self.total(context) + self.alphabet_size / 2)

    def frequencies(self, context: int) -> Tuple[List[int], int]:
        """Integer KT frequencies (2·count + 1) and their total for arithmetic coding."""
        freqs = (2 * self.counts[context] + 1).tolist()
        return freqs, 2 * self.total(context) + self.alphabet_size

    def update(self, context: int, symbol: int) -> None:
        self.counts[context, symbol] += 1

    def contexts(self, seq: np.ndarray) -> np.ndarray:
        """Context index of every position of ``seq``."""
        ctx = np.zeros(len(seq), dtype=np.int64)
        if self.order == 1 and len(seq):
            ctx[0] = self.start_context
            ctx[1:] = seq[:-1]
        return ctx

    def sequence_counts(self, seq: Sequence[int]) -> np.ndarray:
        """Counts ``seq`` would add, without touching the model."""
        arr = check_symbols(seq, self.alphabet_size)
        delta = np.zeros_like(self.counts)
        if len(arr):
            np.add.at(delta, (self.contexts(arr), arr), 1)
        return delta

    def prime(self, seq: Sequence[int]) -> None:
        """Absorb a memorized sequence into the counts; no bits are charged."""
        self.counts += self.sequence_counts(seq)

    def copy(self) -> 'ContextModel':
        clone = ContextModel(self.alphabet_size, self.order)
        clone.counts = self.counts.copy()
        return clone


def check_symbols(seq: Sequence[int], alphabet_size: int) -> np.ndarray:
    """
    Convert ``seq`` to an int64 array, rejecting symbols outside the alphabet.

    Raises:
        SymbolOutOfRangeError: If a symbol is negative or >= alphabet_size.
    """
    arr = np.asarray(seq, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= alphabet_size):
        raise SymbolOutOfRangeError(
            f"symbols must lie in 0..{alphabet_size - 1}, got range {arr.min()}..{arr.max()}"
        )
    return arr


def kt_codelength(seq: Sequence[int], model: ContextModel) -> float:
    """
    Ideal codelength Σ -log2 p_t of ``seq`` under sequential KT updating.

    The sequential product only depends on the per-context counts before and
    after coding, so it is evaluated in closed form with log-gamma:
    Π_a Γ(c_a+d_a+½)/Γ(c_a+½) · Γ(C+A/2)/Γ(C+D+A/2) per context.
    The model ends up holding the updated counts.
    """
    delta = model.sequence_counts(seq)
    half_alphabet = model.alphabet_size / 2
    log_prob = 0.0
    for context in np.flatnonzero(delta.sum(axis=1)):
        before = model.counts[context]
        added = delta[context]
        for symbol in np.flatnonzero(added):
            c = before[symbol] + 0.5
            log_prob += math.lgamma(c + added[symbol]) - math.lgamma(c)
        total_before = before.sum() + half_alphabet
        log_prob -= math.lgamma(total_before + added.sum()) - math.lgamma(total_before)
    model.counts += delta
    return -log_prob / LN2


def codelength_no_mem(x: Sequence[int], alphabet_size: int, order: int = 1) -> float:
    """l_n(x): KT codelength from a fresh model."""
    return kt_codelength(x, ContextModel(alphabet_size, order))


def codelength_with_mem(
    x: Sequence[int], y_mem: Sequence[int], alphabet_size: int, order: int = 1
) -> float:
    """l_{n|m}(x): KT codelength after priming a fresh model with the memorized ``y_mem``."""
    model = ContextModel(alphabet_size, order)
    model.prime(y_mem)
    return kt_codelength(x, model)
