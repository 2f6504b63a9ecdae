"""
Binary arithmetic coder driven by KT context probabilities.

The encoder and decoder share one ContextModel construction: both prime a
fresh model with the memorized sequence, then code symbol by symbol with the
integer KT frequencies. A decoder primed with a different memory decodes a
different sequence; the memory is genuinely shared state.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..exceptions import DecodeMismatchError, OverheadBudgetExceededError, ValidationError
from .context_model import ContextModel, check_symbols, kt_codelength

logger = logging.getLogger(__name__)

STATE_BITS = 48
FULL_RANGE = 1 << STATE_BITS
HALF_RANGE = FULL_RANGE >> 1
QUARTER_RANGE = HALF_RANGE >> 1
STATE_MASK = FULL_RANGE - 1
MAX_TOTAL = QUARTER_RANGE + 2

OVERHEAD_PER_SYMBOL = 0.01
OVERHEAD_FIXED = 4.0


def _cumulative(freqs: List[int]) -> List[int]:
    cum = [0]
    for f in freqs:
        cum.append(cum[-1] + f)
    return cum


class ArithmeticEncoder:
    """Integer-range encoder emitting a list of bits."""

    def __init__(self):
        self.low = 0
        self.high = STATE_MASK
        self.num_underflow = 0
        self.bits: List[int] = []

    def write(self, cum: List[int], total: int, symbol: int) -> None:
        if total > MAX_TOTAL:
            raise ValidationError(f"frequency total {total} exceeds coder precision")
        span = self.high - self.low + 1
        sym_low = cum[symbol]
        sym_high = cum[symbol + 1]
        self.high = self.low + sym_high * span // total - 1
        self.low = self.low + sym_low * span // total

        while ((self.low ^ self.high) & HALF_RANGE) == 0:
            self._shift()
            self.low = (self.low << 1) & STATE_MASK
            self.high = ((self.high << 1) & STATE_MASK) | 1
        while (self.low & ~self.high & QUARTER_RANGE) != 0:
            self.num_underflow += 1
            self.low = (self.low << 1) ^ HALF_RANGE
            self.high = ((self.high ^ HALF_RANGE) << 1) | HALF_RANGE | 1

    def _emit(self, bit: int) -> None:
        self.bits.append(bit)
        self.bits.extend([bit ^ 1] * self.num_underflow)
        self.num_underflow = 0

    def _shift(self) -> None:
        self._emit(self.low >> (STATE_BITS - 1))

    def finish(self) -> List[int]:
        # Two bits select a point strictly inside [low, high]: 01 when
        # low < 1/4, otherwise 10 (then high >= 3/4). Trailing zeros are implied.
        if self.low < QUARTER_RANGE:
            self._emit(0)
            self.bits.append(1)
        else:
            self._emit(1)
            self.bits.append(0)
        return self.bits


class ArithmeticDecoder:
    """Mirror of ArithmeticEncoder; reads zeros past the end of the codeword."""

    def __init__(self, bits: Sequence[int]):
        self.bits = bits
        self.position = 0
        self.low = 0
        self.high = STATE_MASK
        self.code = 0
        for _ in range(STATE_BITS):
            self.code = (self.code << 1) | self._read_bit()

    def _read_bit(self) -> int:
        if self.position < len(self.bits):
            bit = self.bits[self.position]
        else:
            bit = 0
        self.position += 1
        return bit

    def read(self, cum: List[int], total: int) -> int:
        if total > MAX_TOTAL:
            raise ValidationError(f"frequency total {total} exceeds coder precision")
        span = self.high - self.low + 1
        offset = self.code - self.low
        value = ((offset + 1) * total - 1) // span

        symbol = 0
        while cum[symbol + 1] <= value:
            symbol += 1

        sym_low = cum[symbol]
        sym_high = cum[symbol + 1]
        self.high = self.low + sym_high * span // total - 1
        self.low = self.low + sym_low * span // total

        while ((self.low ^ self.high) & HALF_RANGE) == 0:
            self.code = ((self.code << 1) & STATE_MASK) | self._read_bit()
            self.low = (self.low << 1) & STATE_MASK
            self.high = ((self.high << 1) & STATE_MASK) | 1
        while (self.low & ~self.high & QUARTER_RANGE) != 0:
            self.code = (self.code & HALF_RANGE) | ((self.code << 1) & (STATE_MASK >> 1)) | self._read_bit()
            self.low = (self.low << 1) ^ HALF_RANGE
            self.high = ((self.high ^ HALF_RANGE) << 1) | HALF_RANGE | 1
        return symbol


def _primed_model(y_mem: Sequence[int], alphabet_size: int, order: int) -> ContextModel:
    model = ContextModel(alphabet_size, order)
    model.prime(y_mem)
    return model


def encode(x: Sequence[int], y_mem: Sequence[int], alphabet_size: int, order: int = 1) -> List[int]:
    """Codeword bits for ``x`` given the memorized ``y_mem``."""
    symbols = check_symbols(x, alphabet_size).tolist()
    model = _primed_model(y_mem, alphabet_size, order)
    encoder = ArithmeticEncoder()
    previous = None
    for symbol in symbols:
        context = model.context_of(previous)
        freqs, total = model.frequencies(context)
        encoder.write(_cumulative(freqs), total, symbol)
        model.update(context, symbol)
        previous = symbol
    return encoder.finish()


def decode(
    bits: Sequence[int], n: int, y_mem: Sequence[int], alphabet_size: int, order: int = 1
) -> np.ndarray:
    """Decode ``n`` symbols from ``bits`` with a model primed by ``y_mem``."""
    model = _primed_model(y_mem, alphabet_size, order)
    decoder = ArithmeticDecoder(bits)
    out: List[int] = []
    previous = None
    for _ in range(n):
        context = model.context_of(previous)
        freqs, total = model.frequencies(context)
        symbol = decoder.read(_cumulative(freqs), total)
        model.update(context, symbol)
        out.append(symbol)
        previous = symbol
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class RoundtripResult:
    """Codeword, decoded sequence and the ideal KT codelength it is measured against."""

    bits: List[int]
    decoded: np.ndarray
    ideal_bits: float

    @property
    def num_bits(self) -> int:
        return len(self.bits)


def roundtrip(x: Sequence[int], y_mem: Sequence[int], alphabet_size: int, order: int = 1) -> RoundtripResult:
    """
    Encode then decode ``x`` with identically primed models.

    Raises:
        DecodeMismatchError: If the decoded sequence differs from ``x``.
        OverheadBudgetExceededError: If the codeword exceeds ideal + 0.01·n + 4 bits.
    """
    symbols = check_symbols(x, alphabet_size)
    bits = encode(symbols, y_mem, alphabet_size, order)
    decoded = decode(bits, len(symbols), y_mem, alphabet_size, order)
    if not np.array_equal(decoded, symbols):
        raise DecodeMismatchError(f"decoded sequence differs from input (n={len(symbols)})")
    ideal = kt_codelength(symbols, _primed_model(y_mem, alphabet_size, order))
    budget = ideal + OVERHEAD_PER_SYMBOL * len(symbols) + OVERHEAD_FIXED
    if len(bits) > budget:
        raise OverheadBudgetExceededError(
            f"{len(bits)} bits exceed budget {budget:.3f} (ideal {ideal:.3f})"
        )
    logger.debug(f"roundtrip n={len(symbols)}: {len(bits)} bits, ideal {ideal:.3f}")
    return RoundtripResult(bits, decoded, ideal)
