"""QPSK baseband modem: payload generation, Gray mapping, RRC pulse shaping.

The transmit chain is payload bits -> QPSK symbols -> zero-stuffed upsampling
-> root-raised-cosine filtering -> gain scaling.  Everything is a pure
function of its inputs; buffers are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Maximal-length (primitive) polynomial masks for the Galois LFSR, one per
# degree.  Bit i of the mask feeds back into register bit i; bit (degree-1)
# is always set.  Periods 2**n - 1 are verified exhaustively in the tests.
DEFAULT_LFSR_TAPS: dict[int, int] = {
    2: 0b11,
    3: 0b101,
    4: 0b1001,
    5: 0b10010,
    6: 0b100001,
    7: 0b1000001,
    8: 0b10111000,
    9: 0b100010000,
    10: 0b1000000100,
    11: 0b10000000010,
    12: 0b100000101001,
    13: 0b1000000001101,
    14: 0b10000000010101,
    15: 0b100000000000001,
    16: 0b1000000000010110,
}

_SQRT2_INV = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Payload:
    """A bit sequence destined for the QPSK mapper.

    QPSK consumes bit pairs, so transmission requires an even number of
    bits; the mapper enforces that.  Empty payloads are legal containers.
    """

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("payload bits must be a 1-D sequence")
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise ValueError("payload bits must be 0/1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def length_bits(self) -> int:
        return int(self.bits.size)

    @classmethod
    def from_hex(cls, hex_string: str, nbits: int | None = None) -> "Payload":
        """Bits from a hex string, MSB first, optionally truncated to nbits."""
        raw = bytes.fromhex(hex_string)
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
        if nbits is not None:
            if nbits > bits.size:
                raise ValueError(f"hex string provides {bits.size} bits, need {nbits}")
            bits = bits[:nbits]
        return cls(bits)

    def tiled(self, reps: int) -> "Payload":
        """The payload repeated ``reps`` times back to back."""
        if reps < 1:
            raise ValueError("reps must be >= 1")
        return Payload(np.tile(self.bits, reps))


@dataclass(frozen=True)
class ModemParams:
    """Static transmit/receive chain parameters.

    Defaults: 250 kS/s with 4x oversampling (62.5 kSym/s), roll-off 0.35,
    10-symbol-per-side RRC support, 53.6 dB transmit amplitude gain.
    """

    sample_rate: float = 250_000.0
    sps: int = 4
    rolloff: float = 0.35
    rrc_span_symbols: int = 10
    tx_gain_db: float = 53.6

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.sps < 1:
            raise ValueError("sps must be >= 1")
        if not 0.0 < self.rolloff <= 1.0:
            raise ValueError("rolloff must lie in (0, 1]")
        if self.rrc_span_symbols < 4:
            raise ValueError("rrc_span_symbols must be >= 4")

    @property
    def symbol_rate(self) -> float:
        return self.sample_rate / self.sps

    @property
    def occupied_bandwidth_hz(self) -> float:
        """RRC-shaped occupied bandwidth (1 + rolloff) * symbol_rate."""
        return (1.0 + self.rolloff) * self.symbol_rate

    @property
    def n_taps(self) -> int:
        return 2 * self.rrc_span_symbols * self.sps + 1


@dataclass(frozen=True)
class IQBuffer:
    """Complex baseband samples plus rate/carrier metadata.

    The universal currency between modem, channel, and receiver stages.
    Samples are locked after construction.
    """

    samples: np.ndarray
    sample_rate: float
    carrier_freq: float = 2.1e9

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1:
            raise ValueError("samples must be 1-D")
        if samples.size and not np.all(np.isfinite(samples.view(np.float64))):
            raise ValueError("samples must be finite (no NaN/Inf)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def power(self) -> float:
        """Mean of I^2 + Q^2."""
        if not self.samples.size:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))

    def scaled(self, amplitude: float) -> "IQBuffer":
        return IQBuffer(self.samples * amplitude, self.sample_rate, self.carrier_freq)


def lfsr_generate(degree: int, taps: int, seed: int, nbits: int) -> Payload:
    """Run a Galois LFSR and collect ``nbits`` output bits.

    ``taps`` is the feedback polynomial mask (bit degree-1 must be set for a
    full-width register).  A primitive polynomial yields the maximal period
    2**degree - 1; non-primitive masks are accepted but shorten the cycle.
    """
    if degree < 2:
        raise ValueError("degree must be >= 2")
    if nbits < 0:
        raise ValueError("nbits must be >= 0")
    mask = (1 << degree) - 1
    if seed == 0:
        raise ValueError("seed must be nonzero (all-zero state locks the LFSR)")
    if not 0 < seed <= mask:
        raise ValueError(f"seed must fit in {degree} bits")
    if not 0 < taps <= mask:
        raise ValueError(f"taps mask must fit in {degree} bits")

    state = seed
    bits = np.empty(nbits, dtype=np.uint8)
    for i in range(nbits):
        out = state & 1
        bits[i] = out
        state >>= 1
        if out:
            state ^= taps
    return Payload(bits)


def default_payload(nbits: int = 200, degree: int = 9, seed: int = 1) -> Payload:
    """The stock payload source: degree-9 maximal LFSR, seed 1."""
    return lfsr_generate(degree, DEFAULT_LFSR_TAPS[degree], seed, nbits)


def qpsk_modulate(payload: Payload) -> np.ndarray:
    """Gray-map bit pairs onto the unit QPSK constellation.

    Per-rail NRZ (bit 0 -> +1, bit 1 -> -1): first bit of the pair drives Q,
    second drives I, so 00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2,
    11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2.
    """
    bits = payload.bits
    if bits.size % 2:
        raise ValueError("QPSK needs an even number of bits")
    first = bits[0::2].astype(np.float64)
    second = bits[1::2].astype(np.float64)
    return ((1.0 - 2.0 * second) + 1j * (1.0 - 2.0 * first)) * _SQRT2_INV


def qpsk_demodulate(symbols: np.ndarray) -> Payload:
    """Quadrant (minimum-distance) decisions inverting :func:`qpsk_modulate`.

    Zero-valued rails break ties toward the 00 quadrant.
    """
    symbols = np.asarray(symbols)
    bits = np.empty(2 * symbols.size, dtype=np.uint8)
    bits[0::2] = symbols.imag < 0.0
    bits[1::2] = symbols.real < 0.0
    return Payload(bits)


def _rrc_impulse(t: np.ndarray, alpha: float) -> np.ndarray:
    """Root-raised-cosine impulse response at times ``t`` (in symbols).

    The removable singularities at t = 0 and t = +-1/(4 alpha) are replaced
    by their analytic limits.
    """
    t = np.asarray(t, dtype=np.float64)
    h = np.empty_like(t)

    tiny = 1e-9
    at_zero = np.abs(t) < tiny
    t_sing = 1.0 / (4.0 * alpha)
    at_sing = np.abs(np.abs(t) - t_sing) < tiny
    regular = ~(at_zero | at_sing)

    h[at_zero] = 1.0 + alpha * (4.0 / np.pi - 1.0)
    h[at_sing] = (alpha / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * alpha))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * alpha))
    )
    tr = t[regular]
    num = np.sin(np.pi * tr * (1.0 - alpha)) + 4.0 * alpha * tr * np.cos(np.pi * tr * (1.0 + alpha))
    den = np.pi * tr * (1.0 - (4.0 * alpha * tr) ** 2)
    h[regular] = num / den
    return h


def rrc_taps(params: ModemParams, fractional_offset: float = 0.0) -> np.ndarray:
    """Unit-energy, odd-length, symmetric root-raised-cosine taps.

    ``fractional_offset`` (in samples) shifts the evaluation grid; the
    receiver's polyphase bank uses it, the nominal filter leaves it at 0.
    Normalization is always by the nominal (offset 0) tap energy so the
    bank's branches stay mutually consistent.
    """
    n = params.n_taps
    k = np.arange(n, dtype=np.float64)
    center = (n - 1) / 2.0
    t = (k - center) / params.sps
    nominal = _rrc_impulse(t, params.rolloff)
    scale = 1.0 / np.sqrt(np.sum(nominal**2))
    if fractional_offset == 0.0:
        return nominal * scale
    t_shift = (k - center - fractional_offset) / params.sps
    return _rrc_impulse(t_shift, params.rolloff) * scale


def pulse_shape(symbols: np.ndarray, params: ModemParams) -> IQBuffer:
    """Zero-stuff by sps, RRC filter, scale by the transmit gain.

    Output length is sps * nsymbols + ntaps - 1.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size == 0:
        raise ValueError("symbols must be nonempty")
    upsampled = np.zeros(symbols.size * params.sps, dtype=np.complex128)
    upsampled[:: params.sps] = symbols
    taps = rrc_taps(params)
    shaped = np.convolve(upsampled, taps, mode="full")
    gain = 10.0 ** (params.tx_gain_db / 20.0)
    return IQBuffer(shaped * gain, params.sample_rate)
