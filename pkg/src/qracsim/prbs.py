"""Maximal-length binary sequences and cyclic offset recovery.

The transmitter drives its modulators from a pseudo-random binary sequence;
decoding must first recover the cyclic offset between the detected stream
and the reference sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Feedback taps (polynomial exponents) giving a maximal-length register for
# each supported order.  One entry per k so generated sequences are
# reproducible by construction.
DEFAULT_TAPS: dict[int, tuple[int, ...]] = {
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
    17: (17, 14),
    18: (18, 11),
    19: (19, 6, 2, 1),
    20: (20, 17),
    21: (21, 19),
    22: (22, 21),
    23: (23, 18),
}


class PrbsAlignmentError(RuntimeError):
    """No cyclic offset reached the required agreement fraction."""


@dataclass(frozen=True, eq=False)
class PrbsSequence:
    """One period of a maximal-length sequence with its generator metadata."""

    order: int
    taps: tuple[int, ...]
    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8)
        if bits.size != self.period:
            raise ValueError(f"expected {self.period} bits, got {bits.size}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def period(self) -> int:
        return 2**self.order - 1


def prbs_generate(order: int, seed: int = None) -> PrbsSequence:
    """Generate one full period from the default taps for the given order.

    ``seed`` is the nonzero initial register state (all ones by default);
    different seeds produce cyclic shifts of the same sequence.
    """
    if order not in DEFAULT_TAPS:
        raise ValueError(f"unsupported register length {order}: choose from 3..23")
    taps = DEFAULT_TAPS[order]
    mask = (1 << order) - 1
    state = mask if seed is None else int(seed) & mask
    if state == 0:
        raise ValueError("seed must be a nonzero register state")
    tap_mask = 0
    for t in taps:
        tap_mask |= 1 << (t - 1)
    period = 2**order - 1
    bits = np.empty(period, dtype=np.uint8)
    initial = state
    top = order - 1
    for i in range(period):
        bits[i] = (state >> top) & 1
        feedback = (state & tap_mask).bit_count() & 1
        state = ((state << 1) | feedback) & mask
    if state != initial:
        raise RuntimeError(f"register failed to close its cycle for taps {taps}")
    return PrbsSequence(order, taps, bits)


def prbs_align(observed, reference: PrbsSequence, min_agreement: float = 0.6) -> int:
    """Recover the cyclic offset of an observed bit stream.

    ``observed`` holds bits 0/1 with -1 marking erasures; it must span at
    least one period.  Returns the offset o maximizing agreement with
    ``reference.bits[(i + o) % period]``, smallest offset on ties.  Raises
    PrbsAlignmentError when the best agreement fraction stays below
    ``min_agreement``.
    """
    obs = np.asarray(observed, dtype=np.int64)
    if obs.ndim != 1:
        raise ValueError("observed must be a 1-d bit stream")
    period = reference.period
    if obs.size < period:
        raise ValueError(f"observed stream shorter than one period ({period})")
    if not np.all(np.isin(obs, (-1, 0, 1))):
        raise ValueError("observed entries must be 0, 1 or -1 (erasure)")
    valid = obs >= 0
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise ValueError("observed stream contains only erasures")
    ref = reference.bits.astype(np.int64)
    positions = np.arange(obs.size)
    agreements = np.empty(period, dtype=np.int64)
    for offset in range(period):
        shifted = ref[(positions + offset) % period]
        agreements[offset] = int(np.sum((shifted == obs) & valid))
    best = int(np.argmax(agreements))
    fraction = agreements[best] / n_valid
    if fraction < min_agreement:
        raise PrbsAlignmentError(
            f"best agreement {fraction:.3f} below threshold {min_agreement:.3f}"
        )
    return best
