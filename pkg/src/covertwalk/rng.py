"""Counter-based random streams.

Every trial owns an independent stream identified by ``(seed, trial_index)``.
Draw ``j`` of a stream is a pure function of the stream key and ``j``::

    u64 = splitmix64_finalize(key + (j + 1) * GOLDEN_GAMMA)

which is exactly SplitMix64 evaluated at an arbitrary position. Because no
state is shared between trials, any trial can be replayed in isolation and
the results do not depend on how trials are scheduled across threads.

Three implementations of the same function live here: plain Python integers
(the scalar reference used by :class:`Stream`), numpy ``uint64`` arrays, and
numba-compiled scalars for the kernels. They must agree bit for bit.
"""
import numpy as np

from ._jit import njit

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL1 = 0xBF58476D1CE4E5B9
MIX_MUL2 = 0x94D049BB133111EB
# distinct odd constant so trial keys are not a shifted copy of draw positions
INDEX_GAMMA = 0xD1B54A32D192ED03

UNIT = 2.0 ** -53

_G = np.uint64(GOLDEN_GAMMA)
_M1 = np.uint64(MIX_MUL1)
_M2 = np.uint64(MIX_MUL2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ONE = np.uint64(1)


def _mix(z):
    z = ((z ^ (z >> 30)) * MIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed, index):
    """Key of stream ``index`` under master ``seed`` (both taken mod 2**64)."""
    base = _mix((int(seed) + GOLDEN_GAMMA) & MASK64)
    return _mix((base ^ ((int(index) + 1) * INDEX_GAMMA)) & MASK64)


def draw_u64(key, counter):
    return _mix((key + (counter + 1) * GOLDEN_GAMMA) & MASK64)


def draw_unit(key, counter):
    return (draw_u64(key, counter) >> 11) * UNIT


def stream_keys(seed, indices):
    """Vector of stream keys, equal elementwise to :func:`stream_key`."""
    idx = np.asarray(indices, dtype=np.uint64)
    base = np.uint64(_mix((int(seed) + GOLDEN_GAMMA) & MASK64))
    with np.errstate(over="ignore"):
        x = base ^ ((idx + _ONE) * np.uint64(INDEX_GAMMA))
        return mix_array(x)


def mix_array(z):
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)


def unit_array(keys, counters):
    """Uniform [0, 1) draws at positions ``counters`` of streams ``keys``."""
    with np.errstate(over="ignore"):
        z = mix_array(keys + (counters + _ONE) * _G)
    return (z >> _S11).astype(np.float64) * UNIT


@njit(cache=True)
def unit_nb(key, counter):
    z = key + (counter + _ONE) * _G
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return np.float64(z >> _S11) * UNIT


class Stream:
    """One counter-based random stream; the scalar reference generator.

    >>> s = Stream(seed=0, index=3)
    >>> 0.0 <= s.random() < 1.0
    True
    """

    def __init__(self, seed=0, index=0, key=None):
        self.seed = seed
        self.index = index
        self.key = stream_key(seed, index) if key is None else int(key) & MASK64
        self.counter = 0

    def random(self, size=None):
        if size is None:
            u = draw_unit(self.key, self.counter)
            self.counter += 1
            return u
        counters = np.arange(self.counter, self.counter + size, dtype=np.uint64)
        self.counter += size
        keys = np.full(size, self.key, dtype=np.uint64)
        return unit_array(keys, counters)

    def integers(self, high):
        """Uniform integer in ``[0, high)``."""
        return int(self.random() * high)

    def __repr__(self):
        return f"Stream(seed={self.seed}, index={self.index}, counter={self.counter})"
