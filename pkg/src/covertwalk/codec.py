"""Systematic k-of-n erasure code over GF(2^8).

Field: GF(256) built from the primitive polynomial x^8 + x^4 + x^3 + x^2 + 1
(0x11d) with generator 2.

Generator matrix: take the n x k Vandermonde matrix ``V[i, j] = x_i ** j``
at the distinct points ``x_i = i`` (i = 0..n-1) and right-multiply by the
inverse of its top k x k block. The result ``G`` has the identity on top, so
the first k chunks are the plain message split, and every k-row submatrix of
``G`` is a product of two invertible matrices, hence invertible: any k chunks
recover the message.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FIELD_SIZE = 256
MAX_CHUNKS = 255
PRIMITIVE_POLY = 0x11D


class CodecError(ValueError):
    pass


class InsufficientChunksError(CodecError):
    pass


class ChunkFormatError(CodecError):
    pass


def _build_tables():
    exp = np.zeros(512, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int64)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= PRIMITIVE_POLY
    exp[255:510] = exp[:255]
    a = np.arange(256)
    mul = exp[(log[a][:, None] + log[a][None, :]) % 255]
    mul[0, :] = 0
    mul[:, 0] = 0
    return exp, log, mul.astype(np.uint8)


EXP, LOG, MUL = _build_tables()


def gf_mul(a: int, b: int) -> int:
    return int(MUL[a, b])


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return int(EXP[255 - LOG[a]])


def gf_pow(a: int, e: int) -> int:
    if e == 0:
        return 1
    if a == 0:
        return 0
    return int(EXP[(LOG[a] * e) % 255])


def gf_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(256); ``b`` may be a (k, L) block of payload bytes."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for i in range(a.shape[0]):
        acc = out[i]
        for j in range(a.shape[1]):
            c = a[i, j]
            if c:
                acc ^= MUL[c][b[j]]
    return out


def gf_invert(matrix: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse over GF(256)."""
    size = matrix.shape[0]
    work = np.concatenate([matrix.astype(np.uint8), np.eye(size, dtype=np.uint8)], axis=1)
    for col in range(size):
        pivot = next((row for row in range(col, size) if work[row, col]), None)
        if pivot is None:
            raise CodecError("singular matrix")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
        work[col] = MUL[gf_inv(int(work[col, col]))][work[col]]
        for row in range(size):
            if row != col and work[row, col]:
                work[row] ^= MUL[work[row, col]][work[col]]
    return work[:, size:]


def vandermonde(n: int, k: int) -> np.ndarray:
    return np.array([[gf_pow(i, j) for j in range(k)] for i in range(n)], dtype=np.uint8)


def generator_matrix(k: int, n: int) -> np.ndarray:
    """Systematic n x k generator: identity on the first k rows."""
    _check_kn(k, n)
    return _generator(k, n).copy()


@lru_cache(maxsize=256)
def _generator(k, n):
    v = vandermonde(n, k)
    return gf_matmul(v, gf_invert(v[:k]))


@lru_cache(maxsize=4096)
def _decoder(k, n, indices):
    return gf_invert(_generator(k, n)[list(indices)])


def _check_kn(k, n):
    if not 1 <= k <= n:
        raise CodecError(f"need 1 <= k <= n (got k={k}, n={n})")
    if n > MAX_CHUNKS:
        raise CodecError(f"n={n} exceeds the GF(256) limit of {MAX_CHUNKS} chunks")


@dataclass(frozen=True)
class ChunkSet:
    k: int
    n: int
    message_length: int
    chunks: tuple  # of (index, bytes)

    @property
    def chunk_length(self):
        return len(self.chunks[0][1]) if self.chunks else 0

    def subset(self, indices):
        wanted = set(indices)
        return [c for c in self.chunks if c[0] in wanted]

    def payloads(self):
        return [p for _, p in self.chunks]


def encode(message: bytes, k: int, n: int) -> ChunkSet:
    """Split ``message`` into k zero-padded chunks and append n - k parity chunks."""
    _check_kn(k, n)
    if not message:
        raise CodecError("message must be non-empty")
    size = -(-len(message) // k)
    data = np.frombuffer(message.ljust(size * k, b"\0"), dtype=np.uint8).reshape(k, size)
    coded = gf_matmul(_generator(k, n)[k:], data) if n > k else np.zeros((0, size), np.uint8)
    rows = list(data) + list(coded)
    return ChunkSet(k, n, len(message), tuple((i, bytes(row)) for i, row in enumerate(rows)))


def decode(chunks, k: int, n: int, message_length: int) -> bytes:
    """Rebuild the message from any ``k`` distinct chunks ``(index, payload)``."""
    _check_kn(k, n)
    picked = {}
    for index, payload in chunks:
        if not 0 <= index < n:
            raise ChunkFormatError(f"chunk index {index} outside [0, {n})")
        picked.setdefault(index, bytes(payload))
    if len(picked) < k:
        raise InsufficientChunksError(f"need {k} distinct chunks, got {len(picked)}")
    indices = sorted(picked)[:k]
    lengths = {len(picked[i]) for i in indices}
    if len(lengths) != 1:
        raise ChunkFormatError(f"chunk payloads have inconsistent lengths {sorted(lengths)}")
    size = lengths.pop()
    if size * k < message_length:
        raise ChunkFormatError(f"chunks of {size} bytes cannot hold a {message_length}-byte message")
    block = np.array([np.frombuffer(picked[i], dtype=np.uint8) for i in indices]).reshape(k, size)
    if indices == list(range(k)):
        data = block
    else:
        data = gf_matmul(_decoder(k, n, tuple(indices)), block)
    return data.tobytes()[:message_length]
