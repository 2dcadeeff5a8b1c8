"""Protocol parameters and model selectors."""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace


class ParameterError(ValueError):
    """A parameter set violates the protocol's domain constraints."""


class DelayModel(enum.IntEnum):
    # Model 1: unit cost per visit, transmission time only at relays that
    # take part in a real transfer.
    MODEL1 = 1
    # Model 2: every visit costs the same budget so dwell times leak nothing.
    MODEL2 = 2

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().removeprefix("model")
        try:
            return cls(int(text))
        except ValueError:
            raise ParameterError(f"unknown delay model {value!r}; expected 1 or 2") from None


class WalkModel(enum.Enum):
    IID = "iid"
    NO_SELF_LOOP = "noselfloop"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown walk model {value!r}; expected 'iid' or 'noselfloop'") from None

    @property
    def code(self):
        return 0 if self is WalkModel.IID else 1


def _as_int(name, value):
    if isinstance(value, bool):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ParameterError(f"{name} must be an integer, got {value!r}")
        value = int(value)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be an integer, got {value!r}") from None


def _as_positive_real(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be a finite positive number (got {value!r})")
    return value


@dataclass(frozen=True)
class SystemParams:
    """Validated protocol parameters.

    ``s`` vertices, ``r`` relays, message of ``m`` bits split into ``k`` data
    chunks and encoded into ``n`` chunks; transmission tail rate ``lam`` and
    warden window ``w``. Construction enforces ``1 <= k <= n <= r <= s``.
    """

    s: int
    r: int
    m: float
    k: int
    n: int
    lam: float
    w: float

    def __post_init__(self):
        for name in ("s", "r", "k", "n"):
            object.__setattr__(self, name, _as_int(name, getattr(self, name)))
        for name in ("m", "lam", "w"):
            object.__setattr__(self, name, _as_positive_real(name, getattr(self, name)))
        if self.k < 1:
            raise ParameterError(f"constraint 1 <= k violated (k={self.k})")
        if self.k > self.n:
            raise ParameterError(f"constraint k <= n violated (k={self.k}, n={self.n})")
        if self.n > self.r:
            raise ParameterError(f"constraint n <= r violated (n={self.n}, r={self.r})")
        if self.r > self.s:
            raise ParameterError(f"constraint r <= s violated (r={self.r}, s={self.s})")

    @property
    def chunk_length(self):
        return self.m / self.k

    ell = chunk_length

    def with_(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)
