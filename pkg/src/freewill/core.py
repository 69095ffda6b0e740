"""Unit-sphere geometry, counter-based random streams and the two sphere samplers."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

NORM_TOL = 1e-12
_U64 = 1 << 64


@dataclass(frozen=True)
class UnitVec3:
    """A direction on the unit sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(n2 - 1.0) > NORM_TOL:
            raise ValueError(f"not a unit vector: ({self.x}, {self.y}, {self.z})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, v) -> "UnitVec3":
        v = np.asarray(v, dtype=float)
        return unit(v[0], v[1], v[2])

    def __iter__(self):
        return iter((self.x, self.y, self.z))


VectorLike = Union[UnitVec3, np.ndarray, tuple, list]


def as_vector(v: VectorLike) -> np.ndarray:
    """Return ``v`` as a float array of shape (3,)."""
    if isinstance(v, UnitVec3):
        return v.as_array()
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


def unit(x: float, y: float, z: float) -> UnitVec3:
    """Normalize ``(x, y, z)``; the zero vector is rejected."""
    v = np.array([x, y, z], dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    v = v / n
    return UnitVec3(float(v[0]), float(v[1]), float(v[2]))


def dot(u: VectorLike, v: VectorLike) -> float:
    """Dot product clamped to [-1, 1]."""
    return float(np.clip(as_vector(u) @ as_vector(v), -1.0, 1.0))


def angle(u: VectorLike, v: VectorLike) -> float:
    return float(np.arccos(dot(u, v)))


def sgn(x):
    """Sign with the convention sgn(0) = +1, returned as int8."""
    return np.where(np.asarray(x) >= 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class Frame:
    e1: UnitVec3
    e2: UnitVec3
    e3: UnitVec3

    def matrix(self) -> np.ndarray:
        """Rows are e1, e2, e3."""
        return np.array([self.e1.as_array(), self.e2.as_array(), self.e3.as_array()])


def orthonormal_frame(n: VectorLike) -> Frame:
    """Right-handed frame with ``e3 = n``.

    e1 comes from Gram-Schmidt on the coordinate axis least aligned with ``n``
    (ties go x, then y, then z) and ``e2 = e3 x e1``.
    """
    e3 = as_vector(n)
    e3 = e3 / np.linalg.norm(e3)
    k = int(np.argmin(np.abs(e3)))
    axis = np.zeros(3)
    axis[k] = 1.0
    e1 = axis - (axis @ e3) * e3
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    e2 /= np.linalg.norm(e2)
    return Frame(UnitVec3(*e1), UnitVec3(*e2), UnitVec3(*e3))


@dataclass(frozen=True)
class RandomStream:
    """Counter-based stream on Philox4x64.

    ``(master_seed, context_id)`` forms the 128-bit Philox key. ``counter``
    selects a block of 2**64 Philox counter values, so streams differing only
    in ``counter`` never overlap in practice.
    """

    master_seed: int = 0
    context_id: int = 0
    counter: int = 0

    def __post_init__(self):
        for name in ("master_seed", "context_id", "counter"):
            v = getattr(self, name)
            if not (0 <= int(v) < _U64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = int(self.master_seed) | (int(self.context_id) << 64)
        bitgen = np.random.Philox(key=key, counter=int(self.counter) << 64)
        return np.random.Generator(bitgen)

    def at(self, offset: int) -> "RandomStream":
        """Same key, counter advanced by ``offset``."""
        return replace(self, counter=(self.counter + offset) % _U64)

    def spawn(self, index: int) -> "RandomStream":
        """Child stream with a derived context id (deterministic, distinct per index)."""
        seq = np.random.SeedSequence([self.context_id, self.counter, index])
        ctx = int(seq.generate_state(1, dtype=np.uint64)[0])
        return RandomStream(self.master_seed, ctx, 0)


RngLike = Union[RandomStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RandomStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(rng).__name__}")


def _pack(v: np.ndarray, size):
    if size is None:
        return UnitVec3.from_array(v[0])
    return v


def sample_uniform_sphere(rng: RngLike, size: int | None = None):
    """Uniform directions: cos(theta) uniform on [-1, 1], azimuth uniform.

    Returns a ``UnitVec3`` when ``size`` is None, else an ``(size, 3)`` array.
    """
    gen = as_generator(rng)
    n = 1 if size is None else int(size)
    c = 2.0 * gen.random(n) - 1.0
    phi = 2.0 * np.pi * gen.random(n)
    s = np.sqrt(np.maximum(0.0, 1.0 - c * c))
    v = np.column_stack([s * np.cos(phi), s * np.sin(phi), c])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return _pack(v, size)


def inverse_cdf_abs(u: np.ndarray) -> np.ndarray:
    """Inverse CDF of the density |c| on [-1, 1]."""
    u = np.asarray(u, dtype=float)
    return np.where(u < 0.5, -np.sqrt(np.maximum(0.0, 1.0 - 2.0 * u)), np.sqrt(np.maximum(0.0, 2.0 * u - 1.0)))


def sample_cosine_weighted(axis: VectorLike, rng: RngLike, size: int | None = None):
    """Directions with density |axis . lam| / (2 pi) on the sphere."""
    gen = as_generator(rng)
    n = 1 if size is None else int(size)
    frame = orthonormal_frame(axis).matrix()
    c = inverse_cdf_abs(gen.random(n))
    phi = 2.0 * np.pi * gen.random(n)
    s = np.sqrt(np.maximum(0.0, 1.0 - c * c))
    v = (s * np.cos(phi))[:, None] * frame[0] + (s * np.sin(phi))[:, None] * frame[1] + c[:, None] * frame[2]
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return _pack(v, size)
