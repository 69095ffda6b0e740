"""Hidden-variable models with deterministic +/-1 outcomes.

Every model splits a shot into three steps: draw lambda from a distribution
that may depend on Alice's setting, then evaluate Alice's and Bob's outcome
functions. Each outcome function sees only its own party's setting and lambda.

Three models are provided:

* ``SingletOneSided``: lambda on the sphere with density |X.lam|/(2 pi),
  a = -sgn(X.lam), b = +sgn(Y.lam). Reproduces the singlet correlator -X.Y.
* ``ToyTable``: two labels lambda_1, lambda_2 with the tabulated outcomes and
  context-dependent weights (0 and p for lambda_1 under X and X').
* ``UniformBaseline``: Bell's linear model, lambda uniform and independent of
  the settings. Used as the measurement-independent control.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Union

import numpy as np

from .core import (
    RngLike,
    UnitVec3,
    as_generator,
    as_vector,
    dot,
    sample_cosine_weighted,
    sample_uniform_sphere,
    sgn,
)

KINDS = ("singlet-onesided", "toy-table", "uniform-baseline")

ALICE_LABELS = ("X", "X'")
BOB_LABELS = ("Y", "Y'")
_LABEL_ALIASES = {"Xp": "X'", "Yp": "Y'"}


@dataclass(frozen=True)
class HiddenVar:
    """Either a sphere direction or a discrete label (1-based)."""

    direction: UnitVec3 | None = None
    label: int | None = None

    def __post_init__(self):
        if (self.direction is None) == (self.label is None):
            raise ValueError("HiddenVar holds exactly one of direction or label")
        if self.label is not None and self.label < 1:
            raise ValueError(f"labels start at 1, got {self.label}")


Setting = Union[UnitVec3, np.ndarray, tuple, list, str]


def _label(setting, allowed) -> str:
    if not isinstance(setting, str):
        raise ValueError(f"this model takes context labels {allowed}, got {setting!r}")
    lab = _LABEL_ALIASES.get(setting, setting)
    if lab not in allowed:
        raise ValueError(f"unknown context {setting!r}; expected one of {allowed}")
    return lab


def _vector(setting) -> np.ndarray:
    if isinstance(setting, str):
        raise ValueError(f"this model takes direction vectors, got label {setting!r}")
    v = as_vector(setting)
    if abs(v @ v - 1.0) > 1e-12:
        raise ValueError("setting must be a unit vector")
    return v


class Model:
    kind: ClassVar[str]
    lambda_dependence: ClassVar[str]
    discrete: ClassVar[bool]

    # batch interface; concrete models implement these on arrays

    def sample_lambdas(self, alice_setting, rng: RngLike, size: int) -> np.ndarray:
        raise NotImplementedError

    def outcomes_alice(self, setting, lambdas: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def outcomes_bob(self, setting, lambdas: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def correlator(self, alice_setting, bob_setting) -> float | None:
        return None

    def density(self, alice_setting, lambdas: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # helpers for single-value calls

    def _unwrap(self, lam: HiddenVar):
        if self.discrete:
            if lam.label is None:
                raise ValueError(f"{self.kind} expects a label hidden variable")
            return np.array([lam.label])
        if lam.direction is None:
            raise ValueError(f"{self.kind} expects a direction hidden variable")
        return lam.direction.as_array()[None, :]

    def _wrap(self, arr: np.ndarray) -> HiddenVar:
        if self.discrete:
            return HiddenVar(label=int(arr[0]))
        return HiddenVar(direction=UnitVec3.from_array(arr[0]))

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class SingletOneSided(Model):
    kind: ClassVar[str] = "singlet-onesided"
    lambda_dependence: ClassVar[str] = "alice-only"
    discrete: ClassVar[bool] = False

    def sample_lambdas(self, alice_setting, rng, size):
        return sample_cosine_weighted(_vector(alice_setting), rng, size)

    def outcomes_alice(self, setting, lambdas):
        return -sgn(lambdas @ _vector(setting))

    def outcomes_bob(self, setting, lambdas):
        return sgn(lambdas @ _vector(setting))

    def correlator(self, alice_setting, bob_setting):
        return -dot(_vector(alice_setting), _vector(bob_setting))

    def density(self, alice_setting, lambdas):
        return np.abs(np.atleast_2d(lambdas) @ _vector(alice_setting)) / (2.0 * np.pi)


@dataclass(frozen=True)
class UniformBaseline(Model):
    kind: ClassVar[str] = "uniform-baseline"
    lambda_dependence: ClassVar[str] = "none"
    discrete: ClassVar[bool] = False

    def sample_lambdas(self, alice_setting, rng, size):
        _vector(alice_setting)
        return sample_uniform_sphere(rng, size)

    def outcomes_alice(self, setting, lambdas):
        return sgn(lambdas @ _vector(setting))

    def outcomes_bob(self, setting, lambdas):
        return -sgn(lambdas @ _vector(setting))

    def correlator(self, alice_setting, bob_setting):
        theta = np.arccos(dot(_vector(alice_setting), _vector(bob_setting)))
        return float(-1.0 + 2.0 * theta / np.pi)

    def density(self, alice_setting, lambdas):
        _vector(alice_setting)
        return np.full(np.atleast_2d(lambdas).shape[0], 1.0 / (4.0 * np.pi))


@dataclass(frozen=True)
class ToyTable(Model):
    """Two-label deterministic table parameterized by ``p`` and outcome signs ``a``, ``b``.

    ======  =====  =====  =====  =====  ==========  ==========
    lambda  X      X'     Y      Y'     rho(.|X)    rho(.|X')
    ======  =====  =====  =====  =====  ==========  ==========
    1       -a     -a     -a     a      0           p
    2       b      b      b      b      1           1-p
    ======  =====  =====  =====  =====  ==========  ==========
    """

    p: float = 0.0
    a: int = 1
    b: int = 1

    kind: ClassVar[str] = "toy-table"
    lambda_dependence: ClassVar[str] = "alice-only"
    discrete: ClassVar[bool] = True
    n_lambda: ClassVar[int] = 2

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.a not in (1, -1) or self.b not in (1, -1):
            raise ValueError("a and b must be +1 or -1")

    def weights(self, alice_setting) -> np.ndarray:
        """rho(lambda_1 | context), rho(lambda_2 | context)."""
        if _label(alice_setting, ALICE_LABELS) == "X":
            return np.array([0.0, 1.0])
        return np.array([self.p, 1.0 - self.p])

    def exact_weights(self, alice_setting) -> list[Fraction]:
        """``weights`` in exact rational arithmetic (p taken as its exact binary value)."""
        if _label(alice_setting, ALICE_LABELS) == "X":
            return [Fraction(0), Fraction(1)]
        p = Fraction(self.p)
        return [p, 1 - p]

    def alice_column(self, setting) -> np.ndarray:
        _label(setting, ALICE_LABELS)
        return np.array([-self.a, self.b], dtype=np.int8)

    def bob_column(self, setting) -> np.ndarray:
        if _label(setting, BOB_LABELS) == "Y":
            return np.array([-self.a, self.b], dtype=np.int8)
        return np.array([self.a, self.b], dtype=np.int8)

    def _check_labels(self, lambdas):
        lam = np.asarray(lambdas)
        if lam.size and (lam.min() < 1 or lam.max() > self.n_lambda):
            raise ValueError("label out of range")
        return lam - 1

    def sample_lambdas(self, alice_setting, rng, size):
        q = self.weights(alice_setting)[0]
        u = as_generator(rng).random(size)
        return np.where(u < q, 1, 2).astype(np.int8)

    def outcomes_alice(self, setting, lambdas):
        return self.alice_column(setting)[self._check_labels(lambdas)]

    def outcomes_bob(self, setting, lambdas):
        return self.bob_column(setting)[self._check_labels(lambdas)]

    def correlator(self, alice_setting, bob_setting):
        w = self.weights(alice_setting)
        prod = self.alice_column(alice_setting) * self.bob_column(bob_setting)
        return float(w @ prod)

    def density(self, alice_setting, lambdas):
        return self.weights(alice_setting)[self._check_labels(lambdas)]

    def params(self):
        return {"p": self.p, "a": self.a, "b": self.b}


ModelDescriptor = Model


def make_model(kind: str, **params) -> Model:
    """Build a model from its kind name, e.g. ``make_model("toy-table", p=0.3)``."""
    if kind == "singlet-onesided":
        return SingletOneSided()
    if kind == "uniform-baseline":
        return UniformBaseline()
    if kind == "toy-table":
        return ToyTable(**params)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")


def sample_lambda(model: Model, alice_setting: Setting, rng: RngLike) -> HiddenVar:
    return model._wrap(model.sample_lambdas(alice_setting, rng, 1))


def outcome_alice(model: Model, setting: Setting, lam: HiddenVar) -> int:
    return int(model.outcomes_alice(setting, model._unwrap(lam))[0])


def outcome_bob(model: Model, setting: Setting, lam: HiddenVar) -> int:
    return int(model.outcomes_bob(setting, model._unwrap(lam))[0])


def analytic_correlator(model: Model, alice_setting: Setting, bob_setting: Setting) -> float | None:
    """Closed-form <ab>, or None when the model has none."""
    return model.correlator(alice_setting, bob_setting)


def lambda_mass(model: Model, alice_setting: Setting, lam: HiddenVar) -> float:
    """Probability (discrete) or density (sphere) of ``lam`` under Alice's setting."""
    return float(model.density(alice_setting, model._unwrap(lam))[0])
