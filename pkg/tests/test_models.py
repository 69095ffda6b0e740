import inspect
import math

import numpy as np
import pytest

from freewill.core import RandomStream, UnitVec3, sample_uniform_sphere, unit
from freewill.models import (
    HiddenVar,
    SingletOneSided,
    ToyTable,
    UniformBaseline,
    analytic_correlator,
    lambda_mass,
    make_model,
    outcome_alice,
    outcome_bob,
    sample_lambda,
)

Z = unit(0, 0, 1)
XHAT = unit(1, 0, 0)
L1, L2 = HiddenVar(label=1), HiddenVar(label=2)


def test_descriptor_dependence_declarations():
    assert SingletOneSided().lambda_dependence == "alice-only"
    assert ToyTable(0.2).lambda_dependence == "alice-only"
    assert UniformBaseline().lambda_dependence == "none"


def test_make_model():
    assert make_model("toy-table", p=0.3) == ToyTable(0.3)
    assert isinstance(make_model("singlet-onesided"), SingletOneSided)
    with pytest.raises(ValueError):
        make_model("nope")


def test_toy_params_validated():
    with pytest.raises(ValueError):
        ToyTable(1.5)
    with pytest.raises(ValueError):
        ToyTable(0.5, a=0)


def test_hiddenvar_exactly_one():
    with pytest.raises(ValueError):
        HiddenVar()
    with pytest.raises(ValueError):
        HiddenVar(direction=Z, label=1)


def test_toy_sampling_context_x_always_label_2():
    labels = ToyTable(0.3).sample_lambdas("X", RandomStream(1), 100_000)
    assert np.all(labels == 2)
    assert sample_lambda(ToyTable(0.3), "X", RandomStream(2)) == L2


def test_toy_sampling_context_xp_frequency():
    labels = ToyTable(0.3).sample_lambdas("X'", RandomStream(1), 100_000)
    assert abs((labels == 1).mean() - 0.3) <= 0.005


def test_singlet_sampling_moment():
    lam = SingletOneSided().sample_lambdas(Z, RandomStream(5), 1_000_000)
    assert abs(((lam @ Z.as_array()) ** 2).mean() - 0.5) <= 0.002


@pytest.mark.parametrize("a", [1, -1])
@pytest.mark.parametrize("b", [1, -1])
def test_toy_outcome_table(a, b):
    m = ToyTable(0.4, a, b)
    assert outcome_alice(m, "X", L1) == -a
    assert outcome_alice(m, "X'", L1) == -a
    assert outcome_alice(m, "X", L2) == b
    assert outcome_alice(m, "X'", L2) == b
    assert outcome_bob(m, "Y", L1) == -a
    assert outcome_bob(m, "Y'", L1) == a
    assert outcome_bob(m, "Y", L2) == b
    assert outcome_bob(m, "Y'", L2) == b


def test_singlet_outcomes():
    lam = HiddenVar(direction=Z)
    assert outcome_alice(SingletOneSided(), Z, lam) == -1
    assert outcome_bob(SingletOneSided(), Z, lam) == 1
    # sgn(0) = +1
    assert outcome_bob(SingletOneSided(), XHAT, lam) == 1
    assert outcome_alice(SingletOneSided(), XHAT, lam) == -1


def test_setting_type_mismatch():
    with pytest.raises(ValueError):
        sample_lambda(SingletOneSided(), "X", RandomStream())
    with pytest.raises(ValueError):
        sample_lambda(ToyTable(0.1), Z, RandomStream())
    with pytest.raises(ValueError):
        outcome_alice(ToyTable(0.1), "Y", L1)
    with pytest.raises(ValueError):
        outcome_bob(SingletOneSided(), Z, L1)
    with pytest.raises(ValueError):
        outcome_alice(ToyTable(0.1), "X", HiddenVar(label=3))


def test_analytic_correlators():
    assert analytic_correlator(SingletOneSided(), Z, Z) == -1.0
    assert analytic_correlator(ToyTable(0.5), "X'", "Y'") == 0.0
    assert analytic_correlator(UniformBaseline(), Z, XHAT) == pytest.approx(0.0, abs=1e-15)
    t = ToyTable(0.3)
    assert [t.correlator(x, y) for x, y in [("X", "Y"), ("X", "Y'"), ("X'", "Y")]] == [1.0, 1.0, 1.0]
    assert t.correlator("X'", "Y'") == pytest.approx(1 - 2 * 0.3, abs=1e-15)


def test_lambda_mass_examples():
    assert lambda_mass(SingletOneSided(), Z, HiddenVar(direction=Z)) == pytest.approx(1 / (2 * math.pi))
    assert lambda_mass(SingletOneSided(), Z, HiddenVar(direction=XHAT)) == 0.0
    assert lambda_mass(ToyTable(0.7), "X'", L1) == 0.7
    assert lambda_mass(ToyTable(0.7), "X", L1) == 0.0
    assert lambda_mass(UniformBaseline(), Z, HiddenVar(direction=XHAT)) == pytest.approx(1 / (4 * math.pi))


def _sphere_integral(f, n_theta=400, n_phi=400):
    """Tensor Gauss-Legendre over (cos theta, phi), split at cos theta = 0."""
    xs, ws = np.polynomial.legendre.leggauss(n_theta)
    c = np.concatenate([(xs - 1) / 2, (xs + 1) / 2])
    wc = np.concatenate([ws / 2, ws / 2])
    phi = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    C, P = np.meshgrid(c, phi, indexing="ij")
    S = np.sqrt(1 - C ** 2)
    pts = np.stack([S * np.cos(P), S * np.sin(P), C], axis=-1).reshape(-1, 3)
    vals = f(pts).reshape(C.shape)
    return float((wc[:, None] * vals).sum() * 2 * np.pi / n_phi)


@pytest.mark.parametrize("model", [SingletOneSided(), UniformBaseline()])
@pytest.mark.parametrize("axis", [unit(0, 0, 1), unit(1, 2, 3)])
def test_density_normalization(model, axis):
    assert abs(_sphere_integral(lambda v: model.density(axis, v)) - 1.0) <= 1e-6


def test_toy_weights_normalized():
    for ctx in ("X", "X'"):
        assert sum(ToyTable(0.37).exact_weights(ctx)) == 1


def test_parameter_independence_replay():
    """Replaying the same lambdas, Bob's outcomes ignore Alice's setting and vice versa."""
    lam = sample_uniform_sphere(RandomStream(8), 10_000)
    for model in (SingletOneSided(), UniformBaseline()):
        y = unit(0.1, 0.9, -0.3)
        b1 = model.outcomes_bob(y, lam)
        b2 = model.outcomes_bob(y, lam)
        assert np.array_equal(b1, b2)
        assert list(inspect.signature(model.outcomes_bob).parameters) == ["setting", "lambdas"]
        assert list(inspect.signature(model.outcomes_alice).parameters) == ["setting", "lambdas"]
    toy = ToyTable(0.6, -1, 1)
    labels = np.array([1, 2, 1, 2])
    assert np.array_equal(toy.outcomes_bob("Y", labels), toy.outcomes_bob("Y", labels))


def test_outcomes_deterministic():
    m = SingletOneSided()
    lam = HiddenVar(direction=unit(0.3, 0.3, 0.9))
    assert len({outcome_alice(m, XHAT, lam) for _ in range(10)}) == 1


def test_singlet_reproduces_correlator_oracle():
    """Direct sphere quadrature of a*b*rho equals -X.Y (independent of sampling)."""
    m = SingletOneSided()
    x, y = unit(0.3, -0.4, 0.5), unit(-0.6, 0.2, 0.1)

    def f(v):
        return m.density(x, v) * m.outcomes_alice(x, v) * m.outcomes_bob(y, v)

    assert abs(_sphere_integral(f, 800, 800) - (-(x.as_array() @ y.as_array()))) < 5e-3


def test_singlet_monte_carlo_matches_analytic():
    m = SingletOneSided()
    rng = np.random.default_rng(11)
    for k in range(5):
        x = UnitVec3.from_array(rng.normal(size=3))
        y = UnitVec3.from_array(rng.normal(size=3))
        lam = m.sample_lambdas(x, RandomStream(11, k), 200_000)
        ab = m.outcomes_alice(x, lam).astype(float) * m.outcomes_bob(y, lam)
        se = ab.std(ddof=1) / math.sqrt(ab.size)
        assert abs(ab.mean() - m.correlator(x, y)) <= 5 * se + 1e-12
