import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ising_fluct import generalized_entropy as ge
from ising_fluct.chains import dimer, infinite_entropy
from ising_fluct.chains.free_fermion import Coupling, fermion_spectrum, occupation_probabilities
from ising_fluct.exceptions import CriticalPointError, DomainError
from ising_fluct.statistics import SchmidtSpectrum

BELL = SchmidtSpectrum.from_probabilities([0.5, 0.5])


def _source(kind, lam):
    if kind == "dimer":
        return dimer.dimer_schmidt_spectrum(lam)
    return Coupling.from_lambda(lam)


def _stats(kind, lam):
    if kind == "dimer":
        return dimer.dimer_stats(lam)
    return infinite_entropy.stats(lam)


def test_bell_pair():
    assert ge.renyi(BELL, 2.0) == pytest.approx(math.log(2.0), rel=1e-15)
    assert ge.tsallis(BELL, 2.0) == pytest.approx(0.5, rel=1e-15)


def test_trace_at_alpha_one_is_zero():
    assert ge.log_trace_rho_alpha(BELL, 1.0) == 0.0
    assert ge.log_trace_rho_alpha(Coupling.from_lambda(0.5), 1.0) == 0.0


def test_dimer_purity():
    C = dimer.dimer_concurrence(2.0)
    assert ge.log_trace_rho_alpha(dimer.dimer_schmidt_spectrum(2.0), 2.0) == pytest.approx(
        math.log(1.0 - 0.5 * C * C), rel=1e-14
    )


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
def test_ladder_trace_matches_mode_product(alpha):
    c = Coupling.from_lambda(0.5)
    n = occupation_probabilities(fermion_spectrum(c), 1000)
    explicit = float(np.sum(np.log(n**alpha + (1.0 - n) ** alpha)))
    assert ge.log_trace_rho_alpha(c, alpha) == pytest.approx(explicit, abs=1e-12)


def test_ordered_trace_counts_zero_mode():
    # far in the ordered phase rho -> two equal weights
    assert ge.renyi(Coupling.from_lambda(1e6), 2.0) == pytest.approx(math.log(2.0), abs=1e-12)


def test_renyi_brackets_von_neumann():
    c = Coupling.from_lambda(0.5)
    S = infinite_entropy.entropy_closed(c)
    lower, upper = ge.renyi(c, 1.0 + 1e-4), ge.renyi(c, 1.0 - 1e-4)
    assert lower < S < upper
    assert abs(0.5 * (lower + upper) - S) < 1e-6


@pytest.mark.parametrize("alpha", [1.0, 0.0, -1.0, math.nan])
def test_order_domain(alpha):
    with pytest.raises(DomainError):
        ge.renyi(BELL, alpha)
    with pytest.raises(DomainError):
        ge.tsallis(BELL, alpha)


def test_critical_source():
    with pytest.raises(CriticalPointError):
        ge.renyi(Coupling.from_lambda(1.0), 2.0)


def test_interconversion():
    round_trip = ge.tsallis_from_renyi(ge.renyi_from_tsallis(0.4, 2.0), 2.0)
    assert round_trip == pytest.approx(0.4, abs=1e-13)
    assert ge.tsallis_from_renyi(math.log(2.0), 2.0) == pytest.approx(0.5, rel=1e-15)
    assert ge.renyi_from_tsallis(0.4, 1.0 + 1e-9) == pytest.approx(0.4, abs=1e-8)
    with pytest.raises(DomainError):
        ge.renyi_from_tsallis(2.0, 2.0)


@pytest.mark.parametrize("kind", ["dimer", "infinite"])
@pytest.mark.parametrize("alpha", [0.5, 2.0, 4.0])
def test_tsallis_from_renyi_on_sources(kind, alpha):
    source = _source(kind, 2.0)
    r, t = ge.renyi(source, alpha), ge.tsallis(source, alpha)
    assert ge.tsallis_from_renyi(r, alpha) == pytest.approx(t, abs=1e-13)
    assert ge.renyi_from_tsallis(t, alpha) == pytest.approx(r, abs=1e-13)


def test_tsallis_two_from_renyi():
    source = dimer.dimer_schmidt_spectrum(3.0)
    assert ge.tsallis(source, 2.0) == pytest.approx(-math.expm1(-ge.renyi(source, 2.0)), abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(weights=st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=2, max_size=16))
def test_renyi_non_increasing(weights):
    probs = np.array(weights) / np.sum(weights)
    source = SchmidtSpectrum.from_probabilities(probs)
    values = [ge.renyi(source, alpha) for alpha in (0.5, 1.5, 2.0, 3.0, 5.0)]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_moment_expansion_at_alpha_one():
    source = dimer.dimer_schmidt_spectrum(2.0)
    assert ge.tsallis_moment_expansion(source, 1.0) == dimer.dimer_stats(2.0).S


@pytest.mark.parametrize("kind", ["dimer", "infinite"])
@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_moment_expansion_is_second_order(kind, lam):
    source = _source(kind, lam)
    error = [
        abs(ge.tsallis_moment_expansion(source, 1.0 + h) - ge.tsallis(source, 1.0 + h))
        for h in (0.01, 0.02)
    ]
    assert 3.5 * error[0] < error[1]


def test_moment_expansion_warns_outside_window(caplog):
    ge.tsallis_moment_expansion(BELL, 1.5)
    assert "outside" in caplog.text


@pytest.mark.parametrize("kind", ["dimer", "infinite"])
@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_moments_from_alpha_derivatives(kind, lam):
    source = _source(kind, lam)
    s = _stats(kind, lam)
    first = ge.moment_by_alpha_derivative(source, 1)
    second = ge.moment_by_alpha_derivative(source, 2)
    assert first == pytest.approx(s.S, abs=1e-5)
    assert second == pytest.approx(s.second_moment, abs=1e-5)
    assert second - first**2 == pytest.approx(s.D, abs=2e-5)


def test_first_moment_dimer():
    first = ge.moment_by_alpha_derivative(dimer.dimer_schmidt_spectrum(2.0), 1)
    assert first == pytest.approx(dimer.entropy_from_C(1.0 / math.sqrt(2.0)), abs=1e-6)


def test_moment_of_pure_state():
    pure = SchmidtSpectrum.from_probabilities([1.0])
    assert ge.moment_by_alpha_derivative(pure, 1) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        ge.moment_by_alpha_derivative(pure, 3)


def test_von_neumann_sources():
    assert ge.von_neumann(BELL) == pytest.approx(math.log(2.0))
    assert ge.von_neumann(Coupling.from_lambda(0.5)) == pytest.approx(
        infinite_entropy.entropy_closed(0.5)
    )
    assert ge.von_neumann(fermion_spectrum(0.5)) == pytest.approx(
        infinite_entropy.entropy_closed(0.5), abs=1e-12
    )


def test_cft_helpers():
    assert ge.cft_trace_asymptote(1e4, 0.5, 1.0) == 1.0
    assert ge.cft_trace_asymptote(1e4, 0.5, 2.0) < 1.0
    ratio = ge.cft_fluctuation(1e6, 0.5, 4) / ge.cft_fluctuation(1e6, 0.5, 1)
    assert ratio == pytest.approx(2.0, rel=1e-14)
    assert ge.cft_S(math.e, 0.5, 2) == pytest.approx(1.0 / 6.0)


@pytest.mark.parametrize("delta", [1e-2, 1e-5, 1e-8])
def test_cft_second_moment_matches_asymptote(delta):
    lam = 1.0 - delta
    xi = ge.correlation_length(lam)
    assert ge.cft_second_moment(xi, ge.ISING_CENTRAL_CHARGE) == pytest.approx(
        infinite_entropy.asymptote_second_moment(lam), rel=1e-12
    )


def test_cft_entropy_tracks_exact_slope():
    def gap(delta):
        lam = 1.0 - delta
        return infinite_entropy.entropy_closed(lam) - ge.cft_S(
            ge.correlation_length(lam), ge.ISING_CENTRAL_CHARGE
        )

    assert abs(gap(1e-6) - gap(1e-8)) < 0.02


def test_correlation_length():
    assert ge.correlation_length(0.5) == 2.0
    assert ge.correlation_length(3.0) == 0.5
    with pytest.raises(DomainError):
        ge.correlation_length(1.0)


@pytest.mark.parametrize(
    "args", [(1.0, 0.5, 2.0), (10.0, 0.0, 2.0), (10.0, 0.5, -1.0), (10.0, 0.5, 2.0, 0)]
)
def test_cft_domain(args):
    with pytest.raises(DomainError):
        ge.cft_trace_asymptote(*args)
