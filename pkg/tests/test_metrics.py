import random
from fractions import Fraction

import pytest

from gossip_lab.core import validate_permutation
from gossip_lab.engine import simulate, simulate_metrics
from gossip_lab.errors import DomainTooSmallError
from gossip_lab.fsa import homogeneous_assignment
from gossip_lab.metrics import (
    asymptotic_mu_identity,
    closed_form_length_identity,
    closed_form_length_pipelined,
    closed_form_mu_pipelined,
    efficiency,
    mean_slot_utilization,
    metrics_for,
    mu_from_length,
    run_length,
    utilization_string,
)


@pytest.fixture(scope="module")
def table1_run():
    return simulate(homogeneous_assignment(5, "identity"))


@pytest.fixture(scope="module")
def table2_run():
    return simulate(homogeneous_assignment(8, "pipelined"))


def test_utilization_recount_matches_stored(table1_run, table2_run):
    assert utilization_string(table1_run) == table1_run.nu
    assert utilization_string(table2_run) == table2_run.nu
    assert table1_run.nu == (2,) * 7 + (4, 2, 2, 2, 2, 4, 4, 2, 2, 4) + (2,) * 9


def test_smallest_system_run():
    rt = simulate(homogeneous_assignment(1, "identity"))
    assert utilization_string(rt) == (2, 2)
    assert run_length(rt) == 2


def test_run_lengths(table1_run, table2_run):
    assert run_length(table1_run) == 26
    assert run_length(table2_run) == 24


def test_mean_slot_utilization_values(table1_run, table2_run):
    assert mean_slot_utilization(table1_run) == Fraction(60, 26)
    assert f"{float(mean_slot_utilization(table1_run)):.4f}" == "2.3077"
    assert mean_slot_utilization(table2_run) == 6


def test_mu_lambda_conservation_random():
    rng = random.Random(99)
    for _ in range(50):
        n = rng.randint(2, 12)
        assignment = []
        for i in range(n + 1):
            targets = [j for j in range(n + 1) if j != i]
            rng.shuffle(targets)
            assignment.append(validate_permutation(i, targets, n))
        rt = simulate(assignment)
        assert mean_slot_utilization(rt) * rt.length == 2 * n * (n + 1)
        assert mean_slot_utilization(rt) == Fraction(sum(rt.nu), rt.length)


def test_efficiency_values(table1_run, table2_run):
    assert efficiency(table2_run) == Fraction(2, 3)
    assert efficiency(table1_run) == Fraction(60, 26) / 6 == Fraction(5, 13)


def test_pipelined_efficiency_constant_two_thirds():
    for n in range(2, 13):
        rt_summary = simulate_metrics(homogeneous_assignment(n, "pipelined"))
        mu = mu_from_length(n, rt_summary.length)
        assert mu / (n + 1) == Fraction(2, 3)


def test_metrics_bundle(table2_run):
    m = metrics_for(table2_run)
    assert (m.length, m.mu, m.efficiency) == (24, 6, Fraction(2, 3))


@pytest.mark.parametrize("n,expected", [(1, 2), (2, 6), (5, 26), (8, 60), (200, 30300)])
def test_identity_length_formula(n, expected):
    assert closed_form_length_identity(n) == expected


def test_identity_formula_always_integral():
    for n in range(1, 200):
        closed_form_length_identity(n)


@pytest.mark.parametrize("n,expected", [(2, 6), (8, 24), (50, 150)])
def test_pipelined_length_formula(n, expected):
    assert closed_form_length_pipelined(n) == expected


@pytest.mark.parametrize("n,expected", [(2, 2), (8, 6), (200, 134)])
def test_pipelined_mu_formula(n, expected):
    assert closed_form_mu_pipelined(n) == expected


def test_pipelined_formulas_reject_single_pair_system():
    """Simulation gives lambda=2 at N=1, contradicting 3N; domain starts at 2."""
    assert simulate_metrics(homogeneous_assignment(1, "pipelined")).length == 2
    with pytest.raises(DomainTooSmallError):
        closed_form_length_pipelined(1)
    with pytest.raises(DomainTooSmallError):
        closed_form_mu_pipelined(1)


def test_identity_formula_rejects_empty_system():
    with pytest.raises(DomainTooSmallError):
        closed_form_length_identity(0)


def test_asymptote_value_and_convergence():
    assert asymptotic_mu_identity() == Fraction(8, 3)
    previous_gap = None
    for n in (10, 50, 200, 500, 2000):
        mu = mu_from_length(n, closed_form_length_identity(n))
        gap = abs(mu - Fraction(8, 3))
        if previous_gap is not None:
            assert gap < previous_gap
        previous_gap = gap
    assert gap < Fraction(8, 3) / 100


def test_simulated_lengths_match_formulas_midrange():
    for n in (2, 3, 7, 11, 16):
        assert simulate_metrics(homogeneous_assignment(n, "identity")).length == (
            closed_form_length_identity(n)
        )
        assert simulate_metrics(homogeneous_assignment(n, "pipelined")).length == 3 * n
