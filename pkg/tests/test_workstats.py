import numpy as np
import pytest

from demonsim.errors import DegenerateMarginalError, NonUnitalFeedbackError
from demonsim.protocol import ProtocolConfig, free_energy_shifts, run_protocol
from demonsim.workstats import (
    average_work,
    average_work_from_states,
    entropy_production,
    enumerate_paths,
    feedback_marginal,
    fluctuation_functional,
    jensen_bound_check,
    nonunital_variant,
    random_unital_ensemble,
    work_distribution,
    work_distribution_to_csv,
)


def test_path_table_shape_and_normalization():
    ens = run_protocol(ProtocolConfig(kt_pev=4.2, phi=0.4))
    paths = enumerate_paths(ens)
    # 2 initial energies x 2 outcomes x 2 feedbacks x 2 Kraus x 2 final energies
    assert len(paths) == 32
    assert sum(p.prob for p in paths) == pytest.approx(1.0)
    for p in paths:
        assert p.prob >= 0.0
        assert p.prob == pytest.approx(ens.p_k_given_l[p.k, p.l] * p.base_prob)


def test_zero_probability_paths_are_retained():
    paths = enumerate_paths(run_protocol(ProtocolConfig(kt_pev=4.2, phi=0.0)))
    dead = [p for p in paths if p.prob == 0.0]
    # aligned control never applies feedback k != l, but the table keeps those rows
    assert len(dead) == 16
    assert all(p.k != p.l for p in dead)
    assert all(p.base_prob > 0.0 or p.prob == 0.0 for p in paths)


def test_work_support_is_four_valued():
    cfg = ProtocolConfig(kt_pev=4.2, phi=0.0)
    dist = work_distribution(enumerate_paths(run_protocol(cfg)))
    r = cfg.frequency_ratio
    expected = sorted([-(1 + r) / 2, -(1 - r) / 2, (1 - r) / 2, (1 + r) / 2])
    assert np.allclose(dist.values, expected)
    assert dist.probabilities.sum() == pytest.approx(1.0)
    assert np.all(dist.probabilities > 0.0)


def test_work_distribution_csv():
    cfg = ProtocolConfig(kt_pev=4.2, phi=0.0)
    dist = work_distribution(enumerate_paths(run_protocol(cfg)))
    text = work_distribution_to_csv(dist, cfg.energy_unit_pev)
    lines = text.strip().splitlines()
    assert lines[0] == "work_internal,work_peV,probability"
    assert len(lines) == 1 + len(dist)
    first = [float(tok) for tok in lines[1].split(",")]
    assert first[1] == pytest.approx(first[0] * cfg.energy_unit_pev)


def test_average_work_two_routes_agree():
    for kt in (2.6, 5.9, 13.8):
        for phi in (0.0, 0.8, np.pi):
            ens = run_protocol(ProtocolConfig(kt_pev=kt, phi=phi))
            assert average_work(enumerate_paths(ens)) == pytest.approx(
                average_work_from_states(ens), abs=1e-12
            )


def test_average_work_closed_form_at_zero_mismatch():
    cfg = ProtocolConfig(kt_pev=4.9, phi=0.0)
    ens = run_protocol(cfg)
    x1 = cfg.beta
    x0 = x1 * cfg.frequency_ratio
    r = cfg.frequency_ratio
    expected = -0.5 * np.tanh(x1 / 2) + 0.5 * r * np.tanh(x0 / 2)
    assert average_work(enumerate_paths(ens)) == pytest.approx(expected, abs=1e-12)


def test_feedback_marginal_matches_ensemble():
    ens = run_protocol(ProtocolConfig(kt_pev=2.6, phi=1.1))
    paths = enumerate_paths(ens)
    assert np.allclose(feedback_marginal(paths, 2), ens.p_kl.sum(axis=1))


def test_path_marginals_recover_joint_and_outcome_probabilities():
    ens = run_protocol(ProtocolConfig(kt_pev=4.9, phi=0.8))
    paths = enumerate_paths(ens)
    p_l = np.zeros(2)
    p_kl = np.zeros((2, 2))
    for p in paths:
        p_l[p.l] += p.prob
        p_kl[p.k, p.l] += p.prob
    assert np.allclose(p_l, [0.5, 0.5], atol=1e-12)
    assert np.allclose(p_kl, ens.p_kl, atol=1e-12)


def test_average_work_vanishes_at_infinite_temperature():
    ens = run_protocol(ProtocolConfig(beta_internal=0.0, phi=0.4))
    assert average_work(enumerate_paths(ens)) == pytest.approx(0.0, abs=1e-14)


def test_entropy_production_vanishes_in_the_hot_limit():
    ens = run_protocol(ProtocolConfig(beta_internal=1e-5, phi=0.0))
    paths = enumerate_paths(ens)
    sigma = entropy_production(paths, free_energy_shifts(ens), ens.beta)
    assert abs(sigma) < 1e-8


def test_degenerate_protocol_yields_zero_work():
    """No quench, no measurement, no feedback rotation: all paths carry W = 0."""
    from demonsim.channels import identity_channel, projective_instrument
    from demonsim.linalg import IDENTITY2, SIGMA_Z
    from demonsim.protocol import build_ensemble

    h = 0.5 * SIGMA_Z
    ens = build_ensemble(
        beta=1.2,
        h0=h,
        quench_unitary=IDENTITY2,
        instrument=projective_instrument(IDENTITY2),
        p_k_given_l=np.array([[1.0]]),
        feedback=[identity_channel(2)],
        h_final=[h],
    )
    paths = enumerate_paths(ens)
    assert average_work(paths) == pytest.approx(0.0, abs=1e-14)
    assert all(p.prob == 0.0 or abs(p.work) < 1e-14 for p in paths)
    value = fluctuation_functional(
        paths, free_energy_shifts(ens), ens.beta, np.array([[1.0]]), ens.p_l
    )
    assert value == pytest.approx(1.0, abs=1e-12)


def test_no_feedback_reduces_to_plain_work_equality():
    """Single unconditional dephasing map: the average collapses to exp Jarzynski form."""
    from demonsim.channels import dephasing_channel, projective_instrument
    from demonsim.linalg import IDENTITY2, SIGMA_X, SIGMA_Z, herm_eig
    from demonsim.protocol import build_ensemble

    beta = 1.7
    h0 = 0.5 * (2.0 / 3.0) * SIGMA_Z
    h_final = 0.5 * SIGMA_X
    ens = build_ensemble(
        beta=beta,
        h0=h0,
        quench_unitary=IDENTITY2,
        instrument=projective_instrument(SIGMA_X),
        p_k_given_l=np.array([[1.0, 1.0]]),
        feedback=[dephasing_channel(herm_eig(h_final))],
        h_final=[h_final],
    )
    paths = enumerate_paths(ens)
    # the information weight is identically zero here
    value = fluctuation_functional(
        paths, free_energy_shifts(ens), beta, np.array([[1.0, 1.0]]), ens.p_l
    )
    assert value == pytest.approx(1.0, abs=1e-12)


def test_entropy_production_definition():
    ens = run_protocol(ProtocolConfig(kt_pev=2.6, phi=0.5))
    paths = enumerate_paths(ens)
    shifts = free_energy_shifts(ens)
    sigma = entropy_production(paths, shifts, ens.beta)
    p_k = feedback_marginal(paths, 2)
    manual = ens.beta * (average_work(paths) - float(np.dot(p_k, shifts)))
    assert sigma == pytest.approx(manual, abs=1e-14)


def test_fluctuation_functional_is_one_on_grid():
    for kt in (2.6, 4.9, 8.6):
        for phi in (0.0, 0.3, np.pi / 2, np.pi):
            ens = run_protocol(ProtocolConfig(kt_pev=kt, phi=phi))
            value = fluctuation_functional(
                enumerate_paths(ens),
                free_energy_shifts(ens),
                ens.beta,
                ens.p_k_given_l,
                ens.p_l,
            )
            assert value == pytest.approx(1.0, abs=1e-12)


def test_fluctuation_functional_rejects_degenerate_marginal():
    ens = run_protocol(ProtocolConfig(kt_pev=4.2, phi=0.0))
    paths = enumerate_paths(ens)
    conditional = np.array([[1.0, 1.0], [0.0, 0.0]])  # feedback 1 never fires
    with pytest.raises(DegenerateMarginalError):
        fluctuation_functional(
            paths, free_energy_shifts(ens), ens.beta, conditional, ens.p_l
        )


def test_jensen_bound_check():
    assert jensen_bound_check(-0.5, 0.6)
    assert jensen_bound_check(-0.5, 0.5 - 1e-12)
    assert not jensen_bound_check(-0.5, 0.3)


def test_nonunital_variant_trips_the_gate():
    ens = run_protocol(ProtocolConfig(beta_internal=2.0, phi=0.0))
    damped = nonunital_variant(ens)
    with pytest.raises(NonUnitalFeedbackError):
        enumerate_paths(damped)
    paths = enumerate_paths(damped, require_unital=False)
    assert sum(p.prob for p in paths) == pytest.approx(1.0)  # still trace preserving


def test_nonunital_feedback_breaks_the_identity():
    beta = 2.0
    damping = 0.2
    ens = run_protocol(ProtocolConfig(beta_internal=beta, phi=0.0))
    damped = nonunital_variant(ens, damping=damping)
    paths = enumerate_paths(damped, require_unital=False)
    value = fluctuation_functional(
        paths, free_energy_shifts(damped), damped.beta, damped.p_k_given_l, damped.p_l
    )
    # damping toward the ground state inflates the functional by q*tanh(beta/2)
    assert value == pytest.approx(1.0 + damping * np.tanh(beta / 2.0), abs=1e-12)


def test_random_unital_ensemble_is_seed_deterministic():
    a = random_unital_ensemble(42)
    b = random_unital_ensemble(42)
    assert np.array_equal(a.p_kl, b.p_kl)
    assert np.array_equal(a.h0, b.h0)
    c = random_unital_ensemble(43)
    assert not np.array_equal(a.p_kl, c.p_kl)


def test_random_unital_ensemble_satisfies_identity():
    for seed in (0, 1, 7):
        ens = random_unital_ensemble(seed)
        paths = enumerate_paths(ens)
        assert sum(p.prob for p in paths) == pytest.approx(1.0)
        assert np.allclose(feedback_marginal(paths, len(ens.feedback)), ens.p_kl.sum(axis=1))
        value = fluctuation_functional(
            paths, free_energy_shifts(ens), ens.beta, ens.p_k_given_l, ens.p_l
        )
        assert value == pytest.approx(1.0, abs=1e-11)
