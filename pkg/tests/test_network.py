"""Allocation evaluation: fairness indices, constraint flags, end-to-end rates."""

import dataclasses
import math

import numpy as np
import pytest

from risqnet.channel import make_environment
from risqnet.entanglement import MemoryParams
from risqnet.geometry import DeploymentRegion, Point3D
from risqnet.link import build_link_budget, prob_success, prob_success_mc
from risqnet.network import (
    ConstraintFlags,
    ProblemInstance,
    UserDemand,
    check_feasibility,
    evaluate,
    jfi,
    wfi,
)

REGION = DeploymentRegion(50.0, 450.0, 0.0, 400.0, 35.0, 90.0)
QBS = Point3D(0.0, 0.0, 90.0)


def make_instance(users, demands=None, weather="sunny", turbulence="moderate",
                  pointing="low", **kwargs):
    if demands is None:
        demands = tuple(UserDemand() for _ in users)
    return ProblemInstance(
        qbs=QBS,
        users=tuple(users),
        region=REGION,
        env=make_environment(weather, turbulence, pointing=pointing),
        mem=MemoryParams(),
        demands=tuple(demands),
        **kwargs,
    )


THREE_USERS = (
    Point3D(350.0, 0.0, 10.0),
    Point3D(400.0, 0.0, 10.0),
    Point3D(450.0, 0.0, 10.0),
)


class TestJainIndex:
    def test_equal_rates_give_one(self):
        assert jfi([5.0, 5.0, 5.0, 5.0]) == pytest.approx(1.0, rel=1e-15)

    def test_single_nonzero_gives_reciprocal_count(self):
        assert jfi([3.0, 0.0, 0.0, 0.0]) == pytest.approx(0.25, rel=1e-15)
        assert jfi([0.0, 0.0, 7.0]) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_known_vector(self):
        # (2+1+1)^2 / (3 * (4+1+1)) = 16/18
        assert jfi([2.0, 1.0, 1.0]) == pytest.approx(16.0 / 18.0, rel=1e-15)

    def test_all_zero_defined_as_zero(self):
        assert jfi([0.0, 0.0]) == 0.0
        assert jfi([]) == 0.0

    def test_scale_invariant(self):
        rng = np.random.default_rng(3)
        rates = rng.uniform(0.1, 9.0, size=6)
        assert jfi(rates * 1e5) == pytest.approx(jfi(rates), rel=1e-12)


class TestWeightedIndex:
    def test_rates_proportional_to_weights_give_one(self):
        w = (0.1, 0.3, 0.6)
        assert wfi([1.0, 3.0, 6.0], w) == pytest.approx(1.0, rel=1e-15)
        assert wfi([2e5, 6e5, 12e5], w) == pytest.approx(1.0, rel=1e-12)

    def test_equal_rates_under_skewed_weights(self):
        # sum(r)^2 / (sum(w) * sum(r^2/w)) with r=1: 9 / (1 * (10 + 10/3 + 5/3))
        got = wfi([1.0, 1.0, 1.0], (0.1, 0.3, 0.6))
        assert got == pytest.approx(9.0 / 15.0, rel=1e-12)

    def test_uniform_weights_reduce_to_jain(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            rates = rng.uniform(0.01, 5.0, size=n)
            w = np.full(n, 1.0 / n)
            assert wfi(rates, w) == pytest.approx(jfi(rates), rel=1e-12)

    def test_weight_normalization_irrelevant(self):
        rates = [2.0, 5.0, 1.0]
        a = wfi(rates, (0.1, 0.3, 0.6))
        b = wfi(rates, (1.0, 3.0, 6.0))
        assert a == pytest.approx(b, rel=1e-12)

    def test_bounded_by_one(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            rates = rng.uniform(0.0, 1.0, size=n)
            w = rng.uniform(0.05, 1.0, size=n)
            val = wfi(rates, w)
            assert 0.0 <= val <= 1.0 + 1e-12

    def test_all_zero_defined_as_zero(self):
        assert wfi([0.0, 0.0], (0.5, 0.5)) == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            wfi([1.0, 2.0], (0.2, 0.3, 0.5))

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            wfi([1.0, 2.0], (0.5, 0.0))


class TestValidation:
    def test_demand_defaults(self):
        d = UserDemand()
        assert d.min_rate == 1.0
        assert d.min_fidelity == 0.0
        assert d.weight == 1.0

    def test_demand_rejects_bad_fidelity(self):
        with pytest.raises(ValueError):
            UserDemand(min_fidelity=1.0)  # domain is half-open
        with pytest.raises(ValueError):
            UserDemand(min_fidelity=-0.1)

    def test_demand_rejects_bad_weight(self):
        with pytest.raises(ValueError):
            UserDemand(weight=0.0)
        with pytest.raises(ValueError):
            UserDemand(weight=-1.0)

    def test_instance_demand_count_must_match_users(self):
        with pytest.raises(ValueError):
            make_instance(THREE_USERS, demands=(UserDemand(),))

    def test_instance_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            make_instance(THREE_USERS, fairness_threshold=1.5)
        with pytest.raises(ValueError):
            make_instance(THREE_USERS, fairness_threshold=-0.1)

    def test_instance_requires_users(self):
        with pytest.raises(ValueError):
            make_instance(())

    def test_instance_rejects_unknown_damping_site(self):
        with pytest.raises(ValueError):
            make_instance(THREE_USERS, phase_damp_distance="qbs-moon")

    def test_flags_ok_and_relaxation(self):
        flags = ConstraintFlags(
            region=True, separation=True, rate_domain=True, memory=True,
            min_rate=True, fairness=False, fidelity=True)
        assert not flags.ok()
        assert flags.ok(relaxed={"fairness"})
        assert not flags.ok(relaxed={"fidelity"})

    def test_flags_reject_unknown_relaxation_name(self):
        flags = ConstraintFlags(
            region=True, separation=True, rate_domain=True, memory=True,
            min_rate=True, fairness=True, fidelity=True)
        with pytest.raises(ValueError):
            flags.ok(relaxed={"fairnes"})


class TestEvaluate:
    RIS = Point3D(200.0, 50.0, 60.0)

    def test_rates_are_success_probability_times_input(self):
        # Dual route: componentwise product identity against the analytic
        # probability, then the probability itself against the MC oracle.
        users = (Point3D(300.0, 0.0, 10.0), Point3D(350.0, 100.0, 10.0))
        inst = make_instance(users)
        rates = (4e5, 7e5)
        sol = evaluate(inst, self.RIS, rates)
        layout = inst.layout(self.RIS)
        for i in range(len(users)):
            budget = build_link_budget(inst.env, layout, i)
            p = prob_success(budget)
            assert sol.p_succ[i] == pytest.approx(p, rel=1e-12)
            assert sol.rates_e2e[i] == pytest.approx(p * rates[i], rel=1e-12)
            mc = prob_success_mc(budget, n_samples=400_000, rng=900 + i)
            assert abs(p - mc.p) <= 3.0 * mc.std_error

    def test_objective_is_weighted_sum(self):
        demands = tuple(UserDemand(weight=w) for w in (0.1, 0.3, 0.6))
        inst = make_instance(THREE_USERS, demands=demands)
        sol = evaluate(inst, self.RIS, (2e5, 4e5, 8e5))
        expected = math.fsum(
            w * r for w, r in zip((0.1, 0.3, 0.6), sol.rates_e2e))
        assert sol.weighted_sum_rate == pytest.approx(expected, rel=1e-12)

    def test_wfi_scale_invariance(self):
        inst = make_instance(THREE_USERS)
        lo = evaluate(inst, self.RIS, (1e5, 2e5, 3e5))
        hi = evaluate(inst, self.RIS, (3e5, 6e5, 9e5))
        assert hi.wfi == pytest.approx(lo.wfi, rel=1e-12)
        assert hi.weighted_sum_rate == pytest.approx(
            3.0 * lo.weighted_sum_rate, rel=1e-12)

    def test_single_user_fairness_is_one(self):
        inst = make_instance((Point3D(300.0, 0.0, 10.0),))
        sol = evaluate(inst, self.RIS, (5e5,))
        assert sol.wfi == pytest.approx(1.0, rel=1e-12)

    def test_deterministic(self):
        inst = make_instance(THREE_USERS)
        a = evaluate(inst, self.RIS, (2e5, 4e5, 8e5))
        b = evaluate(inst, self.RIS, (2e5, 4e5, 8e5))
        assert a == b

    def test_rate_vector_length_checked(self):
        inst = make_instance(THREE_USERS)
        with pytest.raises(ValueError):
            evaluate(inst, self.RIS, (2e5, 4e5))


class TestConstraintFlagsFromEvaluate:
    RIS = Point3D(200.0, 50.0, 60.0)

    def test_equalized_allocation_fully_feasible(self):
        # Success probabilities do not depend on the rates, so a probe
        # evaluation fixes them; inverting them equalizes delivered rates,
        # which drives the fairness index to ~1.
        inst = make_instance(THREE_USERS)
        probe = evaluate(inst, self.RIS, (1e5, 1e5, 1e5))
        target = 0.8e5
        rates = tuple(target / p for p in probe.p_succ)
        assert all(1e3 <= r <= 1e6 for r in rates)
        sol = evaluate(inst, self.RIS, rates)
        assert sol.wfi > 0.999
        assert sol.flags.ok()
        assert check_feasibility(inst, self.RIS, rates)

    def test_region_flag(self):
        inst = make_instance(THREE_USERS)
        outside = Point3D(30.0, 50.0, 60.0)  # x below the 50 m bound
        sol = evaluate(inst, self.RIS, (3e5, 3e5, 3e5))
        assert sol.flags.region
        sol_out = evaluate(inst, outside, (3e5, 3e5, 3e5))
        assert not sol_out.flags.region

    def test_separation_flag(self):
        inst = make_instance(THREE_USERS)
        too_close = Point3D(355.0, 0.0, 25.0)
        assert math.dist((355.0, 0.0, 25.0), (350.0, 0.0, 10.0)) < 20.0
        sol = evaluate(inst, too_close, (3e5, 3e5, 3e5))
        assert not sol.flags.separation

    def test_rate_domain_flag_and_clamping(self):
        inst = make_instance((Point3D(300.0, 0.0, 10.0),))
        good = evaluate(inst, self.RIS, (1e6,))
        assert good.flags.rate_domain
        over = evaluate(inst, self.RIS, (5e6,))
        assert not over.flags.rate_domain
        # Physics is computed at the clamped rate, so the high request
        # cannot report a larger end-to-end rate than the domain maximum.
        assert over.rates_e2e[0] == pytest.approx(good.rates_e2e[0], rel=1e-12)
        under = evaluate(inst, self.RIS, (10.0,))
        assert not under.flags.rate_domain

    def test_memory_capacity_boundary_closed(self):
        users = (Point3D(300.0, 0.0, 10.0), Point3D(350.0, 0.0, 10.0))
        demands = tuple(UserDemand() for _ in users)
        at_cap = ProblemInstance(
            qbs=QBS, users=users, region=REGION,
            env=make_environment("sunny", "moderate"),
            mem=MemoryParams(capacity=2e6), demands=demands)
        sol = evaluate(at_cap, self.RIS, (1e6, 1e6))
        assert sol.flags.memory
        shy = ProblemInstance(
            qbs=QBS, users=users, region=REGION,
            env=make_environment("sunny", "moderate"),
            mem=MemoryParams(capacity=2e6 - 1.0), demands=demands)
        sol2 = evaluate(shy, self.RIS, (1e6, 1e6))
        assert not sol2.flags.memory

    def test_min_rate_flag(self):
        demands = (UserDemand(min_rate=5e4),)
        inst = make_instance((Point3D(440.0, 0.0, 10.0),), demands=demands,
                             turbulence="strong", weather="rainy")
        # Far user, bad weather: tiny success probability starves the rate.
        sol = evaluate(inst, Point3D(120.0, 0.0, 40.0), (1e5,))
        assert sol.rates_e2e[0] < 5e4
        assert not sol.flags.min_rate

    def test_fairness_threshold_zero_never_binds(self):
        inst = make_instance(THREE_USERS, fairness_threshold=0.0)
        sol = evaluate(inst, self.RIS, (1e6, 1e3, 1e3))
        assert sol.wfi < 0.95
        assert sol.flags.fairness

    def test_fairness_flag_tracks_threshold(self):
        inst = make_instance(THREE_USERS, fairness_threshold=0.95)
        lopsided = evaluate(inst, self.RIS, (1e6, 1e3, 1e3))
        assert not lopsided.flags.fairness


class TestFidelityConstraint:
    """High demand + strong turbulence + far user is unservable from a far
    perch: dephasing over the reflector-to-user leg caps reachable fidelity
    below 0.7 for every admissible source rate."""

    USER = Point3D(442.83, 0.0, 10.0)  # 450 m direct path from the mast
    FAR_RIS = Point3D(60.0, 0.0, 35.0)

    def _instance(self, turbulence):
        return make_instance(
            (self.USER,), demands=(UserDemand(min_fidelity=0.7),),
            turbulence=turbulence)

    def test_strong_turbulence_violates_at_every_rate(self):
        inst = self._instance("strong")
        for r in np.linspace(1e3, 1e6, 8):
            sol = evaluate(inst, self.FAR_RIS, (float(r),))
            assert sol.fidelities[0] < 0.7
            assert not sol.flags.fidelity

    def test_moderate_turbulence_satisfiable_at_low_rate(self):
        inst = self._instance("moderate")
        sol = evaluate(inst, self.FAR_RIS, (1e3,))
        assert sol.fidelities[0] >= 0.7
        assert sol.flags.fidelity

    def test_fidelity_decreases_with_rate(self):
        inst = self._instance("strong")
        fids = [evaluate(inst, self.FAR_RIS, (float(r),)).fidelities[0]
                for r in np.linspace(1e3, 1e6, 6)]
        assert all(a > b for a, b in zip(fids, fids[1:]))

    def test_relaxing_fidelity_restores_feasibility(self):
        inst = self._instance("strong")
        sol = evaluate(inst, self.FAR_RIS, (1e3,))
        assert not sol.flags.ok()
        assert sol.flags.ok(relaxed={"fidelity"})


class TestSolutionRecord:
    def test_fields_round_trip_via_replace(self):
        inst = make_instance(THREE_USERS)
        sol = evaluate(inst, Point3D(200.0, 50.0, 60.0), (2e5, 4e5, 8e5))
        clone = dataclasses.replace(sol)
        assert clone == sol
        assert len(sol.rates_e2e) == 3
        assert len(sol.fidelities) == 3
        assert len(sol.p_succ) == 3
        assert all(0.0 < p <= 1.0 for p in sol.p_succ)
