import math
import random
from fractions import Fraction

import pytest

from reu_elicit import (
    Agent,
    BlockLotteryProvider,
    EstimateMethod,
    FairLotterySource,
    FairnessUnavailableError,
    IdentityRisk,
    InconsistentAnswersError,
    InvalidPartitionError,
    Money,
    MonotonicityViolationError,
    PowerRisk,
    Preference,
    ProbabilityModel,
    SampleSpace,
    SimulatedOracle,
    SkewedFirstProvider,
    TabulatedRisk,
    UtilityFunction,
    better_prize_half,
    decision_weight,
    find_indifference_money,
    invert_risk,
    lottery_event,
    measure_risk_grid,
    probability_by_inversion,
    probability_by_squeeze,
    reconstruct_risk,
    verify_fair_lottery,
)
from reu_elicit.domain import PowerCurve
from reu_elicit.elicitation import DecisionWeightSample, RiskGridSpec
from reu_elicit.oracle import Oracle
from reu_elicit.worlds import block_partition, product_world, uniform_world

from conftest import RISK_AVERSE_HALF_TO_TENTH, RISK_FAMILIES

BEST, WORST = Money(1.0), Money(0.0)
LINEAR = UtilityFunction.linear()


def linear_agent(model, risk):
    return Agent(model, LINEAR, risk)


def two_atom_agent(p_event, risk):
    """Space where atom 0 carries exactly p_event."""
    theta = Fraction(p_event) if not isinstance(p_event, float) else Fraction(p_event)
    model = ProbabilityModel([theta, 1 - theta])
    space = SampleSpace(["hit", "miss"])
    return linear_agent(model, risk), space, space.event([0])


class TestFindIndifference:
    def test_identity_linear(self):
        # REU of the binary gamble is r(p(E)) = 0.7, so m* = $0.70.
        agent, space, event = two_atom_agent(Fraction(7, 10), IdentityRisk())
        oracle = SimulatedOracle(agent, space)
        point = find_indifference_money(oracle, event, BEST, WORST, LINEAR, 1e-6)
        assert point.money == pytest.approx(0.70, abs=1e-6)
        assert point.hi - point.lo <= 1e-6

    def test_full_space_event_returns_best(self, bob):
        agent, space = bob
        oracle = SimulatedOracle(agent, space)
        point = find_indifference_money(
            oracle, space.full_event, BEST, WORST, LINEAR, 1e-6
        )
        assert point.money == BEST.amount
        assert point.exact

    def test_bob_coin_dime(self, bob):
        agent, space = bob
        oracle = SimulatedOracle(agent, space)
        point = find_indifference_money(
            oracle, space.event([0]), BEST, WORST, LINEAR, 1e-7
        )
        assert point.money == pytest.approx(0.10, abs=1e-6)

    def test_inconsistent_agent_detected(self, bob):
        class Contrarian(Oracle):
            def _answer(self, q):
                return Preference.RIGHT, None

        _, space = bob
        with pytest.raises(MonotonicityViolationError):
            find_indifference_money(
                Contrarian(space), space.event([0]), BEST, WORST, LINEAR, 1e-6
            )

    def test_rejects_bad_prize_pair(self, bob):
        agent, space = bob
        oracle = SimulatedOracle(agent, space)
        with pytest.raises(ValueError):
            find_indifference_money(
                oracle, space.event([0]), Money(0.0), Money(1.0), LINEAR, 1e-6
            )


class TestDecisionWeight:
    def test_square_risk_half(self):
        agent, space, event = two_atom_agent(Fraction(1, 2), PowerRisk(2.0))
        oracle = SimulatedOracle(agent, space)
        w = decision_weight(oracle, event, BEST, WORST, LINEAR, 1e-7)
        assert w == pytest.approx(0.25, abs=1e-6)

    def test_full_event_weight_one(self):
        agent, space, _ = two_atom_agent(Fraction(1, 2), PowerRisk(2.0))
        oracle = SimulatedOracle(agent, space)
        w = decision_weight(oracle, space.full_event, BEST, WORST, LINEAR, 1e-7)
        assert w == 1.0

    def test_identity_weight_is_the_classic_probability_estimate(self):
        agent, space, event = two_atom_agent(Fraction(7, 10), IdentityRisk())
        oracle = SimulatedOracle(agent, space)
        w = decision_weight(oracle, event, BEST, WORST, LINEAR, 1e-7)
        assert w == pytest.approx(0.7, abs=1e-6)

    def test_accuracy_across_families(self):
        # 50 random events per family, exact oracle: measured weight within
        # 1e-6 of the true decision weight r(p(E)).
        rng = random.Random(21)
        for name, risk in RISK_FAMILIES.items():
            for _ in range(50):
                p = Fraction(rng.randint(1, 9999), 10000)
                agent, space, event = two_atom_agent(p, risk)
                oracle = SimulatedOracle(agent, space, tol=1e-9)
                w = decision_weight(oracle, event, BEST, WORST, LINEAR, 1e-6)
                assert w == pytest.approx(risk(float(p)), abs=1e-6), name


class TestBetterPrizeHalf:
    def test_half_probability_indifferent(self):
        for risk in RISK_FAMILIES.values():
            agent, space, event = two_atom_agent(Fraction(1, 2), risk)
            oracle = SimulatedOracle(agent, space)
            assert better_prize_half(oracle, event, BEST, WORST)

    def test_biased_event_prefers_prize_on_likelier_side(self):
        for risk in RISK_FAMILIES.values():
            agent, space, event = two_atom_agent(Fraction(7, 10), risk)
            oracle = SimulatedOracle(agent, space)
            assert not better_prize_half(oracle, event, BEST, WORST)
            assert oracle.transcript.entries[-1].answer is Preference.LEFT


class TestFairLottery:
    def test_uniform_partition_accepted(self):
        world = uniform_world(4)
        oracle = SimulatedOracle(linear_agent(world.model, PowerRisk(2.0)), world.space)
        assert verify_fair_lottery(oracle, block_partition(world.space, 4), BEST, WORST)
        assert oracle.stats.query_count == 3

    def test_unequal_weights_rejected_on_first_query(self):
        space = SampleSpace.tickets(3)
        model = ProbabilityModel([0.4, 0.3, 0.3])
        oracle = SimulatedOracle(linear_agent(model, IdentityRisk()), space)
        partition = [space.event([i]) for i in range(3)]
        assert not verify_fair_lottery(oracle, partition, BEST, WORST)
        assert oracle.stats.query_count == 1
        assert oracle.transcript.entries[0].answer is Preference.LEFT

    def test_single_cell_partition_vacuously_fair(self):
        world = uniform_world(4)
        oracle = SimulatedOracle(linear_agent(world.model, IdentityRisk()), world.space)
        assert verify_fair_lottery(oracle, [world.space.full_event], BEST, WORST)
        assert oracle.stats.query_count == 0

    def test_non_partition_rejected(self):
        world = uniform_world(4)
        oracle = SimulatedOracle(linear_agent(world.model, IdentityRisk()), world.space)
        with pytest.raises(InvalidPartitionError):
            verify_fair_lottery(
                oracle, [world.space.event([0]), world.space.event([0, 1])], BEST, WORST
            )

    def test_verdict_is_risk_independent(self):
        # Equal decision weights mean equal probabilities no matter the risk
        # shape, so every family agrees on fairness verdicts.
        fair = uniform_world(6)
        skewed_model = ProbabilityModel(
            [Fraction(1, 4), Fraction(1, 8), Fraction(1, 8), Fraction(1, 6), Fraction(1, 6), Fraction(1, 6)]
        )
        for model in (fair.model, skewed_model):
            verdicts = set()
            for risk in RISK_FAMILIES.values():
                oracle = SimulatedOracle(linear_agent(model, risk), fair.space)
                verdicts.add(
                    verify_fair_lottery(oracle, block_partition(fair.space, 3), BEST, WORST)
                )
            assert len(verdicts) == 1


class TestLotteryEvent:
    def test_boundaries(self):
        space = SampleSpace.tickets(8)
        partition = block_partition(space, 8)
        assert lottery_event(partition, 0).size == 0
        assert lottery_event(partition, 8) == space.full_event

    def test_union_probability(self):
        world = uniform_world(8)
        partition = block_partition(world.space, 8)
        e = lottery_event(partition, 3)
        assert world.model.event_probability_exact(e) == Fraction(3, 8)

    def test_out_of_range(self):
        partition = block_partition(SampleSpace.tickets(4), 4)
        with pytest.raises(ValueError):
            lottery_event(partition, 5)


class TestMeasureRiskGrid:
    def grid(self, risk, denominators=(2, 4, 8), tickets=None, epsilon=1e-7):
        tickets = tickets or math.lcm(*denominators)
        world = uniform_world(tickets)
        oracle = SimulatedOracle(linear_agent(world.model, risk), world.space)
        spec = RiskGridSpec(denominators, epsilon=epsilon)
        samples = measure_risk_grid(oracle, spec, BlockLotteryProvider(world.space))
        return samples, oracle

    def test_identity_gives_diagonal(self):
        samples, _ = self.grid(IdentityRisk(), denominators=(8,))
        assert len(samples) == 9
        for s in samples:
            assert s.weight == pytest.approx(float(s.prob), abs=1e-6)

    def test_power_two_at_half(self):
        samples, _ = self.grid(PowerRisk(2.0))
        half = next(s for s in samples if s.prob == Fraction(1, 2))
        assert half.weight == pytest.approx(0.25, abs=1e-6)

    def test_anchors_exact_and_sorted(self):
        samples, _ = self.grid(PowerRisk(3.0))
        assert (samples[0].prob, samples[0].weight) == (Fraction(0), 0.0)
        assert (samples[-1].prob, samples[-1].weight) == (Fraction(1), 1.0)
        assert all(a.prob < b.prob for a, b in zip(samples, samples[1:]))

    def test_duplicate_rationals_measured_once(self):
        samples, _ = self.grid(PowerRisk(2.0), denominators=(2, 4))
        assert [s.prob for s in samples] == [
            Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1),
        ]

    def test_provenance_and_query_ids(self):
        samples, oracle = self.grid(PowerRisk(2.0), denominators=(2,))
        interior = [s for s in samples if 0 < s.prob < 1]
        assert interior[0].numerator == 1 and interior[0].denominator == 2
        assert interior[0].query_ids
        assert max(interior[0].query_ids) < oracle.stats.query_count

    def test_skewed_candidates_rejected_then_fair_used(self):
        world = uniform_world(8)
        oracle = SimulatedOracle(linear_agent(world.model, PowerRisk(2.0)), world.space)
        spec = RiskGridSpec([2, 4], epsilon=1e-7)
        samples = measure_risk_grid(oracle, spec, SkewedFirstProvider(world.space))
        half = next(s for s in samples if s.prob == Fraction(1, 2))
        assert half.weight == pytest.approx(0.25, abs=1e-6)

    def test_unavailable_denominators_reported_together(self):
        world = uniform_world(8)
        oracle = SimulatedOracle(linear_agent(world.model, IdentityRisk()), world.space)
        spec = RiskGridSpec([2, 3, 5])
        with pytest.raises(FairnessUnavailableError) as err:
            measure_risk_grid(oracle, spec, BlockLotteryProvider(world.space))
        assert err.value.denominators == [3, 5]

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            RiskGridSpec([])
        with pytest.raises(ValueError):
            RiskGridSpec([2], epsilon=0.0)


class TestReconstruct:
    def test_identity_grid_reconstructs_exactly(self):
        samples = [DecisionWeightSample(Fraction(k, 8), k / 8, k, 8) for k in range(9)]
        r = reconstruct_risk(samples)
        rng = random.Random(31)
        for _ in range(100):
            q = rng.random()
            assert r(q) == pytest.approx(q, abs=1e-15)

    def test_power_three_off_grid_value(self):
        # Closed form gives r(0.3) = 0.027; the dyadic-to-32 interpolant must
        # land within 2e-3 of it.
        spec = RiskGridSpec.dyadic(5, epsilon=1e-7)
        world = uniform_world(32)
        oracle = SimulatedOracle(linear_agent(world.model, PowerRisk(3.0)), world.space)
        samples = measure_risk_grid(oracle, spec, BlockLotteryProvider(world.space))
        r_hat = reconstruct_risk(samples)
        assert r_hat(0.3) == pytest.approx(0.027, abs=2e-3)

    def test_weight_plateau_is_inconsistent(self):
        samples = [
            DecisionWeightSample.anchor(0),
            DecisionWeightSample(Fraction(1, 4), 0.2, 1, 4),
            DecisionWeightSample(Fraction(1, 2), 0.2, 1, 2),
            DecisionWeightSample.anchor(1),
        ]
        with pytest.raises(InconsistentAnswersError):
            reconstruct_risk(samples)

    def test_missing_anchor_rejected(self):
        samples = [
            DecisionWeightSample(Fraction(1, 4), 0.2, 1, 4),
            DecisionWeightSample.anchor(1),
        ]
        with pytest.raises(ValueError):
            reconstruct_risk(samples)

    def test_off_grid_error_shrinks_quadratically(self):
        # Piecewise-linear error is bounded by max|r''| * h^2 / 8 where the
        # second derivative is bounded; check measured interpolants against
        # 4x that bound (|r''| taken from a dense finite-difference scan).
        rng = random.Random(37)
        lo, hi = 1 / 16, 15 / 16
        for name in ("power-3", "prelec-0.65", "expo-2"):
            risk = RISK_FAMILIES[name]
            d2_max = 0.0
            step = (hi - lo) / 4000
            for i in range(1, 4000):
                q = lo + i * step
                d2 = abs(risk(q - step) - 2 * risk(q) + risk(q + step)) / step**2
                d2_max = max(d2_max, d2)
            for n in (16, 32):
                spec = RiskGridSpec.dyadic(n.bit_length() - 1, epsilon=1e-7)
                world = uniform_world(n)
                oracle = SimulatedOracle(linear_agent(world.model, risk), world.space)
                r_hat = reconstruct_risk(
                    measure_risk_grid(oracle, spec, BlockLotteryProvider(world.space))
                )
                bound = 4 * d2_max / (8 * n * n)
                for _ in range(64):
                    q = rng.uniform(lo, hi)
                    assert abs(r_hat(q) - risk(q)) <= bound, (name, n, q)

    def test_pchip_rule_is_monotone(self):
        spec = RiskGridSpec.dyadic(3, epsilon=1e-7)
        world = uniform_world(8)
        oracle = SimulatedOracle(
            linear_agent(world.model, RISK_FAMILIES["prelec-0.65"]), world.space
        )
        samples = measure_risk_grid(oracle, spec, BlockLotteryProvider(world.space))
        r_hat = reconstruct_risk(samples, rule="pchip")
        qs = [i / 200 for i in range(201)]
        values = [r_hat(q) for q in qs]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestInvert:
    def test_identity(self):
        assert invert_risk(IdentityRisk(), 0.42) == pytest.approx(0.42, abs=1e-9)

    def test_power_two(self):
        assert invert_risk(PowerRisk(2.0), 0.04) == pytest.approx(0.2, abs=1e-9)

    def test_anchor(self):
        assert invert_risk(PowerRisk(2.0), 1.0) == 1.0
        assert invert_risk(PowerRisk(2.0), 0.0) == 0.0

    def test_round_trip_all_families(self):
        rng = random.Random(41)
        for risk in RISK_FAMILIES.values():
            for _ in range(100):
                q = rng.uniform(1e-6, 1 - 1e-6)
                assert invert_risk(risk, risk(q), tol=1e-12) == pytest.approx(
                    q, abs=1e-6
                )

    def test_tabulated_round_trip(self):
        r = TabulatedRisk([0, 0.25, 0.5, 1.0], [0, 0.1, 0.3, 1.0])
        rng = random.Random(42)
        for _ in range(50):
            q = rng.random()
            assert invert_risk(r, r(q), tol=1e-12) == pytest.approx(q, abs=1e-9)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            invert_risk(IdentityRisk(), 1.5)


class TestProbabilityByInversion:
    def test_power_two_event(self):
        agent, space, event = two_atom_agent(Fraction(1, 5), PowerRisk(2.0))
        oracle = SimulatedOracle(agent, space)
        est = probability_by_inversion(
            oracle, event, PowerRisk(2.0), BEST, WORST, LINEAR, 1e-7
        )
        assert est.method is EstimateMethod.INVERSION
        assert est.value == pytest.approx(0.2, abs=1e-5)
        assert est.bracket[0] <= Fraction(est.value) <= est.bracket[1]

    def test_identity_recovers_naive_estimate(self):
        agent, space, event = two_atom_agent(Fraction(7, 10), IdentityRisk())
        est = probability_by_inversion(
            SimulatedOracle(agent, space), event, IdentityRisk(), BEST, WORST, LINEAR, 1e-7
        )
        naive = decision_weight(
            SimulatedOracle(agent, space), event, BEST, WORST, LINEAR, 1e-7
        )
        assert est.value == pytest.approx(naive, abs=1e-9)

    def test_with_reconstructed_curve(self):
        # End-to-end: measure the risk grid, reconstruct, then invert an
        # unrelated event's weight through the reconstruction.
        spec = RiskGridSpec.dyadic(5, epsilon=1e-7)
        grid_world = uniform_world(32)
        grid_oracle = SimulatedOracle(
            linear_agent(grid_world.model, PowerRisk(3.0)), grid_world.space
        )
        r_hat = reconstruct_risk(
            measure_risk_grid(grid_oracle, spec, BlockLotteryProvider(grid_world.space))
        )
        agent, space, event = two_atom_agent(Fraction(3, 10), PowerRisk(3.0))
        est = probability_by_inversion(
            SimulatedOracle(agent, space), event, r_hat, BEST, WORST, LINEAR, 1e-7
        )
        assert est.value == pytest.approx(0.3, abs=2e-3)

    def test_nonlinear_utility_measurement(self):
        # The weight formula normalizes by u, so a concave money curve must
        # not bias the measured decision weight.
        u = UtilityFunction(PowerCurve(0.5, 0.0, 2.0))
        agent = Agent(
            ProbabilityModel([Fraction(2, 5), Fraction(3, 5)]),
            u,
            PowerRisk(3.0),
        )
        space = SampleSpace(["hit", "miss"])
        oracle = SimulatedOracle(agent, space)
        w = decision_weight(oracle, space.event([0]), BEST, WORST, u, 1e-9)
        assert w == pytest.approx(0.4**3, abs=1e-6)

    def test_conflation_exhibit(self, bob):
        # The classic failure: reading Bob's betting odds as a probability
        # yields 0.1; inverting his risk attitude recovers the true 0.5.
        agent, space = bob
        event = space.event([0])
        naive = decision_weight(
            SimulatedOracle(agent, space), event, BEST, WORST, LINEAR, 1e-7
        )
        est = probability_by_inversion(
            SimulatedOracle(agent, space),
            event,
            PowerRisk(RISK_AVERSE_HALF_TO_TENTH),
            BEST,
            WORST,
            LINEAR,
            1e-7,
        )
        assert naive == pytest.approx(0.1, abs=1e-6)
        assert est.value == pytest.approx(0.5, abs=1e-6)


def squeeze_setup(p_event, risk, tickets=64):
    world, event = product_world(tickets, p_event)
    agent = linear_agent(world.model, risk)
    oracle = SimulatedOracle(agent, world.space)
    source = FairLotterySource(
        BlockLotteryProvider(world.space, group=2), oracle, BEST, WORST
    )
    return oracle, event, source


class TestProbabilityBySqueeze:
    def test_exact_hit_on_matching_denominator(self):
        world, event = product_world(3, Fraction(1, 3))
        oracle = SimulatedOracle(linear_agent(world.model, PowerRisk(2.0)), world.space)
        source = FairLotterySource(
            BlockLotteryProvider(world.space, group=2), oracle, BEST, WORST
        )
        est = probability_by_squeeze(
            oracle, event, BEST, WORST, source, [3], Fraction(1, 3)
        )
        assert est.method is EstimateMethod.EXACT_LOTTERY
        assert est.bracket == (Fraction(1, 3), Fraction(1, 3))
        assert est.value == pytest.approx(1 / 3, abs=1e-12)

    def test_irrational_probability_bracketed(self):
        oracle, event, source = squeeze_setup(1 / math.pi, PowerRisk(3.0))
        est = probability_by_squeeze(
            oracle, event, BEST, WORST, source, [2, 4, 8, 16, 32, 64], Fraction(1, 64)
        )
        lo, hi = est.bracket
        assert hi - lo <= Fraction(1, 64)
        assert lo <= Fraction(1 / math.pi) <= hi
        assert est.converged

    def test_certain_event(self):
        oracle, _, source = squeeze_setup(Fraction(1, 2), IdentityRisk(), tickets=16)
        est = probability_by_squeeze(
            oracle, oracle.space.full_event, BEST, WORST, source, [2, 4, 8, 16], Fraction(1, 16)
        )
        assert est.bracket[0] == Fraction(15, 16)
        assert est.bracket[1] == Fraction(1)
        assert est.value == pytest.approx(31 / 32, abs=1e-12)

    def test_schedule_exhausted_flags_not_converged(self):
        oracle, event, source = squeeze_setup(1 / math.pi, IdentityRisk(), tickets=8)
        est = probability_by_squeeze(
            oracle, event, BEST, WORST, source, [2, 4, 8], Fraction(1, 1000)
        )
        assert not est.converged
        assert est.width > Fraction(1, 1000)
        assert est.bracket[0] <= Fraction(1 / math.pi) <= est.bracket[1]

    def test_bracket_nesting_and_halving(self):
        # Re-running with longer schedule prefixes exposes the per-stage
        # brackets: each must contain the truth and halve in width.
        truth = Fraction(0.397)
        widths = []
        for stages in range(1, 7):
            oracle, event, source = squeeze_setup(0.397, PowerRisk(0.5))
            est = probability_by_squeeze(
                oracle, event, BEST, WORST, source,
                [2 ** s for s in range(1, stages + 1)], Fraction(1, 10**9),
            )
            assert est.bracket[0] <= truth <= est.bracket[1]
            widths.append(est.width)
        for prev, cur in zip(widths, widths[1:]):
            assert cur == prev / 2

    def test_methods_agree(self):
        rng = random.Random(55)
        for risk in RISK_FAMILIES.values():
            p = rng.uniform(0.05, 0.95)
            oracle, event, source = squeeze_setup(p, risk)
            squeezed = probability_by_squeeze(
                oracle, event, BEST, WORST, source, [2, 4, 8, 16, 32, 64], Fraction(1, 64)
            )
            oracle2, event2, _ = squeeze_setup(p, risk)
            inverted = probability_by_inversion(
                oracle2, event2, risk, BEST, WORST, LINEAR, 1e-7
            )
            assert abs(squeezed.value - inverted.value) <= 2 * (1 / 64 + 1e-5)
