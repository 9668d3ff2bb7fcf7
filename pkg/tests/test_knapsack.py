"""Tests for the knapsack QUBO/Ising encoding."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from revanneal.knapsack import (
    Item,
    KnapsackInstance,
    Lineage,
    as_bits,
    build_qubo,
    decode,
    encode_slack,
    energy,
    ising_energy,
    linear_impact,
    qubo_to_ising,
    slack_bit_count,
    slack_coefficients,
)


def brute_energy(instance: KnapsackInstance, penalty: float, bits) -> float:
    """Independent evaluation straight from the penalized objective."""
    coeffs = slack_coefficients(instance.capacity)
    n = instance.n
    value = sum(v * b for v, b in zip(instance.values, bits[:n]))
    load = sum(w * b for w, b in zip(instance.weights, bits[:n]))
    load += sum(c * b for c, b in zip(coeffs, bits[n:]))
    return -value + penalty * (load - instance.capacity) ** 2


def all_bitstrings(n):
    return itertools.product((0, 1), repeat=n)


class TestInstanceValidation:
    def test_rejects_empty_items(self):
        with pytest.raises(ValueError):
            KnapsackInstance("bad", (), 1)

    def test_rejects_zero_weight(self):
        with pytest.raises(ValueError):
            KnapsackInstance.from_pairs("bad", [(1, 0)], 1)

    def test_rejects_capacity_above_total_weight(self):
        with pytest.raises(ValueError):
            KnapsackInstance.from_pairs("bad", [(1, 2), (1, 3)], 6)

    def test_roundtrip_json_dict(self):
        inst = KnapsackInstance.from_pairs(
            "x", [(3, 2), (1, 4)], 3, Lineage("p", "L2H", 0.4)
        )
        again = KnapsackInstance.from_dict(inst.to_dict())
        assert again == inst


class TestSlackEncoding:
    def test_single_bit_capacity(self):
        assert slack_bit_count(1) == 1

    def test_capacity_17(self):
        assert slack_bit_count(17) == 5

    def test_capacity_28_gives_five_bits(self):
        # 14 items of max weight 4 -> sum 56 -> capacity 28
        assert slack_bit_count(28) == 5

    def test_zero_capacity_rejected(self):
        with pytest.raises(ValueError):
            slack_bit_count(0)

    @pytest.mark.parametrize("capacity", [1, 2, 3, 7, 8, 13, 28, 100])
    def test_coefficients_cover_every_residual(self, capacity):
        coeffs = slack_coefficients(capacity)
        reachable = {
            sum(c * b for c, b in zip(coeffs, bits))
            for bits in all_bitstrings(len(coeffs))
        }
        assert set(range(capacity + 1)) <= reachable

    @pytest.mark.parametrize("capacity", [1, 2, 5, 12, 28])
    def test_canonical_encoding_is_exact(self, capacity):
        coeffs = slack_coefficients(capacity)
        for r in range(capacity + 1):
            bits = encode_slack(r, capacity)
            assert sum(c * b for c, b in zip(coeffs, bits)) == r

    def test_residual_out_of_range(self):
        with pytest.raises(ValueError):
            encode_slack(5, 4)


class TestBuildQubo:
    def setup_method(self):
        self.toy = KnapsackInstance.from_pairs("toy", [(3, 2)], 2)
        self.model = build_qubo(self.toy)

    def test_default_penalty(self):
        assert self.model.penalty == 4  # 1 + sum of values

    def test_empty_knapsack_with_full_slack_scores_zero(self):
        # slack bits (1, 1) encode the full residual 2
        assert energy(self.model, (0, 1, 1)) == pytest.approx(0.0)

    def test_item_selected_slack_zero(self):
        assert energy(self.model, (1, 0, 0)) == pytest.approx(-3.0)

    def test_enumeration_matches_direct_objective(self):
        for bits in all_bitstrings(self.model.num_vars):
            assert energy(self.model, bits) == pytest.approx(
                brute_energy(self.toy, self.model.penalty, bits)
            )

    def test_minimum_of_toy_model(self):
        energies = {
            bits: energy(self.model, bits) for bits in all_bitstrings(3)
        }
        assert min(energies.values()) == pytest.approx(-3.0)
        assert min(energies, key=energies.get) == (1, 0, 0)

    def test_random_instances_match_direct_objective(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(2, 7))
            pairs = [
                (int(rng.integers(1, 5)), int(rng.integers(1, 5))) for _ in range(n)
            ]
            total_w = sum(w for _, w in pairs)
            inst = KnapsackInstance.from_pairs(
                "r", pairs, int(rng.integers(1, total_w + 1))
            )
            model = build_qubo(inst)
            for bits in all_bitstrings(model.num_vars):
                assert energy(model, bits) == pytest.approx(
                    brute_energy(inst, model.penalty, bits), abs=1e-9
                )

    def test_min_energy_decodes_to_constrained_optimum(self):
        rng = np.random.default_rng(11)
        inst = KnapsackInstance.from_pairs(
            "r6",
            [(int(rng.integers(1, 5)), int(rng.integers(1, 5))) for _ in range(6)],
            7,
        )
        model = build_qubo(inst)
        states = list(all_bitstrings(model.num_vars))
        best = min(states, key=lambda b: energy(model, b))
        # subset enumeration oracle
        best_profit = max(
            sum(v for v, w, c in zip(inst.values, inst.weights, choice) if c)
            for choice in all_bitstrings(inst.n)
            if sum(w for v, w, c in zip(inst.values, inst.weights, choice) if c)
            <= inst.capacity
        )
        sel = decode(inst, best)
        assert sel.feasible
        assert sel.total_value == best_profit
        assert energy(model, best) == pytest.approx(-best_profit)

    def test_penalty_dominance(self):
        # every infeasible decode scores strictly above the constrained optimum
        inst = KnapsackInstance.from_pairs("d", [(4, 1), (3, 2), (2, 2), (1, 3)], 4)
        model = build_qubo(inst)
        feasible_best = min(
            energy(model, bits)
            for bits in all_bitstrings(model.num_vars)
            if decode(inst, bits).feasible
        )
        for bits in all_bitstrings(model.num_vars):
            if not decode(inst, bits).feasible:
                assert energy(model, bits) > feasible_best

    def test_feasible_energy_identity(self):
        inst = KnapsackInstance.from_pairs("f", [(2, 1), (5, 3), (1, 2)], 4)
        model = build_qubo(inst)
        for choice in all_bitstrings(inst.n):
            weight = sum(w for w, c in zip(inst.weights, choice) if c)
            value = sum(v for v, c in zip(inst.values, choice) if c)
            if weight > inst.capacity:
                continue
            slack = encode_slack(inst.capacity - weight, inst.capacity)
            assert energy(model, tuple(choice) + slack) == pytest.approx(-value)


class TestQuboToIsing:
    def test_single_variable(self):
        from revanneal.knapsack import QuboModel

        m = QuboModel(
            num_vars=1, linear={0: 6.0}, quadratic={}, offset=0.0,
            item_count=1, slack_count=0, penalty=1.0,
        )
        ising = qubo_to_ising(m)
        assert ising.h[0] == pytest.approx(-3.0)
        assert ising.offset == pytest.approx(3.0)

    def test_zero_qubo_maps_to_zero_ising(self):
        from revanneal.knapsack import QuboModel

        m = QuboModel(
            num_vars=2, linear={}, quadratic={}, offset=0.0,
            item_count=2, slack_count=0, penalty=1.0,
        )
        ising = qubo_to_ising(m)
        assert ising.h == {}
        assert ising.J == {}
        assert ising.offset == 0.0

    def test_energy_equivalence_random_8_vars(self):
        from revanneal.knapsack import QuboModel

        rng = np.random.default_rng(3)
        linear = {i: float(rng.normal()) for i in range(8)}
        quadratic = {
            (i, j): float(rng.normal()) for i in range(8) for j in range(i + 1, 8)
        }
        m = QuboModel(
            num_vars=8, linear=linear, quadratic=quadratic,
            offset=float(rng.normal()), item_count=8, slack_count=0, penalty=1.0,
        )
        ising = qubo_to_ising(m)
        for bits in all_bitstrings(8):
            spins = [1 - 2 * b for b in bits]
            assert ising_energy(ising, spins) == pytest.approx(
                energy(m, bits), abs=1e-9
            )

    def test_knapsack_model_equivalence(self):
        inst = KnapsackInstance.from_pairs("k", [(2, 3), (4, 1), (1, 2)], 3)
        model = build_qubo(inst)
        ising = qubo_to_ising(model)
        for bits in all_bitstrings(model.num_vars):
            spins = [1 - 2 * b for b in bits]
            assert ising_energy(ising, spins) == pytest.approx(
                energy(model, bits), abs=1e-9
            )


class TestEnergyAndDecode:
    def test_all_zeros_scores_offset(self):
        inst = KnapsackInstance.from_pairs("z", [(1, 1), (2, 2)], 2)
        model = build_qubo(inst)
        assert energy(model, [0] * model.num_vars) == pytest.approx(model.offset)

    def test_length_mismatch_raises(self):
        inst = KnapsackInstance.from_pairs("z", [(1, 1), (2, 2)], 2)
        model = build_qubo(inst)
        with pytest.raises(ValueError):
            energy(model, [0, 1])

    def test_decode_empty_selection_feasible(self):
        inst = KnapsackInstance.from_pairs("z", [(1, 1), (2, 2)], 2)
        sel = decode(inst, [0] * 4)
        assert sel == ((), 0, 0, True)

    def test_decode_overweight_selection_infeasible(self):
        # both items weigh 2W together
        inst = KnapsackInstance.from_pairs("z", [(1, 2), (2, 2)], 2)
        sel = decode(inst, [1, 1, 0, 0])
        assert sel.total_weight == 4
        assert not sel.feasible

    def test_bits_accepts_strings(self):
        assert as_bits("0101") == (0, 1, 0, 1)
        with pytest.raises(ValueError):
            as_bits("01x1")


class TestLinearImpact:
    def test_hand_expanded_values(self):
        inst = KnapsackInstance.from_pairs(
            "i", [(1, 4), (2, 3), (3, 2), (4, 1), (4, 4)], 7
        )
        # expand M*(w*x - W)^2 by hand: -v + M*w^2 - 2*M*W*w
        assert linear_impact(inst, 15, 0) == pytest.approx(-601.0)
        assert linear_impact(inst, 15, 3) == pytest.approx(-199.0)

    def test_equal_tuples_equal_impact(self):
        inst = KnapsackInstance.from_pairs("i", [(2, 3), (2, 3), (1, 1)], 4)
        assert linear_impact(inst, 9, 0) == linear_impact(inst, 9, 1)

    def test_index_out_of_range(self):
        inst = KnapsackInstance.from_pairs("i", [(2, 3)], 3)
        with pytest.raises(IndexError):
            linear_impact(inst, 9, 5)

    def test_matches_build_qubo_diagonal(self):
        inst = KnapsackInstance.from_pairs("i", [(1, 4), (2, 3), (4, 1)], 7)
        model = build_qubo(inst)
        for idx in range(inst.n):
            assert model.linear[idx] == pytest.approx(
                linear_impact(inst, model.penalty, idx)
            )
