"""Tests for parent generation and descendant derivation."""

from __future__ import annotations

import pytest

from revanneal.families import (
    DIRECTIONS,
    FRACTIONS,
    Category,
    derive_descendant,
    gen_family,
    gen_parent,
    unique_items_with_impact,
)
from revanneal.knapsack import Item, KnapsackInstance

# high fractions on random parents legitimately exhaust the modifiable pool
pytestmark = pytest.mark.filterwarnings("ignore:.*modifiable items.*:UserWarning")


@pytest.fixture
def five_item_parent():
    # impacts with W=7, M=15: (4,4) -604, (1,4) -601, (2,3) -497,
    # (3,2) -363, (4,1) -199
    return KnapsackInstance.from_pairs(
        "p5", [(1, 4), (2, 3), (3, 2), (4, 1), (4, 4)], 7
    )


class TestCategory:
    def test_rejects_unknown_direction(self):
        with pytest.raises(ValueError):
            Category("L2X", 0.2)

    def test_rejects_off_grid_fraction(self):
        with pytest.raises(ValueError):
            Category("L2L", 0.3)

    def test_label(self):
        assert Category("H2H", 0.4).label == "0.4_H2H"


class TestGenParent:
    def test_deterministic(self):
        assert gen_parent(14, seed=3) == gen_parent(14, seed=3)

    def test_seed_changes_instance(self):
        assert gen_parent(14, seed=3) != gen_parent(14, seed=4)

    def test_capacity_is_half_total_weight(self):
        for seed in range(20):
            inst = gen_parent(14, seed=seed)
            assert inst.capacity == sum(inst.weights) // 2

    def test_values_and_weights_in_range(self):
        for seed in range(30):
            inst = gen_parent(16, seed=seed)
            assert all(1 <= v <= 4 for v in inst.values)
            assert all(1 <= w <= 4 for w in inst.weights)

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            gen_parent(1, seed=0)

    def test_default_name(self):
        assert gen_parent(14, seed=0).name == "s14"


class TestImpactTable:
    def test_all_identical_items_single_entry(self):
        inst = KnapsackInstance.from_pairs("same", [(2, 2)] * 4, 4)
        table = unique_items_with_impact(inst)
        assert len(table) == 1

    def test_five_item_example_order(self, five_item_parent):
        table = unique_items_with_impact(five_item_parent)
        expected = [
            (Item(4, 4), -604.0),
            (Item(1, 4), -601.0),
            (Item(2, 3), -497.0),
            (Item(3, 2), -363.0),
            (Item(4, 1), -199.0),
        ]
        assert list(table.entries) == expected

    def test_table_bounded_by_tuple_domain(self):
        for seed in range(10):
            inst = gen_parent(16, seed=seed)
            assert len(unique_items_with_impact(inst)) <= 16


class TestDeriveDescendant:
    def test_worked_l2h_example(self, five_item_parent):
        child = derive_descendant(five_item_parent, Category("L2H", 0.4))
        assert child.items == (
            Item(2, 3),
            Item(3, 2),
            Item(3, 2),
            Item(4, 1),
            Item(4, 4),
        )
        assert child.capacity == five_item_parent.capacity
        assert child.name == "p5_0.4_L2H"
        assert child.lineage.parent == "p5"
        assert child.lineage.category == "L2H"
        assert child.lineage.fraction == 0.4

    def test_l2l_shifts_toward_lower_impact(self, five_item_parent):
        child = derive_descendant(five_item_parent, Category("L2L", 0.4))
        # picked (1,4) and (2,3); next lower entries are (4,4) and (1,4)
        assert child.items == (
            Item(4, 4),
            Item(1, 4),
            Item(3, 2),
            Item(4, 1),
            Item(4, 4),
        )

    def test_h2l_shifts_highest_pool_items_down(self, five_item_parent):
        child = derive_descendant(five_item_parent, Category("H2L", 0.4))
        # picked (3,2) and (2,3) from the top of the pool
        assert child.items == (
            Item(1, 4),
            Item(1, 4),
            Item(2, 3),
            Item(4, 1),
            Item(4, 4),
        )

    def test_extreme_tuples_never_modified(self):
        for seed in range(10):
            parent = gen_parent(14, seed=seed)
            table = unique_items_with_impact(parent)
            lowest, highest = table.entries[0][0], table.entries[-1][0]
            for direction in DIRECTIONS:
                for fraction in FRACTIONS:
                    child = derive_descendant(parent, Category(direction, fraction))
                    for pi, ci in zip(parent.items, child.items):
                        if pi in (lowest, highest):
                            assert ci == pi

    def test_item_count_and_capacity_preserved(self):
        parent = gen_parent(16, seed=5)
        for direction in DIRECTIONS:
            for fraction in FRACTIONS:
                child = derive_descendant(parent, Category(direction, fraction))
                assert child.n == parent.n
                assert child.capacity == parent.capacity

    def test_bounded_drift(self):
        parent = gen_parent(14, seed=2)
        for fraction in FRACTIONS:
            k = round(fraction * parent.n)
            for direction in DIRECTIONS:
                child = derive_descendant(parent, Category(direction, fraction))
                changed = sum(1 for p, c in zip(parent.items, child.items) if p != c)
                assert changed <= k

    def test_tuple_closure(self):
        parent = gen_parent(14, seed=9)
        allowed = {e[0] for e in unique_items_with_impact(parent).entries}
        for direction in DIRECTIONS:
            child = derive_descendant(parent, Category(direction, 0.8))
            assert set(child.items) <= allowed

    def test_small_table_rejected(self):
        inst = KnapsackInstance.from_pairs("two", [(1, 1), (2, 2), (1, 1)], 2)
        with pytest.raises(ValueError):
            derive_descendant(inst, Category("L2H", 0.2))

    def test_short_pool_warns_and_modifies_all(self):
        # three distinct tuples, so the pool is just the middle one
        inst = KnapsackInstance.from_pairs(
            "narrow", [(1, 1), (2, 2), (3, 3), (2, 2), (1, 1)], 5
        )
        with pytest.warns(UserWarning):
            child = derive_descendant(inst, Category("L2H", 0.8))
        # only pool items (the (2,2) pair) can change
        changed = [i for i, (p, c) in enumerate(zip(inst.items, child.items)) if p != c]
        assert changed == [1, 3]


class TestGenFamily:
    def test_sixteen_descendants_four_per_direction(self):
        parent = gen_parent(14, seed=1)
        family = gen_family(parent)
        assert len(family) == 16
        for direction in DIRECTIONS:
            members = [d for d in family if d.lineage.category == direction]
            assert len(members) == 4

    def test_names_follow_parent_fraction_direction(self):
        parent = gen_parent(14, seed=1)
        names = {d.name for d in gen_family(parent)}
        assert "s14_0.2_L2L" in names
        assert "s14_0.8_H2H" in names

    def test_descendants_share_parent_capacity(self):
        parent = gen_parent(16, seed=1)
        assert all(d.capacity == parent.capacity for d in gen_family(parent))

    def test_family_deterministic(self):
        parent = gen_parent(14, seed=12)
        assert gen_family(parent) == gen_family(parent)
