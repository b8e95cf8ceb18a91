"""Lattice-to-grid transform: forward map, axis grids, inverse substitution."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latquad import exprcore
from latquad.exprcore import const, make_sum, parse, var
from latquad.lattice import LatticeRule, korobov_vector, lattice_points
from latquad.transform import (
    NonCartesianStructureError,
    TransformedIntegrand,
    axis_counts,
    build_axis_grids,
    forward_transform,
    grid_completion,
    inverse_substitution,
    make_transformed_integrand,
    midpoint_grids,
)

from _oracles import brute_tensor_sum, forward_transform_fractions


class TestAxisCounts:
    def test_mixed_counts(self):
        assert axis_counts(LatticeRule(161, (1, 4, 16))) == (4, 4, 11)

    def test_power_form_is_uniform(self):
        for a, d in ((3, 2), (4, 3), (5, 4)):
            assert axis_counts(korobov_vector(a, a**d, d)) == (a,) * d

    def test_one_dimension(self):
        assert axis_counts(LatticeRule(7, (1,))) == (7,)


class TestForwardTransform:
    def test_origin(self):
        for rule in (LatticeRule(9, (1, 3)), LatticeRule(161, (1, 4, 16))):
            assert np.array_equal(forward_transform(rule, 0), np.zeros(rule.d))

    def test_hand_computed_image(self):
        y = forward_transform(LatticeRule(9, (1, 3)), 4)
        assert y == pytest.approx([1.0 / 3.0, 1.0 / 3.0], abs=0)

    def test_negative_index(self):
        with pytest.raises(ValueError):
            forward_transform(LatticeRule(9, (1, 3)), -1)

    @given(data=st.data())
    @settings(max_examples=80, deadline=None)
    def test_matches_exact_rational_map(self, data):
        a = data.draw(st.integers(min_value=2, max_value=6), label="a")
        d = data.draw(st.integers(min_value=2, max_value=4), label="d")
        n = a**d
        rule = korobov_vector(a, n, d)
        j = data.draw(st.integers(min_value=0, max_value=n - 1), label="j")
        got = forward_transform(rule, j)
        want = forward_transform_fractions(n, rule.z, j)
        assert list(got) == [float(w) for w in want]


class TestBuildAxisGrids:
    def test_closed_form_square(self):
        g = build_axis_grids(LatticeRule(9, (1, 3)))
        third = (0.0, 1.0 / 3.0, 2.0 / 3.0)
        assert g.nodes == (third, third)
        assert g.counts == (3, 3) and g.total == 9

    def test_closed_form_rectangular(self):
        g = build_axis_grids(LatticeRule(101, (1, 10)))
        assert g.counts == (10, 11)
        assert g.nodes[0] == tuple(t / 10 for t in range(10))
        assert g.nodes[1] == tuple(t * 10 / 101 for t in range(11))

    def test_one_dimension_is_the_lattice(self):
        g = build_axis_grids(LatticeRule(7, (1,)))
        assert g.nodes == (tuple(t / 7 for t in range(7)),)
        assert np.array_equal(np.asarray(g.nodes[0]), lattice_points(LatticeRule(7, (1,)))[:, 0])

    def test_rectangular_rule_images_lie_on_grid(self):
        rule = LatticeRule(81, (1, 7))
        g = build_axis_grids(rule)
        assert g.counts == (7, 12)
        for j in range(81):
            y = forward_transform(rule, j)
            assert float(y[0]) in set(g.nodes[0])
            assert float(y[1]) in set(g.nodes[1])

    def test_non_cartesian_rejected(self):
        # most non-power vectors produce off-progression images and must
        # refuse rather than return a wrong grid
        for n, z in ((7, (2, 3)), (32, (1, 2, 8)), (64, (2, 4))):
            with pytest.raises(NonCartesianStructureError):
                build_axis_grids(LatticeRule(n, z))

    def test_general_sweep_cap(self):
        with pytest.raises(NonCartesianStructureError):
            build_axis_grids(LatticeRule(2**20 + 1, (1, 3, 4)))


class TestGridCompletion:
    def test_added_points(self):
        _, extra = grid_completion(LatticeRule(81, (1, 7)))
        assert extra == 3
        _, extra = grid_completion(LatticeRule(161, (1, 4, 16)))
        assert extra == 15

    def test_power_form_needs_none(self):
        for a, d in ((3, 2), (3, 3), (4, 3), (5, 2)):
            _, extra = grid_completion(korobov_vector(a, a**d, d))
            assert extra == 0


class TestBijection:
    @pytest.mark.parametrize("a,d", [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (5, 2)])
    def test_power_form_images_fill_the_grid(self, a, d):
        n = a**d
        rule = korobov_vector(a, n, d)
        grids = build_axis_grids(rule)
        images = {tuple(forward_transform(rule, j)) for j in range(n)}
        full = set(itertools.product(*grids.nodes))
        assert len(images) == n
        assert images == full


class TestMidpointGrids:
    def test_open_nodes(self):
        g = midpoint_grids(LatticeRule(9, (1, 3)))
        assert g.counts == (3, 3)
        assert g.nodes[0] == (1.0 / 6.0, 0.5, 5.0 / 6.0)

    def test_avoids_boundary(self):
        g = midpoint_grids(LatticeRule(161, (1, 4, 16)))
        for axis in g.nodes:
            assert all(0.0 < v < 1.0 for v in axis)

    def test_counts_match_closed_grids(self):
        for rule in (LatticeRule(101, (1, 10)), korobov_vector(3, 27, 3)):
            assert midpoint_grids(rule).counts == axis_counts(rule)


class TestInverseSubstitution:
    def test_two_dim_rows(self):
        sub = inverse_substitution(LatticeRule(16, (1, 4)))
        assert sub[1] is make_sum([(var(1), 1.0), (var(2), 0.25)])
        assert sub[2] is var(2)

    def test_constant_passes_through(self):
        t = make_transformed_integrand(const(2.5), korobov_vector(3, 9, 2))
        assert t.g is const(2.5)

    def test_last_coordinate_is_identity(self):
        t = make_transformed_integrand(var(2), korobov_vector(3, 9, 2))
        assert t.g is var(2)

    def test_grid_nodes_map_into_unit_cube(self):
        for rule in (korobov_vector(3, 9, 2), korobov_vector(3, 27, 3)):
            sub = inverse_substitution(rule)
            grids = build_axis_grids(rule)
            for y in itertools.product(*grids.nodes):
                env = {i + 1: y[i] for i in range(rule.d)}
                for i in range(1, rule.d + 1):
                    x = exprcore.eval(sub[i], env)
                    assert 0.0 <= x < 1.0


class TestTransformedIntegrand:
    def test_validate_bijective_rule(self):
        f = parse("x[1]^2 + x[1]*x[2] + x[2]^2", 2)
        t = make_transformed_integrand(f, korobov_vector(3, 9, 2), check=True)
        assert t.validate()

    def test_validate_completed_rule(self):
        f = parse("exp(x[1]+x[2])", 2)
        assert make_transformed_integrand(f, LatticeRule(81, (1, 7))).validate()

    def test_validate_catches_wrong_integrand(self):
        rule = korobov_vector(3, 9, 2)
        f = parse("x[1]*x[2]", 2)
        good = make_transformed_integrand(f, rule)
        bad = TransformedIntegrand(f, rule, good.substitution, parse("x[1]+x[2]", 2))
        with pytest.raises(AssertionError):
            bad.validate()

    def test_sum_over_grid_matches_sum_over_lattice(self):
        f = parse("exp(x[1] - x[2] + 0.5*x[3])", 3)
        rule = korobov_vector(3, 27, 3)
        t = make_transformed_integrand(f, rule)
        grids = build_axis_grids(rule)
        grid_sum = brute_tensor_sum(
            t.g, [(i + 1, grids.nodes[i]) for i in range(3)], exprcore.eval)
        pts = lattice_points(rule)
        lattice_sum = sum(
            exprcore.eval(f, {k + 1: pts[j, k] for k in range(3)}) for j in range(27))
        assert grid_sum == pytest.approx(lattice_sum, rel=1e-12)
