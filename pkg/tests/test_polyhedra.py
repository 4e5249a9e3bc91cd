"""Projection correctness is checked against an independent one-variable
feasibility oracle: fix every kept coordinate at a sample point, reduce the
original system to interval bounds on the eliminated variable, and compare
emptiness.  Exact rational arithmetic throughout; zero tolerance."""

from fractions import Fraction

import numpy as np
import pytest

from sparse_closure.polyhedra import (
    RowCapExceeded,
    affine_image,
    affine_image_set,
    contains,
    drop_redundant,
    eliminate_variable,
    from_json,
    polyhedron,
    to_json,
)


def interval_feasible(poly, idx, point):
    """Oracle: with all other variables fixed, does a feasible value of
    variable idx exist?  Reduces each row to a bound and intersects."""
    lo, hi = None, None
    others = [i for i in range(poly.num_vars) if i != idx]
    for row, b in zip(poly.rows, poly.rhs):
        rest = sum(row[i] * p for i, p in zip(others, point))
        coeff = row[idx]
        if coeff == 0:
            if rest > b:
                return False
        elif coeff > 0:
            bound = (b - rest) / coeff
            hi = bound if hi is None else min(hi, bound)
        else:
            bound = (b - rest) / coeff
            lo = bound if lo is None else max(lo, bound)
    return lo is None or hi is None or lo <= hi


def random_system(rng, num_vars, num_rows):
    rows = rng.integers(-3, 4, size=(num_rows, num_vars))
    rhs = rng.integers(-3, 4, size=num_rows)
    return polyhedron(num_vars, rows.tolist(), rhs.tolist())


def random_point(rng, dim):
    return tuple(
        Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 5))) for _ in range(dim)
    )


class TestEliminateVariable:
    def test_equality_chain_forces_interval(self):
        # {x <= 1, -x <= 0, t - x <= 0, x - t <= 0}: t = x in [0, 1]
        poly = polyhedron(2, [[1, 0], [-1, 0], [-1, 1], [1, -1]], [1, 0, 0, 0])
        projected = eliminate_variable(poly, 0)
        for t, expected in [(0, True), (1, True), (Fraction(1, 2), True), (2, False), (Fraction(-1, 7), False)]:
            assert contains(projected, [t]) is expected

    def test_unmentioned_variable_leaves_rows_alone(self):
        poly = polyhedron(2, [[0, 1], [0, -1]], [2, 0])
        projected = eliminate_variable(poly, 0)
        assert contains(projected, [1]) and not contains(projected, [3])
        assert projected.num_rows == 2

    def test_index_out_of_range(self):
        poly = polyhedron(2, [[1, 0]], [1])
        with pytest.raises(ValueError, match="out of range"):
            eliminate_variable(poly, 2)

    def test_projection_matches_interval_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(60):
            n = int(rng.integers(2, 5))
            m = int(rng.integers(1, 9))
            poly = random_system(rng, n, m)
            idx = int(rng.integers(0, n))
            projected = eliminate_variable(poly, idx)
            for _ in range(30):
                point = random_point(rng, n - 1)
                assert contains(projected, point) == interval_feasible(poly, idx, point)

    def test_three_var_grid_oracle(self):
        rng = np.random.default_rng(19)
        poly = random_system(rng, 3, 6)
        projected = eliminate_variable(poly, 1)
        grid = [Fraction(k, 10) for k in range(-10, 11)]
        for a in grid[::2]:
            for b in grid[::2]:
                assert contains(projected, (a, b)) == interval_feasible(poly, 1, (a, b))

    def test_elimination_order_is_irrelevant(self):
        rng = np.random.default_rng(40)
        for _ in range(15):
            poly = random_system(rng, 3, 6)
            first = eliminate_variable(eliminate_variable(poly, 2), 1)
            second = eliminate_variable(eliminate_variable(poly, 1), 1)
            for _ in range(40):
                point = random_point(rng, 1)
                assert contains(first, point) == contains(second, point)

    def test_all_entries_stay_rational(self):
        rng = np.random.default_rng(33)
        poly = random_system(rng, 4, 8)
        projected = eliminate_variable(poly, 0)
        for row, b in zip(projected.rows, projected.rhs):
            assert all(isinstance(x, Fraction) for x in row)
            assert isinstance(b, Fraction)
            assert isinstance(sum(row, start=Fraction(0)), Fraction)

    def test_row_cap_trips(self):
        rows = [[1] * 3 for _ in range(6)] + [[-1] * 3 for _ in range(6)]
        for i, row in enumerate(rows):
            row[1] = i + 1  # make rows distinct
        poly = polyhedron(3, rows, list(range(12)))
        with pytest.raises(RowCapExceeded):
            eliminate_variable(poly, 0, row_cap=4)


class TestAffineImage:
    def test_identity_image_is_same_set(self):
        rng = np.random.default_rng(5)
        poly = random_system(rng, 2, 5)
        image = affine_image(affine_image_set([[1, 0], [0, 1]], poly))
        for _ in range(60):
            point = random_point(rng, 2)
            assert contains(image, point) == contains(poly, point)

    def test_sum_over_unit_square(self):
        square = polyhedron(2, [[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 0, 1, 0])
        image = affine_image(affine_image_set([[1, 1]], square))
        assert contains(image, [0]) and contains(image, [2]) and contains(image, [1])
        assert not contains(image, [Fraction(21, 10)]) and not contains(image, [Fraction(-1, 10)])

    def test_infeasible_base_propagates(self):
        bad = polyhedron(1, [[1], [-1]], [0, -1])
        image = affine_image(affine_image_set([[1]], bad))
        assert any(
            all(c == 0 for c in row) and b < 0
            for row, b in zip(image.rows, image.rhs)
        )
        assert not contains(image, [0])

    def test_projection_of_cube_facet_counts(self):
        cube = polyhedron(
            3,
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
            [1, 0, 1, 0, 1, 0],
        )
        image = affine_image(affine_image_set([[1, 1, 1]], cube))
        assert contains(image, [3]) and contains(image, [0])
        assert not contains(image, [Fraction(31, 10)])


class TestContains:
    def test_boundary_included(self):
        poly = polyhedron(1, [[1], [-1]], [1, 0])
        assert contains(poly, [1]) is True
        assert contains(poly, [2]) is False

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="coordinates"):
            contains(polyhedron(2, [[1, 0]], [1]), [1])


class TestDropRedundant:
    def test_duplicate_rows_merge(self):
        poly = polyhedron(2, [[1, 1], [2, 2], [1, 1]], [1, 2, 1])
        cleaned = drop_redundant(poly)
        assert cleaned.num_rows == 1

    def test_dominated_bound_removed(self):
        poly = polyhedron(1, [[1], [1]], [1, 2])
        cleaned = drop_redundant(poly)
        assert cleaned.num_rows == 1
        assert cleaned.rhs == (Fraction(1),)

    def test_two_row_combination_removed(self):
        # x + y <= 2 is the sum of x <= 1 and y <= 1
        poly = polyhedron(2, [[1, 0], [0, 1], [1, 1]], [1, 1, 2])
        cleaned = drop_redundant(poly)
        assert cleaned.num_rows == 2

    def test_set_unchanged_under_sampling(self):
        rng = np.random.default_rng(27)
        for _ in range(20):
            poly = random_system(rng, 3, 7)
            cleaned = drop_redundant(poly)
            for _ in range(40):
                point = random_point(rng, 3)
                assert contains(poly, point) == contains(cleaned, point)


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(14)
        poly = random_system(rng, 3, 5)
        again = from_json(to_json(poly))
        assert again == poly

    def test_fraction_strings(self):
        poly = polyhedron(1, [[Fraction(1, 3)]], [Fraction(-2, 7)])
        data = to_json(poly)
        assert data["C"] == [["1/3"]] and data["y"] == ["-2/7"]
