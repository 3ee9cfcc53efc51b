import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavsearch import geometry as g

REL = 1e-9


def test_turning_radius_values():
    assert g.turning_radius(1, 4.0) == pytest.approx(8.0, rel=REL)
    assert g.turning_radius(2, 4.0) == pytest.approx(26.0, rel=REL)
    assert g.turning_radius(3, 4.0) == pytest.approx(56.0, rel=REL)


def test_turning_radius_rejects_bad_j():
    with pytest.raises(ValueError):
        g.turning_radius(0, 4.0)


def test_turning_angle_values():
    assert g.turning_angle(1, 1) == pytest.approx(45.0, rel=REL)
    assert g.turning_angle(2, 1) == pytest.approx(26.56505117707799, rel=REL)
    assert g.turning_angle(2, 2) == pytest.approx(18.43494882292201, rel=REL)


def test_turning_angle_domain():
    with pytest.raises(ValueError):
        g.turning_angle(3, 0)
    with pytest.raises(ValueError):
        g.turning_angle(3, 4)


@pytest.mark.parametrize("j", range(1, 11))
def test_quarter_octant_closure_exact(j):
    # the slot angles telescope, so the sum is exactly 45 degrees in floats
    assert sum(g.turning_angle(j, n) for n in range(1, j + 1)) == 45.0


def test_acceleration_coeff_values():
    assert g.acceleration_coeff(1, 1) == pytest.approx(math.sqrt(2) * math.pi / 4, rel=REL)
    assert g.acceleration_coeff(2, 1) == pytest.approx(1.036747571331046, rel=REL)


@pytest.mark.parametrize("j", range(1, 11))
def test_acceleration_peaks_at_first_slot(j):
    coeffs = [g.acceleration_coeff(j, n) for n in range(1, j + 1)]
    assert coeffs[0] == max(coeffs)


def test_acceleration_coeff_bounded_by_diagonal_case():
    worst = max(
        g.acceleration_coeff(j, n) for j in range(1, 21) for n in range(1, j + 1)
    )
    assert worst <= g.MAX_ACCEL_COEFF + 1e-15


def test_feasible_j_rotor_and_fixed_wing():
    assert g.feasible_j_values(0.0, 35.0, 10.0, 4.0, 1.0) == [1, 2, 3, 4, 5, 6]
    assert g.feasible_j_values(20.0, 70.0, 10.0, 4.0, 1.0) == [6, 7, 8, 9, 10, 11, 12]


def test_feasible_j_empty_for_zero_speed():
    assert g.feasible_j_values(0.0, 0.0, 10.0, 4.0, 1.0) == []


def test_grid_supports_acceleration():
    assert g.grid_supports_acceleration(4.0, 1.0, 10.0)
    assert not g.grid_supports_acceleration(4.0, 1.0, 4.0)


def test_heading_to_number_examples():
    assert g.heading_to_number(0.0, 2) == 0
    assert g.heading_to_number(30.0, 2) == 1
    assert g.heading_to_number(179.99, 2) == 8  # rear canonicalizes to +4j
    assert g.heading_to_number(-180.0, 2) == 8


def test_heading_interval_is_low_inclusive():
    # slot 1 at j=2 owns [11.25, 33.75)
    assert g.heading_to_number(11.25, 2) == 1
    assert g.heading_to_number(33.75, 2) == 2


def test_increment_examples():
    assert g.number_to_increment(0, 2) == (2, 0)
    assert g.number_to_increment(3, 2) == (1, 2)
    assert g.number_to_increment(-8, 2) == (-2, 0)


@pytest.mark.parametrize("j", range(1, 11))
def test_every_jump_lands_on_the_ring(j):
    for n in range(-4 * j + 1, 4 * j + 1):
        dx, dy = g.number_to_increment(n, j)
        assert max(abs(dx), abs(dy)) == j


@pytest.mark.parametrize("j", range(1, 11))
def test_mirror_symmetry_of_increments(j):
    for n in range(-4 * j + 1, 4 * j + 1):
        dx, dy = g.number_to_increment(n, j)
        mx, my = g.number_to_increment(g.wrap_number(-n, j), j)
        assert (mx, my) == (dx, -dy)


@pytest.mark.parametrize("j", range(1, 11))
def test_heading_number_round_trip(j):
    for n in range(-4 * j + 1, 4 * j + 1):
        assert g.heading_to_number(g.slot_heading(n, j), j) == n


@pytest.mark.parametrize("j", range(1, 11))
def test_step_keeps_number_and_heading_in_sync(j):
    for n in range(-4 * j + 1, 4 * j + 1):
        pose = g.GridPose(100, 100, g.slot_heading(n, j))
        for u in (-1, 0, 1):
            nxt = g.step(pose, u, j)
            assert g.heading_to_number(nxt.heading, j) == g.wrap_number(n + u, j)


def test_step_rejects_bad_action():
    with pytest.raises(ValueError):
        g.step(g.GridPose(1, 1, 0.0), 2, 1)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_constant_turn_traces_a_closed_loop_matching_radius_estimate(j):
    """Turning one way every step walks once around the ring and returns to
    the start; the loop's outer envelope matches the turning-radius formula."""
    r = 4.0
    pose = g.GridPose(500, 500, 0.0)
    pts = [(pose.x_g, pose.y_g)]
    for _ in range(8 * j):
        pose = g.step(pose, -1, j)
        pts.append((pose.x_g, pose.y_g))
    assert pts[0] == pts[-1]
    arr = np.asarray(pts[:-1], dtype=float) * r
    center = arr.mean(axis=0)
    measured = float(np.mean(np.linalg.norm(arr - center, axis=1))) + r / 2.0
    assert measured == pytest.approx(g.turning_radius(j, r), rel=0.15)


def test_increment_tables_match_scalar_function():
    for j in (1, 2, 5, 12):
        inc_x, inc_y = g.increment_tables(j)
        for idx in range(8 * j):
            n = idx - 4 * j + 1
            assert (inc_x[idx], inc_y[idx]) == g.number_to_increment(n, j)


@given(st.floats(min_value=-1e4, max_value=1e4, allow_nan=False))
def test_normalize_heading_range(h):
    out = g.normalize_heading(h)
    assert -180.0 <= out < 180.0


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=-200, max_value=200))
def test_wrap_number_is_canonical(j, n):
    w = g.wrap_number(n, j)
    assert -4 * j < w <= 4 * j
    assert (w - n) % (8 * j) == 0
