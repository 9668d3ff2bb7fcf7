"""Tests for annealing schedules, their parser and textual format."""

from __future__ import annotations

import pytest

from revanneal.errors import DataError
from revanneal.schedules import (
    AnnealSchedule,
    format_schedule,
    make_forward,
    make_reverse,
    parse_schedule,
    reverse_params,
    s_at,
    validate,
)

LAB_SCHEDULE = "[(0.0, 1.0), (2.5, 0.5), (102.5, 0.5), (102.75, 1.0)]"


class TestMakeForward:
    def test_endpoints(self):
        sched = make_forward(102.75)
        assert sched.points == ((0.0, 0.0), (102.75, 1.0))
        assert sched.duration == 102.75

    def test_midpoint_is_half(self):
        sched = make_forward(10.0)
        assert s_at(sched, 5.0) == pytest.approx(0.5)

    def test_rejects_nonpositive_time(self):
        with pytest.raises(ValueError):
            make_forward(0.0)


class TestMakeReverse:
    def test_lab_tuned_control_points(self):
        sched = make_reverse(0.5, 2.5, 100.0, 0.25)
        assert sched.points == ((0.0, 1.0), (2.5, 0.5), (102.5, 0.5), (102.75, 1.0))
        assert sched.duration == 102.75

    def test_zero_pause_collapses_plateau(self):
        sched = make_reverse(0.5, 1.0, 0.0, 1.0)
        assert sched.points == ((0.0, 1.0), (1.0, 0.5), (2.0, 1.0))

    def test_parameter_roundtrip(self):
        for params in [(0.5, 2.5, 100.0, 0.25), (0.3, 1.0, 0.0, 2.0), (0.9, 5.0, 7.5, 1.5)]:
            assert reverse_params(make_reverse(*params)) == params

    def test_rejects_bad_dip(self):
        with pytest.raises(ValueError):
            make_reverse(1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            make_reverse(0.0, 1.0, 1.0, 1.0)

    def test_rejects_nonpositive_ramp(self):
        with pytest.raises(ValueError):
            make_reverse(0.5, 0.0, 1.0, 1.0)


class TestInterpolation:
    def setup_method(self):
        self.sched = make_reverse(0.5, 2.5, 100.0, 0.25)

    def test_first_ramp_midpoint(self):
        assert s_at(self.sched, 1.25) == pytest.approx(0.75)

    def test_pause_plateau(self):
        assert s_at(self.sched, 50.0) == pytest.approx(0.5)

    def test_endpoint(self):
        assert s_at(self.sched, 102.75) == pytest.approx(1.0)

    def test_exact_at_control_points(self):
        for t, s in self.sched.points:
            assert s_at(self.sched, t) == pytest.approx(s)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            s_at(self.sched, -0.1)
        with pytest.raises(ValueError):
            s_at(self.sched, 103.0)


class TestValidate:
    def test_lab_schedule_is_valid(self):
        assert validate(parse_schedule(LAB_SCHEDULE)) == []

    def test_forward_is_valid(self):
        assert validate(make_forward(5.0)) == []

    def test_decreasing_times_flagged(self):
        sched = AnnealSchedule(((0.0, 1.0), (2.0, 0.5), (1.0, 1.0)), "reverse")
        assert any("non-monotone time" in v for v in validate(sched))

    def test_s_out_of_range_flagged(self):
        sched = AnnealSchedule(((0.0, 0.0), (1.0, 1.2)), "forward")
        assert any("s out of range" in v for v in validate(sched))

    def test_multi_dip_rejected(self):
        sched = AnnealSchedule(
            ((0.0, 1.0), (1.0, 0.5), (2.0, 0.8), (3.0, 0.5), (4.0, 1.0)), "reverse"
        )
        assert validate(sched) != []

    def test_flat_reverse_rejected(self):
        sched = AnnealSchedule(((0.0, 1.0), (1.0, 1.0), (2.0, 1.0)), "reverse")
        assert any("dip" in v for v in validate(sched))


class TestTextualFormat:
    def test_format_matches_canonical_string(self):
        assert format_schedule(make_reverse(0.5, 2.5, 100.0, 0.25)) == LAB_SCHEDULE

    def test_parse_roundtrip_bit_exact(self):
        sched = parse_schedule(LAB_SCHEDULE)
        assert format_schedule(sched) == LAB_SCHEDULE
        assert sched.points == make_reverse(0.5, 2.5, 100.0, 0.25).points
        assert sched.kind == "reverse"

    def test_parse_accepts_whitespace_variants(self):
        sched = parse_schedule("  [ (0.0,1.0) , (2.5, 0.5),(102.5,0.5), (102.75,1.0) ] ")
        assert sched.points == ((0.0, 1.0), (2.5, 0.5), (102.5, 0.5), (102.75, 1.0))

    def test_parse_classifies_forward(self):
        sched = parse_schedule("[(0.0, 0.0), (10.0, 1.0)]")
        assert sched.kind == "forward"

    def test_parse_rejects_garbage(self):
        with pytest.raises(DataError):
            parse_schedule("not a schedule")

    def test_parse_rejects_invalid_shape(self):
        with pytest.raises(DataError):
            parse_schedule("[(0.0, 1.0), (1.0, 0.5), (2.0, 0.8), (3.0, 0.5), (4.0, 1.0)]")

    def test_roundtrip_random_reverse_schedules(self):
        import numpy as np

        rng = np.random.default_rng(0)
        for _ in range(20):
            params = (
                float(rng.uniform(0.05, 0.95)),
                float(rng.uniform(0.5, 5.0)),
                float(rng.uniform(0.0, 100.0)),
                float(rng.uniform(0.1, 5.0)),
            )
            sched = make_reverse(*params)
            again = parse_schedule(format_schedule(sched))
            assert again.points == sched.points
            assert again.kind == sched.kind
