import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prnuvid.sampling import average_block, plan


class TestPlan:
    def test_select_100_by_10(self):
        p = plan(100, 10, "select")
        assert p.groups == tuple((i,) for i in range(0, 100, 10))
        assert len(p.groups) == 10

    def test_average_100_by_15_drops_tail(self):
        p = plan(100, 15, "average")
        assert len(p.groups) == 6
        assert p.groups[0] == tuple(range(15))
        assert p.groups[-1] == tuple(range(75, 90))
        used = {i for g in p.groups for i in g}
        assert used == set(range(90))  # frames 90..99 dropped

    def test_rate_one_select_returns_all(self):
        p = plan(7, 1, "select")
        assert p.groups == tuple((i,) for i in range(7))

    def test_zero_rate_rejected(self):
        with pytest.raises(ValueError):
            plan(10, 0, "select")

    def test_zero_frames_rejected(self):
        with pytest.raises(ValueError):
            plan(0, 5, "select")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="unknown sampling mode"):
            plan(10, 2, "skip")

    def test_average_shorter_than_block_yields_no_groups(self):
        assert plan(9, 10, "average").groups == ()

    @given(frame_count=st.integers(1, 500), n=st.integers(1, 60))
    @settings(max_examples=100, deadline=None)
    def test_select_structure(self, frame_count, n):
        p = plan(frame_count, n, "select")
        assert p == plan(frame_count, n, "select")  # deterministic
        assert len(p.groups) == -(-frame_count // n)  # ceil
        for k, g in enumerate(p.groups):
            assert g == (k * n,)
            assert g[0] < frame_count

    @given(frame_count=st.integers(1, 500), n=st.integers(1, 60))
    @settings(max_examples=100, deadline=None)
    def test_average_structure(self, frame_count, n):
        p = plan(frame_count, n, "average")
        assert len(p.groups) == frame_count // n
        seen = set()
        for g in p.groups:
            assert len(g) == n
            assert g == tuple(range(g[0], g[0] + n))  # consecutive
            assert not seen & set(g)  # disjoint
            seen |= set(g)


class TestAverageBlock:
    def test_identical_frames_average_exactly(self, rng):
        f = rng.uniform(0, 255, (16, 16))
        np.testing.assert_array_equal(average_block([f] * 4), f)

    def test_black_and_white(self):
        out = average_block([np.zeros((4, 4)), np.full((4, 4), 255.0)])
        np.testing.assert_array_equal(out, np.full((4, 4), 127.5))

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            average_block([])

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            average_block([np.zeros((4, 4)), np.zeros((4, 5))])

    def test_noise_power_divided_by_n(self, rng):
        # Monte-Carlo check of the 1/N additive-noise reduction
        clean = np.full((64, 64), 100.0)
        sigma, n = 6.0, 15
        frames = [clean + rng.normal(0, sigma, clean.shape) for _ in range(n)]
        residual = average_block(frames) - clean
        measured = (residual ** 2).mean()
        expected = sigma ** 2 / n
        assert abs(measured - expected) <= 0.2 * expected

    def test_averaging_preserves_multiplicative_structure(self):
        # At an equal raw-frame budget, enrolling from N-frame averages must
        # recover the sensor pattern about as well as enrolling from every
        # frame (the multiplicative term survives the mean untouched).
        from prnuvid import synthcam
        from prnuvid.correlation import pearson
        from prnuvid.fingerprint import FingerprintAccumulator, accumulate, finalize

        cam = synthcam.make_camera(606, 64, 64, 0.02)
        frames = [
            synthcam.capture(cam, synthcam.flat_scene(64, 64, 128.0), 6.0)
            for _ in range(60)
        ]
        direct = FingerprintAccumulator.empty(64, 64)
        for f in frames:
            accumulate(direct, f)
        averaged = FingerprintAccumulator.empty(64, 64)
        for g in plan(60, 15, "average").groups:
            accumulate(averaged, average_block([frames[i] for i in g]))
        corr_direct = pearson(finalize(direct).matrix, cam.pattern)
        corr_avg = pearson(finalize(averaged).matrix, cam.pattern)
        assert corr_avg >= corr_direct - 0.05
