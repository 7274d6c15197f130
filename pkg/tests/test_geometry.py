import numpy as np
import pytest

from lm2face.geometry import (
    TOY_TOPOLOGY,
    WFLW_TOPOLOGY,
    LandmarkSet,
    LandmarkTopology,
    denormalize,
    normalize,
    unit_l2,
)


def toy_pixel_points(w, h, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform([0, 0], [w, h], size=(TOY_TOPOLOGY.point_count, 2))


class TestTopology:
    def test_builtin_topologies_valid(self):
        assert TOY_TOPOLOGY.point_count == 12
        assert WFLW_TOPOLOGY.point_count == 98
        assert TOY_TOPOLOGY.vector_dim == 24

    def test_groups_cover_all_indices(self):
        for topo in (TOY_TOPOLOGY, WFLW_TOPOLOGY):
            seen = sorted(
                i for name in topo.groups for i in topo.group_indices(name)
            )
            assert seen == list(range(topo.point_count))

    def test_overlapping_groups_rejected(self):
        with pytest.raises(ValueError, match="overlaps"):
            LandmarkTopology("bad", 4, {"a": (0, 3), "b": (2, 4)}, ())

    def test_gap_in_groups_rejected(self):
        with pytest.raises(ValueError, match="cover"):
            LandmarkTopology("bad", 4, {"a": (0, 2), "b": (3, 4)}, ())

    def test_connectivity_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="connectivity"):
            LandmarkTopology("bad", 4, {"a": (0, 4)}, ((0, 4),))

    def test_unknown_group_lookup(self):
        with pytest.raises(KeyError, match="unknown group"):
            TOY_TOPOLOGY.group_indices("ears")

    def test_dict_round_trip(self):
        for topo in (TOY_TOPOLOGY, WFLW_TOPOLOGY):
            again = LandmarkTopology.from_dict(topo.to_dict())
            assert again == topo


class TestNormalize:
    def test_linear_scaling(self):
        pts = toy_pixel_points(256, 256, seed=1)
        pts[0] = (128, 64)
        lms, clamped = normalize(pts, 256, 256, TOY_TOPOLOGY)
        assert clamped == 0
        assert lms.points[0] == pytest.approx((0.5, 0.25), abs=0)

    def test_origin_fixed_point(self):
        pts = toy_pixel_points(100, 50, seed=2)
        pts[3] = (0, 0)
        lms, _ = normalize(pts, 100, 50, TOY_TOPOLOGY)
        assert tuple(lms.points[3]) == (0.0, 0.0)

    def test_out_of_frame_clamped_and_counted(self):
        pts = toy_pixel_points(256, 256, seed=3)
        pts[5] = (300, 10)
        lms, clamped = normalize(pts, 256, 256, TOY_TOPOLOGY)
        assert clamped == 1
        assert tuple(lms.points[5]) == (1.0, 0.0390625)

    def test_non_finite_point_rejected_with_index(self):
        pts = toy_pixel_points(64, 64, seed=4)
        pts[7, 1] = np.nan
        with pytest.raises(ValueError, match="index 7"):
            normalize(pts, 64, 64, TOY_TOPOLOGY)

    def test_zero_frame_rejected(self):
        pts = toy_pixel_points(64, 64, seed=5)
        with pytest.raises(ValueError, match="positive"):
            normalize(pts, 0, 64, TOY_TOPOLOGY)

    def test_wrong_point_count_rejected(self):
        with pytest.raises(ValueError, match="12"):
            normalize(np.zeros((11, 2)), 64, 64, TOY_TOPOLOGY)


class TestDenormalize:
    def test_center(self):
        lms = LandmarkSet(np.full((12, 2), 0.5), TOY_TOPOLOGY)
        px = denormalize(lms, 64, 64)
        assert np.all(px == 32.0)

    def test_corner(self):
        lms = LandmarkSet(np.ones((12, 2)), TOY_TOPOLOGY)
        px = denormalize(lms, 256, 256)
        assert np.all(px == 256.0)

    def test_round_trip_98_random_points(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform([0, 0], [640, 480], size=(98, 2))
        lms, clamped = normalize(pts, 640, 480, WFLW_TOPOLOGY)
        assert clamped == 0
        back = denormalize(lms, 640, 480)
        assert np.abs(back - pts).max() < 1e-9


class TestUnitL2:
    def test_three_four_five(self):
        v = np.zeros(24)
        v[0], v[1] = 3.0, 4.0
        out = unit_l2(v)
        assert out[0] == pytest.approx(0.6)
        assert out[1] == pytest.approx(0.8)
        assert np.all(out[2:] == 0.0)

    def test_idempotent_on_unit_sphere(self):
        rng = np.random.default_rng(7)
        v = unit_l2(rng.normal(size=196))
        again = unit_l2(v)
        assert np.abs(again - v).max() < 1e-7

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(11)
        v = rng.normal(size=196)
        sq = 0.0
        for x in v:
            sq += x * x
        expected = np.array([x / np.sqrt(sq) for x in v])
        assert np.abs(unit_l2(v) - expected).max() < 1e-7

    def test_output_norm_is_one(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            v = rng.normal(size=rng.integers(2, 200))
            assert abs(np.linalg.norm(unit_l2(v)) - 1.0) < 1e-7

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            unit_l2(np.zeros(24))


class TestLandmarkSet:
    def test_vector_round_trip_exact(self):
        rng = np.random.default_rng(17)
        pts = rng.uniform(size=(12, 2))
        lms = LandmarkSet(pts, TOY_TOPOLOGY)
        vec = lms.to_vector()
        assert vec.shape == (24,)
        again = LandmarkSet.from_vector(vec, TOY_TOPOLOGY)
        assert np.array_equal(again.points, lms.points)

    def test_interleaving_order(self):
        pts = np.array([[i / 100.0, (i + 50) / 100.0] for i in range(12)])
        vec = LandmarkSet(pts, TOY_TOPOLOGY).to_vector()
        assert vec[0] == pts[0, 0]
        assert vec[1] == pts[0, 1]
        assert vec[2] == pts[1, 0]

    def test_wrong_length_vector_rejected(self):
        with pytest.raises(ValueError, match="24"):
            LandmarkSet.from_vector(np.zeros(23), TOY_TOPOLOGY)

    def test_out_of_range_point_rejected(self):
        pts = np.full((12, 2), 0.5)
        pts[2, 0] = 1.5
        with pytest.raises(ValueError, match="point 2"):
            LandmarkSet(pts, TOY_TOPOLOGY)

    def test_non_finite_rejected(self):
        pts = np.full((12, 2), 0.5)
        pts[9, 0] = np.inf
        with pytest.raises(ValueError, match="non-finite"):
            LandmarkSet(pts, TOY_TOPOLOGY)
