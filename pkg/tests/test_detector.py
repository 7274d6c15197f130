import numpy as np
import pytest
import torch

from lm2face.detector import (
    DetectorConfig,
    LandmarkDetector,
    coordinate_grid,
    detection_loss,
    dsnt,
    spatial_softmax,
)

from helpers import autograd_grad, finite_diff_grad, rel_err


class TestCoordinateGrid:
    def test_pixel_center_values(self):
        gx, gy = coordinate_grid(4, 8)
        for y in range(4):
            for x in range(8):
                assert float(gx[y, x]) == (x + 0.5) / 8
                assert float(gy[y, x]) == (y + 0.5) / 4


class TestDSNT:
    def test_uniform_scores_give_exact_center(self):
        coords = dsnt(torch.zeros(1, 16, 16))
        assert float(coords[0, 0]) == 0.5
        assert float(coords[0, 1]) == 0.5

    def test_dominant_spike_reads_pixel_center(self):
        raw = torch.zeros(1, 16, 16)
        raw[0, 4, 10] = 30.0
        coords = dsnt(raw)
        assert abs(float(coords[0, 0]) - (10 + 0.5) / 16) < 1e-3
        assert abs(float(coords[0, 1]) - (4 + 0.5) / 16) < 1e-3

    def test_softmax_shift_invariance(self):
        g = torch.Generator().manual_seed(20)
        raw = torch.randn(3, 8, 8, generator=g, dtype=torch.float64)
        shifted = raw + 7.3
        delta = (dsnt(raw) - dsnt(shifted)).abs().max()
        assert float(delta) < 1e-9

    def test_horizontal_flip_mirrors_x(self):
        g = torch.Generator().manual_seed(21)
        raw = torch.randn(5, 8, 8, generator=g, dtype=torch.float64)
        flipped = torch.flip(raw, dims=[-1])
        a = dsnt(raw)
        b = dsnt(flipped)
        assert float((b[:, 0] - (1.0 - a[:, 0])).abs().max()) < 1e-6
        assert float((b[:, 1] - a[:, 1]).abs().max()) < 1e-6

    def test_outputs_strictly_inside_unit_square(self):
        g = torch.Generator().manual_seed(22)
        raw = torch.randn(10, 6, 6, generator=g) * 50
        coords = dsnt(raw)
        assert float(coords.min()) > 0.0
        assert float(coords.max()) < 1.0

    def test_gradient_matches_finite_differences(self):
        g = torch.Generator().manual_seed(23)
        raw = torch.randn(1, 6, 6, generator=g, dtype=torch.float64)

        def f(r):
            return dsnt(r)[0, 0]

        fd = finite_diff_grad(lambda r: float(f(r)), raw, eps=1e-5)
        ad = autograd_grad(f, raw)
        assert rel_err(fd.numpy(), ad.numpy()) < 1e-4

    def test_non_finite_scores_rejected(self):
        raw = torch.zeros(1, 4, 4)
        raw[0, 0, 0] = float("inf")
        with pytest.raises(ValueError, match="non-finite"):
            dsnt(raw)

    def test_probabilities_sum_to_one(self):
        g = torch.Generator().manual_seed(24)
        p = spatial_softmax(torch.randn(7, 5, 5, generator=g))
        assert np.allclose(p.sum(dim=(-2, -1)).numpy(), 1.0, atol=1e-5)
        assert float(p.min()) >= 0.0


class TestLandmarkDetector:
    def test_heatmap_shape_contract(self):
        det = LandmarkDetector(DetectorConfig(point_count=12, input_size=64, base_channels=32))
        raw = det.heatmaps(torch.rand(2, 3, 64, 64) * 2 - 1)
        assert raw.shape == (2, 12, 16, 16)

    def test_determinism(self):
        torch.manual_seed(25)
        det = LandmarkDetector(DetectorConfig(point_count=4, input_size=16, base_channels=16, depth=2))
        img = torch.rand(1, 3, 16, 16)
        assert torch.equal(det.heatmaps(img), det.heatmaps(img))

    def test_resolution_mismatch_rejected(self):
        det = LandmarkDetector(DetectorConfig(point_count=4, input_size=64, base_channels=16))
        with pytest.raises(ValueError, match="resize"):
            det.heatmaps(torch.rand(1, 3, 32, 32))

    def test_detect_is_dsnt_of_heatmaps(self):
        torch.manual_seed(26)
        det = LandmarkDetector(DetectorConfig(point_count=4, input_size=16, base_channels=16, depth=2))
        img = torch.rand(1, 3, 16, 16)
        assert torch.equal(det(img), dsnt(det.heatmaps(img), det.config.temperature))

    def test_coords_in_unit_square(self):
        torch.manual_seed(27)
        det = LandmarkDetector(DetectorConfig(point_count=6, input_size=16, base_channels=16, depth=2))
        with torch.no_grad():
            coords = det(torch.rand(3, 3, 16, 16) * 2 - 1)
        assert float(coords.min()) > 0.0 and float(coords.max()) < 1.0

    def test_heatmap_gradient_vs_finite_differences(self):
        torch.manual_seed(28)
        det = LandmarkDetector(
            DetectorConfig(point_count=2, input_size=16, base_channels=8, depth=2)
        ).double()
        img = torch.rand(1, 3, 16, 16, dtype=torch.float64)

        def scalar(x):
            return det.heatmaps(x).sum()

        with torch.no_grad():
            fd = finite_diff_grad(lambda x: float(scalar(x)), img, eps=1e-5)
        ad = autograd_grad(scalar, img)
        assert rel_err(fd.numpy(), ad.numpy()) < 1e-3

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError, match="divisible"):
            DetectorConfig(input_size=30)
        with pytest.raises(ValueError, match="depth"):
            DetectorConfig(input_size=16, depth=3)


class TestDetectionLoss:
    def test_zero_at_matching_peaked_maps(self):
        # A very peaked map at the target location drives both terms near 0.
        coords = torch.tensor([[[(4 + 0.5) / 8, (2 + 0.5) / 8]]], dtype=torch.float64)
        raw = torch.zeros(1, 1, 8, 8, dtype=torch.float64)
        raw[0, 0, 2, 4] = 60.0
        loss = detection_loss(raw, coords, sigma_px=0.25)
        assert float(loss) < 1e-3

    def test_penalizes_offset(self):
        coords = torch.tensor([[[0.5, 0.5]]], dtype=torch.float64)
        centered = torch.zeros(1, 1, 8, 8, dtype=torch.float64)
        centered[0, 0, 4, 4] = 30.0
        offset = torch.zeros(1, 1, 8, 8, dtype=torch.float64)
        offset[0, 0, 0, 0] = 30.0
        assert float(detection_loss(offset, coords)) > float(detection_loss(centered, coords))

    def test_differentiable(self):
        g = torch.Generator().manual_seed(29)
        raw = torch.randn(1, 3, 8, 8, generator=g, requires_grad=True)
        coords = torch.rand(1, 3, 2, generator=g)
        detection_loss(raw, coords).backward()
        assert raw.grad is not None
