import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irscover.errors import DegenerateGeometryError, InfeasiblePlacementError
from irscover.geometry import (Position, ScenarioGeometry, SubareaBand, TargetArea, UniformDeployment,
                               assign_to_bands, direction_cosine, partition_area_uniform,
                               place_aps_uniform, spatial_freq_bounds)

IRS = Position(0.0, 0.0, 10.0)
AREA = TargetArea(Position(150.0, 0.0, 0.0), 100.0, 40.0)
# closed forms: phi = x / sqrt(x^2 + y^2 + 10^2) is smallest at the near corners
# (100, +-20) and largest at the far edge midpoint (200, 0)
PHI_MIN = 100.0 / math.sqrt(10500.0)
PHI_MAX = 200.0 / math.sqrt(40100.0)


class TestDirectionCosine:
    def test_collinear(self):
        assert direction_cosine((0, 0, 0), (10, 0, 0)) == 1.0

    def test_orthogonal(self):
        assert direction_cosine((0, 0, 0), (0, 10, 0)) == 0.0

    def test_elevated_irs(self):
        assert direction_cosine((0, 0, 10), (150, 0, 0)) == pytest.approx(150 / math.sqrt(22600), abs=1e-15)

    def test_axis_is_normalised(self):
        assert direction_cosine((0, 0, 0), (3, 4, 0), axis=(0, 5, 0)) == pytest.approx(0.8)

    def test_vectorised(self):
        pts = np.array([[10, 0, 0], [0, 10, 0], [-1, 0, 0]], float)
        np.testing.assert_allclose(direction_cosine((0, 0, 0), pts), [1, 0, -1])

    def test_zero_displacement(self):
        with pytest.raises(DegenerateGeometryError):
            direction_cosine((1, 2, 3), (1, 2, 3))

    @given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
           st.lists(st.floats(-1, 1), min_size=3, max_size=3))
    def test_in_range(self, to, axis):
        if np.linalg.norm(to) < 1e-6 or np.linalg.norm(axis) < 1e-6:
            return
        c = direction_cosine((0, 0, 0), to, axis)
        assert -1.0 <= c <= 1.0


class TestBounds:
    def test_reference_area(self):
        lo, hi = spatial_freq_bounds(AREA, IRS)
        assert lo == pytest.approx(PHI_MIN, abs=1e-15)
        assert hi == pytest.approx(PHI_MAX, abs=1e-15)
        assert (lo, hi) == pytest.approx((0.97590, 0.99875), abs=1e-5)

    def test_point_area(self):
        lo, hi = spatial_freq_bounds(TargetArea(Position(150, 0, 0), 0, 0), IRS)
        assert lo == hi == pytest.approx(150 / math.sqrt(22600), abs=1e-15)

    def test_extrema_locations(self):
        # the minimum sits on corners; the maximum on the far edge midpoint
        pts = AREA.grid(0.5)
        phi = direction_cosine(IRS, pts)
        corners = direction_cosine(IRS, AREA.corners())
        assert corners.min() == phi.min()
        np.testing.assert_allclose(pts[np.argmax(phi)], [200, 0, 0])
        assert corners.max() < phi.max()

    def test_grid_includes_edges(self):
        g = AREA.grid(0.5)
        assert g.shape == (201 * 81, 3)
        assert g[:, 0].min() == 100 and g[:, 0].max() == 200
        assert g[:, 1].min() == -20 and g[:, 1].max() == 20


class TestPlacement:
    def test_single_ap(self):
        (ap,) = place_aps_uniform(1, 0.3, 0.02, 10.0, IRS)
        assert direction_cosine(IRS, ap) == pytest.approx(0.3, abs=1e-13)

    def test_four_aps_spacing(self):
        aps = place_aps_uniform(4, 0.0, 0.0229, 10.0, IRS)
        om = direction_cosine(IRS, np.array(aps))
        np.testing.assert_allclose(np.diff(om), 0.005725, atol=1e-13)
        for ap in aps:
            assert ap.z == 0.0
            assert math.hypot(ap.x, ap.y) == pytest.approx(10.0)

    def test_unreachable_target(self):
        with pytest.raises(InfeasiblePlacementError):
            place_aps_uniform(1, 2.0, 0.0, 10.0, IRS)

    def test_target_outside_circle_reach(self):
        # a radius-10 circle 10 m below the IRS only reaches |cos| <= 1/sqrt(2)
        with pytest.raises(InfeasiblePlacementError):
            place_aps_uniform(1, 0.9, 0.0, 10.0, IRS)

    def test_deterministic(self):
        assert place_aps_uniform(5, 0.0, 0.02, 10.0, IRS) == place_aps_uniform(5, 0.0, 0.02, 10.0, IRS)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.floats(-0.6, 0.6), st.floats(0.0, 0.1))
    def test_cosines_hit_targets(self, J, phi_r1, dsI):
        aps = place_aps_uniform(J, phi_r1, dsI, 10.0, IRS)
        om = direction_cosine(IRS, np.array(aps))
        np.testing.assert_allclose(om, phi_r1 + np.arange(J) * dsI / J, atol=1e-12)


class TestPartition:
    def test_single_band(self):
        (b,) = partition_area_uniform(AREA, IRS, K=1)
        assert (b.phi_lo, b.phi_hi) == pytest.approx((PHI_MIN, PHI_MAX), abs=1e-15)

    def test_four_bands(self):
        bands = partition_area_uniform(AREA, IRS, K=4)
        widths = [b.width for b in bands]
        np.testing.assert_allclose(widths, 0.0057125, atol=1e-6)

    @given(st.integers(1, 12))
    def test_cover_and_disjoint(self, K):
        bands = partition_area_uniform(AREA, IRS, K=K)
        assert bands[0].phi_lo == pytest.approx(PHI_MIN, abs=1e-15)
        assert bands[-1].phi_hi == PHI_MAX or bands[-1].phi_hi == pytest.approx(PHI_MAX, abs=1e-15)
        for a, b in zip(bands, bands[1:]):
            assert a.phi_hi == b.phi_lo
        phi = direction_cosine(IRS, AREA.grid(1.0))
        idx = assign_to_bands(phi, bands)
        assert np.all(idx >= 0)
        # every point lands in exactly the band whose closed interval holds it, lower index on ties
        for k, b in enumerate(bands):
            inside = b.contains(phi)
            assert np.all(idx[inside] <= k)

    def test_boundary_tie_goes_low(self):
        bands = [SubareaBand(0.0, 0.5, 0), SubareaBand(0.5, 1.0, 1)]
        assert list(assign_to_bands([0.5, 0.7, 2.0], bands)) == [0, 1, -1]


class TestScenarioGeometry:
    def test_rejects_ap_on_irs(self):
        with pytest.raises(DegenerateGeometryError):
            ScenarioGeometry(IRS, (IRS,), AREA)

    def test_rejects_coarse_grid(self):
        with pytest.raises(DegenerateGeometryError):
            ScenarioGeometry(IRS, (Position(10, 0, 0),), AREA, grid_step=11.0)

    def test_rejects_no_aps(self):
        with pytest.raises(DegenerateGeometryError):
            ScenarioGeometry(IRS, (), AREA)

    def test_deployment_build(self):
        dep = UniformDeployment()
        geo, bands = dep.build(3)
        assert geo.J == 3 and len(bands) == 3
        np.testing.assert_allclose(np.diff(geo.omegas()), dep.initial_deviation() / 3, atol=1e-14)
        assert dep.initial_deviation() == pytest.approx(PHI_MAX - PHI_MIN, abs=1e-15)
