import numpy as np
import pytest

from captiveq.mapper import (
    MAP_HEADER,
    GridConfig,
    RegionRecord,
    canonicalize,
    classify_point,
    emit_cdf,
    emit_map,
    scan_grid,
    solve_point,
)
from captiveq.mixed import MixedContext, build_mixed, solve_w

FIGURE_REGIONS = [
    (0.4, 0.7, 1),
    (0.25, 0.85, 2),
    (0.7, 0.8, 3),
    (0.84, 0.9, 4),
    (0.48, 0.6, 17),
    (0.52, 0.65, 18),
    (0.57, 0.67, 19),
]


@pytest.mark.parametrize("z1,z2,code", FIGURE_REGIONS)
def test_figure_point_regions(z1, z2, code):
    assert classify_point(z1, z2).region == code


def test_canonicalize():
    assert canonicalize(0.4, 0.7) == (0.4, 0.7, False)
    assert canonicalize(0.7, 0.4) == (0.4, 0.7, True)
    # low-sum pairs reflect and swap roles
    c1, c2, sw = canonicalize(0.4, 0.52)
    assert (c1, c2) == (1.0 - 0.52, 1.0 - 0.4) and sw
    # swap then reflect composes to no net swap
    c1, c2, sw = canonicalize(0.52, 0.4)
    assert (c1, c2) == (1.0 - 0.52, 1.0 - 0.4) and not sw


def test_degenerate_and_invalid_points():
    assert classify_point(0.7, 0.7).region == -1
    assert classify_point(0.5, 0.5).region == -1
    with pytest.raises(ValueError):
        classify_point(0.0, 0.5)
    with pytest.raises(ValueError):
        classify_point(0.5, 1.0)


def test_mirrored_point_swaps_profits():
    direct = classify_point(0.48, 0.6)
    mirror = classify_point(1.0 - 0.6, 1.0 - 0.48)
    assert mirror.region == direct.region == 17
    assert mirror.pi1 == direct.pi2 and mirror.pi2 == direct.pi1
    assert mirror.w == direct.w


def test_swapped_orientation_same_game():
    rec = classify_point(0.7, 0.4)
    base = classify_point(0.4, 0.7)
    assert rec.region == base.region
    assert (rec.pi1, rec.pi2) == (base.pi2, base.pi1)


def test_symmetry_commutes_exactly():
    rng = np.random.default_rng(101)
    n = 0
    while n < 100:
        z1, z2 = rng.uniform(0.02, 0.98, 2)
        if abs(z1 + z2 - 1.0) < 1e-9 or z1 == z2:
            continue
        a = classify_point(z1, z2, quiet=True)
        b = classify_point(1.0 - z2, 1.0 - z1, quiet=True)
        assert a.region == b.region
        assert a.w == b.w and a.pi1 == b.pi2 and a.pi2 == b.pi1
        n += 1


def test_unresolved_record_shape():
    rec = classify_point(0.52, 0.55)
    if rec.region == -1:
        assert rec.w == 0.0 and rec.pi1 == 0.0 and rec.pi2 == 0.0


def test_pure_records_have_zero_width():
    rec = classify_point(0.4, 0.7)
    assert rec.w == 0.0 and rec.region == 1
    assert rec.pi1 == pytest.approx(0.96, abs=1e-15)


def test_solve_result_payload():
    res = solve_point(0.48, 0.6)
    assert res.kind == "M1" and res.mixed is not None and res.pure is None
    assert res.w > 0.0
    res = solve_point(0.25, 0.85)
    assert res.kind == "P2" and res.pure is not None and res.mixed is None


def test_grid_config_counts():
    cfg = GridConfig()
    assert len(cfg.z1_points()) == 500
    assert len(cfg.z2_points()) == 250
    fine = GridConfig.fine_window()
    assert len(fine.z1_points()) == 360
    assert len(fine.z2_points()) == 250
    assert fine.z1_points()[0] > 0.42 and fine.z1_points()[-1] < 0.6


def test_grid_config_validation():
    with pytest.raises(ValueError):
        GridConfig(spacing=0.0)
    with pytest.raises(ValueError):
        GridConfig(z1_range=(0.5, 0.2))
    with pytest.raises(ValueError):
        GridConfig(z2_range=(0.5, 1.2))


def test_scan_grid_ordering_and_determinism():
    cfg = GridConfig(z1_range=(0.38, 0.46), z2_range=(0.58, 0.62), spacing=0.02)
    serial = scan_grid(cfg, jobs=1)
    parallel = scan_grid(cfg, jobs=2)
    assert serial == parallel
    z1s, z2s = cfg.z1_points(), cfg.z2_points()
    assert len(serial) == len(z1s) * len(z2s)
    # row-major, z1 fastest
    k = 0
    for z2 in z2s:
        for z1 in z1s:
            assert serial[k].z1 == z1 and serial[k].z2 == z2
            k += 1


def test_empty_grid():
    cfg = GridConfig(z1_range=(0.4, 0.41), z2_range=(0.6, 0.61), spacing=0.05)
    assert scan_grid(cfg, jobs=1) == []


def test_emit_map_format(tmp_path):
    records = [
        classify_point(0.4, 0.7),
        classify_point(0.48, 0.6),
        classify_point(0.5, 0.5),
    ]
    path = tmp_path / "map.dat"
    emit_map(records, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == MAP_HEADER.rstrip("\n")
    assert len(lines) == 4
    cols = lines[1].split()
    assert len(cols) == 6
    assert float(cols[0]) == 0.4 and float(cols[1]) == 0.7
    assert cols[2] == "1" and float(cols[3]) == 0.0
    assert float(cols[4]) == pytest.approx(0.96, abs=1e-12)
    assert lines[3].split()[2] == "-1"
    # byte stability across emissions
    first = path.read_bytes()
    emit_map(records, str(path))
    assert path.read_bytes() == first
    with pytest.raises(ValueError):
        emit_map([], str(tmp_path / "x.dat"))


def test_emit_cdf_format(tmp_path):
    ctx = MixedContext.from_pair(0.48, 0.6)
    eq = build_mixed(ctx, "M1", solve_w(ctx, "M1"))
    grid = np.arange(0, 1001) * 0.001
    path = tmp_path / "CDF_M1.dat"
    emit_cdf(eq, grid, str(path))
    rows = [line.split() for line in path.read_text().splitlines()]
    assert len(rows) == 1001
    assert all(len(r) == 4 for r in rows)
    p = np.array([float(r[0]) for r in rows])
    f1 = np.array([float(r[1]) for r in rows])
    f2 = np.array([float(r[3]) for r in rows])
    # below both supports the CDF columns are zero; above, one
    assert f1[p < eq.F1.support_bottom - 1e-9].max() == 0.0
    assert f2[p < eq.F2.support_bottom - 1e-9].max() == 0.0
    assert f1[-1] == pytest.approx(1.0, abs=1e-12)
    assert f2[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(f1) >= -1e-12) and np.all(np.diff(f2) >= -1e-12)
    with pytest.raises(ValueError):
        emit_cdf(eq, np.array([]), str(tmp_path / "y.dat"))


def test_emit_cdf_swapped(tmp_path):
    ctx = MixedContext.from_pair(0.48, 0.6)
    eq = build_mixed(ctx, "M1", solve_w(ctx, "M1"))
    grid = np.arange(0, 101) * 0.01
    a, b = tmp_path / "a.dat", tmp_path / "b.dat"
    emit_cdf(eq, grid, str(a), swapped=False)
    emit_cdf(eq, grid, str(b), swapped=True)
    ra = [line.split() for line in a.read_text().splitlines()]
    rb = [line.split() for line in b.read_text().splitlines()]
    assert all(x[1] == y[3] and x[3] == y[1] for x, y in zip(ra, rb))


def test_region_record_is_plain_data():
    rec = RegionRecord(0.1, 0.6, 2, 0.0, 1.0, 0.9)
    assert rec.z1 == 0.1 and rec.region == 2
