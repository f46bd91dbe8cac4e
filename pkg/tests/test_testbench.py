import numpy as np
import pytest

from helmsplit.geometry import point_in_interior, starfish_curve
from helmsplit.system import ConfigurationError
from helmsplit.testbench import (FARFIELD_COLUMNS, NEARFIELD_COLUMNS, ExperimentConfig, PointSource,
                                 default_sources, exact_field, far_field_points, near_field_points,
                                 resolve_eta, run_far_field, run_field_map, run_near_field)


def test_single_source_value(oracles):
    u = exact_field([PointSource(0j, 1.0)], 1.0, np.array([1.0 + 0j]))
    assert abs(u[0] - complex(*oracles["point_source_k1"])) < 1e-15


def test_field_is_linear_in_strengths():
    z = np.array([1.0 + 0.3j, -0.8j])
    a, b = default_sources()[:2]
    both = exact_field([a, b], 7.0, z)
    assert np.abs(both - exact_field([a], 7.0, z) - exact_field([b], 7.0, z)).max() < 1e-16
    doubled = exact_field([PointSource(a.position, 2 * a.strength)], 7.0, z)
    assert np.abs(doubled - 2 * exact_field([a], 7.0, z)).max() < 1e-16


def test_field_solves_helmholtz():
    k, h = 28.0, 2e-4
    z = np.array([0.9 + 0.2j, -0.5 - 0.9j])
    f = lambda p: exact_field(default_sources(), k, p)
    lap = (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h**2
    assert np.abs(lap + k * k * f(z)).max() < 1e-5 * k * k * np.abs(f(z)).max()


def test_field_rejects_source_location():
    with pytest.raises(ValueError):
        exact_field(default_sources(), 1.0, np.array([default_sources()[0].position]))


def test_sources_inside_starfish():
    sources = default_sources()
    pos = np.array([s.position for s in sources])
    assert np.all(point_in_interior(starfish_curve(), pos))
    assert np.all((np.abs(pos) >= 0.1) & (np.abs(pos) <= 0.2))
    assert all(0 < s.strength < 1 for s in sources)


def test_evaluation_point_sets():
    assert far_field_points().size == 9
    assert np.allclose(np.abs(far_field_points()), 1.25)
    z = near_field_points()
    assert z.size == 28460
    assert not point_in_interior(starfish_curve(), z).any()


def test_eta_rules():
    assert resolve_eta("k/2", 10) == 5.0
    assert resolve_eta("-k", 10) == -10.0
    assert resolve_eta("3.5", 10) == 3.5
    with pytest.raises(ConfigurationError):
        resolve_eta("2k", 10)


@pytest.mark.parametrize("change", [dict(scheme="E"), dict(n_pt=20), dict(n_pan=[2]), dict(k=0.0),
                                    dict(tol=1e-20), dict(eta="banana")])
def test_config_validation(change):
    with pytest.raises(ConfigurationError):
        ExperimentConfig(**change).validate()


def _read_csv(path):
    lines = path.read_text().splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return header, body[0].split(","), [row.split(",") for row in body[1:]]


def test_far_field_csv(tmp_path):
    cfg = ExperimentConfig(scheme="B", n_pan=[16, 24], out=str(tmp_path / "far.csv"))
    reports = run_far_field(cfg)
    header, columns, rows = _read_csv(tmp_path / "far.csv")
    assert tuple(columns) == FARFIELD_COLUMNS
    assert [int(r[0]) for r in rows] == [16, 24]
    assert any(h.startswith("# scheme:") for h in header)
    assert float(rows[1][2]) == reports[1].max_rel_err
    assert reports[1].max_rel_err < 1e-12


def test_csv_is_deterministic(tmp_path):
    cols = ("n_pan", "n_unknowns", "max_rel_err", "gmres_iters")
    out = []
    for name in ("a.csv", "b.csv"):
        run_far_field(ExperimentConfig(scheme="C", n_pan=[20], out=str(tmp_path / name)))
        _, columns, rows = _read_csv(tmp_path / name)
        out.append([[r[columns.index(c)] for c in cols] for r in rows])
    assert out[0] == out[1]


def test_near_field_report(tmp_path):
    cfg = ExperimentConfig(scheme="B", n_pan=[24], out=str(tmp_path / "near.csv"))
    rep = run_near_field(cfg, grid_n=40)[0]
    _, columns, rows = _read_csv(tmp_path / "near.csv")
    assert tuple(columns) == NEARFIELD_COLUMNS
    assert rep.n_points == int(rows[0][2])
    assert rep.avg_norm_err < 1e-10 and rep.max_norm_err >= rep.avg_norm_err


def test_field_map_files(tmp_path):
    cfg = ExperimentConfig(scheme="B", n_pan=[48], out=str(tmp_path / "map"))
    re_u, err = run_field_map(cfg, grid_n=30)
    data = np.fromfile(tmp_path / "map.f64", dtype="<f8").reshape(30, 30)
    errs = np.fromfile(tmp_path / "map.err.f64", dtype="<f8").reshape(30, 30)
    assert np.array_equal(data, re_u, equal_nan=True)
    assert np.array_equal(errs, err, equal_nan=True)
    assert np.isnan(data[15, 15])
    assert np.nanmax(errs) < -12
    meta = (tmp_path / "map.meta").read_text()
    assert "rows: 30" in meta and "NaN" in meta
