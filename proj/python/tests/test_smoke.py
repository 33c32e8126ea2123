import numpy as np
import pytest

import pulearn as pl

X0 = np.array([0.09205746178983236, 0.5523447707389941, 0.8285171561084912])


def test_rotation_recovered_on_both_channels():
    g = pl.euler_rotation(0.1, 0.4, 0.7)
    sample = pl.generate_trajectory(g, X0, 1000, 1, True)
    for channel in (pl.Channel.gram, pl.Channel.unit):
        u, report = pl.recover_dynamics(sample, channel)
        assert report.converged
        assert pl.max_diff_up_to_sign(u, g) < 1e-12
        assert report.iterations[-1].penalty == pytest.approx(3.0, abs=1e-12)


def test_one_row_solution_is_top_eigenvector():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(30, 4))
    f = rng.normal(size=(30, 1))
    tensor = pl.build_tensor_pairs(pl.Sample(x, f))
    report = pl.solve(tensor)
    assert report.converged
    top = np.linalg.eigvalsh(tensor.s)[-1]
    assert report.fidelity == pytest.approx(top, rel=1e-10)
    assert np.allclose(report.u @ report.u.T, np.eye(1), atol=1e-12)


def test_tensor_matches_direct_sum():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 3))
    f = rng.normal(size=(20, 2))
    w = rng.uniform(0.5, 1.5, size=20)
    tensor = pl.build_tensor_pairs(pl.Sample(x, f, w))
    u = rng.normal(size=(2, 3))
    direct = sum(wl * (fl @ u @ xl) ** 2 for wl, xl, fl in zip(w, x, f))
    assert pl.fidelity(u, tensor) == pytest.approx(direct, rel=1e-12)


def test_polynomial_mapping_triangle():
    sample = pl.generate_poly_sample(11, 6, 500, 1)
    u, report = pl.recover_poly_mapping(sample, 3, 3)
    assert report.converged
    expected = np.array([[1, 0, 0], [0, 1, 0], [0.25, 0, 0.75]])
    assert pl.max_diff_up_to_sign(u, expected) < 1e-10


def test_errors_are_typed():
    with pytest.raises(pl.InputError):
        pl.Sample(np.ones((3, 1)), np.ones((3, 2)))
    flat = pl.Sample(np.array([[1.0, 1.0], [2.0, 2.0], [-1.0, -1.0]]),
                     np.array([[1.0], [1.0], [2.0]]))
    with pytest.raises(pl.DegenerateError):
        pl.regularize(flat)
    assert issubclass(pl.DegenerateError, pl.Error)


def test_sample_file_round_trip(tmp_path):
    sample = pl.generate_scalar_sample(50, 3)
    path = str(tmp_path / "s.csv")
    pl.write_sample(path, sample)
    back = pl.read_sample(path)
    assert np.array_equal(back.x, sample.x)
    assert np.array_equal(back.f, sample.f)


def test_interpolation_least_squares_is_exact_for_square():
    sample = pl.generate_scalar_sample(300, 5)
    model = pl.InterpolationModel(sample.x[:, 0], sample.f[:, 0], sample.weights, 5, 5)
    assert model.report.converged
    for y in (-0.7, 0.0, 0.4):
        p = model.evaluate(y)
        assert p.f_ls == pytest.approx(y * y, abs=1e-8)
        assert sample.f.min() <= p.f_rn <= sample.f.max()
