"""Layer-by-layer finite-difference gradient checks plus the optimizer
and parameter-file contracts. Checks run in float64: float32 central
differences lose too many digits to certify a 1e-4 relative bound."""

import numpy as np
import pytest

from doudizhu import neural

RELATIVE_TOL = 1e-4
H = 1e-4


def as64(params):
    return {k: v.astype(np.float64) for k, v in params.items()}


def rel_err(a, b):
    denom = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1.0)
    return np.abs(a - b).max(initial=0.0) / denom


def check_layer(layer, x, rng, n_checks=12):
    """Analytic grads vs central differences through a random linear
    functional of the layer output."""
    params = {}
    layer.init(rng, params)
    params = as64(params)
    x = x.astype(np.float64)
    out, cache = layer.forward(params, x)
    coeffs = rng.standard_normal(out.shape)

    grads = {}
    dx = layer.backward(params, cache, coeffs, grads)

    def loss_at(p, xx):
        y, _ = layer.forward(p, xx)
        return float((y * coeffs).sum())

    # parameter gradients
    for name, value in params.items():
        flat = value.reshape(-1)
        idx = rng.integers(0, flat.size, size=min(n_checks, flat.size))
        for i in idx:
            orig = flat[i]
            flat[i] = orig + H
            up = loss_at(params, x)
            flat[i] = orig - H
            down = loss_at(params, x)
            flat[i] = orig
            fd = (up - down) / (2 * H)
            assert rel_err(np.array(fd), np.array(grads[name].reshape(-1)[i])) < RELATIVE_TOL

    # input gradients
    flat = x.reshape(-1)
    idx = rng.integers(0, flat.size, size=min(n_checks, flat.size))
    for i in idx:
        orig = flat[i]
        flat[i] = orig + H
        up = loss_at(params, x)
        flat[i] = orig - H
        down = loss_at(params, x)
        flat[i] = orig
        fd = (up - down) / (2 * H)
        assert rel_err(np.array(fd), np.array(dx.reshape(-1)[i])) < RELATIVE_TOL


N_INSTANCES = 100


class TestGradients:
    def test_dense(self):
        rng = np.random.default_rng(0)
        for _ in range(N_INSTANCES):
            layer = neural.Dense("d", int(rng.integers(1, 9)), int(rng.integers(1, 9)))
            check_layer(layer, rng.standard_normal((3, layer.in_dim)), rng)

    def test_relu(self):
        rng = np.random.default_rng(1)
        for _ in range(N_INSTANCES):
            x = rng.standard_normal((4, 6))
            x[np.abs(x) < 1e-2] += 0.1  # keep away from the kink
            check_layer(neural.Relu(), x, rng)

    def test_conv1d(self):
        rng = np.random.default_rng(2)
        for _ in range(N_INSTANCES):
            kernel = int(rng.integers(1, 5))
            layer = neural.Conv1d("c", kernel=kernel, stride=4,
                                  channels=int(rng.integers(1, 4)), length=60)
            check_layer(layer, rng.standard_normal((2, 60)), rng)

    def test_avg_pool(self):
        rng = np.random.default_rng(3)
        for _ in range(N_INSTANCES):
            check_layer(neural.AvgPool(axis=-2), rng.standard_normal((2, 5, 4)), rng)

    def test_residual_block(self):
        rng = np.random.default_rng(4)
        for i in range(N_INSTANCES):
            in_dim = int(rng.integers(2, 7))
            out_dim = in_dim if i % 2 else int(rng.integers(2, 7))
            layer = neural.ResidualBlock("r", in_dim, out_dim)
            check_layer(layer, rng.standard_normal((3, in_dim)), rng)

    def test_set_max_pool(self):
        rng = np.random.default_rng(5)
        for _ in range(N_INSTANCES):
            x = rng.standard_normal((5, 7))
            out, cache = neural.set_max_pool(x)
            coeffs = rng.standard_normal(out.shape)
            dx = neural.set_max_pool_backward(cache, coeffs)
            flat = x.reshape(-1)
            for i in rng.integers(0, flat.size, size=10):
                orig = flat[i]
                flat[i] = orig + H
                up = float((neural.set_max_pool(x)[0] * coeffs).sum())
                flat[i] = orig - H
                down = float((neural.set_max_pool(x)[0] * coeffs).sum())
                flat[i] = orig
                fd = (up - down) / (2 * H)
                assert abs(fd - dx.reshape(-1)[i]) < RELATIVE_TOL * max(1.0, abs(fd))

    def test_concat(self):
        rng = np.random.default_rng(6)
        for _ in range(N_INSTANCES):
            parts = [rng.standard_normal((2, int(rng.integers(1, 5)))) for _ in range(3)]
            out, cache = neural.concat(parts)
            coeffs = rng.standard_normal(out.shape)
            backs = neural.concat_backward(cache, coeffs)
            recon = np.concatenate(backs, axis=-1)
            assert np.array_equal(recon, coeffs)
            assert [b.shape for b in backs] == [p.shape for p in parts]


class TestLayerBasics:
    def test_identity_dense(self):
        layer = neural.Dense("d", 4, 4)
        params = {"d.W": np.eye(4, dtype=np.float32), "d.b": np.zeros(4, dtype=np.float32)}
        x = np.random.default_rng(0).standard_normal((3, 4)).astype(np.float32)
        y, _ = layer.forward(params, x)
        assert np.array_equal(y, x)

    def test_relu_all_negative(self):
        y, _ = neural.Relu().forward({}, -np.ones((2, 3), dtype=np.float32))
        assert np.array_equal(y, np.zeros((2, 3), dtype=np.float32))

    def test_set_max_pool_of_copies(self):
        v = np.random.default_rng(1).standard_normal(6).astype(np.float32)
        x = np.stack([v] * 4)
        out, _ = neural.set_max_pool(x)
        assert np.array_equal(out, v)

    def test_set_max_pool_tie_routes_to_first(self):
        x = np.zeros((3, 2), dtype=np.float32)
        out, cache = neural.set_max_pool(x)
        dx = neural.set_max_pool_backward(cache, np.ones(2, dtype=np.float32))
        assert np.array_equal(dx[0], np.ones(2)) and not dx[1:].any()

    def test_residual_zero_second_layer_is_identity(self):
        layer = neural.ResidualBlock("r", 5, 5)
        params = {}
        layer.init(np.random.default_rng(0), params)
        params["r.fc2.W"] = np.zeros_like(params["r.fc2.W"])
        params["r.fc2.b"] = np.zeros_like(params["r.fc2.b"])
        x = np.random.default_rng(1).standard_normal((4, 5)).astype(np.float32)
        y, _ = layer.forward(params, x)
        assert np.array_equal(y, x)

    def test_forward_determinism(self):
        layer = neural.ResidualBlock("r", 8, 8)
        params = {}
        layer.init(np.random.default_rng(3), params)
        x = np.random.default_rng(4).standard_normal((5, 8)).astype(np.float32)
        a, _ = layer.forward(params, x)
        b, _ = layer.forward(params, x)
        assert np.array_equal(a, b)


class TestAdam:
    def test_zero_gradients_keep_parameters(self):
        params = {"w": np.ones(3, dtype=np.float32)}
        opt = neural.Adam(lr=0.1)
        opt.step(params, {"w": np.zeros(3, dtype=np.float32)})
        assert np.array_equal(params["w"], np.ones(3, dtype=np.float32))

    def test_quadratic_descent(self):
        params = {"w": np.array([3.0, -2.0], dtype=np.float32)}
        opt = neural.Adam(lr=0.05)
        losses = []
        for _ in range(100):
            losses.append(float((params["w"] ** 2).sum()))
            opt.step(params, {"w": 2 * params["w"]})
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_bitwise_determinism(self):
        def run():
            rng = np.random.default_rng(9)
            layer = neural.Dense("d", 6, 4)
            params = {}
            layer.init(rng, params)
            opt = neural.Adam(lr=1e-3)
            x = rng.standard_normal((8, 6)).astype(np.float32)
            for _ in range(20):
                y, cache = layer.forward(params, x)
                grads = {}
                layer.backward(params, cache, y, grads)
                opt.step(params, grads)
            return params

        a, b = run(), run()
        assert all(np.array_equal(a[k], b[k]) for k in a)


class TestParamFiles:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        params = {
            "a.W": rng.standard_normal((3, 4)).astype(np.float32),
            "b": np.arange(5, dtype=np.int64),
        }
        path = str(tmp_path / "p.bin")
        neural.save_params(path, params)
        loaded = neural.load_params(path, {"a.W": (3, 4), "b": (5,)})
        assert set(loaded) == set(params)
        for k in params:
            assert np.array_equal(loaded[k], params[k])

    def test_shape_validation(self, tmp_path):
        path = str(tmp_path / "p.bin")
        neural.save_params(path, {"w": np.zeros((2, 2), dtype=np.float32)})
        with pytest.raises(ValueError):
            neural.load_params(path, {"w": (3, 3)})
        with pytest.raises(ValueError):
            neural.load_params(path, {"missing": (1,)})

    def test_magic_validation(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(ValueError):
            neural.load_params(str(path))
