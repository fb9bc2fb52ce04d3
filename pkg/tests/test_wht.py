import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from whqrom.errors import ParseError, RangeError, ShapeError
from whqrom.wht import (
    SampledFunction,
    quantize,
    wht_forward,
    wht_inverse,
    diag_error,
    minimal_truncation,
    truncation_error_curve,
    read_theta,
    read_theta_binary,
    read_theta_csv,
)


def random_function(rng, eta, d):
    half = 1 << (d - 1)
    values = rng.integers(-half, half, size=1 << eta, dtype=np.int64)
    return SampledFunction(eta=eta, d=d, values=values)


def naive_wht(values):
    n = len(values)
    out = np.zeros(n, dtype=np.int64)
    for z in range(n):
        acc = 0
        for x in range(n):
            acc += -int(values[x]) if bin(x & z).count("1") & 1 else int(values[x])
        out[z] = acc
    return out


class TestQuantize:
    def test_zero_function(self):
        f = quantize(np.zeros(16), d=8)
        assert f.eta == 4 and f.d == 8
        assert np.all(f.values == 0)

    def test_lower_boundary(self):
        f = quantize(np.full(8, -1.0), d=4)
        assert np.all(f.values == -8)

    def test_linear_ramp_matches_direct_formula(self):
        eta, d = 3, 5
        theta = np.array([x / 2**eta for x in range(2**eta)])
        f = quantize(theta, d=d)
        expected = [int(np.floor(2 ** (d - 1) * t)) for t in theta]
        assert list(f.values) == expected

    def test_out_of_range_sample(self):
        with pytest.raises(RangeError):
            quantize(np.array([0.0, 1.0]), d=4)

    def test_non_power_of_two(self):
        with pytest.raises(ShapeError):
            quantize(np.zeros(6), d=4)

    def test_width_guard(self):
        with pytest.raises(RangeError):
            quantize(np.zeros(2**4), d=60)


class TestForward:
    def test_constant_concentrates_at_zero(self):
        f = SampledFunction(eta=4, d=6, values=np.full(16, 7))
        s = wht_forward(f)
        assert s.coeffs[0] == 16 * 7
        assert np.all(s.coeffs[1:] == 0)

    def test_single_character(self):
        eta, z0, c = 5, 0b10110, 9
        x = np.arange(1 << eta)
        signs = 1 - 2 * (np.bitwise_count(np.uint64(z0) & x.astype(np.uint64)) & 1).astype(np.int64)
        f = SampledFunction(eta=eta, d=6, values=c * signs)
        s = wht_forward(f)
        expected = np.zeros(1 << eta, dtype=np.int64)
        expected[z0] = c << eta
        assert np.array_equal(s.coeffs, expected)

    def test_matches_naive_double_loop(self):
        rng = np.random.default_rng(7)
        f = random_function(rng, eta=6, d=7)
        assert np.array_equal(wht_forward(f).coeffs, naive_wht(f.values))

    def test_coefficient_width(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            f = random_function(rng, eta=5, d=6)
            s = wht_forward(f)
            assert s.b == 11
            assert np.max(np.abs(s.coeffs)) <= 1 << (s.b - 1)


class TestInverse:
    def test_round_trip(self):
        rng = np.random.default_rng(11)
        for eta in (1, 4, 8, 12):
            f = random_function(rng, eta=eta, d=5)
            g = wht_inverse(wht_forward(f))
            assert all(gx == Fraction(int(fx)) for gx, fx in zip(g, f.values))

    def test_single_dc_coefficient(self):
        eta = 3
        coeffs = np.zeros(8, dtype=np.int64)
        coeffs[0] = 1 << eta
        from whqrom.wht import WalshSpectrum

        g = wht_inverse(WalshSpectrum(eta=eta, b=eta + 2, coeffs=coeffs))
        assert all(v == 1 for v in g)

    def test_full_truncation_reproduces_f(self):
        rng = np.random.default_rng(13)
        f = random_function(rng, eta=6, d=5)
        trunc = minimal_truncation(f, epsilon=1e-30)
        g = wht_inverse(trunc)
        assert all(gx == Fraction(int(fx)) for gx, fx in zip(g, f.values))


@settings(max_examples=40, deadline=None)
@given(
    eta=st.integers(min_value=0, max_value=8),
    d=st.integers(min_value=1, max_value=10),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_involution_property(eta, d, seed):
    # forward applied twice returns 2**eta * f exactly
    rng = np.random.default_rng(seed)
    f = random_function(rng, eta, d)
    once = wht_forward(f).coeffs
    twice = naive_like_butterfly(once)
    assert np.array_equal(twice, np.asarray(f.values) << eta)


def naive_like_butterfly(coeffs):
    from whqrom.wht import _butterfly

    return _butterfly(coeffs)


@settings(max_examples=40, deadline=None)
@given(
    eta=st.integers(min_value=0, max_value=8),
    d=st.integers(min_value=1, max_value=10),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_parseval_style_bound(eta, d, seed):
    rng = np.random.default_rng(seed)
    f = random_function(rng, eta, d)
    s = wht_forward(f)
    bound = (1 << eta) * max(1, int(np.max(np.abs(f.values))))
    assert int(np.max(np.abs(s.coeffs))) <= bound


class TestDiagError:
    def test_equal_inputs(self):
        f = SampledFunction(eta=3, d=5, values=np.arange(8))
        assert diag_error(f, list(f.values)) == 0.0

    def test_half_period_wraparound(self):
        d = 6
        f = SampledFunction(eta=2, d=d, values=np.zeros(4, dtype=np.int64))
        g = np.full(4, -(1 << (d - 1)))
        assert diag_error(f, g) == pytest.approx(0.0, abs=1e-12)

    def test_quarter_period_maximal(self):
        d = 6
        f = SampledFunction(eta=2, d=d, values=np.zeros(4, dtype=np.int64))
        g = np.full(4, -(1 << (d - 2)))
        assert diag_error(f, g) == pytest.approx(2.0, abs=1e-12)

    def test_length_mismatch(self):
        f = SampledFunction(eta=2, d=4, values=np.zeros(4, dtype=np.int64))
        with pytest.raises(ShapeError):
            diag_error(f, [0, 0, 0])

    def test_accepts_fractions(self):
        f = SampledFunction(eta=2, d=4, values=np.array([1, 2, 3, -4]))
        g = [Fraction(1, 4), Fraction(2), Fraction(3), Fraction(-4)]
        expected = 2 * abs(np.sin(2 * np.pi / 16 * 0.75))
        assert diag_error(f, g) == pytest.approx(expected, rel=1e-12)

    def test_explicit_width_overrides_period(self):
        f = SampledFunction(eta=1, d=4, values=np.array([4, 0]))
        g = [0, 0]
        # against d = 4 the gap of 4 is a quarter period (max distance);
        # against d = 5 it is an eighth
        assert diag_error(f, g) == pytest.approx(2.0, abs=1e-12)
        assert diag_error(f, g, d=5) == pytest.approx(
            2 * np.sin(2 * np.pi / 32 * 4), rel=1e-12
        )

    def test_bare_sequences_need_explicit_width(self):
        with pytest.raises(RangeError):
            diag_error([1, 2], [0, 0])
        assert diag_error([1, 2], [1, 2], d=4) == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31), d=st.integers(min_value=2, max_value=8))
def test_diag_error_pseudometric(seed, d):
    rng = np.random.default_rng(seed)
    eta = 3
    f = random_function(rng, eta, d)
    a = list(f.values)
    b = list(rng.integers(-(1 << (d - 1)), 1 << (d - 1), size=1 << eta))
    c = list(rng.integers(-(1 << (d - 1)), 1 << (d - 1), size=1 << eta))
    d_ab = diag_error(f, b)
    d_ab_swapped = diag_error(SampledFunction(eta=eta, d=d, values=np.array(b)), a)
    assert d_ab == pytest.approx(d_ab_swapped, abs=1e-12)
    fa = SampledFunction(eta=eta, d=d, values=np.array(a))
    fb = SampledFunction(eta=eta, d=d, values=np.array(b))
    assert diag_error(fa, c) <= diag_error(fa, b) + diag_error(fb, c) + 1e-12


class TestMinimalTruncation:
    def test_constant_function(self):
        f = SampledFunction(eta=4, d=6, values=np.full(16, 5))
        trunc = minimal_truncation(f, epsilon=0.25)
        assert trunc.k == 1 and trunc.support == {0}

    def test_zero_function(self):
        f = SampledFunction(eta=4, d=6, values=np.zeros(16, dtype=np.int64))
        assert minimal_truncation(f, epsilon=0.25).k == 0

    def test_two_equal_characters_need_both(self):
        # f = m(-1)^<x,z1> + m(-1)^<x,z2>: either alone leaves error above
        # its own contribution, so the scan must take k = 2.
        eta, d, m = 4, 8, 3
        z1, z2 = 0b0011, 0b0101
        x = np.arange(1 << eta, dtype=np.uint64)

        def ch(z):
            return 1 - 2 * (np.bitwise_count(x & np.uint64(z)) & 1).astype(np.int64)

        f = SampledFunction(eta=eta, d=d, values=m * ch(z1) + m * ch(z2))
        eps_one = diag_error(f, m * ch(z1))
        trunc = minimal_truncation(f, epsilon=eps_one * 0.5)
        assert trunc.k == 2
        assert trunc.support == {z1, z2}

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(23)
        eta, d = 8, 8
        f = random_function(rng, eta, d)
        eps = 2.0**-10
        curve = truncation_error_curve(f)
        expected_k = int(np.nonzero(curve < eps)[0][0])
        assert minimal_truncation(f, eps).k == expected_k

    def test_result_error_below_epsilon_and_scan_consistent(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            eta = int(rng.integers(2, 8))
            d = int(rng.integers(3, 9))
            f = random_function(rng, eta, d)
            eps = float(2.0 ** -rng.integers(2, 9))
            trunc = minimal_truncation(f, eps)
            assert trunc.error(f) < eps
            if trunc.k > 0:
                shrunk = type(trunc)(base=trunc.base, k=trunc.k - 1, order=trunc.order)
                assert shrunk.error(f) >= eps

    def test_full_truncation_error_exactly_zero(self):
        rng = np.random.default_rng(31)
        f = random_function(rng, eta=5, d=6)
        trunc = minimal_truncation(f, epsilon=1e-300)
        assert trunc.error(f) == 0.0

    def test_k_equal_full_domain_error_exactly_zero(self):
        from whqrom.wht import TruncatedSpectrum

        rng = np.random.default_rng(33)
        f = random_function(rng, eta=6, d=5)
        trunc = minimal_truncation(f, epsilon=0.5)
        full = TruncatedSpectrum(base=trunc.base, k=f.n, order=trunc.order)
        assert full.error(f) == 0.0


@settings(max_examples=30, deadline=None)
@given(
    eta=st.integers(min_value=1, max_value=7),
    d=st.integers(min_value=2, max_value=8),
    seed=st.integers(min_value=0, max_value=2**31),
    frac=st.floats(min_value=0.0, max_value=1.0),
)
def test_truncation_retains_largest_magnitudes(eta, d, seed, frac):
    rng = np.random.default_rng(seed)
    f = random_function(rng, eta, d)
    trunc = minimal_truncation(f, epsilon=1e-300)
    k = int(frac * len(trunc.order))
    clipped = type(trunc)(base=trunc.base, k=k, order=trunc.order)
    coeffs = np.abs(trunc.base.coeffs)
    retained = [coeffs[z] for z in clipped.order[:k]]
    dropped = [coeffs[z] for z in clipped.order[k:]]
    if retained and dropped:
        assert min(retained) >= max(dropped)

    def test_accelerated_agrees_on_seeded_cases(self):
        rng = np.random.default_rng(37)
        for _ in range(8):
            eta = int(rng.integers(2, 7))
            d = int(rng.integers(3, 8))
            f = random_function(rng, eta, d)
            eps = float(2.0 ** -rng.integers(2, 8))
            assert (
                minimal_truncation(f, eps, accelerated=True).k
                == minimal_truncation(f, eps).k
            )

    def test_tie_break_smaller_mask_first(self):
        eta, d, m = 3, 6, 4
        x = np.arange(1 << eta, dtype=np.uint64)
        ch = lambda z: 1 - 2 * (np.bitwise_count(x & np.uint64(z)) & 1).astype(np.int64)
        f = SampledFunction(eta=eta, d=d, values=m * ch(0b110) + m * ch(0b011))
        trunc = minimal_truncation(f, epsilon=1e-30)
        assert trunc.order[0] == 0b011  # equal magnitude, smaller mask first

    def test_epsilon_validation(self):
        f = SampledFunction(eta=2, d=4, values=np.zeros(4, dtype=np.int64))
        with pytest.raises(RangeError):
            minimal_truncation(f, epsilon=0.0)


class TestFileIngestion:
    def test_binary_round_trip(self, tmp_path):
        rng = np.random.default_rng(41)
        data = rng.uniform(-1, 1, size=64)
        path = tmp_path / "theta.f64"
        path.write_bytes(data.astype("<f8").tobytes())
        assert np.array_equal(read_theta_binary(path), data)

    def test_csv_round_trip(self, tmp_path):
        data = np.array([0.5, -0.25, 0.125, -0.0625])
        path = tmp_path / "theta.csv"
        path.write_text("".join(f"{float(v)!r}\n" for v in data))
        assert np.allclose(read_theta_csv(path), data)

    def test_csv_and_binary_agree(self, tmp_path):
        rng = np.random.default_rng(43)
        data = rng.uniform(-1, 1, size=32)
        b = tmp_path / "t.f64"
        c = tmp_path / "t.csv"
        b.write_bytes(data.astype("<f8").tobytes())
        c.write_text("".join(f"{float(v)!r}\n" for v in data))
        fb = quantize(read_theta(b), d=10)
        fc = quantize(read_theta(c), d=10)
        assert np.array_equal(fb.values, fc.values)

    def test_csv_parse_error_carries_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.5\nnot-a-number\n")
        with pytest.raises(ParseError, match=":2"):
            read_theta_csv(path)

    def test_binary_length_validation(self, tmp_path):
        path = tmp_path / "bad.f64"
        path.write_bytes(b"\x00" * 24)  # 3 floats, not a power of two
        with pytest.raises(ParseError):
            read_theta_binary(path)
