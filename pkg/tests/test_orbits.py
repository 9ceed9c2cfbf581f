import json
import math

import mpmath
import numpy as np
import pytest

from betadyn import orbits as ob
from betadyn.errors import Divergent, TroubleSpot

PHI = (1 + 5**0.5) / 2


def necklace_oracle(n):
    """Count binary Lyndon words of length n by brute force."""
    count = 0
    for w in range(2**n):
        s = format(w, f"0{n}b")
        if all(s < s[i:] + s[:i] for i in range(1, n)):
            count += 1
    return count


def mp_root(bits):
    mpmath.mp.dps = 50
    k = len(bits) - 1
    f = lambda z: z ** (k + 1) - sum(b * z ** (k - j) for j, b in enumerate(bits))  # noqa: E731
    return mpmath.findroot(f, (mpmath.mpf(1), mpmath.mpf(2)), solver="anderson")


def dynamically_admissible(n):
    """p_n is admissible iff the midpoint orbit of its root returns to 1/2
    after exactly k steps, emitting the digits b_0 .. b_(k-1) on the way."""
    bits = [int(c) for c in format(2 * n + 1, "b")]
    k = len(bits) - 1
    beta = mp_root(bits)
    half = mpmath.mpf(1) / 2
    m = beta / 2
    for j in range(k):
        if abs(m - half) < mpmath.mpf(10) ** -30:
            return False
        if int(m >= half) != bits[j]:
            return False
        m = beta * m if m < half else beta * (m - half)
    return abs(m - half) < mpmath.mpf(10) ** -30


def test_necklace_counts():
    assert ob.necklace_count(1) == 2
    assert ob.necklace_count(7) == 18
    assert ob.necklace_count(12) == 335
    for n in range(1, 13):
        assert ob.necklace_count(n) == necklace_oracle(n)


def test_admissible_examples():
    assert [p.index for p in ob.admissible_polys(5)] == [8, 10, 12, 13, 14, 15]
    assert [p.index for p in ob.admissible_polys(6)] == [16, 20, 24, 25, 26, 28, 29, 30, 31]


@pytest.mark.parametrize("order", range(2, 10))
def test_admissible_against_dynamics(order):
    got = [p.index for p in ob.admissible_polys(order)]
    want = [n for n in range(2 ** (order - 2), 2 ** (order - 1)) if dynamically_admissible(n)]
    assert got == want


def test_admissible_counts_match_necklaces():
    for p in range(2, 15):
        assert len(ob.admissible_polys(p)) == ob.necklace_count(p)


def test_positive_roots():
    assert ob.positive_root(1) == pytest.approx(PHI, abs=1e-13)
    assert ob.positive_root(3) == pytest.approx(1.839286755214161, abs=1e-13)
    assert ob.positive_root(8) == pytest.approx(1.324717957244746, abs=1e-13)
    for order in range(2, 9):
        for p in ob.admissible_polys(order):
            assert p.root == pytest.approx(float(mp_root(list(p.bits))), abs=1e-13)


def test_poly_bits():
    np.testing.assert_array_equal(ob.poly_bits(16), [1, 0, 0, 0, 0, 1])
    assert ob.orbit_poly(3).degree == 3


# ------------------------------------------------------------ sequences


def test_beta_fibonacci_examples():
    assert ob.beta_fibonacci([1, 1], 7) == [1, 1, 2, 3, 5, 8, 13]
    seq = ob.beta_fibonacci_of(1.6, 16)
    assert seq == [1, 1, 1, 2, 3, 5, 8, 12, 20, 32, 51, 82, 130, 209, 335, 535]
    assert seq[-1] / seq[-2] == pytest.approx(1.597, abs=1e-3)


def test_beta_fibonacci_big_integers():
    f = ob.beta_fibonacci([1, 1, 1, 1, 1], 120)
    assert all(isinstance(x, int) for x in f)
    assert f[-1] > 2**64
    # exact recurrence
    assert all(f[j] == sum(f[j - 5:j]) for j in range(5, 120))


def test_beta_fibonacci_ratio_limit(rng):
    # the ratio converges like |lambda_2 / beta|^m, which is too slow near
    # beta = 1 to reach 1e-6 by m = 80; sample where it is reachable
    betas = np.concatenate([rng.uniform(1.3, 1.98, 17), [1.6, PHI + 0.01, 1.9]])
    for beta in betas:
        f = ob.beta_fibonacci_of(float(beta), 81)
        assert f[80] / f[79] == pytest.approx(beta, abs=1e-6)
    f = ob.beta_fibonacci_of(1.1, 2001)
    assert f[2000] / f[1999] == pytest.approx(1.1, abs=1e-6)


def test_ogf_identity():
    for n in (1, 3, 8, 16, 25):
        bits = ob.poly_bits(n)
        k = len(bits) - 1
        coeffs = ob.ogf_check(bits, 40)
        assert coeffs == [int(j == k) for j in range(40)]


def test_doubled_bits_share_growth_only():
    bits = [1, 1]
    d = ob.doubled_bits(bits)
    np.testing.assert_array_equal(d, [1, 0, 1, 1])
    a, b = ob.beta_fibonacci(bits, 60), ob.beta_fibonacci(d, 60)
    assert a != b
    assert a[-1] / a[-2] == pytest.approx(b[-1] / b[-2], rel=1e-9)


def test_orbit_encoding():
    np.testing.assert_array_equal(ob.orbit_encoding(PHI, 10), [1, 1])
    np.testing.assert_array_equal(ob.orbit_encoding(1.839286755214161, 10), [1, 1, 1])
    np.testing.assert_array_equal(ob.orbit_encoding(2.0, 12), np.ones(12))
    for order in range(2, 15):
        for p in ob.admissible_polys(order):
            np.testing.assert_array_equal(ob.orbit_encoding(p.root, 40), p.bits)


# ------------------------------------------------------------ matrices


def test_shift_matrix_golden():
    B = ob.shift_matrix(ob.orbit_poly(1))
    np.testing.assert_array_equal(B, [[1, 1], [1, 0]])
    np.testing.assert_array_equal(ob.matrix_power_exact(B, 2).astype(int), [[2, 1], [1, 1]])


def test_shift_matrix_powers_track_sequence():
    for n in (3, 8, 25):
        p = ob.orbit_poly(n)
        F = ob.beta_fibonacci(p.bits, 50)
        top = list(ob.matrix_power_exact(ob.shift_matrix(p), 40)[0])
        assert top == [F[40 - j] for j in range(len(p.bits))]


def test_charpoly():
    for order in range(2, 9):
        for p in ob.admissible_polys(order):
            B = ob.shift_matrix(p)
            assert ob.charpoly_check(B) < 1e-9
            # oracle: numpy's characteristic polynomial
            np.testing.assert_allclose(np.poly(B.astype(float)), ob.poly_coeffs(p.bits), atol=1e-9)


# ------------------------------------------------------------ q-series


def test_q_series_reciprocal_root():
    for order in range(2, 11):
        for p in ob.admissible_polys(order):
            assert abs(ob.q_series(p.bits, 1 / p.root)) < 1e-12


def test_q_zeros_examples():
    z = ob.q_zeros([1, 1])
    np.testing.assert_allclose(sorted(z.real), [-PHI, 1 / PHI])
    z16 = ob.q_zeros(ob.poly_bits(16))
    real = z16[np.abs(z16.imag) < 1e-12].real
    assert np.min(np.abs(real - 0.7780895986786)) < 1e-12
    assert 1 / 0.7780895986786 == pytest.approx(1.28519903324535, abs=1e-11)


def test_q_zeros_against_mpmath():
    for n in (16, 25, 57):
        bits = [int(b) for b in ob.poly_bits(n)]
        mpmath.mp.dps = 40
        ref = mpmath.polyroots([-b for b in reversed(bits)] + [1], maxsteps=200, extraprec=200)
        ref = np.array([complex(r) for r in ref])
        got = ob.q_zeros(bits)
        assert np.max(np.min(np.abs(got[:, None] - ref[None, :]), axis=1)) < 1e-12


def test_q_series_periodic(rng):
    bits = [1, 0, 1]
    period = (bits[:-1] + [0]) * 400
    zs = 0.9 * rng.random(20) * np.exp(2j * np.pi * rng.random(20))
    for z in zs:
        direct = ob.q_series(period, z)  # long truncation of the periodic string
        assert ob.q_series_periodic(bits, z) == pytest.approx(direct, abs=1e-12)
    with pytest.raises(Divergent):
        ob.q_series_periodic(bits, 1.0)


def test_poly_zeros_inside_radius_two():
    for order in range(2, 11):
        for p in ob.admissible_polys(order):
            assert np.all(np.abs(np.roots(ob.poly_coeffs(p.bits))) < 2)


def test_eigencheck():
    p = ob.orbit_poly(16)
    assert ob.bshift_operator_eigencheck(p, 1 / p.root) < 1e-12
    for z in ob.q_zeros(p.bits):
        if abs(z) <= 1:
            assert ob.bshift_operator_eigencheck(p, z) < 1e-9
    assert ob.bshift_operator_eigencheck(p, 0.3 + 0.4j) > 1e-3


# ------------------------------------------------------------ factorisation


def test_factor_coeffs():
    p1 = ob.orbit_poly(1)
    np.testing.assert_allclose(ob.factor_coeffs(p1, p1.root), [1, PHI - 1])
    p3 = ob.orbit_poly(3)
    assert ob.factor_coeffs(p3, p3.root)[-1] == pytest.approx(0.54368901269207, abs=1e-12)
    for order in range(2, 7):
        for p in ob.admissible_polys(order):
            quot, rem = np.polydiv(ob.poly_coeffs(p.bits), [1.0, -p.root])
            np.testing.assert_allclose(ob.factor_coeffs(p, p.root), quot, atol=1e-12)
            assert abs(rem[-1]) < 1e-12


def test_hare_series():
    assert ob.hare_series(1, 60) == pytest.approx(PHI, abs=2e-7)
    assert ob.hare_series(1, 200) == pytest.approx(PHI, abs=1e-12)
    assert ob.hare_series(2) == pytest.approx(1.839286755214161, abs=1e-14)
    assert ob.hare_series(4) == pytest.approx(1.965948236645485, abs=1e-14)


# ------------------------------------------------------------ midpoints


def test_midpoint_identity():
    np.testing.assert_array_equal(ob.midpoint_digits(PHI, 6)[:2], [1, 1])
    assert ob.midpoint_identity(PHI, 60) < 1e-10
    assert ob.midpoint_identity(1.6, 120) < 1e-12
    assert ob.midpoint_identity(2.0, 40) == pytest.approx(2.0**-39)


def test_midpoint_product():
    assert ob.midpoint_product(1.6, 0) == 1.0
    assert ob.midpoint_product(2.0, 10) == 2.0**10
    val = ob.midpoint_product(1.6, 20)
    pts = [0.8]
    for _ in range(19):
        m = pts[-1]
        pts.append(1.6 * m if m < 0.5 else 1.6 * (m - 0.5))
    assert val == pytest.approx(math.prod(4 * m / 1.6 for m in pts), rel=1e-12)
    with pytest.raises(TroubleSpot):
        ob.midpoint_product(PHI, 5)


def test_root_distribution_grows_toward_two():
    roots = np.concatenate([[p.root for p in ob.admissible_polys(o)] for o in range(2, 13)])
    counts = np.histogram(roots, bins=5, range=(1, 2))[0]
    assert np.all(np.diff(counts) > 0)


def test_poly_table_json(tmp_path):
    ob.write_poly_table(tmp_path / "t.json", 5, seq_terms=6)
    rows = json.loads((tmp_path / "t.json").read_text())
    assert [r["index"] for r in rows if r["degree"] == 5] == [8, 10, 12, 13, 14, 15]
    assert rows[0] == {"index": 1, "binary": "11", "degree": 2, "root": ob.positive_root(1),
                       "sequence": [1, 1, 2, 3, 5, 8]}
