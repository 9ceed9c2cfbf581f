import mpmath
import numpy as np
import pytest

from betadyn import hessenberg as hs
from betadyn import measures as me
from betadyn import orbits as ob
from betadyn.errors import Divergent, NoConvergence
from betadyn.stepfn import StepFn, from_bins, indicator

PHI = (1 + 5**0.5) / 2
TRIBONACCI_LIKE = 1.4655712318767682  # root of z^3 - z^2 - 1


# ---------------------------------------------------------------- StepFn


def test_stepfn_right_open_evaluation():
    f = StepFn([0.0, 0.5, 1.0], [2.0, 3.0])
    assert f(0.0) == 2.0 and f(0.5) == 3.0 and f(1.0) == 0 and f(-0.1) == 0
    assert f.integral() == pytest.approx(2.5)
    with pytest.raises(ValueError):
        StepFn([0.0, 0.0, 1.0], [1.0, 1.0])


def test_stepfn_exact_sums():
    f = StepFn([0.0, 0.25, 1.0], [4.0, 0.0])
    g = indicator(0.0, 0.5)
    assert f.inner(g) == pytest.approx(1.0)
    assert f.l1_distance(g) == pytest.approx(3 * 0.25 + 0.25)
    np.testing.assert_allclose(f.bin_averages([0.0, 0.125, 0.5]), [4.0, 4.0 * 0.125 / 0.375])
    assert from_bins([0, 1, 2], [1, 2]).integral() == 3
    assert (f * 2).integral() == pytest.approx(2.0)


# ---------------------------------------------------------------- histograms


def test_histogram_counts_and_normalisation():
    h = me.density_histogram(1.6, bins=100, samples=500, iters=30, seed=1)
    assert h.counts.sum() == 500 * 30
    assert np.sum(h.density * np.diff(h.edges)) == pytest.approx(1.0, abs=1e-6)
    again = me.density_histogram(1.6, bins=100, samples=500, iters=30, seed=1)
    np.testing.assert_array_equal(h.counts, again.counts)


def test_histogram_flat_at_two():
    # doubling in floating point is exact, so keep the orbit shorter than
    # the 53 bits of the start points
    h = me.density_histogram(2.0, bins=800, samples=24000, iters=40, seed=5)
    sigma = 1.0 / np.sqrt(h.counts.sum() / h.bins)
    dev = np.abs(h.density - 1.0) / sigma
    assert np.mean(dev <= 3) >= 0.99
    assert dev.max() <= 5


def test_histogram_below_one_collapses():
    bins, iters = 800, 8000
    h = me.density_histogram(0.9, bins=bins, samples=200, iters=iters, seed=2)
    # a point leaves bin 0 for at most log(bins)/log(1/0.9) steps
    escape = np.log(bins) / np.log(1 / 0.9)
    assert h.density.argmax() == 0
    assert h.counts[0] / h.counts.sum() >= 1 - escape / iters


def test_histogram_jumps_at_midpoints():
    beta, bins = 1.2, 800
    h = me.density_histogram(beta, bins=bins, samples=24000, iters=1000, seed=7)
    m = hs.midpoint_orbit(beta, 40).points
    jumps = np.abs(np.diff(h.density))
    sigma = np.sqrt(h.counts[1:] + h.counts[:-1]) / (h.counts.sum() / bins)
    big = np.nonzero(jumps > 6 * sigma)[0]
    assert big.size >= 3
    edges = h.edges[1:-1][big]
    # every significant jump sits within a bin of a midpoint
    assert np.all(np.min(np.abs(edges[:, None] - m[None, :]), axis=1) <= 1.0 / bins)


# ---------------------------------------------------------------- Parry measure


def naive_parry(beta, x, terms=200):
    """Direct sum of indicators along an independently iterated orbit."""
    m, total, w = beta / 2, 0.0, 1.0
    for _ in range(terms):
        total += w * (x < m)
        m = beta * m if m < 0.5 else beta * (m - 0.5)
        w /= beta
    return total


def test_parry_golden_plateaus():
    f = me.parry_measure(PHI)
    vals = me.plateaus(f)
    assert vals.size == 2
    assert vals[0] / vals[1] == pytest.approx(PHI, rel=1e-12)
    assert 0.5 in f.breakpoints
    assert f.integral() == pytest.approx(1.0)


def test_parry_flat_at_two():
    f = me.parry_measure(2.0)
    np.testing.assert_allclose(me.plateaus(f), [1.0])
    assert f.breakpoints[-1] == 1.0


def test_parry_three_plateaus():
    beta = TRIBONACCI_LIKE
    vals = me.plateaus(me.parry_measure(beta))
    assert vals.size == 3
    assert vals[0] / vals[1] == pytest.approx(beta, rel=1e-9)
    assert vals[1] / vals[2] == pytest.approx(beta, rel=1e-9)


@pytest.mark.parametrize("beta", [1.2, 1.6, 1.8])
def test_parry_matches_direct_sum(beta, rng):
    f = me.parry_measure(beta)
    xs = rng.random(200) * beta / 2
    raw = np.array([naive_parry(beta, x) for x in xs])
    ratio = f(xs) / raw
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)
    # breakpoints are the midpoint orbit plus the ends
    m = np.append(hs.midpoint_orbit(beta, 1000).points, beta / 2)
    assert np.all(np.min(np.abs(f.breakpoints[1:-1, None] - m[None, :]), axis=1) == 0)


def test_parry_transform_coordinates():
    f = me.parry_measure(1.6, coords="transform")
    assert f.breakpoints[-1] == pytest.approx(1.0)
    assert f.integral() == pytest.approx(1.0)


# ---------------------------------------------------------------- fixed point


def test_fp_recurse_flat_at_two():
    f = me.fp_recurse(2.0, grid=64)
    np.testing.assert_allclose(f.values, 1.0)


def test_fp_recurse_matches_parry():
    f = me.fp_recurse(1.6, grid=4096)
    assert f.l1_distance(me.parry_measure(1.6)) < 0.01
    assert np.all(f(np.linspace(0.8 + 1e-3, 0.999, 50)) == 0)


def test_fp_recurse_budget():
    with pytest.raises(NoConvergence):
        me.fp_recurse(1.05, grid=256, sweeps=3)


@pytest.mark.parametrize("beta", [1.2, 1.6, 1.8])
def test_three_measures_agree(beta):
    p = me.parry_measure(beta)
    grid = 4096
    fp = me.fp_recurse(beta, grid=grid)
    assert fp.l1_distance(p) < 0.01
    h = me.density_histogram(beta, bins=400, samples=20000, iters=500, seed=3)
    ref = p.bin_averages(h.edges)
    sigma = np.sqrt(h.counts) / (h.counts.sum() * np.diff(h.edges))
    w = np.diff(h.edges)
    assert np.sum(np.abs(h.density - ref) * w) <= 4 * np.sum(sigma * w)


# ------------------------------------------------------------ rotated series


def test_rotated_parry_edge_cases(rng):
    beta = 1.6
    xs = rng.random(20) * beta / 2
    np.testing.assert_allclose(me.rotated_parry(beta, 0.0, xs), 1.0)
    p = me.parry_measure(beta)
    ratio = me.rotated_parry(beta, 1.0, xs).real / p(xs)
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)
    # at the top of the support only n >= 1 terms survive
    top = me.rotated_parry(beta, 0.7, beta / 2)
    m = hs.midpoint_orbit(beta, 400).points
    oracle = sum((beta / 2 < m[n]) * (0.7 / beta) ** n for n in range(1, m.size))
    assert top == pytest.approx(oracle, abs=1e-14)
    with pytest.raises(Divergent):
        me.rotated_parry(beta, 1.6, 0.3)


def test_constancy():
    assert me.constancy_check(1.6, 1.0, 100) < 1e-8
    assert me.constancy_check(2.0, 1.0) < 1e-14
    assert me.constancy_check(1.3, 0.5 + 0.5j) < 1e-6


# ------------------------------------------------------------ disk function


def test_disk_function_values():
    assert me.disk_function(1.37, 0.0) == -1
    assert abs(me.disk_function(1.8, -1.591567859 / 1.8)) < 1e-6
    assert abs(me.disk_function(PHI, 1 / PHI)) < 1e-12
    with pytest.raises(Divergent):
        me.disk_function(1.8, 1.0)


def test_disk_function_periodic_closed_form(rng):
    beta = TRIBONACCI_LIKE
    bits = ob.orbit_encoding(beta, 40)
    zs = 0.95 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
    d = me.disk_function(beta, zs)
    np.testing.assert_allclose(d, -ob.q_series_periodic(bits, zs), atol=1e-9)


def mp_disk_root(beta, zeta0, terms=400):
    """Independent high-precision Newton solve of the truncated series."""
    d = (hs.midpoint_orbit(beta, terms).points > 0.5).astype(int)
    mpmath.mp.dps = 40
    f = lambda z: -1 + z * mpmath.polyval([int(v) for v in d[::-1]], z)  # noqa: E731
    root = mpmath.findroot(f, mpmath.mpc(zeta0), verify=False)
    assert abs(f(root)) < 1e-15
    return complex(root)


def test_disk_zeros_paper_values():
    zs = me.disk_zeros(1.8)
    eig = np.array([z.eigenvalue for z in zs])
    target = -0.4111213835 - 0.4179206604j
    assert np.min(np.abs(eig - target)) < 1e-8
    assert np.min(np.abs(eig - target.conjugate())) < 1e-8
    eig12 = np.array([z.eigenvalue for z in me.disk_zeros(1.2)])
    assert np.min(np.abs(eig12 - (0.7446284155 - 0.4721187476j))) < 1e-8


@pytest.mark.parametrize("beta", [1.2, 1.8])
def test_disk_zeros_against_mpmath(beta):
    zs = me.disk_zeros(beta)
    assert zs
    for z in zs[:6]:
        assert z.residual < 1e-10
        assert abs(z.zeta - mp_disk_root(beta, z.zeta)) < 1e-9
        assert z.eigenvalue == pytest.approx(1 / (beta * z.zeta))
        # conjugate partner present
        assert min(abs(w.zeta - z.zeta.conjugate()) for w in zs) < 1e-8


def test_disk_zeros_at_two():
    zs = me.disk_zeros(2.0)
    assert len(zs) == 1
    assert zs[0].zeta == pytest.approx(0.5, abs=1e-12)


# ------------------------------------------------------------ tree function


def compose_oracle(beta, bits, y):
    for b in reversed(bits):
        y = b / 2 + y / beta
    return y


def test_gamma_compose(rng):
    beta = 1.6
    for _ in range(50):
        bits = list(rng.integers(0, 2, rng.integers(1, 12)))
        y = rng.random()
        assert me.gamma_compose(beta, bits, y) == pytest.approx(compose_oracle(beta, bits, y), abs=1e-14)
    assert me.gamma_compose(beta, [0, 0, 0], 0.7) == pytest.approx(0.7 / beta**3)


def test_tree_function_examples():
    from betadyn.symbolic import binary_digits

    beta = 1.6
    assert me.tree_function(beta, binary_digits(0.45, 30), 0.0) == 1
    assert me.tree_function(beta, binary_digits(0.497, 30), 0.0) == 0
    assert me.tree_function(beta, binary_digits(0.52, 30), 0.0) == 1


def test_tree_function_max_support_at_zero(rng):
    beta = 1.6
    for _ in range(200):
        bits = rng.integers(0, 2, 10)
        if me.tree_function(beta, bits, rng.random() * beta / 2):
            assert me.tree_function(beta, bits, 0.0) == 1


# ------------------------------------------------------------ Julia rows


def julia_oracle(beta, depth):
    vals = {(1, 1): beta}  # (numerator, level) for x = num / 2^level
    for n in range(1, depth):
        for num in range(1, 2**n, 2):
            j = vals[(num, n)]
            vals[(2 * num - 1, n + 1)] = min(beta / 2, beta * j)
            vals[(2 * num + 1, n + 1)] = max(0.0, beta * j - beta / 2)
    row = np.zeros(2**depth)
    for (num, n), v in vals.items():
        row[num * 2 ** (depth - n)] = v
    return row


@pytest.mark.parametrize("beta", [0.8, 1.3, 1.9])
def test_julia_row(beta):
    np.testing.assert_allclose(me.julia_row(beta, 8), julia_oracle(beta, 8))
    assert me.julia_raster([beta, 1.5], 5).shape == (2, 32)
