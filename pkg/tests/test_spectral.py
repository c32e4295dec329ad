import numpy as np
import pytest

from lmgquench.model import ModelParams, Parity, build_hamiltonian, split_parity_blocks
from lmgquench.spectral import (
    ConvergenceError,
    degeneracy_scan,
    density_of_states,
    diagonalize,
)

from conftest import assert_certified, eig_of


def test_n2_full_spectrum():
    eig = diagonalize(build_hamiltonian(ModelParams(2, 0.0)))
    np.testing.assert_allclose(eig.values, [-0.5, -0.5, 0.0], atol=1e-15)
    assert_certified(eig)


def test_n2_even_sector():
    eig = diagonalize(build_hamiltonian(ModelParams(2, 0.0)), Parity.PLUS)
    np.testing.assert_allclose(eig.values, [-0.5, 0.0], atol=1e-15)
    # embedded back into the full basis with zeros on odd n_t
    assert eig.vectors.shape == (3, 2)
    assert np.all(eig.vectors[1] == 0)


def test_sector_accepts_int_label():
    eig = diagonalize(build_hamiltonian(ModelParams(6, 0.3)), -1)
    assert eig.dim == 3 and np.all(eig.parities == -1)


def test_sector_refused_with_bias():
    with pytest.raises(ValueError):
        diagonalize(build_hamiltonian(ModelParams(6, 0.3, 0.001)), Parity.PLUS)


def test_ferromagnetic_ground_doublet():
    eig = eig_of(1000, 0.5)
    assert eig.values[1] - eig.values[0] < 1e-8
    assert eig.parities[0] != eig.parities[1]


@pytest.mark.parametrize("n,h,eps", [(8, 0.3, 0.0), (50, 0.9, 0.0), (64, 0.5, 0.005), (400, 1.2, 0.002)])
def test_certified_and_trace(n, h, eps):
    H = build_hamiltonian(ModelParams(n, h, eps))
    eig = diagonalize(H)
    assert_certified(eig)
    assert eig.values.sum() == pytest.approx(H.diag.sum(), rel=1e-9, abs=1e-9)
    if eps == 0:
        both = np.sort(np.concatenate([diagonalize(H, p).values for p in Parity]))
        np.testing.assert_allclose(both, eig.values, rtol=0, atol=1e-11)
        assert set(eig.parities) == {1, -1}
    else:
        assert np.all(eig.parities == 0)


def test_biased_matches_dense():
    H = build_hamiltonian(ModelParams(60, 0.4, 0.004))
    np.testing.assert_allclose(diagonalize(H).values, np.linalg.eigvalsh(H.to_dense()), atol=1e-12)


def test_large_certified():
    assert_certified(eig_of(2000, 0.5))


def test_convergence_error_surfaces(monkeypatch):
    import lmgquench.spectral as spectral

    def bad(d, e):
        return np.linalg.eigh(np.diag(d))[0] + 1.0, np.eye(d.size)

    monkeypatch.setattr(spectral, "eigh_tridiagonal", bad)
    with pytest.raises(ConvergenceError) as info:
        diagonalize(build_hamiltonian(ModelParams(10, 0.5)))
    assert info.value.residual > 1e-10


def test_dos_uniform():
    dos = density_of_states(np.arange(100) * 0.01, 0.1)
    assert dos.counts.sum() == 100
    np.testing.assert_allclose(dos.smoothed, 100.0)
    np.testing.assert_allclose(np.diff(dos.bin_centers), 0.1)


def test_dos_errors_and_default_bin():
    with pytest.raises(ValueError):
        density_of_states([])
    with pytest.raises(ValueError):
        density_of_states([0.0, 1.0], 0.0)
    values = np.linspace(-3, 5, 64)
    dos = density_of_states(values)
    assert dos.bin_width == pytest.approx(8 / 8)
    assert dos.counts.sum() == 64


def test_dos_peaks_at_critical_energy():
    dos = density_of_states(eig_of(2000, 0.5).values)
    assert abs(dos.peak_energy) <= dos.bin_width


def test_dos_paramagnetic_has_no_interior_peak():
    dos = density_of_states(eig_of(2000, 1.5).values)
    assert dos.peak_index == 0
    steps = np.diff(dos.smoothed)
    assert np.mean(steps <= 0) > 0.9


def test_degeneracy_synthetic():
    rep = degeneracy_scan([0.0, 0.0, 1.0], 1e-3)
    assert [k for k, _, _ in rep.pairs] == [0]
    assert rep.threshold == 1e-3
    with pytest.raises(ValueError):
        degeneracy_scan([0.0, 1.0], 0)
    with pytest.raises(ValueError):
        degeneracy_scan([1.0, 0.0], 1e-3)


def test_degeneracy_ferromagnet():
    rep = degeneracy_scan(eig_of(1000, 0.5).values, 1e-6)
    assert len(rep) > 0
    assert max(e for _, _, e in rep.pairs) < 0
    assert rep.fraction_below_zero == 1.0
    ks = [k for k, _, _ in rep.pairs]
    assert ks == sorted(set(ks))


def test_degeneracy_paramagnet_empty():
    assert len(degeneracy_scan(eig_of(1000, 1.5).values, 1e-6)) == 0


@pytest.mark.parametrize("n,h", [(500, 0.25), (500, 0.5), (1000, 0.25), (1000, 0.75), (2000, 0.75)])
def test_doublets_below_and_not_above(n, h):
    values = eig_of(n, h).values
    paired = degeneracy_scan(values, 1e-6).paired_mask(values.size)
    deep = values < -0.1 * n * (1 - h) ** 2 / 4
    assert paired[deep].mean() > 0.9
    assert not paired[values > 0.05 * n].any()


def test_blocks_are_tridiagonal_inputs():
    blocks = split_parity_blocks(build_hamiltonian(ModelParams(10, 0.2)))
    d, e = blocks[Parity.PLUS]
    assert d.size == 6 and e.size == 5
