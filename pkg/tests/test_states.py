import numpy as np
import pytest

from qmask.errors import DegenerateSuperpositionError, DimensionError, NormalizationError
from qmask.linalg import random_density_matrix, trace_norm
from qmask.states import (
    BipartitePureState,
    PurificationSpec,
    as_ket,
    basis,
    partial_trace_a,
    partial_trace_b,
    partial_trace_dense,
    purify,
    random_bipartite_state,
    superpose,
)

BELL = BipartitePureState(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2)


def loop_partial_traces(psi):
    # explicit index sums, the textbook definition
    r, s = psi.dims
    amp = psi.amplitudes
    rho_a = np.zeros((r, r), complex)
    rho_b = np.zeros((s, s), complex)
    for j in range(r):
        for jj in range(r):
            rho_a[j, jj] = sum(amp[j * s + k] * np.conj(amp[jj * s + k]) for k in range(s))
    for k in range(s):
        for kk in range(s):
            rho_b[k, kk] = sum(amp[j * s + k] * np.conj(amp[j * s + kk]) for j in range(r))
    return rho_a, rho_b


class TestConstruction:
    def test_coefficient_matrix_convention(self):
        psi = BipartitePureState(basis(6, 1 * 3 + 2), 2, 3)
        assert psi.matrix[1, 2] == 1
        assert np.array_equal(BipartitePureState.from_matrix(psi.matrix).amplitudes, psi.amplitudes)

    def test_norm_invariant(self, rng):
        psi = random_bipartite_state(3, 4, rng)
        assert abs(np.trace(psi.matrix.conj().T @ psi.matrix) - 1) < 1e-10

    def test_rejects_unnormalized(self):
        with pytest.raises(NormalizationError):
            BipartitePureState(np.array([1.0, 1.0, 0, 0]), 2, 2)

    def test_rejects_bad_dims(self):
        with pytest.raises(DimensionError):
            BipartitePureState(basis(4, 0), 2, 3)

    def test_immutable(self):
        with pytest.raises(ValueError):
            BELL.amplitudes[0] = 0

    def test_as_ket(self):
        with pytest.raises(NormalizationError):
            as_ket([1.0, 1.0])
        with pytest.raises(DimensionError):
            as_ket([1.0, 0.0], dim=3)


class TestPartialTraces:
    def test_product_states(self):
        psi = BipartitePureState(np.kron(basis(2, 0), basis(2, 0)), 2, 2)
        assert np.allclose(partial_trace_a(psi), np.diag([1, 0]))
        psi = BipartitePureState(np.kron(basis(2, 0), basis(2, 1)), 2, 2)
        assert np.allclose(partial_trace_b(psi), np.diag([1, 0]))
        assert np.allclose(partial_trace_a(psi), np.diag([0, 1]))

    def test_bell(self):
        assert np.allclose(partial_trace_a(BELL), np.eye(2) / 2)
        assert np.allclose(partial_trace_b(BELL), np.eye(2) / 2)

    def test_against_index_loops(self, rng):
        for r, s in [(2, 3), (3, 2), (4, 4)]:
            psi = random_bipartite_state(r, s, rng)
            rho_a, rho_b = loop_partial_traces(psi)
            assert np.allclose(partial_trace_b(psi), rho_a, atol=1e-13)
            assert np.allclose(partial_trace_a(psi), rho_b, atol=1e-13)

    def test_b_marginal_is_transpose_of_mdm(self, rng):
        psi = random_bipartite_state(3, 4, rng)
        m = psi.matrix
        assert np.allclose(partial_trace_a(psi), (m.conj().T @ m).T)
        # spectra and distances are unaffected by that transpose
        assert np.allclose(np.linalg.eigvalsh(partial_trace_a(psi)), np.linalg.eigvalsh(m.conj().T @ m))

    def test_spectrum_matches_schmidt(self, rng):
        psi = random_bipartite_state(3, 5, rng)
        sv = np.linalg.svd(psi.matrix, compute_uv=False)
        eig_b = np.sort(np.linalg.eigvalsh(partial_trace_a(psi)))[::-1][:3]
        eig_a = np.sort(np.linalg.eigvalsh(partial_trace_b(psi)))[::-1]
        assert np.allclose(eig_b, sv**2, atol=1e-10)
        assert np.allclose(eig_a, eig_b, atol=1e-10)

    def test_dense_examples(self):
        rho = np.kron(np.eye(2) / 2, np.diag([1.0, 0]))
        assert np.allclose(partial_trace_dense(rho, (2, 2), "B"), np.eye(2) / 2)
        assert np.allclose(partial_trace_dense(BELL.projector(), (2, 2), "A"), np.eye(2) / 2)

    def test_dense_matches_matricization(self, rng):
        for _ in range(1000):
            r, s = rng.integers(2, 6, size=2)
            psi = random_bipartite_state(int(r), int(s), rng)
            rho = psi.projector()
            assert trace_norm(partial_trace_dense(rho, psi.dims, "A") - partial_trace_a(psi)) <= 1e-10
            assert trace_norm(partial_trace_dense(rho, psi.dims, "B") - partial_trace_b(psi)) <= 1e-10

    def test_dense_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace_dense(np.eye(6) / 6, (2, 2), "A")


class TestPurify:
    def test_pure_input(self):
        psi = purify(np.diag([1.0, 0.0]), 2)
        assert abs(abs(psi.inner(BipartitePureState(basis(4, 0), 2, 2))) - 1) < 1e-12

    def test_maximally_mixed(self):
        psi = purify(np.eye(2) / 2, 2)
        assert np.allclose(partial_trace_b(psi), np.eye(2) / 2)
        assert np.allclose(partial_trace_a(psi), np.eye(2) / 2)

    def test_round_trip(self, rng):
        for n in (2, 3, 5):
            rho = random_density_matrix(n, rng)
            psi = purify(rho, n + 1)
            assert np.linalg.norm(partial_trace_b(psi) - rho) < 1e-12

    def test_low_rank_fits_small_ancilla(self, rng):
        v = np.linalg.qr(rng.standard_normal((4, 2)) + 0j)[0]
        rho = v @ np.diag([0.7, 0.3]) @ v.conj().T
        psi = purify(rho, 2)
        assert psi.dims == (4, 2)
        assert np.linalg.norm(partial_trace_b(psi) - rho) < 1e-12

    def test_ancilla_too_small(self, rng):
        with pytest.raises(DimensionError):
            purify(random_density_matrix(3, rng), 2)

    def test_purification_spec(self, rng):
        lam = np.array([0.5, 0.3, 0.2])
        e = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
        mu = np.linalg.qr(rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3)))[0]
        spec = PurificationSpec(lam, e, mu)
        psi = spec.state()
        assert np.allclose(partial_trace_b(psi), spec.density_matrix())
        assert np.allclose(partial_trace_a(psi), (mu * lam) @ mu.conj().T)

    def test_purification_spec_validation(self):
        with pytest.raises(NormalizationError):
            PurificationSpec([0.6, 0.6], np.eye(2), np.eye(2))
        with pytest.raises(NormalizationError):
            PurificationSpec([0.5, 0.5], np.eye(2), np.ones((2, 2)))


class TestSuperpose:
    def test_trivial_weights(self, rng):
        psi = random_bipartite_state(2, 3, rng)
        phi = random_bipartite_state(2, 3, rng)
        assert np.allclose(superpose(psi, phi, 1, 0).amplitudes, psi.amplitudes)

    def test_orthogonal_already_normalized(self):
        a = BipartitePureState(basis(4, 0), 2, 2)
        b = BipartitePureState(basis(4, 3), 2, 2)
        out = superpose(a, b, 1 / np.sqrt(2), 1 / np.sqrt(2))
        assert np.allclose(out.amplitudes, BELL.amplitudes)

    def test_matrix_linearity(self, rng):
        for _ in range(100):
            psi, phi = random_bipartite_state(3, 2, rng), random_bipartite_state(3, 2, rng)
            u, v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            lin = u * psi.matrix + v * phi.matrix
            assert np.linalg.norm(superpose(psi, phi, u, v).matrix - lin / np.linalg.norm(lin)) < 1e-12

    def test_cancellation(self, rng):
        psi = random_bipartite_state(2, 2, rng)
        theta = 0.7
        with pytest.raises(DegenerateSuperpositionError):
            superpose(psi, psi.with_phase(theta), 1, -np.exp(-1j * theta))
