import numpy as np
import pytest

from hypokit import errors, gallery, hc_index
from hypokit import operator_core as core


def _rj(C):
    dec = core.hermitian_split(C)
    return dec.R, dec.J


def forced_obstruction_pair(rng, n):
    """PSD R and skew J such that some eigenvector of J lies in ker R."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    R = G.conj().T @ G / n
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    J = (S - S.conj().T) / 2
    _, V = np.linalg.eigh(1j * J)
    v = V[:, 0]
    P = np.eye(n) - np.outer(v, v.conj())
    R = P @ R @ P.conj().T
    return (R + R.conj().T) / 2, J


class TestIndexViaPowers:
    @pytest.mark.parametrize("method", hc_index.METHODS)
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_ck_index_one(self, method, k):
        rep = hc_index.index_via_powers(core.hermitian_split(gallery.ck_matrix(k)), method)
        assert rep.index == 1
        assert rep.kappa >= rep.kappa_threshold

    def test_ek4_index_three(self):
        rep = hc_index.index_via_powers(core.hermitian_split(gallery.ek_matrix(4)))
        assert rep.index == 3

    def test_identity_is_coercive(self):
        rep = hc_index.index_via_powers(core.hermitian_split(np.eye(3)))
        assert rep.index == 0
        assert rep.kappa == pytest.approx(1.0, abs=1e-14)

    def test_remark_block_with_large_threshold(self):
        # ker R = {0}, yet a fixed threshold of 0.5 is reached only at m = 1
        C = np.array([[0.1, 1.0], [-1.0, 1.0]])
        rep = hc_index.index_via_powers(core.hermitian_split(C), "j_powers", kappa_threshold=0.5)
        assert rep.index == 1
        assert rep.kappa >= 1.0

    @pytest.mark.parametrize("n", [3, 10, 50])
    def test_threshold_caveat_scales_past_kernel_bound(self, n):
        # dim ker R = 0 bounds the rank-based index, but with a fixed positive
        # threshold the reported index can still be 1
        C = np.array([[1.0 / n, 1.0], [-1.0, 1.0]])
        rep = hc_index.index_via_powers(
            core.hermitian_split(C), "j_powers", kappa_threshold=0.5
        )
        assert rep.index == 1
        assert hc_index.kalman_kernel_defect(*_rj(C), 0) == 0

    def test_none_up_to_m_max(self):
        # R = diag(1, 0) with J = 0 has an invariant kernel: no index exists
        C = np.diag([1.0, 0.0]).astype(complex)
        rep = hc_index.index_via_powers(core.hermitian_split(C), m_max=6)
        assert rep.index is None
        assert not rep.found
        assert len(rep.per_m_min_eigs) == 7
        assert rep.to_json_dict()["index"] == "none-up-to-m_max"

    def test_rejects_non_accretive(self):
        with pytest.raises(errors.PreconditionError):
            hc_index.index_via_powers(core.hermitian_split(-np.eye(2)))

    def test_monotone_partial_sums(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            dec = hc_index.random_accretive(rng, int(rng.integers(2, 8)))
            for method in hc_index.METHODS:
                rep = hc_index.index_via_powers(dec, method, kappa_threshold=1e30, m_max=dec.dim)
                eigs = np.asarray(rep.per_m_min_eigs)
                scale = max(abs(eigs).max(), 1.0)
                assert np.all(np.diff(eigs) >= -1e-12 * scale)


class TestKalmanKernelDefect:
    def test_two_by_two_hand_case(self):
        R = np.diag([1.0, 0.0])
        J = np.array([[0.0, -1.0], [1.0, 0.0]])
        assert hc_index.kalman_kernel_defect(R, J, 0) == 1
        assert hc_index.kalman_kernel_defect(R, J, 1) == 0

    def test_nonsingular_R(self):
        rng = np.random.default_rng(12)
        S = rng.standard_normal((4, 4))
        J = (S - S.T) / 2
        assert hc_index.kalman_kernel_defect(np.eye(4), J, 0) == 0

    def test_zero_R(self):
        S = np.random.default_rng(13).standard_normal((5, 5))
        J = (S - S.T) / 2
        for m in (0, 2, 5):
            assert hc_index.kalman_kernel_defect(np.zeros((5, 5)), J, m) == 5

    def test_defect_at_kernel_dim_suffices(self):
        # whenever the full sweep reaches zero it already reached it at
        # m = dim ker R
        rng = np.random.default_rng(14)
        for _ in range(50):
            dec = hc_index.random_accretive(rng, int(rng.integers(2, 8)))
            n = dec.dim
            kdim = hc_index.kalman_kernel_defect(dec.R, dec.J, 0)
            if hc_index.kalman_kernel_defect(dec.R, dec.J, n) == 0:
                assert hc_index.kalman_kernel_defect(dec.R, dec.J, max(kdim, 0)) == 0


class TestEigenvectorObstruction:
    def test_zero_R_reports_witness(self):
        J = np.array([[0.0, -1.0], [1.0, 0.0]])
        w = hc_index.eigenvector_obstruction(np.zeros((2, 2)), J)
        assert w is not None
        assert abs(abs(w.eigenvalue) - 1.0) <= 1e-12
        assert abs(w.eigenvalue.real) <= 1e-12
        # witness spans (1, -+i)/sqrt(2)
        v = w.vector
        assert abs(abs(v[0]) - abs(v[1])) <= 1e-12

    def test_full_rank_R_reports_none(self):
        rng = np.random.default_rng(15)
        S = rng.standard_normal((4, 4))
        assert hc_index.eigenvector_obstruction(np.eye(4), (S - S.T) / 2) is None

    def test_coupled_chain_has_no_obstruction(self):
        R = np.diag([1.0, 0.0, 0.0])
        J = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
        # every eigenvector of this J has a nonzero first component
        _, V = np.linalg.eigh(1j * J)
        assert np.all(np.abs(V[0, :]) > 1e-8)
        assert hc_index.eigenvector_obstruction(R, J) is None

    def test_forced_witness_is_verified(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            R, J = forced_obstruction_pair(rng, int(rng.integers(2, 7)))
            w = hc_index.eigenvector_obstruction(R, J)
            assert w is not None
            assert w.residual_R <= 1e-8 * max(np.linalg.norm(R, 2), 1.0)
            assert w.residual_J <= 1e-8 * max(np.linalg.norm(J, 2), 1.0)

    def test_matches_kalman_rank(self):
        rng = np.random.default_rng(17)
        for trial in range(120):
            n = int(rng.integers(2, 7))
            if trial % 3 == 2:
                R, J = forced_obstruction_pair(rng, n)
            else:
                dec = hc_index.random_accretive(rng, n)
                R, J = dec.R, dec.J
            full_rank = hc_index.kalman_kernel_defect(R, J, n) == 0
            witness = hc_index.eigenvector_obstruction(R, J)
            assert full_rank == (witness is None)


class TestEquivalenceAudit:
    def test_e5_all_methods_agree_at_four(self):
        audit = hc_index.equivalence_audit(core.hermitian_split(gallery.ek_matrix(5)))
        assert audit.agree
        assert set(audit.index_per_method.values()) == {4}

    def test_c2_all_methods_agree_at_one(self):
        audit = hc_index.equivalence_audit(core.hermitian_split(gallery.ck_matrix(2)))
        assert audit.agree
        assert set(audit.index_per_method.values()) == {1}
        assert audit.obstruction is None
        assert audit.defect_sweep[0] == 1 and audit.defect_sweep[1] == 0

    def test_json_shape(self):
        audit = hc_index.equivalence_audit(core.hermitian_split(gallery.ck_matrix(1)))
        d = audit.to_json_dict()
        assert set(d) == {"index_per_method", "kappa_per_method", "defect_sweep", "obstruction", "agree"}

    def test_random_campaign_no_disagreement(self):
        rng = np.random.default_rng(18)
        for _ in range(60):
            dec = hc_index.random_accretive(rng, 6)
            assert hc_index.equivalence_audit(dec).agree


class TestVanishingFormEquivalence:
    """Kernel-intersection vectors annihilate all four quadratic-form families
    below the index level, and the four level-m forms coincide."""

    def _forms(self, dec, x, j):
        C, R, J = dec.C, dec.R, dec.J
        Cj = np.linalg.matrix_power(C, j)
        Jj = np.linalg.matrix_power(J, j)
        comm = core.psd_sqrt(R)
        for _ in range(j):
            comm = J @ comm - comm @ J
        return np.array(
            [
                np.vdot(x, Cj @ R @ Cj.conj().T @ x).real,
                np.vdot(x, Jj @ R @ Jj.conj().T @ x).real,
                np.vdot(x, Cj.conj().T @ R @ Cj @ x).real,
                np.vdot(x, comm.conj().T @ comm @ x).real,
            ]
        )

    def test_four_form_agreement(self):
        rng = np.random.default_rng(19)
        checked = 0
        while checked < 15:
            n = 6
            G = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
            R = G @ G.conj().T / n  # rank 2, so level-2 kernels are nontrivial
            S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            J = (S - S.conj().T) / 2
            dec = core.OperatorDecomposition(C=R - J, R=R, J=J)
            for m in (1, 2):
                Sq = core.psd_sqrt(R)
                rows = [Sq @ np.linalg.matrix_power(J.conj().T, j) for j in range(m)]
                _, sv, Vh = np.linalg.svd(np.vstack(rows))
                rank = int(np.sum(sv >= 1e-10 * sv[0]))
                if rank == n:
                    continue
                x = Vh.conj().T[:, -1]
                scale = max(np.linalg.norm(R, 2) * np.linalg.norm(J, 2) ** (2 * m), 1.0)
                for j in range(m):
                    assert np.all(np.abs(self._forms(dec, x, j)) <= 1e-9 * scale)
                level = self._forms(dec, x, m)
                assert np.abs(level - level[1]).max() <= 1e-9 * scale
                checked += 1


def test_random_accretive_generator_contract():
    rng = np.random.default_rng(20)
    saw_deficient = saw_full = False
    for _ in range(40):
        dec = hc_index.random_accretive(rng, 5)
        assert core.min_eig_hermitian(dec.R) >= -1e-12
        assert np.abs(dec.J + dec.J.conj().T).max() <= 1e-12
        kdim = hc_index.kalman_kernel_defect(dec.R, dec.J, 0)
        saw_deficient |= kdim > 0
        saw_full |= kdim == 0
    assert saw_deficient and saw_full
