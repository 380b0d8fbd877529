"""Vectorized (stacked-trial) evaluation of the detector banks.

The per-instance functions in :mod:`adaptivedet.detectors` are the normative
definitions; this module recomputes the same statistics for a whole batch of
trials at once with stacked LAPACK calls so Monte Carlo runs stay fast.
Consistency between the two paths is enforced by the test suite.
"""

import numpy as np

from .errors import InfeasibleError

POINT_FAMILY = frozenset({
    "sglrt", "srao", "samf", "asd", "sabort", "wsabort", "dnsamf", "aed", "beta",
    "kglrt", "amf", "dmrao", "ace", "smi",
    "glrt_he_i", "ts_glrt_he_i", "glrt_phe_i", "rao_he_i", "ts_rao_he_i",
    "rao_phe_i", "wald_he_i", "wald_phe_i", "beta_i",
    "smf", "mf",
})
DISTRIBUTED_FAMILY = frozenset({
    "gkglrt", "gamf", "rao_he", "glrt_phe", "gasd", "rao_phe", "wald_phe",
    "glrdd", "amdd", "snrdd", "gadd",
    "glrt_dos", "rao_dos", "wald_dos",
})
ALL_DETECTORS = POINT_FAMILY | DISTRIBUTED_FAMILY


def _ct(a):
    return np.conj(np.swapaxes(a, -2, -1))


def _inv_sqrt_stack(S):
    w, V = np.linalg.eigh(S)
    return (V * (1.0 / np.sqrt(w))[..., None, :]) @ _ct(V)


def _basis(A):
    return np.linalg.qr(A)[0]


def _energy(Q, x):
    """|Q^H x|^2 summed over basis columns; Q (B,N,p), x (B,N) -> (B,)."""
    proj = np.einsum("bnp,bn->bp", Q.conj(), x)
    return np.einsum("bp,bp->b", proj.conj(), proj).real


def point_family_stats(x, S, H, J=None, s=None, R=None):
    """All point-family statistics for stacked trials.

    ``x`` is (B, N), ``S`` is (B, N, N); the geometry (H, J, s) and the true
    covariance ``R`` (for the clairvoyant references) are shared by the batch.
    """
    x = np.asarray(x)
    B, N = x.shape
    H = np.asarray(H, dtype=np.complex128)
    J = np.zeros((N, 0), dtype=np.complex128) if J is None else np.asarray(J, dtype=np.complex128)
    s = H[:, 0] if s is None else np.asarray(s, dtype=np.complex128)

    T = _inv_sqrt_stack(S)
    xt = np.einsum("bij,bj->bi", T, x)
    Ht = T @ H
    QH = _basis(Ht)
    u = _energy(QH, xt)
    v = np.einsum("bn,bn->b", xt.conj(), xt).real
    denom = 1.0 + v - u
    safe_v = np.where(v > 0, v, 1.0)
    out = {
        "sglrt": u / denom,
        "srao": u / ((1.0 + v) * denom),
        "samf": u,
        "asd": np.where(v > 0, u / safe_v, 0.0),
        "sabort": (1.0 + u) / denom,
        "wsabort": (1.0 + v) / denom ** 2,
        "dnsamf": np.where(v > 0, u / (safe_v * denom), 0.0),
        "aed": v,
        "beta": 1.0 / denom,
    }

    st = np.einsum("bij,j->bi", T, s)
    cs = np.einsum("bn,bn->b", st.conj(), xt)
    ss = np.einsum("bn,bn->b", st.conj(), st).real
    u1 = np.abs(cs) ** 2 / ss
    denom1 = 1.0 + v - u1
    out.update({
        "kglrt": u1 / denom1,
        "amf": u1,
        "dmrao": u1 / ((1.0 + v) * denom1),
        "ace": np.where(v > 0, u1 / safe_v, 0.0),
        "smi": u1 / ss,
    })

    q = J.shape[1]
    if q:
        Jt = T @ J
        QJ = _basis(Jt)
        xp = xt - np.einsum("bnq,bq->bn", QJ, np.einsum("bnq,bn->bq", QJ.conj(), xt))
        Hp = Ht - QJ @ (_ct(QJ) @ Ht)
        QHp = _basis(Hp)
        QB = _basis(np.concatenate([Ht, Jt], axis=2))
    else:
        xp, Hp, QHp, QB = xt, Ht, QH, QH
    ui = _energy(QHp, xp)
    vi = np.einsum("bn,bn->b", xp.conj(), xp).real
    denom_i = 1.0 + vi - ui
    a = _energy(QH, xp)
    coords = np.linalg.solve(_ct(Ht) @ Hp, np.einsum("bnp,bn->bp", Hp.conj(), xt)[..., None])
    y = np.einsum("bnp,bp->bn", Ht, coords[..., 0])
    wald_he = np.einsum("bn,bn->b", y.conj(), y).real
    v_b = v - _energy(QB, xt)
    safe_vi = np.where(vi > 0, vi, 1.0)
    out.update({
        "glrt_he_i": ui / denom_i,
        "ts_glrt_he_i": ui,
        "glrt_phe_i": np.where(vi > 0, ui / safe_vi, 0.0),
        "rao_he_i": a / ((1.0 + vi) * (1.0 + vi - a)),
        "ts_rao_he_i": a,
        "rao_phe_i": np.where(vi > 0, a / safe_vi, 0.0),
        "wald_he_i": wald_he,
        "wald_phe_i": wald_he / np.maximum(v_b, np.finfo(float).tiny),
        "beta_i": 1.0 / denom_i,
    })

    if R is not None:
        R = np.asarray(R, dtype=np.complex128)
        Ri_s = np.linalg.solve(R, s)
        s_energy = float(np.real(s.conj() @ Ri_s))
        Ri_H = np.linalg.solve(R, H)
        G = H.conj().T @ Ri_H
        coef = np.linalg.solve(G, np.einsum("np,bn->bp", Ri_H.conj(), x).T).T
        smf = np.einsum("bp,bp->b", np.einsum("np,bn->bp", Ri_H.conj(), x).conj(), coef).real
        out["smf"] = smf
        out["mf"] = np.abs(np.einsum("n,bn->b", Ri_s.conj(), x)) ** 2 / s_energy ** 2
    return out


def solve_sigma_batch(eigs, target: float):
    """Vectorized bracketed bisection of the power-mismatch root equation.

    ``eigs`` is (B, r) with nonnegative rows; rows must have more than
    ``target`` positive eigenvalues for a root to exist.
    """
    eigs = np.clip(np.asarray(eigs, dtype=float), 0.0, None)
    top = eigs.max(axis=1)
    if np.any(top <= 0):
        raise InfeasibleError("every trial needs a positive eigenvalue")
    eigs = np.where(eigs > 1e-12 * top[:, None], eigs, 0.0)
    counts = (eigs > 0).sum(axis=1)
    if np.any(counts <= target) or target <= 0:
        raise InfeasibleError("root target outside the feasible range for some trial")

    def f(s2):
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(eigs > 0, eigs / (eigs + s2[:, None]), 0.0)
        return frac.sum(axis=1) - target

    lo = 1e-12 * top
    hi = top.copy()
    for _ in range(200):
        mask = f(hi) > 0
        if not mask.any():
            break
        hi[mask] *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        pos = f(mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def distributed_family_stats(X, S, s, H, L: int):
    """All distributed-family statistics for stacked trials.

    ``X`` is (B, N, K), ``S`` is (B, N, N); ``s`` (rank-one steering), ``H``
    (direction/DOS subspace), and the training count ``L`` are shared.
    """
    X = np.asarray(X)
    B, N, K = X.shape
    s = np.asarray(s, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    IK = np.eye(K)

    T = _inv_sqrt_stack(S)
    Xt = T @ X
    st = np.einsum("bij,j->bi", T, s)
    ss = np.einsum("bn,bn->b", st.conj(), st).real
    c = np.einsum("bnk,bn->bk", Xt.conj(), st)
    G0 = _ct(Xt) @ Xt
    M0 = IK + G0
    num = np.einsum("bk,bk->b", c.conj(), np.linalg.solve(M0, c[..., None])[..., 0]).real
    gamf_num = np.einsum("bk,bk->b", c.conj(), c).real
    trG0 = np.trace(G0, axis1=-2, axis2=-1).real

    out = {
        "gkglrt": num / (ss - num),
        "gamf": gamf_num / ss,
    }
    # Rao (HE), matrix-inversion-lemma form
    G1 = G0 - c[..., None] @ _ct(c[..., None]) / ss[:, None, None]
    inner = np.linalg.solve(IK + G1, np.linalg.solve(M0, c[..., None]))
    out["rao_he"] = np.einsum("bk,bk->b", c.conj(), inner[..., 0]).real / ss

    # PHE bank
    target = N * K / (L + K)
    eig0 = np.linalg.eigvalsh(G0).real
    eig1 = np.linalg.eigvalsh(0.5 * (G1 + _ct(G1))).real
    sigma0 = solve_sigma_batch(eig0, target)
    sigma1 = solve_sigma_batch(eig1, target)
    det0 = np.linalg.det(IK + G0 / sigma0[:, None, None]).real
    det1 = np.linalg.det(IK + G1 / sigma1[:, None, None]).real
    out["glrt_phe"] = sigma0 ** target * det0 / (sigma1 ** target * det1)
    out["gasd"] = gamf_num / (ss * trG0)
    out["sigma0_hat"] = sigma0
    out["sigma1_hat"] = sigma1

    # Rao (PHE): X^H R0^-1 s through the Woodbury identity in whitened space
    e0 = np.linalg.solve(sigma0[:, None, None] * IK + G0, c[..., None])[..., 0]
    E0s = st - np.einsum("bnk,bk->bn", Xt, e0)
    num_vec = np.einsum("bnk,bn->bk", Xt.conj(), E0s)
    den = np.einsum("bn,bn->b", st.conj(), E0s).real
    out["rao_phe"] = (L + K) / sigma0 * np.einsum(
        "bk,bk->b", num_vec.conj(), num_vec).real / den
    # Wald (PHE): the projected-data Gram kills the steering component, so the
    # statistic collapses onto the generalized AMF rescaled by the H1 MLE.
    out["wald_phe"] = (L + K) / sigma1 * out["gamf"]

    # Direction detectors
    Ht = T @ H
    QH = _basis(Ht)
    W = _ct(QH) @ Xt                     # (B, p, K)
    A = _ct(W) @ W
    out["amdd"] = np.linalg.eigvalsh(A).real[:, -1]
    C0 = _inv_sqrt_stack(M0)
    out["glrdd"] = np.linalg.eigvalsh(C0 @ A @ C0).real[:, -1]
    out["gadd"] = out["amdd"] / trG0
    HX = _ct(Ht) @ Xt                    # (B, p, K)
    Ap = HX @ np.linalg.solve(M0, _ct(HX))
    Bp = _ct(Ht) @ Ht
    Cb = _inv_sqrt_stack(Bp)
    Mb = Cb @ Ap @ Cb
    wb, Vb = np.linalg.eigh(Mb)
    theta = np.einsum("bpq,bq->bp", Cb, Vb[..., -1])
    y = np.einsum("bpk,bp->bk", HX.conj(), theta)          # Xt^H Ht theta
    denom_t = np.einsum("bp,bpq,bq->b", theta.conj(), Bp, theta).real
    out["snrdd"] = np.einsum("bk,bk->b", y.conj(), y).real / denom_t

    # Double-subspace trio
    out["wald_dos"] = np.einsum("bpk,bpk->b", W.conj(), W).real
    out["glrt_dos"] = np.linalg.det(M0).real / np.linalg.det(M0 - _ct(W) @ W).real
    XH = np.linalg.solve(M0, _ct(Xt) @ Ht)
    DH = Ht - Xt @ XH                    # (I + Xt Xt^H)^-1 Ht via Woodbury
    G = _ct(Ht) @ DH
    A2 = _ct(Xt) @ DH
    out["rao_dos"] = np.einsum(
        "bkp,bpk->b", A2, np.linalg.solve(G, _ct(A2))
    ).real
    return out
