"""Point-target detector statistics.

The subspace bank (GLRT/Rao/Wald families and the mismatch-selective and
robust variants), its rank-one specializations, and the clairvoyant
known-covariance references.  Every statistic is a function of the
quasi-whitened test vector and nominal subspace; the whitening is computed
once per call and shared across the bank.
"""

from dataclasses import dataclass

import numpy as np

from .. import linalg


@dataclass(frozen=True)
class PointStats:
    """Subspace-bank statistics plus the loss factor ``beta``."""

    sglrt: float
    srao: float
    samf: float
    asd: float
    sabort: float
    wsabort: float
    dnsamf: float
    aed: float
    beta: float


@dataclass(frozen=True)
class RankOneStats:
    """Rank-one bank statistics and the SMI/AMF filter weights."""

    kglrt: float
    amf: float
    dmrao: float
    ace: float
    smi: float
    w_smi: np.ndarray
    w_amf: np.ndarray


@dataclass(frozen=True)
class ClairvoyantStats:
    """Known-covariance references: subspace matched filter, rank-one matched
    filter, and the MVDR weight."""

    smf: float
    mf: float
    w_mvdr: np.ndarray


def _whitened_energies(x, S, H):
    """Return (u, v): signal-subspace energy and total energy after whitening."""
    T = linalg.inv_sqrt(S)
    xt = T @ np.asarray(x, dtype=np.complex128)
    Ht = T @ np.asarray(H, dtype=np.complex128)
    Q = linalg.orthonormal_basis(Ht)
    u = float(np.sum(np.abs(Q.conj().T @ xt) ** 2))
    v = float(np.real(xt.conj() @ xt))
    return u, v


def stats_from_energies(u: float, v: float) -> PointStats:
    """Assemble the bank from the two whitened energies (the normative forms)."""
    denom = 1.0 + v - u
    beta = 1.0 / denom
    return PointStats(
        sglrt=u / denom,
        srao=u / ((1.0 + v) * denom),
        samf=u,
        asd=u / v if v > 0 else 0.0,
        sabort=(1.0 + u) / denom,
        wsabort=(1.0 + v) / denom ** 2,
        dnsamf=u / (v * denom) if v > 0 else 0.0,
        aed=v,
        beta=beta,
    )


def subspace_bank(x, S, H) -> PointStats:
    """All subspace-bank statistics for test vector ``x``, sample covariance
    ``S``, and nominal subspace ``H``."""
    u, v = _whitened_energies(x, S, H)
    return stats_from_energies(u, v)


def rank_one_bank(x, S, s) -> RankOneStats:
    """Rank-one statistics for steering vector ``s`` (the p = 1 bank).

    ``kglrt``/``amf``/``dmrao``/``ace`` are the p = 1 specializations of the
    subspace bank; the SMI additionally divides the AMF by the whitened
    steering energy and is therefore not CFAR.
    """
    s = np.asarray(s, dtype=np.complex128)
    if np.linalg.norm(s) == 0:
        raise ValueError("steering vector must be nonzero")
    point = subspace_bank(x, S, s[:, None])
    Si_s = np.linalg.solve(np.asarray(S, dtype=np.complex128), s)
    s_energy = float(np.real(s.conj() @ Si_s))
    return RankOneStats(
        kglrt=point.sglrt,
        amf=point.samf,
        dmrao=point.srao,
        ace=point.asd,
        smi=point.samf / s_energy,
        w_smi=Si_s / s_energy,
        w_amf=Si_s / np.sqrt(s_energy),
    )


def clairvoyant_bank(x, R, H) -> ClairvoyantStats:
    """Known-covariance references; the rank-one entries use the first column
    of ``H`` as the steering vector."""
    x = np.asarray(x, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    u, _ = _whitened_energies(x, R, H)
    s = H[:, 0]
    Ri_s = np.linalg.solve(np.asarray(R, dtype=np.complex128), s)
    s_energy = float(np.real(s.conj() @ Ri_s))
    mf = float(np.abs(Ri_s.conj() @ x) ** 2) / s_energy ** 2
    return ClairvoyantStats(smf=u, mf=mf, w_mvdr=Ri_s / s_energy)
