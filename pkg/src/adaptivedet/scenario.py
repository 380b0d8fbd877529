"""Simulation scenarios: covariance models, steering subspaces, mismatch
geometry, and Gaussian test/training data synthesis."""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import GeometryError, RankError

HOMOGENEOUS = "he"
PARTIALLY_HOMOGENEOUS = "phe"


def as_rng(seed) -> np.random.Generator:
    """Pass through a Generator, or build one from integer entropy."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_normal(rng, shape) -> np.ndarray:
    """Standard circular complex Gaussian draws with E[w w^H] = I.

    Real and imaginary parts are independent N(0, 1/2); the real block is
    drawn before the imaginary block so the consumption order is part of the
    reproducibility contract.
    """
    g1 = rng.standard_normal(shape)
    g2 = rng.standard_normal(shape)
    return (g1 + 1j * g2) / np.sqrt(2.0)


@dataclass(frozen=True)
class CovarianceModel:
    """Noise covariance family: identity, AR(1), or AR(1) clutter plus white floor."""

    kind: str = "ar1"
    rho: float = 0.9
    cnr_db: float = 30.0

    def __post_init__(self):
        if self.kind not in ("identity", "ar1", "ar1_plus_white"):
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if self.kind != "identity" and not 0.0 <= self.rho < 1.0:
            raise ValueError("one-lag correlation must lie in [0, 1)")

    @classmethod
    def identity(cls) -> "CovarianceModel":
        return cls(kind="identity", rho=0.0)

    @classmethod
    def ar1(cls, rho: float) -> "CovarianceModel":
        return cls(kind="ar1", rho=rho)

    @classmethod
    def ar1_plus_white(cls, rho: float, cnr_db: float) -> "CovarianceModel":
        return cls(kind="ar1_plus_white", rho=rho, cnr_db=cnr_db)

    @classmethod
    def parse(cls, text: str) -> "CovarianceModel":
        """Parse ``identity``, ``ar1:RHO``, or ``ar1w:RHO:CNR_DB``."""
        parts = text.strip().split(":")
        if parts[0] == "identity":
            return cls.identity()
        if parts[0] == "ar1" and len(parts) == 2:
            return cls.ar1(float(parts[1]))
        if parts[0] in ("ar1w", "ar1_plus_white") and len(parts) == 3:
            return cls.ar1_plus_white(float(parts[1]), float(parts[2]))
        raise ValueError(f"cannot parse covariance model {text!r}")

    def label(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "ar1":
            return f"ar1:{self.rho:g}"
        return f"ar1w:{self.rho:g}:{self.cnr_db:g}"

    def build(self, N: int) -> np.ndarray:
        return build_covariance(self, N)


def build_covariance(model: CovarianceModel, N: int) -> np.ndarray:
    """Hermitian positive definite covariance matrix of the model family."""
    if N < 1:
        raise ValueError("dimension must be at least 1")
    if model.kind == "identity":
        return np.eye(N, dtype=np.complex128)
    idx = np.arange(N)
    ar1 = model.rho ** np.abs(idx[:, None] - idx[None, :])
    if model.kind == "ar1":
        return ar1.astype(np.complex128)
    cnr = 10.0 ** (model.cnr_db / 10.0)
    return (cnr * ar1 + np.eye(N)).astype(np.complex128)


@dataclass(frozen=True)
class ScenarioConfig:
    """Dimensions and environment of one detection experiment."""

    N: int
    p: int
    L: int
    q: int = 0
    K: int = 1
    environment: str = HOMOGENEOUS
    sigma2: float = 1.0
    pfa: float = 1e-3

    def __post_init__(self):
        if not 1 <= self.p <= self.N:
            raise ValueError("need 1 <= p <= N")
        if self.q < 0 or self.p + self.q > self.N:
            raise ValueError("need q >= 0 and p + q <= N")
        if self.K < 1:
            raise ValueError("need K >= 1")
        if self.L < self.N:
            raise ValueError("need L >= N so the sample covariance is invertible")
        if self.environment not in (HOMOGENEOUS, PARTIALLY_HOMOGENEOUS):
            raise ValueError("environment must be 'he' or 'phe'")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if not 0.0 < self.pfa < 1.0:
            raise ValueError("pfa must lie in (0, 1)")

    @property
    def test_scale(self) -> float:
        """Amplitude scaling of the test-data noise relative to training."""
        if self.environment == PARTIALLY_HOMOGENEOUS:
            return float(np.sqrt(self.sigma2))
        return 1.0


@dataclass(frozen=True)
class SignalSpec:
    """Target SNR and mismatch for building an actual signal vector."""

    snr_db: float
    cos2phi: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.cos2phi <= 1.0:
            raise ValueError("cos2phi must lie in [0, 1]")

    @property
    def rho(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


@dataclass(frozen=True)
class DataSet:
    """One realization of test and training data with its sample covariance."""

    test: np.ndarray        # N x K
    training: np.ndarray    # N x L
    scm: np.ndarray = field(default=None)  # training @ training^H

    def __post_init__(self):
        if self.scm is None:
            object.__setattr__(self, "scm", self.training @ self.training.conj().T)

    @property
    def test_vector(self) -> np.ndarray:
        """The single test column, for point-target (K = 1) banks."""
        if self.test.shape[1] != 1:
            raise ValueError("test data has more than one range bin")
        return self.test[:, 0]


def steering_vector(N: int, freq: float) -> np.ndarray:
    """Temporal steering vector [1, e^{j2 pi f}, ..., e^{j2 pi f (N-1)}]^T."""
    return np.exp(2j * np.pi * freq * np.arange(N))


def nominal_subspace(N: int, p: int, freqs=None) -> np.ndarray:
    """N x p full-rank subspace matrix of steering vectors.

    Frequencies default to ``(i+1)/(p+1)``, evenly spread over (0, 1).
    Duplicate frequencies make the matrix rank deficient and are rejected.
    """
    if freqs is None:
        freqs = [(i + 1.0) / (p + 1.0) for i in range(p)]
    freqs = [float(f) for f in freqs]
    if len(freqs) != p:
        raise ValueError("need exactly p frequencies")
    if len(set(freqs)) != len(freqs):
        raise RankError("duplicate steering frequencies give a rank-deficient subspace")
    H = np.stack([steering_vector(N, f) for f in freqs], axis=1)
    linalg.orthonormal_basis(H)
    return H


def default_geometry(N: int, p: int, q: int = 0):
    """Deterministic (H, J) steering subspaces on one evenly spread frequency grid."""
    freqs = [(i + 1.0) / (p + q + 1.0) for i in range(p + q)]
    H = nominal_subspace(N, p, freqs[:p])
    J = nominal_subspace(N, q, freqs[p:]) if q else np.zeros((N, 0), dtype=np.complex128)
    return H, J


def actual_signal(H: np.ndarray, R: np.ndarray, spec: SignalSpec, rng=None) -> np.ndarray:
    """Signal vector with exact output SNR and mismatch angle.

    In the R-whitened space the signal is ``sqrt(rho) (cos(phi) u +
    sin(phi) w)`` with ``u`` a unit vector in the whitened span of ``H`` and
    ``w`` a unit vector in its orthocomplement; both directions are drawn
    from ``rng`` (or the seed carried by ``spec``), so results are
    reproducible and the
    statistics depend only on (rho, cos2phi).
    """
    rng = as_rng(spec.seed if rng is None else rng)
    N, p = H.shape
    T = linalg.inv_sqrt(R)
    Q = linalg.orthonormal_basis(T @ H)
    coeff = complex_normal(rng, p)
    u = Q @ coeff
    u = u / np.linalg.norm(u)
    cos2 = spec.cos2phi
    if cos2 < 1.0:
        if p == N:
            raise GeometryError("cannot mismatch a signal when the subspace fills the space")
        raw = complex_normal(rng, N)
        w = raw - Q @ (Q.conj().T @ raw)
        norm = np.linalg.norm(w)
        if norm < 1e-12:
            raise GeometryError("degenerate orthocomplement draw")
        w = w / norm
    else:
        w = np.zeros(N, dtype=np.complex128)
    s_bar = np.sqrt(spec.rho) * (np.sqrt(cos2) * u + np.sqrt(1.0 - cos2) * w)
    return linalg.herm_sqrt(R) @ s_bar


def draw_noise(rng, N: int, L: int, K: int):
    """White training and test draws in the fixed consumption order.

    One flat block of ``2 N (L + K)`` standard normals per trial, laid out as
    training-real, training-imag, test-real, test-imag; this layout is the
    reproducibility contract shared with the batched trial engine.
    """
    flat = rng.standard_normal(2 * N * (L + K))
    return assemble_noise(flat, N, L, K)


def assemble_noise(flat, N: int, L: int, K: int):
    """Turn flat standard-normal blocks (last axis) into complex noise pairs."""
    nt = N * L
    ns = N * K
    shape = flat.shape[:-1]
    w_train = (flat[..., :nt] + 1j * flat[..., nt:2 * nt]) / np.sqrt(2.0)
    w_test = (flat[..., 2 * nt:2 * nt + ns] + 1j * flat[..., 2 * nt + ns:]) / np.sqrt(2.0)
    return (w_train.reshape(shape + (N, L)), w_test.reshape(shape + (N, K)))


def synthesize(config: ScenarioConfig, model: CovarianceModel, signal=None,
               interference=None, hypothesis: str = "h0", seed=0) -> DataSet:
    """Draw one DataSet realization.

    ``signal`` and ``interference`` are N x K mean contributions (an N-vector
    is accepted when K = 1); both are added to the test data under H1 only.
    Training columns are CN(0, R); test noise is CN(0, sigma2 R) in the
    partially homogeneous environment and CN(0, R) otherwise.
    """
    if hypothesis not in ("h0", "h1"):
        raise ValueError("hypothesis must be 'h0' or 'h1'")
    rng = as_rng(seed)
    R = build_covariance(model, config.N)
    A = linalg.herm_sqrt(R)
    w_train, w_test = draw_noise(rng, config.N, config.L, config.K)
    training = A @ w_train
    test = config.test_scale * (A @ w_test)
    if hypothesis == "h1":
        for mean in (signal, interference):
            if mean is None:
                continue
            mean = np.asarray(mean, dtype=np.complex128)
            if mean.ndim == 1:
                mean = mean[:, None]
            if mean.shape != test.shape:
                raise ValueError("mean contribution must be N x K")
            test = test + mean
    return DataSet(test=test, training=training)
