"""Gibbs sampler for the latent-field denoising model.

Each sweep draws the trend coefficients gamma, the precisions (kappa_l,
kappa_f) and the field f, and in the heterogeneous variant re-estimates the
spot mask by local thresholding and rebuilds the field precision from it.
The denoised image is the average of the post-burn-in noise-free
reconstructions (trend plus field).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from .lattice import (
    LatticeWeights,
    PrecisionMatrix,
    Raster,
    SpotMask,
    build_higmrf_precision,
    build_igmrf_precision,
)
from .model import DesignMatrix, HyperParams, NoiseParams, make_design, phi_inverse_apply, trend_gram

__all__ = [
    "ChainState",
    "DenoiseResult",
    "SamplerNumericalError",
    "sample_gamma",
    "sample_kappas",
    "sample_field",
    "sample_field_given_gamma",
    "get_binary_image",
    "denoise",
]

IGMRF = "igmrf"
HIGMRF = "higmrf"

DENSE_LIMIT = 4096


class SamplerNumericalError(RuntimeError):
    """Factorization failure; carries the lattice size and precisions."""

    def __init__(self, msg: str, n: int, noise: NoiseParams):
        super().__init__(f"{msg} (n={n}, kappa_l={noise.kappa_l}, kappa_f={noise.kappa_f})")
        self.n = n
        self.noise = noise


@dataclass
class ChainState:
    """One chain's current draw; mutated in place by the sweep."""

    f: np.ndarray
    gamma: np.ndarray
    noise: NoiseParams
    mask: SpotMask
    precision: PrecisionMatrix
    iteration: int


@dataclass
class DenoiseResult:
    posterior_mean: Raster
    final_mask: SpotMask
    theta_trace: np.ndarray  # (T, 2): kappa_l, kappa_f per iteration
    gamma_trace: np.ndarray  # (T, 3)
    accepted_iterations: int


def sample_gamma(y: np.ndarray, f: np.ndarray, kappa_l: float, design: DesignMatrix,
                 gamma_precision: float, rng: np.random.Generator) -> np.ndarray:
    """Draw the trend coefficients from N(m, C) with
    C = (kappa_l Z^T Z + Q_gamma)^-1 and m = kappa_l C Z^T (y - f)."""
    z = design.matrix
    a = kappa_l * (z.T @ z) + gamma_precision * np.eye(3)
    try:
        c = linalg.cho_factor(a, lower=True)
    except linalg.LinAlgError as exc:
        raise RuntimeError("trend posterior system not positive definite") from exc
    m = kappa_l * linalg.cho_solve(c, z.T @ (y - f))
    # x = m + L^-T xi has covariance (L L^T)^-1 = C
    xi = rng.standard_normal(3)
    return m + linalg.solve_triangular(c[0], xi, lower=True, trans="T")


def sample_kappas(y: np.ndarray, f: np.ndarray, gamma: np.ndarray, design: DesignMatrix,
                  precision: PrecisionMatrix, hp: HyperParams,
                  rng: np.random.Generator) -> NoiseParams:
    """Draw the two precisions from their conjugate gamma conditionals
    (shape-scale convention, mean alpha * beta)."""
    n = y.size
    r = y - design.matrix @ gamma - f
    beta_l_star = 1.0 / (0.5 * float(r @ r) + 1.0 / hp.beta_l)
    beta_f_star = 1.0 / (0.5 * precision.quad_form(f) + 1.0 / hp.beta_f)
    kappa_l = rng.gamma(shape=0.5 * n + hp.alpha_l, scale=beta_l_star)
    kappa_f = rng.gamma(shape=0.5 * n + hp.alpha_f, scale=beta_f_star)
    return NoiseParams(kappa_l=kappa_l, kappa_f=kappa_f)


def _field_precision_dense(noise: NoiseParams, precision: PrecisionMatrix,
                           design: DesignMatrix, gamma_precision: float) -> np.ndarray:
    """Dense P = Phi^-1 + kappa_f Q = kappa_l I + kappa_f Q - kappa_l^2 Z M^-1 Z^T."""
    n = precision.n
    z = design.matrix
    m = trend_gram(design, noise.kappa_l, gamma_precision)
    w = linalg.solve(m, z.T, assume_a="pos")
    p = noise.kappa_f * precision.to_dense()
    p[np.diag_indices(n)] += noise.kappa_l
    p -= noise.kappa_l ** 2 * (z @ w)
    return p


def sample_field(y: np.ndarray, noise: NoiseParams, precision: PrecisionMatrix,
                 design: DesignMatrix, gamma_precision: float,
                 rng: np.random.Generator, method: str = "auto") -> np.ndarray:
    """Draw the field from the trend-marginalized conditional.

    The Gaussian has precision P = Phi^-1 + kappa_f Q and mean mu solving
    P mu = Phi^-1 y.  Lattices up to DENSE_LIMIT pixels use a dense Cholesky
    of P; larger ones factor the sparse part A = kappa_l I + kappa_f Q and
    apply the rank-3 Woodbury correction.
    """
    n = precision.n
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "sparse"
    b = phi_inverse_apply(y, noise.kappa_l, design, gamma_precision)
    if method == "dense":
        p = _field_precision_dense(noise, precision, design, gamma_precision)
        try:
            c = linalg.cho_factor(p, lower=True)
        except linalg.LinAlgError as exc:
            raise SamplerNumericalError("field precision factorization failed",
                                        n, noise) from exc
        mu = linalg.cho_solve(c, b)
        xi = rng.standard_normal(n)
        return mu + linalg.solve_triangular(c[0], xi, lower=True, trans="T")
    if method != "sparse":
        raise ValueError(f"unknown method {method!r}")
    return _sample_field_sparse(y, b, noise, precision, design, gamma_precision, rng)


def _sample_field_sparse(y, b, noise, precision, design, gamma_precision, rng):
    """Woodbury path: P = A - U M^-1 U^T with A = kappa_l I + kappa_f Q, U = kappa_l Z."""
    n = precision.n
    if precision.d_op is None:
        raise SamplerNumericalError("sparse sampling needs the difference operator",
                                    n, noise)
    z = design.matrix
    a = (noise.kappa_f * precision.matrix + noise.kappa_l * sparse.identity(n)).tocsc()
    try:
        lu = splu(a)
    except RuntimeError as exc:
        raise SamplerNumericalError("sparse factorization failed", n, noise) from exc
    u = noise.kappa_l * z
    ainv_u = lu.solve(u)
    m = trend_gram(design, noise.kappa_l, gamma_precision)
    g = m - u.T @ ainv_u  # 3x3 capacitance, PD because P is PD
    try:
        lg = linalg.cho_factor(g, lower=True)
    except linalg.LinAlgError as exc:
        raise SamplerNumericalError("capacitance factorization failed", n, noise) from exc
    # mean: P^-1 b via Woodbury
    ainv_b = lu.solve(b)
    mu = ainv_b + ainv_u @ linalg.cho_solve(lg, u.T @ ainv_b)
    # draw: N(0, A^-1) by perturbation, plus independent rank-3 correction
    # Cov = A^-1 + (A^-1 U) G^-1 (A^-1 U)^T = P^-1
    xi1 = rng.standard_normal(n)
    xi2 = rng.standard_normal(n)
    x0 = lu.solve(np.sqrt(noise.kappa_l) * xi1
                  + np.sqrt(noise.kappa_f) * (precision.d_op.T @ xi2))
    xi3 = rng.standard_normal(3)
    x1 = ainv_u @ linalg.solve_triangular(lg[0], xi3, lower=True, trans="T")
    return mu + x0 + x1


def sample_field_given_gamma(y: np.ndarray, gamma: np.ndarray, noise: NoiseParams,
                             precision: PrecisionMatrix, design: DesignMatrix,
                             rng: np.random.Generator) -> np.ndarray:
    """Draw the field conditional on the current trend draw.

    The Gaussian has precision A = kappa_l I + kappa_f Q and mean
    A^-1 kappa_l (y - Z gamma).  A is sparse, so the draw uses a
    perturbation solve with the difference operator.
    """
    n = precision.n
    if precision.d_op is None:
        raise SamplerNumericalError("conditional sampling needs the difference operator",
                                    n, noise)
    a = (noise.kappa_f * precision.matrix + noise.kappa_l * sparse.identity(n)).tocsc()
    try:
        lu = splu(a)
    except RuntimeError as exc:
        raise SamplerNumericalError("sparse factorization failed", n, noise) from exc
    resid = noise.kappa_l * (y - design.matrix @ gamma)
    xi1 = rng.standard_normal(n)
    xi2 = rng.standard_normal(n)
    perturb = np.sqrt(noise.kappa_l) * xi1 + np.sqrt(noise.kappa_f) * (precision.d_op.T @ xi2)
    return lu.solve(resid + perturb)


def _clipped_window_sums(x: np.ndarray, half: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sums, sums of squares and counts over boundary-clipped square windows."""
    n1, n2 = x.shape
    c1 = np.zeros((n1 + 1, n2 + 1))
    c2 = np.zeros((n1 + 1, n2 + 1))
    c1[1:, 1:] = x.cumsum(0).cumsum(1)
    c2[1:, 1:] = (x * x).cumsum(0).cumsum(1)
    i = np.arange(n1)[:, None]
    j = np.arange(n2)[None, :]
    r0 = np.clip(i - half, 0, n1)
    r1 = np.clip(i + half + 1, 0, n1)
    s0 = np.clip(j - half, 0, n2)
    s1 = np.clip(j + half + 1, 0, n2)
    def box(c):
        return c[r1, s1] - c[r0, s1] - c[r1, s0] + c[r0, s0]
    cnt = (r1 - r0) * (s1 - s0)
    return box(c1), box(c2), cnt


def get_binary_image(f: Raster, h: float = 0.1, window: int = 7) -> SpotMask:
    """Local-threshold spot classification.

    Pixel (i, j) is a spot iff f >= mu_local + h * sigma_local over the
    window x window patch centred there (clipped at boundaries; population
    standard deviation).
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    x = f.to_2d()
    s1, s2, cnt = _clipped_window_sums(x, window // 2)
    mu = s1 / cnt
    var = np.maximum(s2 / cnt - mu * mu, 0.0)
    thresh = mu + h * np.sqrt(var)
    return SpotMask.from_2d((x >= thresh).astype(np.int8))


def _normalize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    lo = float(y.min())
    hi = float(y.max())
    if hi > lo:
        return (y - lo) / (hi - lo), lo, hi - lo
    return np.zeros_like(y), lo, 0.0


def denoise(y: Raster, hp: HyperParams, variant: str = HIGMRF,
            rng: np.random.Generator | None = None) -> DenoiseResult:
    """Run the full Gibbs chain on an observed raster.

    The input is affinely mapped to [0, 1] (the threshold h is calibrated on
    that scale) and the posterior mean is mapped back on output.  The field
    draw conditions on the current trend draw rather than marginalizing it
    out: with the weak trend prior, the marginalized conditional is hugely
    diffuse along the trend span and the averaged draws would be dominated
    by that component.  The posterior mean averages the full noise-free
    reconstruction Z gamma + f; the split between trend and field is only
    weakly identified (a flat field absorbs any trend), so each alone mixes
    far more slowly than their sum.
    """
    if variant not in (IGMRF, HIGMRF):
        raise ValueError(f"unknown variant {variant!r}")
    hp.validate()
    if rng is None:
        rng = np.random.default_rng(hp.seed)
    n1, n2 = y.n1, y.n2
    yn, offset, scale = _normalize(y.data)

    design = make_design(n1, n2)
    weights = LatticeWeights(hp.lam)
    mask = SpotMask.zeros(n1, n2)
    precision = build_igmrf_precision(n1, n2)

    f = yn.copy()
    noise = NoiseParams(kappa_l=hp.alpha_l * hp.beta_l, kappa_f=hp.alpha_f * hp.beta_f)
    theta_trace = np.empty((hp.n_iter, 2))
    gamma_trace = np.empty((hp.n_iter, 3))
    accum = np.zeros(n1 * n2)
    accepted = 0

    for t in range(1, hp.n_iter + 1):
        gamma = sample_gamma(yn, f, noise.kappa_l, design, hp.gamma_precision, rng)
        noise = sample_kappas(yn, f, gamma, design, precision, hp, rng)
        f = sample_field_given_gamma(yn, gamma, noise, precision, design, rng)
        if variant == HIGMRF:
            mask = get_binary_image(Raster(n1, n2, f), hp.h, hp.window)
            precision = build_higmrf_precision(n1, n2, mask, weights)
        theta_trace[t - 1] = (noise.kappa_l, noise.kappa_f)
        gamma_trace[t - 1] = gamma
        if t > hp.burn_in:
            accum += design.matrix @ gamma + f
            accepted += 1

    mean_norm = accum / accepted
    posterior_mean = Raster(n1, n2, offset + mean_norm * scale)
    return DenoiseResult(
        posterior_mean=posterior_mean,
        final_mask=mask,
        theta_trace=theta_trace,
        gamma_trace=gamma_trace,
        accepted_iterations=accepted,
    )
