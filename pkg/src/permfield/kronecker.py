"""Fourier coefficients of |1-e(t)|^z and logarithmic block averages.

phi_hat computes hat(phi)_z(xi) = integral |1-e(t)|^z e(-xi t) dt by
oscillatory-weight adaptive quadrature (the sine component vanishes by the
t -> 1-t symmetry). decay_envelope fits the empirical coefficient decay.
log_average evaluates the exact logarithmic average of phi over one
geometric length block along the orbit (ell t)_ell, the single-block
conditional Laplace transform of the field.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .cycles import block_bounds, block_mean
from .errors import AccuracyError, DomainError, InvalidArgumentError

__all__ = [
    "FourierRow",
    "phi",
    "phi_hat",
    "decay_envelope",
    "log_average",
]

_ZERO_COEFF_FLOOR = 1e-12  # below this (relative to the mean), a coefficient
# is treated as exactly zero by the decay fit


@dataclass
class FourierRow:
    z: complex
    xi: int
    value: complex
    quad_error: float


def phi(z, u):
    """|1 - e(u)|^z = (2 sin pi u)^z; 0 at the singularity for Re z > 0."""
    s = 2.0 * math.sin(math.pi * (float(u) % 1.0))
    if s <= 0.0:
        return 0.0 if not isinstance(z, complex) else complex(0.0)
    return s**z


def phi_hat(z, xi, epsrel=1e-10):
    """Fourier coefficient of phi_z at integer frequency xi.

    Requires Re z >= 0.5. Adaptive quadrature with the oscillatory cosine
    weight; the achieved error estimate ships in the row. Raises
    AccuracyError (with the achieved error attached) when the quadrature
    does not reach roughly the requested relative accuracy.
    """
    zc = complex(z)
    if zc.real < 0.5:
        raise DomainError(f"Re z must be >= 0.5, got {z}")
    is_complex = zc.imag != 0.0
    zz = zc if is_complex else zc.real

    def f_re(u):
        s = 2.0 * math.sin(math.pi * u)
        if s <= 0.0:
            return 0.0
        v = s**zz
        return v.real if is_complex else v

    def f_im(u):
        s = 2.0 * math.sin(math.pi * u)
        if s <= 0.0:
            return 0.0
        return (s**zz).imag

    kwargs = dict(epsabs=1e-12, epsrel=epsrel, limit=400)
    if xi == 0:
        re, err_re = integrate.quad(f_re, 0.0, 1.0, **kwargs)
        im, err_im = integrate.quad(f_im, 0.0, 1.0, **kwargs) if is_complex else (0.0, 0.0)
    else:
        wvar = 2.0 * math.pi * abs(xi)
        re, err_re = integrate.quad(f_re, 0.0, 1.0, weight="cos", wvar=wvar, **kwargs)
        im, err_im = (
            integrate.quad(f_im, 0.0, 1.0, weight="cos", wvar=wvar, **kwargs)
            if is_complex
            else (0.0, 0.0)
        )
    value = complex(re, im)
    err = err_re + err_im
    if err > 1e-6 * max(1.0, abs(value)):
        raise AccuracyError(
            f"quadrature for phi_hat(z={z}, xi={xi}) reached error {err:.3g}",
            achieved=err,
        )
    return FourierRow(z=zc, xi=int(xi), value=value, quad_error=err)


def decay_envelope(z, xi_max, check=True):
    """Fitted log-log decay slope and empirical 3/2-normalized envelope.

    Computes |phi_hat(z, xi)| * xi^{3/2} over a geometric grid of
    frequencies in [2, xi_max] and returns (slope, max envelope). The
    slope is fit over xi in [4, min(256, xi_max)]; frequencies whose
    coefficients vanish are excluded, and if fewer than three remain the
    slope is the -inf sentinel (trigonometric-polynomial case). With
    check=True a slope above -1.4 raises AccuracyError.
    """
    if complex(z).real < 1.0:
        raise DomainError(f"Re z must be >= 1, got {z}")
    if xi_max < 4:
        raise InvalidArgumentError(f"xi_max must be >= 4, got {xi_max}")
    grid = sorted(
        {2, 3}
        | {int(round(4 * (xi_max / 4) ** (i / 24))) for i in range(25)}
        | {4, xi_max}
    )
    rows = [phi_hat(z, xi) for xi in grid if xi <= xi_max]
    mags = np.array([abs(r.value) for r in rows])
    errs = np.array([r.quad_error for r in rows])
    xs = np.array([r.xi for r in rows], dtype=float)
    envelope = float(np.max(mags * xs**1.5))
    scale = abs(phi_hat(z, 0).value)  # natural size of the function
    floor = np.maximum(_ZERO_COEFF_FLOOR * scale, 10.0 * errs)
    fit_mask = (xs >= 4) & (xs <= min(256, xi_max)) & (mags > floor)
    if fit_mask.sum() < 3:
        return float("-inf"), envelope
    slope = float(np.polyfit(np.log(xs[fit_mask]), np.log(mags[fit_mask]), 1)[0])
    if check and not slope <= -1.4:
        raise AccuracyError(
            f"fitted Fourier decay slope {slope:.3f} for z={z} exceeds -1.4"
        )
    return slope, envelope


def log_average(beta, t, k, rho):
    """(1/rho_k) * sum over the block of phi(beta, ell t) / ell.

    Exact finite sum over the integers of block k (never an integral
    approximation); equals the conditional Laplace transform of the
    single-cycle block field at tilt beta.
    """
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    a, b = block_bounds(k, rho)
    if b <= a:
        raise InvalidArgumentError(f"block k={k} at rho={rho} contains no integer")
    lengths = np.arange(a, b, dtype=np.int64)
    if isinstance(t, Fraction):
        # exact residues: phi vanishes exactly on lattice hits
        p, d = t.numerator, t.denominator
        res = (lengths * (p % d)) % d
        u = res / d
    else:
        u = np.mod(lengths * float(t), 1.0)
    s = 2.0 * np.sin(np.pi * np.minimum(u, 1.0 - u))
    vals = np.where(s > 0.0, s, 1.0) ** beta
    vals = np.where(s > 0.0, vals, 0.0)
    return float(np.sum(vals / lengths) / block_mean(k, rho))
