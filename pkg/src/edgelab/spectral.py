r"""Dense spectral backend: eigenvalues of ``X``, singular values of ``X - z``,
and the resolvent of the Hermitization

    H^z = [[0, X - z], [(X - z)^*, 0]]

evaluated on the imaginary axis through the SVD ``X - z = U diag(s) V^*``:

    G(i eta) = [[ i eta U D U^*,  U S D V^*     ],
                [ V S D U^*,      i eta V D V^* ]],    D = (S^2 + eta^2)^{-1}.

One factorization per ``(X, z)`` serves every ``eta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError

__all__ = [
    "Backend", "LapackBackend", "get_backend", "set_backend",
    "ComplexSpectrum", "HermitizedSpectrum", "ResolventView",
    "complex_eigenvalues", "singular_values", "singular_values_batch",
    "hermitized_spectrum", "resolvent_trace", "resolvent_quadratic_form",
    "ward_residual",
]


class Backend:
    """The two dense factorizations everything else is built on."""

    def eigvals(self, a):
        raise NotImplementedError

    def svd(self, a, compute_uv=True):
        raise NotImplementedError


class LapackBackend(Backend):
    def eigvals(self, a):
        try:
            return np.linalg.eigvals(a)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc

    def svd(self, a, compute_uv=True):
        try:
            return np.linalg.svd(a, compute_uv=compute_uv)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD did not converge: {exc}") from exc


_backend = LapackBackend()


def get_backend():
    return _backend


def set_backend(backend):
    """Swap the factorization backend; returns the previous one."""
    global _backend
    previous, _backend = _backend, backend
    return previous


def _as_array(x):
    a = getattr(x, "entries", x)
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ConfigError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class ComplexSpectrum:
    sigma: np.ndarray

    @property
    def n(self):
        return self.sigma.shape[0]


@dataclass(frozen=True, eq=False)
class HermitizedSpectrum:
    """SVD of ``X - z``: singular values ``s`` (descending) and factors ``u``, ``v``.

    ``X - z = u @ diag(s) @ v.conj().T``.
    """

    z: complex
    s: np.ndarray
    u: np.ndarray | None = None
    v: np.ndarray | None = None

    @property
    def n(self):
        return self.s.shape[0]

    def reconstruct(self):
        return (self.u * self.s) @ self.v.conj().T

    def at(self, eta):
        return ResolventView(self, eta)


@dataclass(frozen=True, eq=False)
class ResolventView:
    """``G^z(i eta)`` represented through the spectral factors of ``X - z``."""

    hs: HermitizedSpectrum
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")

    @property
    def n(self):
        return self.hs.n

    def _weights(self):
        s = self.hs.s
        d = 1.0 / (s * s + self.eta * self.eta)
        return s, d

    def trace(self):
        return resolvent_trace(self)

    def quadratic_form(self, x, y):
        return resolvent_quadratic_form(self, x, y)

    def diagonal(self):
        """The ``2n`` diagonal entries of ``G``."""
        _, d = self._weights()
        u, v = self.hs.u, self.hs.v
        top = 1j * self.eta * (np.abs(u) ** 2 @ d)
        bottom = 1j * self.eta * (np.abs(v) ** 2 @ d)
        return np.concatenate((top, bottom))

    def blocks(self):
        """The four ``n x n`` blocks of ``G``; O(n^3), for diagnostics only."""
        s, d = self._weights()
        u, v = self.hs.u, self.hs.v
        uh, vh = u.conj().T, v.conj().T
        g11 = 1j * self.eta * (u * d) @ uh
        g12 = (u * (s * d)) @ vh
        # exact for Hermitian H; rounding g21 separately would leave an
        # O(eps / (s eta)) off-diagonal term in Im G / eta
        g21 = g12.conj().T
        g22 = 1j * self.eta * (v * d) @ vh
        return g11, g12, g21, g22


def complex_eigenvalues(x):
    """Eigenvalues of the dense non-symmetric matrix ``x`` (unordered)."""
    a = _as_array(x)
    return ComplexSpectrum(np.asarray(_backend.eigvals(a), dtype=complex))


def singular_values(x, z=0.0, factors=True):
    """SVD of ``x - z I`` with singular values in descending order."""
    a = _as_array(x)
    z = complex(z)
    # real X with real z keeps the cheaper real SVD
    shift = z.real if z.imag == 0 and not np.iscomplexobj(a) else z
    shifted = a - shift * np.eye(a.shape[0])
    if factors:
        u, s, vh = _backend.svd(shifted, compute_uv=True)
        return HermitizedSpectrum(z, s, u, vh.conj().T)
    s = _backend.svd(shifted, compute_uv=False)
    return HermitizedSpectrum(z, s)


def singular_values_batch(x, zs, chunk=256):
    """Singular values of ``x - z`` for every ``z`` in ``zs``, shape ``(len(zs), n)``."""
    a = _as_array(x).astype(complex)
    zs = np.asarray(zs, dtype=complex).ravel()
    n = a.shape[0]
    out = np.empty((zs.size, n))
    eye = np.eye(n)
    for start in range(0, zs.size, chunk):
        block = zs[start:start + chunk]
        stack = a[None, :, :] - block[:, None, None] * eye[None]
        out[start:start + chunk] = _backend.svd(stack, compute_uv=False)
    return out


def hermitized_spectrum(hs):
    """The ``2n`` eigenvalues of ``H^z`` in ascending order: ``-s_1..-s_n, s_n..s_1``."""
    s = np.asarray(hs.s)
    return np.concatenate((-s, s[::-1]))


def resolvent_trace(rv):
    r"""Normalised trace ``<G(i eta)> = (2n)^{-1} Tr G``, purely imaginary."""
    if not rv.eta > 0:
        raise ConfigError("eta must be positive")
    s = rv.hs.s
    eta = rv.eta
    return 1j * float(np.mean(eta / (s * s + eta * eta)))


def _check_vector(x, n):
    x = np.asarray(x, dtype=complex).ravel()
    if x.shape[0] != 2 * n:
        raise ConfigError(f"vector length {x.shape[0]} does not match 2n = {2 * n}")
    return x


def resolvent_quadratic_form(rv, x, y):
    r"""``<x, G(i eta) y>``, conjugate-linear in ``x``; O(n^2)."""
    n = rv.n
    x = _check_vector(x, n)
    y = _check_vector(y, n)
    if not (np.any(x) and np.any(y)):
        raise ConfigError("quadratic form needs nonzero vectors")
    s, d = rv._weights()
    uh, vh = rv.hs.u.conj().T, rv.hs.v.conj().T
    a, b = uh @ x[:n], vh @ x[n:]
    c, e = uh @ y[:n], vh @ y[n:]
    ac, be = np.conj(a), np.conj(b)
    return complex(
        1j * rv.eta * np.sum(ac * c * d)
        + np.sum(ac * e * s * d)
        + np.sum(be * c * s * d)
        + 1j * rv.eta * np.sum(be * e * d)
    )


def ward_residual(rv):
    r"""Relative Frobenius defect of the Ward identity ``G G^* = Im G / eta``."""
    g11, g12, g21, g22 = rv.blocks()
    g = np.block([[g11, g12], [g21, g22]])
    gg = g @ g.conj().T
    im_over_eta = (g - g.conj().T) / (2j * rv.eta)
    return float(np.linalg.norm(gg - im_over_eta) / np.linalg.norm(im_over_eta))
