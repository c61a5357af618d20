"""Langevin noise correlators from generalized Einstein relations.

For delta-correlated collective noise forces F_mu(z, t) attached to the
six coherence channels mu in {(1,2), (2,1), (1,3), (3,1), (2,3), (3,2)},
the second moments follow from the single-atom dynamics alone:

    2 D_{mu nu} = <L(s_mu s_nu)> - <L(s_mu) s_nu> - <s_mu L(s_nu)>

evaluated in the zeroth-order steady state, with L the same adjoint
generator that produces the Bloch drift (drive terms cancel identically
in this combination, so only the dissipators contribute).

Spatial normalisation: the correlator used by the propagation module is

    <F_mu(z) F_nu(z')> = (c / N) * 2 D_{mu nu} * delta(z - z')

per unit spectral density.  The c/N scale (not, e.g., L/N) is the unique
choice under which a purely absorbing medium returns exactly vacuum
commutators at the output, which is the consistency test the whole noise
sector must pass; see the propagation invariants.
"""

from __future__ import annotations

import numpy as np

from .params import PhysicalParams, C, derive
from .steady_state import DensityMatrix3, apply_generator, _unit

# channel ordering shared with the propagation module
CHANNELS = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
CHANNEL_INDEX = {ch: k for k, ch in enumerate(CHANNELS)}


def conjugate_channel(ch: tuple[int, int]) -> tuple[int, int]:
    a, b = ch
    return (b, a)


def _expval(op: np.ndarray, ss: DensityMatrix3) -> complex:
    # <sum_ab op[a,b] sigma_ab> with S[a,b] = <sigma_ab>
    return complex(np.sum(op * ss.matrix))


def diffusion_matrix(p: PhysicalParams, ss: DensityMatrix3) -> np.ndarray:
    """6x6 matrix of 2*D_{mu,nu} over CHANNELS, in MHz."""
    ops = [_unit(a, b) for (a, b) in CHANNELS]
    drifts = [apply_generator(p, op) for op in ops]
    d = np.zeros((6, 6), dtype=complex)
    for i, (op_i, dr_i) in enumerate(zip(ops, drifts)):
        for j, (op_j, dr_j) in enumerate(zip(ops, drifts)):
            prod = op_i @ op_j
            val = _expval(apply_generator(p, prod), ss)
            val -= _expval(dr_i @ op_j, ss)
            val -= _expval(op_i @ dr_j, ss)
            d[i, j] = val
    return d


def gram_matrix(two_d: np.ndarray) -> np.ndarray:
    """<F_mu F_nu^dagger> pairing of the diffusion table.

    G[mu, nu] = 2 D_{mu, conj(nu)}; this is the matrix that must be
    positive semidefinite for the noise model to admit a state.
    """
    g = np.zeros_like(two_d)
    for j, ch in enumerate(CHANNELS):
        jbar = CHANNEL_INDEX[conjugate_channel(ch)]
        g[:, j] = two_d[:, jbar]
    return g


def check_positive(two_d: np.ndarray, tol: float = 1e-10) -> float:
    """Smallest eigenvalue of the Gram pairing (must be >= -tol)."""
    g = gram_matrix(two_d)
    g = 0.5 * (g + g.conj().T)
    ev = np.linalg.eigvalsh(g)
    low = float(ev.min())
    scale = max(1.0, float(ev.max()))
    if low < -tol * scale:
        raise ValueError(f"noise Gram matrix has eigenvalue {low}")
    return low


def sym_noise_matrix(two_d: np.ndarray, channels) -> np.ndarray:
    """Symmetrised per-channel covariance 0.5*(<F F^+> + <F^+ F>).

    Restricted to the given channel subset (list of (a, b) tuples); the
    c/N spatial scale is *not* included here, the caller folds it into
    the noise coupling rows.
    """
    k = len(channels)
    s = np.zeros((k, k), dtype=complex)
    for i, chi in enumerate(channels):
        for j, chj in enumerate(channels):
            mu = CHANNEL_INDEX[chi]
            nubar = CHANNEL_INDEX[conjugate_channel(chj)]
            nu = CHANNEL_INDEX[chj]
            mubar = CHANNEL_INDEX[conjugate_channel(chi)]
            s[i, j] = 0.5 * (two_d[mu, nubar] + two_d[nubar, mu])
    return s


def comm_noise_matrix(two_d: np.ndarray, channels) -> np.ndarray:
    """Commutator pairing <[F, F^+]> used by the commutator audit."""
    k = len(channels)
    s = np.zeros((k, k), dtype=complex)
    for i, chi in enumerate(channels):
        for j, chj in enumerate(channels):
            mu = CHANNEL_INDEX[chi]
            nubar = CHANNEL_INDEX[conjugate_channel(chj)]
            s[i, j] = two_d[mu, nubar] - two_d[nubar, mu]
    return s


def field_noise_channels() -> list[tuple[int, int]]:
    """Channels entering the field propagation equations.

    The direct rows of both field pairs are driven by F_13 and F_23 and
    the conjugate rows by F_31 and F_32; the channels are shared between
    the pairs because the same atoms scatter both.
    """
    return [(1, 3), (2, 3), (3, 1), (3, 2)]


def spinwave_noise_channels() -> list[tuple[int, int]]:
    return [(1, 2), (2, 1)]


def noise_scale(p: PhysicalParams) -> float:
    """c/N prefactor of the collective correlator, in m*MHz."""
    return C / derive(p).atom_number
