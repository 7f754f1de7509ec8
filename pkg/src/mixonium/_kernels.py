"""Compiled inner loops: fixed-step RK4 march of the atomic density matrix
along retarded time, vectorized over the detuning ensemble."""

import numpy as np
from numba import njit, prange


@njit(inline="always", cache=True)
def _rhs(r11, r22, r33, r12, r13, r23, oa, ob, delta):
    r21 = np.conj(r12)
    r31 = np.conj(r13)
    r32 = np.conj(r23)
    d11 = 0.5j * (oa * r31 - np.conj(oa) * r13)
    d22 = 0.5j * (ob * r32 - np.conj(ob) * r23)
    d33 = -d11 - d22
    d12 = 0.5j * (oa * r32 - np.conj(ob) * r13)
    d13 = 1j * delta * r13 - 0.5j * ob * r12 + 0.5j * oa * (r33 - r11)
    d23 = 1j * delta * r23 - 0.5j * oa * r21 + 0.5j * ob * (r33 - r22)
    return d11, d22, d33, d12, d13, d23


@njit(parallel=True, fastmath=True, cache=True)
def bloch_rk4_ensemble(rho0, oa, ob, oah, obh, deltas, dt, line_idx):
    """RK4 march of one density matrix per detuning node.

    ``oa``/``ob`` sample the envelopes at the grid points, ``oah``/``obh``
    at the midpoints.  Returns the coherence series (rho13, rho23) for
    every node, the full density-matrix series of node ``line_idx`` and
    the worst end-of-march trace deviation across nodes.
    """
    n_nodes = deltas.shape[0]
    n_t = oa.shape[0]
    p13 = np.empty((n_nodes, n_t), np.complex128)
    p23 = np.empty((n_nodes, n_t), np.complex128)
    rho_line = np.zeros((n_t, 3, 3), np.complex128)
    trace_err = np.zeros(n_nodes)
    for k in prange(n_nodes):
        d = deltas[k]
        r11 = rho0[0, 0]
        r22 = rho0[1, 1]
        r33 = rho0[2, 2]
        r12 = rho0[0, 1]
        r13 = rho0[0, 2]
        r23 = rho0[1, 2]
        p13[k, 0] = r13
        p23[k, 0] = r23
        if k == line_idx:
            rho_line[0, 0, 0] = r11
            rho_line[0, 1, 1] = r22
            rho_line[0, 2, 2] = r33
            rho_line[0, 0, 1] = r12
            rho_line[0, 1, 0] = np.conj(r12)
            rho_line[0, 0, 2] = r13
            rho_line[0, 2, 0] = np.conj(r13)
            rho_line[0, 1, 2] = r23
            rho_line[0, 2, 1] = np.conj(r23)
        for j in range(n_t - 1):
            a0 = oa[j]
            b0 = ob[j]
            ah = oah[j]
            bh = obh[j]
            a1 = oa[j + 1]
            b1 = ob[j + 1]
            k11, k22, k33, k12, k13, k23 = _rhs(r11, r22, r33, r12, r13, r23, a0, b0, d)
            s11 = r11 + 0.5 * dt * k11
            s22 = r22 + 0.5 * dt * k22
            s33 = r33 + 0.5 * dt * k33
            s12 = r12 + 0.5 * dt * k12
            s13 = r13 + 0.5 * dt * k13
            s23 = r23 + 0.5 * dt * k23
            l11, l22, l33, l12, l13, l23 = _rhs(s11, s22, s33, s12, s13, s23, ah, bh, d)
            s11 = r11 + 0.5 * dt * l11
            s22 = r22 + 0.5 * dt * l22
            s33 = r33 + 0.5 * dt * l33
            s12 = r12 + 0.5 * dt * l12
            s13 = r13 + 0.5 * dt * l13
            s23 = r23 + 0.5 * dt * l23
            m11, m22, m33, m12, m13, m23 = _rhs(s11, s22, s33, s12, s13, s23, ah, bh, d)
            s11 = r11 + dt * m11
            s22 = r22 + dt * m22
            s33 = r33 + dt * m33
            s12 = r12 + dt * m12
            s13 = r13 + dt * m13
            s23 = r23 + dt * m23
            n11, n22, n33, n12, n13, n23 = _rhs(s11, s22, s33, s12, s13, s23, a1, b1, d)
            r11 += dt / 6.0 * (k11 + 2.0 * l11 + 2.0 * m11 + n11)
            r22 += dt / 6.0 * (k22 + 2.0 * l22 + 2.0 * m22 + n22)
            r33 += dt / 6.0 * (k33 + 2.0 * l33 + 2.0 * m33 + n33)
            r12 += dt / 6.0 * (k12 + 2.0 * l12 + 2.0 * m12 + n12)
            r13 += dt / 6.0 * (k13 + 2.0 * l13 + 2.0 * m13 + n13)
            r23 += dt / 6.0 * (k23 + 2.0 * l23 + 2.0 * m23 + n23)
            p13[k, j + 1] = r13
            p23[k, j + 1] = r23
            if k == line_idx:
                rho_line[j + 1, 0, 0] = r11
                rho_line[j + 1, 1, 1] = r22
                rho_line[j + 1, 2, 2] = r33
                rho_line[j + 1, 0, 1] = r12
                rho_line[j + 1, 1, 0] = np.conj(r12)
                rho_line[j + 1, 0, 2] = r13
                rho_line[j + 1, 2, 0] = np.conj(r13)
                rho_line[j + 1, 1, 2] = r23
                rho_line[j + 1, 2, 1] = np.conj(r23)
        trace_err[k] = abs((r11 + r22 + r33).real - 1.0) + abs((r11 + r22 + r33).imag)
    return p13, p23, rho_line, trace_err


@njit(fastmath=True, cache=True)
def bloch_rk4_single(rho0, oa, ob, oah, obh, delta, dt):
    """RK4 march of a single atom, keeping the full density-matrix series."""
    n_t = oa.shape[0]
    out = np.zeros((n_t, 3, 3), np.complex128)
    r11 = rho0[0, 0]
    r22 = rho0[1, 1]
    r33 = rho0[2, 2]
    r12 = rho0[0, 1]
    r13 = rho0[0, 2]
    r23 = rho0[1, 2]
    for j in range(n_t):
        if j > 0:
            a0 = oa[j - 1]
            b0 = ob[j - 1]
            ah = oah[j - 1]
            bh = obh[j - 1]
            a1 = oa[j]
            b1 = ob[j]
            k11, k22, k33, k12, k13, k23 = _rhs(r11, r22, r33, r12, r13, r23, a0, b0, delta)
            s11 = r11 + 0.5 * dt * k11
            s22 = r22 + 0.5 * dt * k22
            s33 = r33 + 0.5 * dt * k33
            s12 = r12 + 0.5 * dt * k12
            s13 = r13 + 0.5 * dt * k13
            s23 = r23 + 0.5 * dt * k23
            l11, l22, l33, l12, l13, l23 = _rhs(s11, s22, s33, s12, s13, s23, ah, bh, delta)
            s11 = r11 + 0.5 * dt * l11
            s22 = r22 + 0.5 * dt * l22
            s33 = r33 + 0.5 * dt * l33
            s12 = r12 + 0.5 * dt * l12
            s13 = r13 + 0.5 * dt * l13
            s23 = r23 + 0.5 * dt * l23
            m11, m22, m33, m12, m13, m23 = _rhs(s11, s22, s33, s12, s13, s23, ah, bh, delta)
            s11 = r11 + dt * m11
            s22 = r22 + dt * m22
            s33 = r33 + dt * m33
            s12 = r12 + dt * m12
            s13 = r13 + dt * m13
            s23 = r23 + dt * m23
            n11, n22, n33, n12, n13, n23 = _rhs(s11, s22, s33, s12, s13, s23, a1, b1, delta)
            r11 += dt / 6.0 * (k11 + 2.0 * l11 + 2.0 * m11 + n11)
            r22 += dt / 6.0 * (k22 + 2.0 * l22 + 2.0 * m22 + n22)
            r33 += dt / 6.0 * (k33 + 2.0 * l33 + 2.0 * m33 + n33)
            r12 += dt / 6.0 * (k12 + 2.0 * l12 + 2.0 * m12 + n12)
            r13 += dt / 6.0 * (k13 + 2.0 * l13 + 2.0 * m13 + n13)
            r23 += dt / 6.0 * (k23 + 2.0 * l23 + 2.0 * m23 + n23)
        out[j, 0, 0] = r11
        out[j, 1, 1] = r22
        out[j, 2, 2] = r33
        out[j, 0, 1] = r12
        out[j, 1, 0] = np.conj(r12)
        out[j, 0, 2] = r13
        out[j, 2, 0] = np.conj(r13)
        out[j, 1, 2] = r23
        out[j, 2, 1] = np.conj(r23)
    return out
