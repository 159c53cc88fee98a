"""Compiled gate kernels for the restart-batched training path.

All kernels act in place on a C-contiguous (restarts, 2^q) complex array.
Qubit t toggles bit t of the column index, matching `simulator`'s layout.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["rot_y", "rot_z", "rot_x", "cnot", "sigma_overlap"]


@njit(cache=True)
def rot_y(amps, c, s, target):
    rows, n = amps.shape
    step = 1 << target
    for r in range(rows):
        cr, sr = c[r], s[r]
        for base in range(0, n, 2 * step):
            for off in range(base, base + step):
                a = amps[r, off]
                b = amps[r, off + step]
                amps[r, off] = cr * a - sr * b
                amps[r, off + step] = sr * a + cr * b


@njit(cache=True)
def rot_z(amps, c, s, target):
    rows, n = amps.shape
    step = 1 << target
    for r in range(rows):
        lo = c[r] - 1j * s[r]
        hi = c[r] + 1j * s[r]
        for base in range(0, n, 2 * step):
            for off in range(base, base + step):
                amps[r, off] = lo * amps[r, off]
                amps[r, off + step] = hi * amps[r, off + step]


@njit(cache=True)
def rot_x(amps, c, s, target):
    rows, n = amps.shape
    step = 1 << target
    for r in range(rows):
        cr = c[r]
        isr = 1j * s[r]
        for base in range(0, n, 2 * step):
            for off in range(base, base + step):
                a = amps[r, off]
                b = amps[r, off + step]
                amps[r, off] = cr * a - isr * b
                amps[r, off + step] = -isr * a + cr * b


@njit(cache=True)
def cnot(amps, control, target):
    rows, n = amps.shape
    cbit = 1 << control
    tbit = 1 << target
    for r in range(rows):
        for i in range(n):
            if (i & cbit) and not (i & tbit):
                j = i | tbit
                tmp = amps[r, i]
                amps[r, i] = amps[r, j]
                amps[r, j] = tmp


@njit(cache=True)
def sigma_overlap(bra, ket, target, axis_code, out):
    """<bra_r| sigma |ket_r> per row; axis_code 0=y, 1=z, 2=x."""
    rows, n = bra.shape
    step = 1 << target
    for r in range(rows):
        acc = 0.0 + 0.0j
        for base in range(0, n, 2 * step):
            for off in range(base, base + step):
                b0 = np.conj(bra[r, off])
                b1 = np.conj(bra[r, off + step])
                k0 = ket[r, off]
                k1 = ket[r, off + step]
                if axis_code == 0:
                    acc += -1j * b0 * k1 + 1j * b1 * k0
                elif axis_code == 1:
                    acc += b0 * k0 - b1 * k1
                else:
                    acc += b0 * k1 + b1 * k0
        out[r] = acc
