#!/usr/bin/env python3
"""Regenerates core/data/filter_tables.txt.

Level-1 DTCWT filters: Kingsbury near-symmetric 13/19-tap biorthogonal pair
(near_sym_b), taken verbatim.

Level >= 2 DTCWT filters: Kingsbury 14-tap quarter-shift orthonormal filter
(qshift_b). The published table meets orthonormality to ~1e-17 but its zero at
z = -1 only to ~1e-6, so the highpass leaks ~1e-6 of DC. It is refined here by
min-norm Gauss-Newton steps (50-digit arithmetic) onto the exact constraint set
{orthonormal, H(-1) = 0}. The correction is ~1e-6 per tap.

NSCT kernels: separable 9-tap binomial pyramid lowpass; two 19x19 zero-phase
fan kernels obtained by windowed (Kaiser, beta=4) frequency sampling of
sharpened angular wedge responses. See design_fan().

Usage: python3 tools/gen_filter_tables.py > core/data/filter_tables.txt
"""
import sys

import mpmath as mp
import numpy as np

H0O = [-0.0017578125, 0.0, 0.022265625, -0.046875, -0.0482421875, 0.296875, 0.55546875,
       0.296875, -0.0482421875, -0.046875, 0.022265625, 0.0, -0.0017578125]
H1O = [-7.062639508928571e-05, 0.0, 0.0013419015066964285, -0.0018833705357142855,
       -0.007156808035714285, 0.023856026785714284, 0.05564313616071428,
       -0.05168805803571428, -0.29975760323660716, 0.5594308035714286,
       -0.29975760323660716, -0.05168805803571428, 0.05564313616071428,
       0.023856026785714284, -0.007156808035714285, -0.0018833705357142855,
       0.0013419015066964285, 0.0, -7.062639508928571e-05]
QSHIFT_B_H0A = [0.003253142763653182, -0.00388321199915849, 0.03466034684485349,
                -0.03887280126882779, -0.11720388769911527, 0.27529538466888204,
                0.7561456438925225, 0.5688104207121227, 0.011866092033797,
                -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
                -0.005439475937274115, -0.004556895628475491]


def refine_orthonormal(h, iters=8):
    mp.mp.dps = 50
    h = mp.matrix([mp.mpf(v) for v in h])
    n = len(h)

    def residual(h):
        r = []
        for k in range(n // 2):
            s = mp.fsum(h[i] * h[i + 2 * k] for i in range(n - 2 * k))
            r.append(s - (1 if k == 0 else 0))
        r.append(mp.fsum(h[i] * (-1) ** i for i in range(n)))
        return mp.matrix(r)

    def jacobian(h):
        rows = []
        for k in range(n // 2):
            row = [mp.mpf(0)] * n
            for i in range(n - 2 * k):
                row[i] += h[i + 2 * k]
                row[i + 2 * k] += h[i]
            rows.append(row)
        rows.append([mp.mpf((-1) ** i) for i in range(n)])
        return mp.matrix(rows)

    for _ in range(iters):
        r = residual(h)
        jm = jacobian(h)
        step = jm.T * mp.lu_solve(jm * jm.T, r)
        h = h - step
    assert mp.norm(residual(h)) < mp.mpf(10) ** -40
    return [h[i] for i in range(n)]


def design_fan(response, radius, grid=512, beta=4.0):
    w = np.fft.fftfreq(grid) * 2 * np.pi
    wx, wy = np.meshgrid(w, w)
    phi = np.arctan2(wy, wx)
    resp = response(phi)
    resp[0, 0] = 0.5
    k = np.fft.fftshift(np.real(np.fft.ifft2(resp)))
    c = grid // 2
    k = k[c - radius:c + radius + 1, c - radius:c + radius + 1]
    k = 0.5 * (k + k[::-1, ::-1])
    t = np.arange(-radius, radius + 1)
    r = np.sqrt(t[:, None] ** 2 + t[None, :] ** 2)
    window = np.i0(beta * np.sqrt(np.clip(1 - (r / (radius + 1)) ** 2, 0, 1))) / np.i0(beta)
    return k * window


def sharpened(c):
    return 0.5 + 0.5 * np.sign(c) * np.sqrt(np.abs(c))


def emit(out, name, values, shape=None):
    out.write(f"[{name}]\n")
    if shape is not None:
        out.write(f"shape {shape[0]} {shape[1]}\n")
    for v in values:
        out.write(f"{float(v):.17g}\n")
    out.write("\n")


def main():
    out = sys.stdout
    out.write("# freqseg filter tables\n")
    out.write("# Generated by tools/gen_filter_tables.py; do not edit by hand.\n")
    out.write("version 1\n\n")

    n19 = range(len(H1O))
    n13 = range(len(H0O))
    g0o = [-H1O[i] * (-1) ** i for i in n19]
    g1o = [H0O[i] * (-1) ** i for i in n13]
    emit(out, "dtcwt.level1.h0o", H0O)
    emit(out, "dtcwt.level1.h1o", H1O)
    emit(out, "dtcwt.level1.g0o", g0o)
    emit(out, "dtcwt.level1.g1o", g1o)

    h0a = [float(v) for v in refine_orthonormal(QSHIFT_B_H0A)]
    n = len(h0a)
    h0b = h0a[::-1]
    h1a = [h0a[::-1][i] * (-1) ** i for i in range(n)]
    h1b = [-h0a[i] * (-1) ** i for i in range(n)]
    emit(out, "dtcwt.qshift.h0a", h0a)
    emit(out, "dtcwt.qshift.h0b", h0b)
    emit(out, "dtcwt.qshift.g0a", h0b)
    emit(out, "dtcwt.qshift.g0b", h0a)
    emit(out, "dtcwt.qshift.h1a", h1a)
    emit(out, "dtcwt.qshift.h1b", h1b)
    emit(out, "dtcwt.qshift.g1a", h1b)
    emit(out, "dtcwt.qshift.g1b", h1a)

    binomial = [1, 8, 28, 56, 70, 56, 28, 8, 1]
    emit(out, "nsct.pyramid_lowpass", [b / 256 for b in binomial])

    radius = 9
    # phi is the wave-vector angle atan2(wy, wx); x runs along columns.
    # fan1 keeps wave vectors within 22.5 deg of either axis.
    fan1 = design_fan(lambda phi: sharpened(np.cos(4 * phi)), radius)
    # fan2 keeps wave vectors in the 90..135 deg half (features at 0..45 deg).
    fan2 = design_fan(lambda phi: sharpened(np.cos(2 * phi - np.deg2rad(225))), radius)
    emit(out, "nsct.fan1", fan1.ravel(), fan1.shape)
    emit(out, "nsct.fan2", fan2.ravel(), fan2.shape)


if __name__ == "__main__":
    main()
