# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled unicycle flow kernel; semantics match _unicycle_py exactly."""

from libc.math cimport cos, sin, sqrt

import numpy as np

VARIANT_PERPENDICULAR = 0
VARIANT_PAPER_LITERAL = 1


cdef inline int _control(double x, double y, double theta,
                         double rx, double ry,
                         double gamma, double mu_rot, double kappa_eps,
                         double deadband, int variant,
                         double* v_out, double* w_out) except -1:
    cdef double dx = x - rx
    cdef double dy = y - ry
    cdef double dist = sqrt(dx * dx + dy * dy)
    cdef double c, s, eps, zx, zy, fx, fy, ef, denom
    if dist <= deadband:
        v_out[0] = 0.0
        w_out[0] = 0.0
        return 0
    c = cos(theta)
    s = sin(theta)
    eps = kappa_eps * dist
    zx = x + eps * c - rx
    zy = y + eps * s - ry
    fx = -gamma * zx - mu_rot * zy
    fy = -gamma * zy + mu_rot * zx
    ef = c * fx + s * fy
    denom = 1.0 + kappa_eps * (c * dx + s * dy) / dist
    if denom <= 0.0:
        raise FloatingPointError("singular control denominator; kappa_eps >= 1?")
    v_out[0] = ef / denom
    if variant == 1:
        w_out[0] = ef / eps
    else:
        w_out[0] = (-s * fx + c * fy) / eps
    return 0


def unicycle_control(double x, double y, double theta, double rx, double ry,
                     double gamma, double mu_rot, double kappa_eps,
                     double deadband, int variant):
    cdef double v = 0.0, w = 0.0
    _control(x, y, theta, rx, ry, gamma, mu_rot, kappa_eps, deadband,
             variant, &v, &w)
    return v, w


def unicycle_flow(double x, double y, double theta, double rx, double ry,
                  double gamma, double mu_rot, double kappa_eps,
                  double deadband, int variant, double h, int n_steps,
                  int sample_every):
    idx = list(range(0, n_steps + 1, sample_every))
    if idx[len(idx) - 1] != n_steps:
        idx.append(n_steps)
    samples = np.empty((len(idx), 3))
    cdef double[:, ::1] smp = samples
    cdef int si = 0
    cdef int next_sample
    cdef int step
    cdef double v1, w1, v2, w2, v3, w3, v4, w4
    cdef double k1x, k1y, k1t, k2x, k2y, k2t, k3x, k3y, k3t, k4x, k4y, k4t
    cdef double x2, y2, t2, x3, y3, t3, x4, y4, t4

    smp[si, 0] = x
    smp[si, 1] = y
    smp[si, 2] = theta
    si += 1
    next_sample = idx[si] if si < len(idx) else -1

    v1 = w1 = v2 = w2 = v3 = w3 = v4 = w4 = 0.0
    for step in range(n_steps):
        _control(x, y, theta, rx, ry, gamma, mu_rot, kappa_eps, deadband,
                 variant, &v1, &w1)
        k1x = v1 * cos(theta)
        k1y = v1 * sin(theta)
        k1t = w1

        x2 = x + 0.5 * h * k1x
        y2 = y + 0.5 * h * k1y
        t2 = theta + 0.5 * h * k1t
        _control(x2, y2, t2, rx, ry, gamma, mu_rot, kappa_eps, deadband,
                 variant, &v2, &w2)
        k2x = v2 * cos(t2)
        k2y = v2 * sin(t2)
        k2t = w2

        x3 = x + 0.5 * h * k2x
        y3 = y + 0.5 * h * k2y
        t3 = theta + 0.5 * h * k2t
        _control(x3, y3, t3, rx, ry, gamma, mu_rot, kappa_eps, deadband,
                 variant, &v3, &w3)
        k3x = v3 * cos(t3)
        k3y = v3 * sin(t3)
        k3t = w3

        x4 = x + h * k3x
        y4 = y + h * k3y
        t4 = theta + h * k3t
        _control(x4, y4, t4, rx, ry, gamma, mu_rot, kappa_eps, deadband,
                 variant, &v4, &w4)
        k4x = v4 * cos(t4)
        k4y = v4 * sin(t4)
        k4t = w4

        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        theta = theta + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)

        if step + 1 == next_sample:
            smp[si, 0] = x
            smp[si, 1] = y
            smp[si, 2] = theta
            si += 1
            next_sample = idx[si] if si < len(idx) else -1

    return np.array((x, y, theta)), samples
