"""Pure-Python twin of the compiled unicycle flow kernel.

Arithmetic is written in the same order as the Cython version so the two
backends agree to floating-point roundoff.
"""

from math import cos, sin, sqrt

import numpy as np

VARIANT_PERPENDICULAR = 0
VARIANT_PAPER_LITERAL = 1


def unicycle_control(x, y, theta, rx, ry, gamma, mu_rot, kappa_eps,
                     deadband, variant):
    """Feedback-linearization inputs (v, omega) for one unicycle state."""
    dx = x - rx
    dy = y - ry
    dist = sqrt(dx * dx + dy * dy)
    if dist <= deadband:
        return 0.0, 0.0
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
    v = ef / denom
    if variant == VARIANT_PAPER_LITERAL:
        omega = ef / eps
    else:
        omega = (-s * fx + c * fy) / eps
    return v, omega


def unicycle_flow(x, y, theta, rx, ry, gamma, mu_rot, kappa_eps, deadband,
                  variant, h, n_steps, sample_every):
    """RK4-integrate the closed-loop unicycle over one flow interval.

    Returns (end_state, samples) where samples holds the state at every
    sample_every-th step, start and end inclusive.
    """
    idx = list(range(0, n_steps + 1, sample_every))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    samples = np.empty((len(idx), 3))
    si = 0
    samples[si] = (x, y, theta)
    si += 1
    next_sample = idx[si] if si < len(idx) else -1
    for step in range(n_steps):
        v1, w1 = unicycle_control(x, y, theta, rx, ry, gamma, mu_rot,
                                  kappa_eps, deadband, variant)
        k1x = v1 * cos(theta)
        k1y = v1 * sin(theta)
        k1t = w1

        x2 = x + 0.5 * h * k1x
        y2 = y + 0.5 * h * k1y
        t2 = theta + 0.5 * h * k1t
        v2, w2 = unicycle_control(x2, y2, t2, rx, ry, gamma, mu_rot,
                                  kappa_eps, deadband, variant)
        k2x = v2 * cos(t2)
        k2y = v2 * sin(t2)
        k2t = w2

        x3 = x + 0.5 * h * k2x
        y3 = y + 0.5 * h * k2y
        t3 = theta + 0.5 * h * k2t
        v3, w3 = unicycle_control(x3, y3, t3, rx, ry, gamma, mu_rot,
                                  kappa_eps, deadband, variant)
        k3x = v3 * cos(t3)
        k3y = v3 * sin(t3)
        k3t = w3

        x4 = x + h * k3x
        y4 = y + h * k3y
        t4 = theta + h * k3t
        v4, w4 = unicycle_control(x4, y4, t4, rx, ry, gamma, mu_rot,
                                  kappa_eps, deadband, variant)
        k4x = v4 * cos(t4)
        k4y = v4 * sin(t4)
        k4t = w4

        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        theta = theta + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)

        if step + 1 == next_sample:
            samples[si] = (x, y, theta)
            si += 1
            next_sample = idx[si] if si < len(idx) else -1

    return np.array((x, y, theta)), samples
