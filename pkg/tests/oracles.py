"""Reference values computed independently of the package code paths."""

import math

import mpmath as mp


def c_gamma(s):
    """C(1, s) from its Gamma-function closed form."""
    return s * 4**s * math.gamma(0.5 + s) / (math.sqrt(math.pi) * math.gamma(1 - s))


def c_oracle(s):
    """C(1, s) from mpmath quadrature of the defining integral.

    Near the origin ``1 - cos t = 2 sin(t/2)^2`` avoids cancellation and the
    substitution ``v = t^(2-2s)`` removes the algebraic singularity; the tail
    keeps the non-oscillatory part exact and hands the cosine part to quadosc.
    """
    mp.mp.dps = 30
    s = mp.mpf(s)
    p = 2 - 2 * s

    def smooth(t):
        return 2 * mp.sin(t / 2) ** 2 / t**2 if t != 0 else mp.mpf(0.5)

    head = mp.quad(lambda v: smooth(v ** (1 / p)), [0, 1]) / p
    tail = 1 / (2 * s) - mp.quadosc(lambda t: mp.cos(t) * t ** (-1 - 2 * s), [1, mp.inf], omega=1)
    return float(1 / (2 * (head + tail)))


def kappa_oracle(s, x0=0.0):
    """1 / ((-Delta)^s (1 - x^2)^s)(x0) by direct quadrature of the singular integral.

    ``(-Delta)^s u(x) = C/2 int (2u(x) - u(x+z) - u(x-z)) |z|^(-1-2s) dz``, with
    ``C`` from the Gamma-function closed form; the integral is split at the
    kinks where ``x +- z`` leaves the interval.
    """
    mp.mp.dps = 25
    s = mp.mpf(s)
    C = s * 4**s * mp.gamma(mp.mpf(0.5) + s) / (mp.sqrt(mp.pi) * mp.gamma(1 - s))

    def u(y):
        return (1 - y * y) ** s if abs(y) < 1 else mp.mpf(0)

    def second_diff(z):
        return (2 * u(x0) - u(x0 + z) - u(x0 - z)) * z ** (-1 - 2 * s)

    # on [0, z0] the second difference is -u''(x0) z^2 up to O(z^4); integrating
    # that analytically avoids catastrophic cancellation at tiny z
    z0 = mp.mpf("1e-4")
    near = -mp.diff(u, x0, 2) * z0 ** (2 - 2 * s) / (2 - 2 * s)
    k1, k2 = sorted([1 - abs(x0), 1 + abs(x0)])
    pts = [z0, k1] + ([k2] if k2 > k1 else [])
    val = near + mp.quad(second_diff, pts) + 2 * u(x0) * k2 ** (-2 * s) / (2 * s)
    # the integrand is even in z, so C/2 times the full line is C times the half line
    return float(1 / (C * val))
