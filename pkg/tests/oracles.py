"""Independent brute-force reference implementations used only by tests.

Everything here is written as literal double loops over agent pairs in plain
Python/math, deliberately sharing no pairwise machinery with the package, so
the vectorized production paths can be checked against it.
"""

from __future__ import annotations

import math

import numpy as np

EPS = 1e-9


def owrap(a: float) -> float:
    """Wrap to (-pi, pi] (independent reformulation of the same convention)."""
    return math.pi - ((math.pi - a) % (2.0 * math.pi))


def oracle_rhs_baseline(x, xi, A, B, J, K, omega):
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    n = len(xi)
    dx = np.zeros((n, 2))
    dxi = np.zeros(n)
    for i in range(n):
        sx = np.zeros(2)
        sxi = 0.0
        for j in range(n):
            if j == i:
                continue
            diff = x[j] - x[i]
            d = math.hypot(diff[0], diff[1])
            if d < EPS:
                continue
            s = xi[j] - xi[i]
            sx += ((A + J * math.cos(s)) / d - B / (d * d)) * diff
            sxi += K * math.sin(s) / d
        dx[i] = sx / n
        dxi[i] = omega[i] + sxi / n
    return dx, dxi


def oracle_rhs_sv(x, theta, xi, A, B, J, K, r, v0, omega, include_self=True):
    x = np.asarray(x, float)
    theta = np.asarray(theta, float)
    xi = np.asarray(xi, float)
    n = len(xi)
    dx = np.zeros((n, 2))
    dth = np.zeros(n)
    dxi = np.zeros(n)
    for i in range(n):
        nbrs = []
        for j in range(n):
            if j == i and not include_self:
                continue
            diff = x[j] - x[i]
            if math.hypot(diff[0], diff[1]) <= r:
                nbrs.append(j)
        cnt = max(len(nbrs), 1)
        sx = np.zeros(2)
        sth = 0.0
        sxi = 0.0
        for j in nbrs:
            diff = x[j] - x[i]
            d = math.hypot(diff[0], diff[1])
            sth += owrap(theta[j] - theta[i])
            if d < EPS:
                continue
            s = xi[j] - xi[i]
            sx += ((A + J * math.cos(s)) / d - B / (d * d)) * diff
            sxi += K * math.sin(s) / d
        dx[i] = v0 * np.array([math.cos(theta[i]), math.sin(theta[i])]) + sx / cnt
        dth[i] = sth / cnt
        dxi[i] = omega[i] + sxi / cnt
    return dx, dth, dxi


def oracle_rhs_scs(x, v, xi, A, B, J, K, H, beta, omega):
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    xi = np.asarray(xi, float)
    n = len(xi)
    dv = np.zeros((n, 2))
    dxi = np.zeros(n)
    for i in range(n):
        sv = np.zeros(2)
        sxi = 0.0
        for j in range(n):
            if j == i:
                continue
            diff = x[j] - x[i]
            d = math.hypot(diff[0], diff[1])
            sv += (H / (1.0 + d * d) ** beta) * (v[j] - v[i])
            if d < EPS:
                continue
            s = xi[j] - xi[i]
            sv += ((A + J * math.cos(s)) / d - B / (d * d)) * diff
            sxi += K * math.sin(s) / d
        dv[i] = sv / n
        dxi[i] = omega[i] + sxi / n
    return v.copy(), dv, dxi
