"""Direct transcriptions of the published closed forms, evaluated in mpmath.

These deliberately use the raw alternating expressions at high precision so
they share no numerics with the package's stable rearrangements.
"""

import mpmath as mp

DPS = 50


def _partial_exp(x, n):
    """e^{-x} sum_{j<=n} x^j / j!."""
    return mp.exp(-x) * mp.fsum(x**j / mp.factorial(j) for j in range(n + 1)) if n >= 0 else mp.mpf(0)


def phi(z, v, theta, m, p):
    with mp.workdps(DPS):
        z, v, theta, m = (mp.mpf(x) for x in (z, v, theta, m))
        lam, a, xi, M, V = mp.mpf(p.lam), mp.mpf(p.a), mp.mpf(p.xi), p.M, mp.mpf(p.V)
        b = 1 - a
        d = z * m * (lam + b * theta) / (lam + theta)
        A = v + xi * (1 - d)
        B = xi + v
        t1 = B / A
        t2 = (d * xi) ** M * (1 - _partial_exp(B * V, M - 2)) / (A * B ** (M - 1))
        t3 = d * xi * mp.exp(-B * V) * mp.fsum((d * xi * V) ** j / mp.factorial(j) for j in range(M - 1)) / A
        return t1 - t2 - t3


def joint(z, v, theta, m, p):
    with mp.workdps(DPS):
        lam, mu, a, xi = (mp.mpf(x) for x in (p.lam, p.mu, p.a, p.xi))
        b = 1 - a
        theta = mp.mpf(theta)
        s = mp.mpf(z) * xi / (xi + v) * m
        g = a * s / (1 - b * s)
        gamma = mu / (mu + theta + lam - lam * g)
        bracket = 1 + b * mu / (lam + b * theta) + a * lam * mu / ((lam + b * theta) * (lam + theta)) * phi(
            z, v, theta, m, p
        )
        return 1 - (1 - gamma) * bracket


def pgf_nodes(z, p):
    with mp.workdps(DPS):
        z = mp.mpf(z)
        lam, mu, a, xi, M, V = mp.mpf(p.lam), mp.mpf(p.mu), mp.mpf(p.a), mp.mpf(p.xi), p.M, mp.mpf(p.V)
        b = 1 - a
        x = xi * V
        K = _partial_exp(x, M - 2)
        phi_star = 1 - z**M * (1 - K) - mp.exp(-x) * mp.fsum(x**j / mp.factorial(j) * z ** (j + 1) for j in range(M - 1))
        return a * mu * (1 - phi_star) / (lam + mu - (lam + b * mu) * z)


def lst_weight(v, p):
    with mp.workdps(DPS):
        v = mp.mpf(v)
        lam, mu, a, xi = (mp.mpf(x) for x in (p.lam, p.mu, p.a, p.xi))
        k = (lam + mu) / (a * mu * xi)
        return (xi + v - v * phi(1, v, 0, 1, p)) / (xi * (1 + k * v))


def lst_time(theta, p):
    with mp.workdps(DPS):
        theta = mp.mpf(theta)
        lam, mu, a, xi, M, V = mp.mpf(p.lam), mp.mpf(p.mu), mp.mpf(p.a), mp.mpf(p.xi), p.M, mp.mpf(p.V)
        b = 1 - a
        d = (lam + b * theta) / (lam + theta)
        x = xi * V
        K = _partial_exp(x, M - 2)
        ph = (1 - d**M * (1 - K) - d * mp.exp(-x) * mp.fsum((d * x) ** j / mp.factorial(j) for j in range(M - 1))) / (1 - d)
        bracket = 1 + b * mu / (lam + b * theta) + a * lam * mu / ((lam + b * theta) * (lam + theta)) * ph
        return 1 - theta / (mu + theta) * bracket


def phi_i(i, t, p):
    with mp.workdps(DPS):
        lam, mu, t = mp.mpf(p.lam), mp.mpf(p.mu), mp.mpf(t)
        first = (1 - _partial_exp(lam * t, i)) / lam ** (i + 1)
        c = lam - mu
        second = mp.exp(-mu * t) / c ** (i + 1) * (
            1 - mp.exp(-c * t) * mp.fsum((c * t) ** r / mp.factorial(r) for r in range(i + 1))
        )
        return first - second


def crossing_cdf(t, p):
    """Mixture over phi_i with the binomial coefficients c_i and d_i."""
    with mp.workdps(DPS):
        lam, a, xi, M, V = mp.mpf(p.lam), mp.mpf(p.a), mp.mpf(p.xi), p.M, mp.mpf(p.V)
        b = 1 - a
        x = xi * V
        K = _partial_exp(x, M - 2)
        ph = [phi_i(i, t, p) for i in range(M)]
        total = lam * (1 - K) * mp.fsum(
            mp.binomial(M - 1, i) * (a * lam) ** i * b ** (M - 1 - i) * ph[i] for i in range(M)
        )
        for j in range(M - 1):
            inner = mp.fsum(mp.binomial(j, i) * (a * lam) ** i * b ** (j - i) * ph[i] for i in range(j + 1))
            total += lam * mp.exp(-x) * x**j / mp.factorial(j) * inner
        return total
