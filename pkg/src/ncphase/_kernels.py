"""Hot numeric kernels.

Every kernel has a loop form that numba compiles and, where the work
vectorises, a numpy form used when numba is disabled. The public names at
the bottom of the module are bound once at import time.

Built-in phase spaces are passed to the kernels as a flat float parameter
vector (layout below, indices zero-based) so that one compiled function
serves all five spaces.
"""
import numpy as np

from ._accel import USE_NUMBA, jit

KIND_COMMUTATIVE = 0
KIND_CANONICAL = 1
KIND_LIE1 = 2
KIND_LIE2 = 3
KIND_QUADRATIC = 4

# parameter vector layout
P_KIND = 0
P_TH12 = 1
P_TH13 = 2
P_TH23 = 3
P_INV = 4  # 1/kappa, 1/kappa_hat or 1/kappa_bar; 0 is the undeformed limit
P_RHO = 5
P_TAU = 6
P_K = 7
P_L = 8
P_GAMMA = 9
N_PARAMS = 10

BLOWUP_LIMIT = 1e12


@jit
def fill_bivector(P, z, t, out):
    """Write the 6x6 bracket matrix of the space described by ``P`` into ``out``."""
    for a in range(6):
        for b in range(6):
            out[a, b] = 0.0
    for i in range(3):
        out[i, 3 + i] = 1.0
        out[3 + i, i] = -1.0
    kind = int(P[P_KIND])
    if kind == KIND_CANONICAL:
        out[0, 1] = P[P_TH12]
        out[1, 0] = -P[P_TH12]
        out[0, 2] = P[P_TH13]
        out[2, 0] = -P[P_TH13]
        out[1, 2] = P[P_TH23]
        out[2, 1] = -P[P_TH23]
    elif kind == KIND_LIE1:
        r = int(P[P_RHO])
        s = int(P[P_TAU])
        c = t * P[P_INV]
        out[r, s] = c
        out[s, r] = -c
    elif kind == KIND_LIE2 or kind == KIND_QUADRATIC:
        k = int(P[P_K])
        l = int(P[P_L])
        g = int(P[P_GAMMA])
        c = P[P_INV]
        if kind == KIND_QUADRATIC:
            c = c * t
        # {x_k, x_g} = c x_l ; {x_l, x_g} = -c x_k
        out[k, g] = c * z[l]
        out[g, k] = -c * z[l]
        out[l, g] = -c * z[k]
        out[g, l] = c * z[k]
        # {p_k, x_g} = c p_l ; {p_l, x_g} = -c p_k
        out[3 + k, g] = c * z[3 + l]
        out[g, 3 + k] = -c * z[3 + l]
        out[3 + l, g] = -c * z[3 + k]
        out[g, 3 + l] = c * z[3 + k]


@jit
def _flow_rhs_loop(P, m, F, z, t, B, out):
    fill_bivector(P, z, t, B)
    for a in range(6):
        s = 0.0
        for b in range(3):
            s -= B[a, b] * F[b]
        for b in range(3):
            s += B[a, 3 + b] * z[3 + b] / m
        out[a] = s


def _flow_rhs_np(P, m, F, z, t, B, out):
    fill_bivector(P, z, t, B)
    grad = np.empty(6)
    grad[:3] = -F
    grad[3:] = z[3:] / m
    out[:] = B @ grad


flow_rhs = _flow_rhs_loop if USE_NUMBA else _flow_rhs_np


@jit
def newton_accel(P, m, F, x, v, t, out):
    """Closed-form acceleration of the Newton system of each space."""
    for i in range(3):
        out[i] = F[i] / m
    kind = int(P[P_KIND])
    inv = P[P_INV]
    if kind == KIND_LIE1:
        r = int(P[P_RHO])
        s = int(P[P_TAU])
        out[r] -= inv * F[s]
        out[s] += inv * F[r]
    elif kind == KIND_LIE2:
        k = int(P[P_K])
        l = int(P[P_L])
        g = int(P[P_GAMMA])
        w = F[g] * inv
        out[g] += inv * (F[k] * v[l] - F[l] * v[k])
        out[l] += 2.0 * w * v[k] + w * w * x[l]
        out[k] += -2.0 * w * v[l] + w * w * x[k]
    elif kind == KIND_QUADRATIC:
        k = int(P[P_K])
        l = int(P[P_L])
        g = int(P[P_GAMMA])
        w = F[g] * inv
        out[k] += -w * (t * v[l] + x[l]) - w * t * (v[l] - w * t * x[k])
        out[l] += w * (t * v[k] + x[k]) + w * t * (v[k] + w * t * x[l])
        out[g] += inv * (F[k] * (t * v[l] + x[l]) - F[l] * (t * v[k] + x[k]))


@jit
def _bad(y):
    for i in range(y.shape[0]):
        if not np.isfinite(y[i]) or abs(y[i]) > BLOWUP_LIMIT:
            return True
    return False


@jit
def rk4_flow(P, m, F, z0, t0, dt, n_steps, Z, V):
    """Fixed-step RK4 on zdot = Pi grad H.

    Fills ``Z`` (phase points) and ``V`` (flow velocities) for nodes
    ``0..n_steps``. Returns the index of the first non-finite or runaway
    node, or -1.
    """
    B = np.empty((6, 6))
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    y = np.empty(6)
    for a in range(6):
        Z[0, a] = z0[a]
    if _bad(z0):
        return 0
    for n in range(n_steps):
        t = t0 + n * dt
        zn = Z[n]
        flow_rhs(P, m, F, zn, t, B, k1)
        for a in range(3):
            V[n, a] = k1[a]
        for a in range(6):
            y[a] = zn[a] + 0.5 * dt * k1[a]
        flow_rhs(P, m, F, y, t + 0.5 * dt, B, k2)
        for a in range(6):
            y[a] = zn[a] + 0.5 * dt * k2[a]
        flow_rhs(P, m, F, y, t + 0.5 * dt, B, k3)
        for a in range(6):
            y[a] = zn[a] + dt * k3[a]
        flow_rhs(P, m, F, y, t + dt, B, k4)
        for a in range(6):
            Z[n + 1, a] = zn[a] + dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
        if _bad(Z[n + 1]):
            return n + 1
    flow_rhs(P, m, F, Z[n_steps], t0 + n_steps * dt, B, k1)
    for a in range(3):
        V[n_steps, a] = k1[a]
    return -1


@jit
def rk4_newton(P, m, F, x0, v0, t0, dt, n_steps, X, V):
    """Fixed-step RK4 on the first-order reduction (x, v) of the Newton system."""
    a1 = np.empty(3)
    a2 = np.empty(3)
    a3 = np.empty(3)
    a4 = np.empty(3)
    xs = np.empty(3)
    vs = np.empty(3)
    v2 = np.empty(3)
    v3 = np.empty(3)
    v4 = np.empty(3)
    for i in range(3):
        X[0, i] = x0[i]
        V[0, i] = v0[i]
    if _bad(X[0]) or _bad(V[0]):
        return 0
    for n in range(n_steps):
        t = t0 + n * dt
        x = X[n]
        v = V[n]
        newton_accel(P, m, F, x, v, t, a1)
        for i in range(3):
            xs[i] = x[i] + 0.5 * dt * v[i]
            vs[i] = v[i] + 0.5 * dt * a1[i]
            v2[i] = vs[i]
        newton_accel(P, m, F, xs, vs, t + 0.5 * dt, a2)
        for i in range(3):
            xs[i] = x[i] + 0.5 * dt * v2[i]
            vs[i] = v[i] + 0.5 * dt * a2[i]
            v3[i] = vs[i]
        newton_accel(P, m, F, xs, vs, t + 0.5 * dt, a3)
        for i in range(3):
            xs[i] = x[i] + dt * v3[i]
            vs[i] = v[i] + dt * a3[i]
            v4[i] = vs[i]
        newton_accel(P, m, F, xs, vs, t + dt, a4)
        for i in range(3):
            X[n + 1, i] = x[i] + dt / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i])
            V[n + 1, i] = v[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])
        if _bad(X[n + 1]) or _bad(V[n + 1]):
            return n + 1
    return -1


# --- sampled-data kernels -------------------------------------------------


@jit
def _cumulative_simpson_loop(y, dt):
    n = y.shape[0]
    out = np.zeros(n)
    if n == 2:
        out[1] = 0.5 * dt * (y[0] + y[1])
        return out
    for i in range(1, n):
        if i % 2 == 0:
            out[i] = out[i - 2] + dt / 3.0 * (y[i - 2] + 4.0 * y[i - 1] + y[i])
        elif i == 1:
            out[i] = dt / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
        else:
            out[i] = out[i - 1] + dt / 12.0 * (-y[i - 2] + 8.0 * y[i - 1] + 5.0 * y[i])
    return out


def _cumulative_simpson_np(y, dt):
    n = y.shape[0]
    out = np.zeros(n)
    if n == 2:
        out[1] = 0.5 * dt * (y[0] + y[1])
        return out
    panels = dt / 3.0 * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(panels)
    out[1] = dt / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
    odd = np.arange(3, n, 2)
    out[odd] = out[odd - 1] + dt / 12.0 * (-y[odd - 2] + 8.0 * y[odd - 1] + 5.0 * y[odd])
    return out


@jit
def _second_derivative_loop(x, dt):
    n = x.shape[0]
    out = np.empty((n - 4, x.shape[1]))
    c = 1.0 / (12.0 * dt * dt)
    for i in range(2, n - 2):
        for j in range(x.shape[1]):
            out[i - 2, j] = c * (-x[i - 2, j] + 16.0 * x[i - 1, j] - 30.0 * x[i, j]
                                 + 16.0 * x[i + 1, j] - x[i + 2, j])
    return out


def _second_derivative_np(x, dt):
    return (-x[:-4] + 16.0 * x[1:-3] - 30.0 * x[2:-2] + 16.0 * x[3:-1] - x[4:]) / (12.0 * dt * dt)


cumulative_simpson = _cumulative_simpson_loop if USE_NUMBA else _cumulative_simpson_np
second_derivative = _second_derivative_loop if USE_NUMBA else _second_derivative_np
