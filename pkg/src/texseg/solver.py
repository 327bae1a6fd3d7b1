"""Convex multilabel segmentation solver.

Minimizes, over soft label indicators u on the pixel simplex,

    sum_i  <u_i, f_i>  +  (lam/2) * TV_g(u_i)  +  nu * m_i

where TV_g is the edge-weighted total variation (boundary length in the
metric g), m_i is the relaxed maximum of u_i (its label-activation cost)
and f is the data term. The saddle-point form couples u with a dual
vector field xi (constrained to |xi| <= lam*g/2) and the activation
constraint m_i >= u_i(x) with multipliers mu <= 0. Iterations alternate
projected gradient ascent in (xi, mu) with projected descent in (u, m)
plus over-relaxation; step sizes come from diagonal preconditioning
(reciprocal absolute row/column sums of the coupling operator):
tau_xi = tau_mu = 1/2, tau_u = 1/5, tau_m = 1/|domain|.

Vector fields carry their two components on the axis before (H, W), so
per-component slices stay contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DivergenceError(RuntimeError):
    """Non-finite values appeared during iteration."""


# ---------------------------------------------------------------------------
# discrete differential operators (forward differences, Neumann boundary)
# ---------------------------------------------------------------------------


def gradient(u, out=None):
    """Forward-difference gradient; u (..., H, W) -> (..., 2, H, W).

    Component 0 differentiates rows, component 1 columns; the last
    row/column gets zero (Neumann).
    """
    u = np.asarray(u)
    if out is None:
        out = np.zeros(u.shape[:-2] + (2,) + u.shape[-2:])
    out[..., 0, :-1, :] = u[..., 1:, :]
    out[..., 0, :-1, :] -= u[..., :-1, :]
    out[..., 0, -1, :] = 0.0
    out[..., 1, :, :-1] = u[..., :, 1:]
    out[..., 1, :, :-1] -= u[..., :, :-1]
    out[..., 1, :, -1] = 0.0
    return out


def divergence(xi, out=None):
    """Discrete divergence, the negative adjoint of `gradient`.

    xi (..., 2, H, W) -> (..., H, W), so <grad u, xi> + <u, div xi> = 0
    for all fields.
    """
    xi = np.asarray(xi)
    h, w = xi.shape[-2:]
    if out is None:
        out = np.empty(xi.shape[:-3] + xi.shape[-2:])
    if h > 1:
        out[..., 0, :] = xi[..., 0, 0, :]
        out[..., 1:-1, :] = xi[..., 0, 1:-1, :]
        out[..., 1:-1, :] -= xi[..., 0, :-2, :]
        out[..., -1, :] = -xi[..., 0, -2, :]
    else:
        out[...] = 0.0  # a single row has no vertical flux
    if w > 1:
        out[..., :, 0] += xi[..., 1, :, 0]
        out[..., :, 1:-1] += xi[..., 1, :, 1:-1]
        out[..., :, 1:-1] -= xi[..., 1, :, :-2]
        out[..., :, -1] -= xi[..., 1, :, -2]
    return out


def gradient_magnitude(gray):
    g = gradient(np.asarray(gray, dtype=np.float64))
    return np.sqrt(g[0] * g[0] + g[1] * g[1])


def edge_metric(gray, gamma=5.0, use_mean_gamma=False):
    """Boundary metric g(x) = exp(-|grad I(x)| / gamma) / (2 gamma).

    Cheap along strong intensity edges, at most 1/(2 gamma) in flat areas.
    With use_mean_gamma, gamma is the mean gradient magnitude of the
    image; otherwise the supplied constant (default 5, for 0..255 gray).
    """
    mag = gradient_magnitude(gray)
    if use_mean_gamma:
        gamma = float(mag.mean())
        if gamma <= 0:
            raise ValueError("mean gradient magnitude is zero; supply a constant gamma")
    elif gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return np.exp(-mag / gamma) / (2.0 * gamma)


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------


def project_simplex(v):
    """Euclidean projection of a vector onto {u >= 0, sum u = 1}."""
    v = np.asarray(v, dtype=np.float64)
    return project_simplex_columns(v[:, None])[:, 0]


def project_simplex_columns(v):
    """Column-wise simplex projection of an (n, ...) array (sort-based)."""
    n = v.shape[0]
    s = -np.sort(-v, axis=0)
    css = np.cumsum(s, axis=0) - 1.0
    j = np.arange(1, n + 1).reshape((n,) + (1,) * (v.ndim - 1))
    feasible = s - css / j > 0.0
    rho = n - 1 - np.argmax(feasible[::-1], axis=0)
    theta = np.take_along_axis(css, rho[None], axis=0) / (rho[None] + 1.0)
    return np.maximum(v - theta, 0.0)


def _project_simplex_fast(v):
    """Same projection, laid out for speed on (n, H, W) stacks."""
    n = v.shape[0]
    if n == 1:
        return np.ones_like(v)
    if n == 2:
        # water-filling in closed form on the 2-simplex segment
        theta = (v[0] + v[1] - 1.0) * 0.5
        x0 = np.clip(v[0] - theta, 0.0, 1.0)
        return np.stack([x0, 1.0 - x0])
    shape = v.shape
    vt = np.ascontiguousarray(v.reshape(n, -1).T)
    s = -np.sort(-vt, axis=1)
    css = np.cumsum(s, axis=1) - 1.0
    feasible = s * np.arange(1, n + 1) > css
    rho = n - 1 - np.argmax(feasible[:, ::-1], axis=1)
    theta = css[np.arange(vt.shape[0]), rho] / (rho + 1.0)
    np.subtract(vt, theta[:, None], out=vt)
    np.maximum(vt, 0.0, out=vt)
    return vt.T.reshape(shape).copy()


def project_ball(xi, radius):
    """Project 2-vectors (last axis) onto balls of the given radii.

    radius may be a scalar or a field broadcastable to xi.shape[:-1].
    """
    xi = np.asarray(xi, dtype=np.float64)
    nrm = np.sqrt((xi * xi).sum(axis=-1))
    r = np.broadcast_to(np.asarray(radius, dtype=np.float64), nrm.shape)
    scale = np.ones_like(nrm)
    over = nrm > r
    scale[over] = r[over] / nrm[over]
    return xi * scale[..., None]


def _ball_scale_inplace(xi, radius):
    """Clip component-first 2-vector fields (n, 2, H, W) to |.| <= radius."""
    nrm = xi[:, 0] * xi[:, 0]
    nrm += xi[:, 1] * xi[:, 1]
    np.sqrt(nrm, out=nrm)
    denom = np.maximum(nrm, radius)
    scale = np.ones_like(denom)
    np.divide(radius, denom, out=scale, where=denom > 0)
    xi[:, 0] *= scale
    xi[:, 1] *= scale


# ---------------------------------------------------------------------------
# primal-dual iteration
# ---------------------------------------------------------------------------


@dataclass
class RelaxationState:
    """Primal fields u (n,H,W), m (n,); duals xi (n,2,H,W), mu (n,H,W) <= 0;
    over-relaxed copies ubar/mbar; diagonal step sizes; iteration count and
    the residual history (mean per-pixel u change)."""

    u: np.ndarray
    m: np.ndarray
    xi: np.ndarray
    mu: np.ndarray
    ubar: np.ndarray
    mbar: np.ndarray
    tau_u: float
    tau_m: float
    tau_xi: float = 0.5
    tau_mu: float = 0.5
    iterations: int = 0
    residuals: list = field(default_factory=list)
    _grad: np.ndarray = field(default=None, repr=False)
    _div: np.ndarray = field(default=None, repr=False)
    _work: np.ndarray = field(default=None, repr=False)
    _mu_nonzero: bool = field(default=False, repr=False)


def init_state(f):
    """Fresh state: u one-hot at the data-term argmin, all labels active."""
    n, h, w = f.shape
    u = np.zeros((n, h, w))
    np.put_along_axis(u, np.argmin(f, axis=0)[None], 1.0, axis=0)
    return RelaxationState(
        u=u,
        m=np.ones(n),
        xi=np.zeros((n, 2, h, w)),
        mu=np.zeros((n, h, w)),
        ubar=u.copy(),
        mbar=np.ones(n),
        tau_u=1.0 / 5.0,
        tau_m=1.0 / (h * w),
        _grad=np.zeros((n, 2, h, w)),
        _div=np.empty((n, h, w)),
        _work=np.empty((n, h, w)),
    )


def primal_dual_step(state, f, radius, nu):
    """One sweep of the projected primal-dual updates, in place.

    Order: dual ascent in xi (gradient of ubar, clipped to the metric
    ball) and mu (activation violation, clipped to <= 0); primal descent
    in m (label cost nu plus integrated mu, clipped to [0,1]) and u
    (data + divergence + mu force, projected to the simplex);
    over-relaxation of u and m. Returns the mean |u - u_prev|.

    With nu == 0 and mu identically zero, the label-cost variables are a
    fixed point and their updates are skipped.
    """
    st = state
    gradient(st.ubar, out=st._grad)
    st._grad *= st.tau_xi
    st.xi += st._grad
    _ball_scale_inplace(st.xi, radius)

    mdl_active = nu != 0.0 or st._mu_nonzero
    if mdl_active:
        st._mu_nonzero = True
        np.subtract(st.mbar[:, None, None], st.ubar, out=st._work)
        st._work *= st.tau_mu
        st.mu += st._work
        np.minimum(st.mu, 0.0, out=st.mu)
        m_prev = st.m.copy()
        st.m = np.clip(st.m - st.tau_m * (nu + st.mu.sum(axis=(1, 2))), 0.0, 1.0)
        st.mbar = 2.0 * st.m - m_prev

    divergence(st.xi, out=st._div)
    np.subtract(f, st._div, out=st._work)
    if mdl_active:
        st._work -= st.mu
    st._work *= st.tau_u
    np.subtract(st.u, st._work, out=st._work)
    u_new = _project_simplex_fast(st._work)

    np.multiply(u_new, 2.0, out=st.ubar)
    st.ubar -= st.u
    np.subtract(u_new, st.u, out=st._work)
    np.abs(st._work, out=st._work)
    st.u = u_new
    st.iterations += 1
    return float(st._work.mean())


def solve(f, g, lam, nu, max_iters=2000, tol=1e-5):
    """Run the primal-dual scheme until the u change drops below tol.

    f: data term (n, H, W); g: edge metric (H, W); lam >= 0 boundary
    weight; nu >= 0 label cost. Raises DivergenceError if the iterate
    leaves the finite range.
    """
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    f = np.asarray(f, dtype=np.float64)
    state = init_state(f)
    radius = 0.5 * lam * np.asarray(g, dtype=np.float64)
    for _ in range(max_iters):
        res = primal_dual_step(state, f, radius, nu)
        if not np.isfinite(res) or not np.isfinite(state.m.sum()):
            raise DivergenceError(f"non-finite iterate at iteration {state.iterations}")
        state.residuals.append(res)
        if res < tol:
            break
    if not np.isfinite(state.u).all():
        raise DivergenceError(f"non-finite field after iteration {state.iterations}")
    return state


def binarize(state_or_u):
    """Per-pixel argmax labeling (1-based); ties go to the lowest label."""
    u = state_or_u.u if isinstance(state_or_u, RelaxationState) else np.asarray(state_or_u)
    return np.argmax(u, axis=0).astype(np.int32) + 1


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------


def _weighted_tv(u, g):
    grad = gradient(u)
    return float((g * np.sqrt(grad[0] * grad[0] + grad[1] * grad[1])).sum())


def energy(labels, f, g, lam, nu):
    """Discrete segmentation energy of a hard labeling (labels in 1..n):
    data sum + (lam/2) * edge-weighted boundary length + nu per active label."""
    labels = np.asarray(labels)
    n = f.shape[0]
    data = float(np.take_along_axis(f, labels[None] - 1, axis=0)[0].sum())
    per = sum(_weighted_tv((labels == i + 1).astype(np.float64), g) for i in range(n))
    active = np.unique(labels).size
    return data + 0.5 * lam * per + nu * active


def relaxed_energy(state, f, g, lam, nu):
    """Energy of the fractional state, with m_i standing in for the label
    indicator; lower-bounds the optimal hard energy at convergence."""
    data = float((state.u * f).sum())
    per = sum(_weighted_tv(state.u[i], g) for i in range(f.shape[0]))
    return data + 0.5 * lam * per + nu * float(state.m.sum())


def optimality_gap(state, labels, f, g, lam, nu, eps=1e-9):
    """Relative energy excess of the binarized labeling over the relaxed
    minimizer; small values certify near-optimality."""
    e_bin = energy(labels, f, g, lam, nu)
    e_rel = relaxed_energy(state, f, g, lam, nu)
    return (e_bin - e_rel) / max(abs(e_rel), eps)
