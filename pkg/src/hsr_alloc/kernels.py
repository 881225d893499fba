"""Hot numeric kernels.

Every kernel exists twice: a vectorised numpy version and a numba ``@njit``
loop version with identical semantics. The module-level names dispatch to the
numba versions unless numba is missing or ``HSR_ALLOC_DISABLE_NUMBA`` is set
to a truthy value. Both sets stay importable (``numpy_impl``/``numba_impl``)
for tests and the benchmark.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _disabled_by_env() -> bool:
    return os.environ.get("HSR_ALLOC_DISABLE_NUMBA", "").strip().lower() not in (
        "", "0", "false", "no", "off",
    )


USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()

_CHUNK = 1 << 21  # elements per temporary outer product


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _expect_log1p_np(coef, weight, s):
    """out[i] = sum_j weight[j] * log1p(s[i] * coef[j])."""
    s = np.ascontiguousarray(s, dtype=np.float64).ravel()
    out = np.empty_like(s)
    step = max(1, _CHUNK // max(coef.size, 1))
    for a in range(0, s.size, step):
        blk = s[a:a + step]
        out[a:a + step] = np.log1p(blk[:, None] * coef[None, :]) @ weight
    return out


def _bisect_eta_np(beta, coef, weight, scale, r_th, tol, max_iter):
    """Solve (1-b) * scale * E(s) = r_th for eta on [0, 1], s = (1-eta)/(1-b).

    Returns (eta, feasible). Infeasible entries carry eta = nan.
    """
    beta = np.asarray(beta, dtype=np.float64)
    eta = np.full(beta.shape, np.nan)
    feasible = np.zeros(beta.shape, dtype=np.bool_)

    def g2(e, b):
        s = (1.0 - e) / (1.0 - b)
        return (1.0 - b) * scale * _expect_log1p_np(coef, weight, s)

    if r_th <= 0.0:
        eta[:] = 1.0
        feasible[:] = True
        return eta, feasible

    open_ = beta < 1.0
    idx = np.flatnonzero(open_)
    if idx.size == 0:
        return eta, feasible
    b = beta[idx]
    v0 = g2(np.zeros_like(b), b)
    ok = v0 >= r_th
    at_zero = ok & (v0 - r_th <= tol)
    eta[idx[at_zero]] = 0.0
    feasible[idx[ok]] = True

    work = ok & ~at_zero
    wi = idx[work]
    b = b[work]
    lo = np.zeros_like(b)
    hi = np.ones_like(b)
    vlo = v0[work]
    active = np.ones(b.shape, dtype=np.bool_)
    for _ in range(max_iter):
        if not active.any():
            break
        a = np.flatnonzero(active)
        mid = 0.5 * (lo[a] + hi[a])
        v = g2(mid, b[a])
        up = v >= r_th
        lo[a[up]] = mid[up]
        vlo[a[up]] = v[up]
        hi[a[~up]] = mid[~up]
        done = (vlo[a] - r_th <= tol) | (hi[a] - lo[a] <= 1e-15)
        active[a[done]] = False
    eta[wi] = lo
    return eta, feasible


def _select_rates_np(gains, coef):
    """Sum over (slot, subcarrier) of log2(1 + coef[m*] g[m*]), m* the first argmax."""
    m_star = np.argmax(gains, axis=-1)
    g = np.take_along_axis(gains, m_star[..., None], axis=-1)[..., 0]
    return float(np.log2(1.0 + coef[m_star] * g).sum())


def _block_tables(fd, T, N, n_idx, p_idx, tau):
    k = np.arange(N)
    rot = np.exp(2j * np.pi * fd * k * T / N)                            # (N,)
    steer = np.exp(-2j * np.pi * np.outer(n_idx, tau) / T)               # (W, L)
    diff = (np.asarray(n_idx)[:, None] - np.asarray(p_idx)[None, :]) % N  # (W, Wp)
    twiddle = np.exp(2j * np.pi * np.arange(N)[:, None] * k[None, :] / N)  # (N, N) indexed by diff
    return rot, steer, diff, twiddle


def _channel_block_np(phi1, phi2, amp, tau, fd, T, N, n_idx, p_idx):
    """DFT-domain channel block H[trial, n, p] from two-path taps.

    h(kT/N, n/T) = sum_l amp_l (e^{j(w t_k + phi1_l)} + e^{j(-w t_k + phi2_l)}) e^{-j2 pi n tau_l / T}
    H(n, p) = (1/N) sum_k h(kT/N, n/T) e^{j 2 pi (n - p) k / N}
    """
    rot, steer, diff, twiddle = _block_tables(fd, T, N, n_idx, p_idx, tau)
    fwd = (np.exp(1j * phi1) * amp) @ steer.T                            # (trials, W)
    bwd = (np.exp(1j * phi2) * amp) @ steer.T
    h = fwd[:, :, None] * rot + bwd[:, :, None] * rot.conj()            # (trials, W, N)
    out = np.empty((phi1.shape[0], len(n_idx), len(p_idx)), dtype=np.complex128)
    for a in range(len(n_idx)):
        out[:, a, :] = h[:, a, :] @ twiddle[diff[a]].T
    return out / N


numpy_impl = SimpleNamespace(
    expect_log1p=_expect_log1p_np,
    bisect_eta=_bisect_eta_np,
    select_rates=_select_rates_np,
    channel_block=_channel_block_np,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    njit = numba.njit(cache=True, fastmath=False)

    @njit
    def _expect_scalar(coef, weight, s):
        acc = 0.0
        for j in range(coef.size):
            acc += weight[j] * np.log1p(s * coef[j])
        return acc

    @njit
    def _expect_log1p_nb_impl(coef, weight, s):
        out = np.empty(s.size)
        for i in range(s.size):
            out[i] = _expect_scalar(coef, weight, s[i])
        return out

    def _expect_log1p_nb(coef, weight, s):
        s = np.ascontiguousarray(s, dtype=np.float64).ravel()
        return _expect_log1p_nb_impl(coef, weight, s)

    @njit
    def _bisect_eta_nb_impl(beta, coef, weight, scale, r_th, tol, max_iter, eta, feasible):
        for i in range(beta.size):
            b = beta[i]
            if r_th <= 0.0:
                eta[i] = 1.0
                feasible[i] = True
                continue
            if b >= 1.0:
                eta[i] = np.nan
                feasible[i] = False
                continue
            v0 = (1.0 - b) * scale * _expect_scalar(coef, weight, 1.0 / (1.0 - b))
            if v0 < r_th:
                eta[i] = np.nan
                feasible[i] = False
                continue
            feasible[i] = True
            if v0 - r_th <= tol:
                eta[i] = 0.0
                continue
            lo = 0.0
            hi = 1.0
            vlo = v0
            for _ in range(max_iter):
                mid = 0.5 * (lo + hi)
                v = (1.0 - b) * scale * _expect_scalar(coef, weight, (1.0 - mid) / (1.0 - b))
                if v >= r_th:
                    lo = mid
                    vlo = v
                else:
                    hi = mid
                if vlo - r_th <= tol or hi - lo <= 1e-15:
                    break
            eta[i] = lo

    def _bisect_eta_nb(beta, coef, weight, scale, r_th, tol, max_iter):
        beta = np.ascontiguousarray(beta, dtype=np.float64)
        flat = beta.ravel()
        eta = np.empty(flat.size)
        feasible = np.empty(flat.size, dtype=np.bool_)
        _bisect_eta_nb_impl(flat, coef, weight, float(scale), float(r_th), float(tol),
                            int(max_iter), eta, feasible)
        return eta.reshape(beta.shape), feasible.reshape(beta.shape)

    @njit
    def _select_rates_nb_impl(gains, coef):
        n_slots, n_sub, n_users = gains.shape
        total = 0.0
        for s in range(n_slots):
            for p in range(n_sub):
                best = 0
                gbest = gains[s, p, 0]
                for m in range(1, n_users):
                    if gains[s, p, m] > gbest:  # strict: ties keep the smaller index
                        gbest = gains[s, p, m]
                        best = m
                total += np.log2(1.0 + coef[best] * gbest)
        return total

    def _select_rates_nb(gains, coef):
        return float(_select_rates_nb_impl(np.ascontiguousarray(gains), coef))

    @njit
    def _channel_block_nb_impl(phi1, phi2, amp, rot, steer, diff, twiddle, N, out):
        n_trials, n_taps = phi1.shape
        W, Wp = diff.shape
        h = np.empty(N, dtype=np.complex128)
        for t in range(n_trials):
            for a in range(W):
                fwd = 0.0 + 0.0j
                bwd = 0.0 + 0.0j
                for l in range(n_taps):
                    fwd += amp[l] * np.exp(1j * phi1[t, l]) * steer[a, l]
                    bwd += amp[l] * np.exp(1j * phi2[t, l]) * steer[a, l]
                for k in range(N):
                    h[k] = fwd * rot[k] + bwd * np.conj(rot[k])
                for c in range(Wp):
                    row = diff[a, c]
                    acc = 0.0 + 0.0j
                    for k in range(N):
                        acc += h[k] * twiddle[row, k]
                    out[t, a, c] = acc / N

    def _channel_block_nb(phi1, phi2, amp, tau, fd, T, N, n_idx, p_idx):
        rot, steer, diff, twiddle = _block_tables(fd, T, N, n_idx, p_idx, tau)
        out = np.empty((phi1.shape[0], len(n_idx), len(p_idx)), dtype=np.complex128)
        _channel_block_nb_impl(np.ascontiguousarray(phi1), np.ascontiguousarray(phi2),
                               np.asarray(amp, np.float64), rot, steer,
                               diff.astype(np.int64), twiddle, int(N), out)
        return out

    numba_impl = SimpleNamespace(
        expect_log1p=_expect_log1p_nb,
        bisect_eta=_bisect_eta_nb,
        select_rates=_select_rates_nb,
        channel_block=_channel_block_nb,
    )
else:  # pragma: no cover
    numba_impl = None


def active_impl():
    return numba_impl if USE_NUMBA else numpy_impl


def expect_log1p(coef, weight, s):
    return active_impl().expect_log1p(coef, weight, s)


def bisect_eta(beta, coef, weight, scale, r_th, tol, max_iter=200):
    return active_impl().bisect_eta(beta, coef, weight, scale, r_th, tol, max_iter)


def select_rates(gains, coef):
    return active_impl().select_rates(gains, coef)


def channel_block(phi1, phi2, amp, tau, fd, T, N, n_idx, p_idx):
    return active_impl().channel_block(phi1, phi2, amp, tau, fd, T, N, n_idx, p_idx)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
