"""Hot numeric kernels, numba-jitted by default with a pure-numpy fallback.

Set ADAPT_SWARM_NUMBA=0 to force the numpy path (or it is selected
automatically when numba is not importable).  Each kernel body is written
in the numpy subset numba's nopython mode accepts, so the same source
backs both implementations; benchmarks/bench_kernels.py compares them.

Weight matrices arrive pre-transposed (suffix _t) where the forward pass
needs them, so every np.dot sees C-contiguous operands.
"""

from __future__ import annotations

import os

import numpy as np


def _env_wants_numba() -> bool:
    return os.environ.get("ADAPT_SWARM_NUMBA", "1").strip().lower() not in (
        "0",
        "false",
        "no",
        "off",
    )


try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA and _env_wants_numba()


def _dense_forward(x, w_t, b):
    # x (B,D), w_t (D,O), b (O,) -> pre-activation (B,O)
    return np.dot(x, w_t) + b


def _dense_backward(x, w, dz):
    # x (B,D), w (O,D), dz (B,O) -> dw (O,D), db (O,), dx (B,D)
    dw = np.dot(np.ascontiguousarray(dz.T), x)
    db = np.sum(dz, 0)
    dx = np.dot(dz, w)
    return dw, db, dx


def _gru_forward(x, mask, wz_t, uz_t, bz, wr_t, ur_t, br, wh_t, uh_t, bh, h0):
    # x (B,T,D), mask (B,T) in {0,1}; masked steps pass the hidden state
    # through unchanged.  Returns hs (B,T+1,H) with hs[:,0]=h0 plus the
    # gate caches z, r and candidate c, each (B,T,H).
    B, T, _ = x.shape
    H = h0.shape[1]
    hs = np.empty((B, T + 1, H))
    zs = np.empty((B, T, H))
    rs = np.empty((B, T, H))
    cs = np.empty((B, T, H))
    h = h0.copy()
    hs[:, 0, :] = h
    for t in range(T):
        xt = np.ascontiguousarray(x[:, t, :])
        m = mask[:, t].copy().reshape(B, 1)
        az = np.dot(xt, wz_t) + np.dot(h, uz_t) + bz
        ar = np.dot(xt, wr_t) + np.dot(h, ur_t) + br
        # exponent clamp keeps exp() finite for any finite input
        z = 1.0 / (1.0 + np.exp(-np.minimum(np.maximum(az, -60.0), 60.0)))
        r = 1.0 / (1.0 + np.exp(-np.minimum(np.maximum(ar, -60.0), 60.0)))
        ac = np.dot(xt, wh_t) + np.dot(r * h, uh_t) + bh
        c = np.tanh(ac)
        hn = (1.0 - z) * h + z * c
        h = m * hn + (1.0 - m) * h
        hs[:, t + 1, :] = h
        zs[:, t, :] = z
        rs[:, t, :] = r
        cs[:, t, :] = c
    return hs, zs, rs, cs


def _gru_backward(x, mask, wz, uz, wr, ur, wh, uh, hs, zs, rs, cs, dh_last):
    # Backprop through time for the full sequence given the gradient at
    # the final hidden state.  Masked steps contribute nothing.
    B, T, D = x.shape
    H = dh_last.shape[1]
    dwz = np.zeros((H, D))
    duz = np.zeros((H, H))
    dbz = np.zeros(H)
    dwr = np.zeros((H, D))
    dur = np.zeros((H, H))
    dbr = np.zeros(H)
    dwh = np.zeros((H, D))
    duh = np.zeros((H, H))
    dbh = np.zeros(H)
    dx = np.zeros((B, T, D))
    dh = dh_last.copy()
    for t in range(T - 1, -1, -1):
        m = mask[:, t].copy().reshape(B, 1)
        xt = np.ascontiguousarray(x[:, t, :])
        hprev = np.ascontiguousarray(hs[:, t, :])
        z = zs[:, t, :]
        r = rs[:, t, :]
        c = cs[:, t, :]
        dnew = dh * m
        dpass = dh * (1.0 - m)
        dz = dnew * (c - hprev)
        dc = dnew * z
        dhp = dnew * (1.0 - z)
        dac = dc * (1.0 - c * c)
        dwh += np.dot(np.ascontiguousarray(dac.T), xt)
        dbh += np.sum(dac, 0)
        duh += np.dot(np.ascontiguousarray(dac.T), np.ascontiguousarray(r * hprev))
        drh = np.dot(dac, uh)
        dr = drh * hprev
        dhp += drh * r
        dar = dr * r * (1.0 - r)
        dwr += np.dot(np.ascontiguousarray(dar.T), xt)
        dbr += np.sum(dar, 0)
        dur += np.dot(np.ascontiguousarray(dar.T), hprev)
        dhp += np.dot(dar, ur)
        daz = dz * z * (1.0 - z)
        dwz += np.dot(np.ascontiguousarray(daz.T), xt)
        dbz += np.sum(daz, 0)
        duz += np.dot(np.ascontiguousarray(daz.T), hprev)
        dhp += np.dot(daz, uz)
        dx[:, t, :] = np.dot(daz, wz) + np.dot(dar, wr) + np.dot(dac, wh)
        dh = dpass + dhp
    return dwz, duz, dbz, dwr, dur, dbr, dwh, duh, dbh, dx, dh


def _adam_update(p, g, m, v, t, lr, b1, b2, eps):
    # in-place bias-corrected moment update on flat views
    m[:] = b1 * m + (1.0 - b1) * g
    v[:] = b2 * v + (1.0 - b2) * g * g
    mh = m / (1.0 - b1**t)
    vh = v / (1.0 - b2**t)
    p[:] = p - lr * mh / (np.sqrt(vh) + eps)


def _sgd_update(p, g, lr):
    p[:] = p - lr * g


_SOURCES = {
    "dense_forward": _dense_forward,
    "dense_backward": _dense_backward,
    "gru_forward": _gru_forward,
    "gru_backward": _gru_backward,
    "adam_update": _adam_update,
    "sgd_update": _sgd_update,
}

NUMPY_IMPL = dict(_SOURCES)
NUMBA_IMPL = (
    {name: _njit(cache=True)(fn) for name, fn in _SOURCES.items()}
    if _HAVE_NUMBA
    else {}
)

_ACTIVE = NUMBA_IMPL if USING_NUMBA else NUMPY_IMPL

dense_forward = _ACTIVE["dense_forward"]
dense_backward = _ACTIVE["dense_backward"]
gru_forward = _ACTIVE["gru_forward"]
gru_backward = _ACTIVE["gru_backward"]
adam_update = _ACTIVE["adam_update"]
sgd_update = _ACTIVE["sgd_update"]


def warmup() -> None:
    """Trigger jit compilation of every kernel on tiny inputs."""
    x = np.zeros((2, 3))
    w = np.zeros((4, 3))
    b = np.zeros(4)
    dense_forward(x, np.ascontiguousarray(w.T), b)
    dense_backward(x, w, np.zeros((2, 4)))
    seq = np.zeros((2, 2, 3))
    mask = np.ones((2, 2))
    h0 = np.zeros((2, 4))
    u = np.zeros((4, 4))
    hs, zs, rs, cs = gru_forward(
        seq, mask,
        np.ascontiguousarray(w.T), np.ascontiguousarray(u.T), b,
        np.ascontiguousarray(w.T), np.ascontiguousarray(u.T), b,
        np.ascontiguousarray(w.T), np.ascontiguousarray(u.T), b,
        h0,
    )
    gru_backward(seq, mask, w, u, w, u, w, u, hs, zs, rs, cs, np.zeros((2, 4)))
    p = np.zeros(3)
    adam_update(p, np.zeros(3), np.zeros(3), np.zeros(3), 1, 1e-3, 0.9, 0.999, 1e-8)
    sgd_update(p, np.zeros(3), 0.1)
