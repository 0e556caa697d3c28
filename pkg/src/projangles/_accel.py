"""Hot numeric kernels with an optional numba backend.

Two kernels dominate runtime: the matrix power sequence behind
``iterate_product`` and the sampled operator-norm maximisation used for
norms without a closed-form induced norm.  Each has a numba version and
a plain numpy version with identical semantics.

Set ``PROJANGLES_DISABLE_NUMBA=1`` to force the numpy path.
"""
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("PROJANGLES_DISABLE_NUMBA", "") not in ("1", "true", "yes")

# status codes shared by both power-iteration backends
CONVERGED = 0
DIVERGED = 1
INCONCLUSIVE = 2

# norm codes understood by the ratio kernels
NORM_EUCLIDEAN = 0
NORM_ABS_SUM = 1
NORM_MIXED = 2


def _noop_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(f):
        return f

    return wrap


njit = numba.njit if HAVE_NUMBA else _noop_jit


# ---------------------------------------------------------------------------
# numba kernels


@njit(cache=True)
def _power_iterate_nb(m, max_steps, tol, blowup):
    n = m.shape[0]
    a = m.copy()
    b = np.empty_like(m)
    step_norms = np.empty(max_steps)
    for k in range(max_steps):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for l in range(n):
                    s += a[i, l] * m[l, j]
                b[i, j] = s
        d = 0.0
        nb = 0.0
        for i in range(n):
            for j in range(n):
                t = b[i, j] - a[i, j]
                d += t * t
                nb += b[i, j] * b[i, j]
        d = np.sqrt(d)
        nb = np.sqrt(nb)
        step_norms[k] = d
        if not np.isfinite(nb) or nb > blowup:
            return b, k + 1, step_norms[: k + 1], DIVERGED
        if d < tol * max(1.0, nb):
            return b, k + 1, step_norms[: k + 1], CONVERGED
        a, b = b, a
    return a, max_steps, step_norms, INCONCLUSIVE


@njit(cache=True)
def _vec_norm_nb(x, kind):
    e = 0.0
    a = 0.0
    for i in range(x.shape[0]):
        e += x[i] * x[i]
        a += abs(x[i])
    if kind == NORM_ABS_SUM:
        return a
    e = np.sqrt(e)
    if kind == NORM_EUCLIDEAN:
        return e
    return e + a


@njit(cache=True)
def _matvec_nb(m, x, out):
    n = m.shape[0]
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += m[i, j] * x[j]
        out[i] = s


@njit(cache=True)
def _ratio_nb(m, x, kind, buf):
    den = _vec_norm_nb(x, kind)
    if den == 0.0:
        return -1.0
    _matvec_nb(m, x, buf)
    return _vec_norm_nb(buf, kind) / den


@njit(cache=True)
def _ratios_nb(m, directions, kind):
    out = np.empty(directions.shape[0])
    buf = np.empty(m.shape[0])
    for r in range(directions.shape[0]):
        out[r] = _ratio_nb(m, directions[r], kind, buf)
    return out


@njit(cache=True)
def _refine_nb(m, x0, kind, step0, min_step, max_moves):
    n = x0.shape[0]
    buf = np.empty(n)
    x = x0 / np.sqrt(np.sum(x0 * x0))
    y = np.empty(n)
    best = _ratio_nb(m, x, kind, buf)
    step = step0
    moves = 0
    while step > min_step and moves < max_moves:
        improved = False
        for i in range(n):
            for sgn in (1.0, -1.0):
                y[:] = x
                y[i] += sgn * step
                q = _ratio_nb(m, y, kind, buf)
                if q > best:
                    best = q
                    x = y / np.sqrt(np.sum(y * y))
                    improved = True
                    moves += 1
                    break
            if improved:
                break
        if not improved:
            step *= 0.5
    return best


# ---------------------------------------------------------------------------
# numpy fallbacks


def _power_iterate_np(m, max_steps, tol, blowup):
    a = m.copy()
    step_norms = np.empty(max_steps)
    for k in range(max_steps):
        b = a @ m
        d = np.linalg.norm(b - a)
        nb = np.linalg.norm(b)
        step_norms[k] = d
        if not np.isfinite(nb) or nb > blowup:
            return b, k + 1, step_norms[: k + 1], DIVERGED
        if d < tol * max(1.0, nb):
            return b, k + 1, step_norms[: k + 1], CONVERGED
        a = b
    return a, max_steps, step_norms, INCONCLUSIVE


def _vec_norms_np(x, kind):
    if kind == NORM_ABS_SUM:
        return np.abs(x).sum(axis=-1)
    e = np.sqrt((x * x).sum(axis=-1))
    if kind == NORM_EUCLIDEAN:
        return e
    return e + np.abs(x).sum(axis=-1)


def _ratios_np(m, directions, kind):
    den = _vec_norms_np(directions, kind)
    num = _vec_norms_np(directions @ m.T, kind)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), -1.0)


def _refine_np(m, x0, kind, step0, min_step, max_moves):
    # same search as the numba kernel, one candidate at a time
    n = x0.shape[0]
    x = x0 / np.linalg.norm(x0)
    best = float(_vec_norms_np(m @ x, kind) / _vec_norms_np(x, kind))
    step = step0
    moves = 0
    while step > min_step and moves < max_moves:
        improved = False
        for i in range(n):
            for sgn in (1.0, -1.0):
                y = x.copy()
                y[i] += sgn * step
                den = _vec_norms_np(y, kind)
                if den == 0.0:
                    continue
                q = float(_vec_norms_np(m @ y, kind) / den)
                if q > best:
                    best = q
                    x = y / np.linalg.norm(y)
                    improved = True
                    moves += 1
                    break
            if improved:
                break
        if not improved:
            step *= 0.5
    return best


# ---------------------------------------------------------------------------
# public dispatch


def power_iterate(m, max_steps, tol, blowup, backend=None):
    """Run ``A_{k+1} = A_k M`` from ``A_1 = M``.

    Returns ``(last_matrix, steps, step_norms, status)``.  A step counts as
    converged when ``||A_{k+1} - A_k||_F < tol * max(1, ||A_{k+1}||_F)``.
    """
    m = np.ascontiguousarray(m, dtype=np.float64)
    if _pick(backend):
        a, k, norms, status = _power_iterate_nb(m, int(max_steps), float(tol), float(blowup))
    else:
        a, k, norms, status = _power_iterate_np(m, int(max_steps), float(tol), float(blowup))
    return np.array(a), int(k), np.array(norms), int(status)


def norm_ratios(m, directions, kind, backend=None):
    """``||M x|| / ||x||`` for every row ``x`` of ``directions``."""
    m = np.ascontiguousarray(m, dtype=np.float64)
    directions = np.ascontiguousarray(directions, dtype=np.float64)
    if _pick(backend):
        return _ratios_nb(m, directions, int(kind))
    return _ratios_np(m, directions, int(kind))


def max_norm_ratio(m, directions, kind, backend=None):
    """Largest ``||M x|| / ||x||`` over the rows of ``directions``.

    Returns ``(value, row_index)``.
    """
    q = norm_ratios(m, directions, kind, backend)
    idx = int(np.argmax(q))
    return float(q[idx]), idx


def refine_norm_ratio(m, x0, kind, step0=0.25, min_step=1e-9, max_moves=100000, backend=None):
    """Coordinate-wise ascent of ``||M x|| / ||x||`` starting at ``x0``."""
    m = np.ascontiguousarray(m, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    fn = _refine_nb if _pick(backend) else _refine_np
    return float(fn(m, x0, int(kind), float(step0), float(min_step), int(max_moves)))


def vector_norm(x, kind):
    return float(_vec_norms_np(np.asarray(x, dtype=np.float64), kind))


def _pick(backend):
    if backend is None:
        return USE_NUMBA
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def warmup():
    """Compile the numba kernels once so later calls are timed fairly."""
    if not USE_NUMBA:
        return
    m = np.eye(2)
    power_iterate(m, 2, 1e-12, 1e12)
    for kind in (NORM_EUCLIDEAN, NORM_ABS_SUM, NORM_MIXED):
        max_norm_ratio(m, np.eye(2), kind)
        refine_norm_ratio(m, np.ones(2), kind, max_moves=2)
