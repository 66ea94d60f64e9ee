"""Gauss-Laguerre rules: nodes are zeros of L_k, weights from L_{k+1}.

Roots come from Newton iteration with asymptotic initial guesses, each
confirmed by a sign-change bracket before polishing.  Rules are cached on
disk as one checksummed CSV per order.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .laguerre import _recurrence_scaled, laguerre_eval_scaled

_MAX_STEPS = 200
_RESIDUAL_TOL = 1e-13
_MIN_NORMAL = sys.float_info.min

_HEADER_RE = re.compile(r"# gauss-laguerre order=(\d+) flushed=(\d+) version=1$")
_CHECKSUM_MARKER = "# sha256="


class ConvergenceError(RuntimeError):
    """A Newton root search failed to converge within the step budget."""


class _CorruptCache(Exception):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Order-k rule for the weight e^{-x} on [0, inf)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


def _invariant_problem(order: int, nodes: np.ndarray, weights: np.ndarray) -> str | None:
    if len(nodes) != order or len(weights) != order:
        return "wrong number of nodes or weights"
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        return "non-finite entries"
    if nodes[0] <= 0.0:
        return "first node not positive"
    if np.any(np.diff(nodes) <= 0.0):
        return "nodes not strictly increasing"
    if nodes[-1] >= 4.0 * order + 2.0:
        return "last node beyond 4k+2"
    if np.any(weights < 0.0):
        return "negative weight"
    tol = 1e-12 if order <= 50 else 1e-9
    if abs(float(weights.sum()) - 1.0) > tol:
        return "weights do not sum to 1"
    return None


def _locate_root(k: int, i: int, seed: float, lo: float, hi: float) -> float:
    """Find the i-th zero of L_k in (lo, hi), lo being the previous zero.

    L_k is positive just right of lo when i is odd counting from 1 (it
    starts at L_k(0) = 1 and flips sign at every zero), so the sign tells
    which side of the target we are on.  A sign-change bracket is
    established around the seed first, then Newton runs with bisection as
    the fallback whenever a step would leave the bracket.
    """
    s_left = 1.0 if i % 2 == 1 else -1.0
    budget = _MAX_STEPS

    def evaluate(x):
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise ConvergenceError(f"root {i} of L_{k} did not converge in {_MAX_STEPS} steps")
        prev, cur, _, step = _recurrence_scaled(k, x)
        return prev, cur, step

    z = min(max(seed, lo + (hi - lo) * 1e-12), hi)
    prev, cur, step = evaluate(z)
    if abs(cur) <= _RESIDUAL_TOL * step:
        return z

    if cur * s_left > 0.0:
        # left of the root: march right with a growing step
        a = z
        d = 0.25 * max(z - lo, 1e-6)
        b = min(z + d, hi)
        while True:
            _, cur_b, step_b = evaluate(b)
            if abs(cur_b) <= _RESIDUAL_TOL * step_b:
                return b
            if cur_b * s_left < 0.0:
                break
            a = b
            d *= 2.0
            if b >= hi:
                raise ConvergenceError(f"no sign change found for root {i} of L_{k}")
            b = min(b + d, hi)
    else:
        # overshot: halve back toward the previous root
        b = z
        while True:
            cand = lo + 0.5 * (b - lo)
            _, cur_c, step_c = evaluate(cand)
            if abs(cur_c) <= _RESIDUAL_TOL * step_c:
                return cand
            if cur_c * s_left > 0.0:
                a = cand
                break
            b = cand

    # safeguarded Newton inside (a, b)
    z = 0.5 * (a + b)
    while True:
        prev, cur, step = evaluate(z)
        if abs(cur) <= _RESIDUAL_TOL * step:
            return z
        if cur * s_left > 0.0:
            a = z
        else:
            b = z
        denom = k * (cur - prev)
        znew = z - cur * z / denom if denom != 0.0 else 0.5 * (a + b)
        if not a < znew < b:
            znew = 0.5 * (a + b)
        if znew == z:
            return z
        z = znew


def _weight(k: int, x: float) -> float:
    lk1 = laguerre_eval_scaled(k + 1, x)
    base = x / ((k + 1.0) ** 2 * lk1.mantissa * lk1.mantissa)
    w = math.ldexp(base, -2 * lk1.exponent)
    # below the smallest normal double the tail contribution is noise
    return w if w >= _MIN_NORMAL else 0.0


def compute_rule(k: int) -> QuadratureRule:
    """Construct the k-point rule from scratch (no caching)."""
    if k < 1:
        raise ValueError("order must be >= 1")
    hi = 4.0 * k + 2.0
    nodes = np.empty(k)
    weights = np.empty(k)
    xm1 = xm2 = 0.0
    for i in range(1, k + 1):
        if i == 1:
            seed = 3.0 / (1.0 + 2.4 * k)
        elif i == 2:
            seed = xm1 + 15.0 / (1.0 + 2.5 * k)
        else:
            ai = i - 2
            seed = xm1 + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (xm1 - xm2)
        root = _locate_root(k, i, seed, xm1, hi)
        nodes[i - 1] = root
        weights[i - 1] = _weight(k, root)
        xm2, xm1 = xm1, root
    problem = _invariant_problem(k, nodes, weights)
    if problem is not None:
        raise ConvergenceError(f"rule of order {k} failed validation: {problem}")
    return QuadratureRule(k, nodes, weights)


def format_float(v: float) -> str:
    """17 significant digits, lowercase scientific, compact exponent."""
    mant, _, exp = f"{v:.16e}".partition("e")
    sign = "-" if exp.startswith("-") else ""
    digits = exp.lstrip("+-").lstrip("0") or "0"
    return f"{mant}e{sign}{digits}"


def _serialize_rule(rule: QuadratureRule) -> str:
    flushed = int(np.count_nonzero(rule.weights == 0.0))
    lines = [f"# gauss-laguerre order={rule.order} flushed={flushed} version=1"]
    for x, a in zip(rule.nodes, rule.weights):
        lines.append(f"{format_float(x)},{format_float(a)}")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    return f"{body}{_CHECKSUM_MARKER}{digest}\n"


def _parse_cache_text(text: str, k: int) -> QuadratureRule:
    pos = text.rfind(_CHECKSUM_MARKER)
    if pos < 0:
        raise _CorruptCache("missing checksum line")
    body = text[:pos]
    claimed = text[pos + len(_CHECKSUM_MARKER):].strip()
    if hashlib.sha256(body.encode("ascii", "replace")).hexdigest() != claimed:
        raise _CorruptCache("checksum mismatch")
    lines = body.splitlines()
    if not lines:
        raise _CorruptCache("empty body")
    m = _HEADER_RE.match(lines[0])
    if m is None or int(m.group(1)) != k:
        raise _CorruptCache("bad header")
    if len(lines) != k + 1:
        raise _CorruptCache("wrong row count")
    try:
        parsed = [line.split(",") for line in lines[1:]]
        nodes = np.array([float(p[0]) for p in parsed])
        weights = np.array([float(p[1]) for p in parsed])
    except (ValueError, IndexError) as exc:
        raise _CorruptCache(f"bad row: {exc}") from exc
    if int(m.group(2)) != int(np.count_nonzero(weights == 0.0)):
        raise _CorruptCache("flushed count mismatch")
    problem = _invariant_problem(k, nodes, weights)
    if problem is not None:
        raise _CorruptCache(problem)
    return QuadratureRule(k, nodes, weights)


def default_cache_dir() -> str:
    """Cache location; AVGKERNEL_CACHE_DIR overrides, empty disables."""
    env = os.environ.get("AVGKERNEL_CACHE_DIR")
    if env is not None:
        return env
    xdg = os.environ.get("XDG_CACHE_HOME", "")
    base = Path(xdg).expanduser() if xdg else Path("~/.cache").expanduser()
    return str(base / "avgkernel")


def load_or_compute_rule(k: int, cache_dir: str | os.PathLike | None) -> QuadratureRule:
    """compute_rule with a read-through disk cache.

    Corrupt or stale cache files are recomputed and replaced.  An empty
    cache_dir (or None) disables caching entirely.  Writes go through a
    temp file and os.replace, so concurrent readers never see partials.
    """
    if cache_dir is None or str(cache_dir) == "":
        return compute_rule(k)
    path = Path(cache_dir) / f"glq_{k}.csv"
    if path.is_file():
        try:
            return _parse_cache_text(path.read_text(encoding="ascii", errors="replace"), k)
        except _CorruptCache:
            pass
    rule = compute_rule(k)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".glq_{k}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(_serialize_rule(rule))
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return rule
