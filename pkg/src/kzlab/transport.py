"""Parallel transport along piecewise smooth paths and monodromy of braids."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .algebra import DomainError, LinearOperator
from .connections import ConnectionSpec

MIN_CLEARANCE = 1e-3
RESONANCE_TOL = 1e-4


@dataclass(frozen=True)
class Segment:
    """Either a straight move ``start -> end`` or a rotation of some points.

    A rotation turns the coordinates listed in ``movers`` about ``center`` by
    ``angle`` (radians, counterclockwise positive); others stay fixed.
    """

    start: np.ndarray
    end: np.ndarray | None = None
    movers: tuple = ()
    center: complex = 0j
    angle: float = 0.0

    @property
    def is_line(self) -> bool:
        return self.end is not None

    def point(self, s) -> np.ndarray:
        if self.is_line:
            return self.start + s * (self.end - self.start)
        z = self.start.copy()
        rot = np.exp(1j * self.angle * s)
        for k in self.movers:
            z[k] = self.center + (self.start[k] - self.center) * rot
        return z

    def velocity(self, s) -> np.ndarray:
        if self.is_line:
            return self.end - self.start
        v = np.zeros_like(self.start)
        rot = 1j * self.angle * np.exp(1j * self.angle * s)
        for k in self.movers:
            v[k] = (self.start[k] - self.center) * rot
        return v

    def final(self) -> np.ndarray:
        return self.point(1.0)

    def speed_bound(self) -> float:
        if self.is_line:
            return float(np.abs(self.end - self.start).max(initial=0.0))
        return float(abs(self.angle) * max((abs(self.start[k] - self.center) for k in self.movers),
                                           default=0.0))

    def reversed(self) -> "Segment":
        if self.is_line:
            return Segment(self.end.copy(), self.start.copy())
        return Segment(self.final(), None, self.movers, self.center, -self.angle)


def line(start, end) -> Segment:
    return Segment(np.asarray(start, dtype=complex), np.asarray(end, dtype=complex))


def rotation(start, movers, center, angle) -> Segment:
    return Segment(np.asarray(start, dtype=complex), None, tuple(movers), complex(center), float(angle))


def _samples(seg: Segment, n: int) -> np.ndarray:
    return np.array([seg.point(s) for s in np.linspace(0.0, 1.0, n)])


def segment_clearance(seg: Segment, n=2001) -> float:
    """Lower bound on ``min |z_i - z_j|`` along the segment.

    Uses dense sampling plus a Lipschitz bound on the pair differences.
    """
    pts = _samples(seg, n)
    d = pts.shape[1]
    if d < 2:
        return np.inf
    iu = np.triu_indices(d, 1)
    gaps = np.abs(pts[:, :, None] - pts[:, None, :])[:, iu[0], iu[1]]
    lip = 2 * seg.speed_bound()
    return float(gaps.min() - lip / (2 * (n - 1)))


@dataclass
class PathSpec:
    segments: list
    basepoint: np.ndarray
    word: str = ""
    clearance: float = field(default=np.inf)

    def __post_init__(self):
        self.basepoint = np.asarray(self.basepoint, dtype=complex)
        at = self.basepoint
        for seg in self.segments:
            if np.abs(seg.start - at).max(initial=0.0) > 1e-12:
                raise DomainError("path segments do not join continuously")
            at = seg.final()
        self.clearance = min((segment_clearance(s) for s in self.segments), default=np.inf)
        if self.clearance < MIN_CLEARANCE:
            raise DomainError(f"path clearance {self.clearance:.2e} below {MIN_CLEARANCE}")

    def endpoint(self) -> np.ndarray:
        return self.segments[-1].final() if self.segments else self.basepoint

    def reversed(self) -> "PathSpec":
        segs = [s.reversed() for s in reversed(self.segments)]
        return PathSpec(segs, self.endpoint(), f"({self.word})^-1")

    def then(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(self.segments + other.segments, self.basepoint,
                        f"{self.word}*{other.word}")

    def winding(self, i, j, n=4001) -> float:
        """Winding number of ``z_i - z_j`` along a closed path."""
        total = 0.0
        for seg in self.segments:
            pts = _samples(seg, n)
            diff = pts[:, i - 1] - pts[:, j - 1]
            total += np.sum(np.angle(diff[1:] / diff[:-1]))
        return total / (2 * np.pi)


def default_basepoint(d: int) -> np.ndarray:
    """``(0, 1, ..., d-1)`` with an imaginary stagger ``k * 1e-2``."""
    k = np.arange(d)
    return k + 1j * 1e-2 * k


def _log_increment(seg: Segment, i, j) -> complex:
    """Continuous change of ``log(z_i - z_j)`` along one segment."""
    a, b = seg.start[i - 1] - seg.start[j - 1], seg.final()[i - 1] - seg.final()[j - 1]
    if seg.is_line:
        return complex(np.log(b / a))
    inside = (i - 1 in seg.movers) + (j - 1 in seg.movers)
    if inside == 2:
        return complex(np.log(abs(b) / abs(a)) + 1j * seg.angle)
    if inside == 0:
        return 0j
    n = int(np.ceil(8 * seg.speed_bound() / max(abs(a), MIN_CLEARANCE))) + 64
    pts = _samples(seg, n)
    diff = pts[:, i - 1] - pts[:, j - 1]
    return complex(np.log(abs(b) / abs(a)) + 1j * np.sum(np.angle(diff[1:] / diff[:-1])))


@dataclass
class TransportResult:
    matrix: np.ndarray
    nfev: int
    steps: int
    segments: int

    def stats(self) -> dict:
        return {"nfev": self.nfev, "steps": self.steps, "segments": self.segments}


def transport_full(spec: ConnectionSpec, path: PathSpec, rtol=1e-10, atol=1e-12) -> TransportResult:
    """Fundamental matrix of the connection along ``path`` with statistics."""
    n = spec.dim
    total = np.eye(n, dtype=complex)
    nfev = steps = 0
    bare = ConnectionSpec(spec.dim_base, spec.terms, {}, spec.basis_id, spec.kind)
    for seg in path.segments:
        def rhs(s, y, seg=seg):
            Y = y.reshape(n, n)
            zs, vs = seg.point(s), seg.velocity(s)
            A = sum(v * Ak for v, Ak in zip(vs, bare.forms(zs, central=False)) if v != 0)
            if isinstance(A, int):
                return np.zeros_like(y)
            return (A @ Y).ravel()
        sol = solve_ivp(rhs, (0.0, 1.0), np.eye(n, dtype=complex).ravel(), method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise DomainError(f"integration failed: {sol.message}")
        nfev += sol.nfev
        steps += len(sol.t) - 1
        M = sol.y[:, -1].reshape(n, n)
        logc = sum(c * _log_increment(seg, i, j) for (i, j), c in spec.central.items())
        total = np.exp(logc) * M @ total
    return TransportResult(total, nfev, steps, len(path.segments))


def transport(spec: ConnectionSpec, path: PathSpec, rtol=1e-10, atol=1e-12) -> LinearOperator:
    """Fundamental matrix ``F(end) = T F(start)`` of ``dF = sum A dlog(z_ij) F``."""
    return LinearOperator(transport_full(spec, path, rtol, atol).matrix, spec.basis_id)


def min_gap(z) -> float:
    z = np.asarray(z)
    return float(np.abs(z[:, None] - z[None, :])[np.triu_indices(len(z), 1)].min())


def pure_braid_loop(i: int, j: int, basepoint, radius_factor=0.4) -> PathSpec:
    """``z_i`` goes once counterclockwise around ``z_j`` and returns.

    The approach rises vertically above all points, moves across, and descends
    to the top of a circle of radius ``radius_factor * min gap`` around
    ``z_j``; the return retraces it.
    """
    z = np.asarray(basepoint, dtype=complex)
    if i == j:
        raise DomainError("loop needs distinct strands")
    gap = min_gap(z)
    r = radius_factor * gap
    top = z.imag.max() + gap
    zi, zj = z[i - 1], z[j - 1]
    p1 = zi.real + 1j * top
    p2 = zj.real + 1j * top
    p3 = zj + 1j * r
    segs, at = [], z.copy()
    for target in (p1, p2, p3):
        nxt = at.copy()
        nxt[i - 1] = target
        if abs(target - at[i - 1]) > 0:
            segs.append(line(at, nxt))
        at = nxt
    approach = segs
    circle = rotation(at, (i - 1,), zj, 2 * np.pi)
    back = [s.reversed() for s in reversed(approach)]
    return PathSpec(approach + [circle] + back, z, f"A[{i},{j}]")


def half_twist(i: int, basepoint) -> PathSpec:
    """``z_i`` and ``z_{i+1}`` swap by a counterclockwise half turn about their midpoint."""
    z = np.asarray(basepoint, dtype=complex)
    c = 0.5 * (z[i - 1] + z[i])
    return PathSpec([rotation(z, (i - 1, i), c, np.pi)], z, f"s[{i}]")


def full_twist(basepoint) -> PathSpec:
    """Rigid rotation of all points by ``2 pi`` about their centroid."""
    z = np.asarray(basepoint, dtype=complex)
    return PathSpec([rotation(z, tuple(range(len(z))), z.mean(), 2 * np.pi)], z, "Delta^2")


@dataclass
class MonodromyResult:
    matrix: LinearOperator
    braid_word: str
    basepoint: np.ndarray
    stats: dict

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.matrix.dense()))

    def to_dict(self) -> dict:
        return {"braid_word": self.braid_word, "basepoint": self.basepoint,
                "stats": self.stats, "condition": self.condition,
                "matrix": self.matrix.dense()}


def monodromy(spec: ConnectionSpec, path: PathSpec, rtol=1e-10, swap=None) -> MonodromyResult:
    """Transport along ``path``, optionally followed by a strand relabeling ``swap``."""
    res = transport_full(spec, path, rtol=rtol)
    M = res.matrix if swap is None else np.asarray(swap) @ res.matrix
    return MonodromyResult(LinearOperator(M, spec.basis_id), path.word, path.basepoint,
                           res.stats())


def is_resonant(eigs, tol=RESONANCE_TOL) -> bool:
    for a, b in itertools.combinations(eigs, 2):
        diff = a - b
        k = np.round(diff.real)
        if k != 0 and abs(diff - k) < tol:
            return True
    return False


def local_exponents(spec: ConnectionSpec, i: int, j: int) -> dict:
    """Predicted local monodromy eigenvalues ``exp(2 pi i spec(A_ij + c_ij))``."""
    lam = np.linalg.eigvals(spec.coefficient(i, j))
    return {"exponents": lam, "eigenvalues": np.exp(2j * np.pi * lam),
            "resonant": is_resonant(lam)}
