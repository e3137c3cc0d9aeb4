"""Finite matrix models on orbit windows of the partial bijection.

The basis is an orbit of one or more base points, walked in both directions
until the bijection runs out of domain or a truncation budget is spent. The
step element maps to the 0/1 chain matrix V; coefficients map to diagonal
evaluations. On full orbits this is an exact *-homomorphism; on truncated
windows the outermost indices of each cut side see wrong projections, so the
covariance checks exclude a strip as deep as the step being tested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .interval import DEFAULT_TOL
from .bijection import PartialBijection
from .crossed import CrossedProductAlgebra, CrossedProductElement
from .functions import SupportedFunction, polynomial, pullback

MERGE_TOL = 1e-12


def _point_key(x: float) -> int:
    return int(round(x / MERGE_TOL))


@dataclass
class OrbitChain:
    indices: list[int]
    minus_truncated: bool
    plus_truncated: bool


@dataclass
class OrbitSpec:
    """A finite window of orbit points, in chain order."""

    alpha: PartialBijection
    points: np.ndarray
    base_points: tuple[float, ...]
    truncation: int
    chains: list[OrbitChain] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def truncated(self) -> bool:
        return any(c.minus_truncated or c.plus_truncated for c in self.chains)

    @property
    def n_minus(self) -> int:
        """Steps from the first base point back to its chain start (<= 0)."""
        return -self._base_offset()[0]

    @property
    def n_plus(self) -> int:
        return self._base_offset()[1]

    def _base_offset(self) -> tuple[int, int]:
        key = _point_key(float(self.base_points[0]))
        for chain in self.chains:
            keys = [_point_key(float(self.points[i])) for i in chain.indices]
            if key in keys:
                pos = keys.index(key)
                return pos, len(chain.indices) - 1 - pos
        return 0, 0


def _walk(alpha: PartialBijection, x0: float, budget: int) -> tuple[list[float], list[float]]:
    fwd: list[float] = []
    y = x0
    while len(fwd) < budget and alpha.domain.contains(y, DEFAULT_TOL):
        ny = float(alpha.apply(np.asarray(y, dtype=float)))
        if ny == y:
            break  # interior fixed point: the orbit is a single point
        fwd.append(ny)
        y = ny
    back: list[float] = []
    y = x0
    while len(back) < budget and alpha.range.contains(y, DEFAULT_TOL):
        py = float(alpha.apply_inverse(np.asarray(y, dtype=float)))
        if py == y:
            break
        back.append(py)
        y = py
    return back, fwd


def build_orbit(alpha: PartialBijection, base_point, truncation: int = 64) -> OrbitSpec:
    """Orbit window through one base point or several (merged, deduplicated)."""
    if truncation < 1:
        raise ValueError("truncation budget must be at least 1")
    bases = [float(b) for b in (base_point if isinstance(base_point, (list, tuple, np.ndarray)) else [base_point])]
    if not bases:
        raise ValueError("need at least one base point")
    for b in bases:
        if not alpha.carrier.contains(b, DEFAULT_TOL):
            raise ValueError(f"base point {b} is outside the carrier {alpha.carrier}")

    seen: dict[int, float] = {}
    ordered: list[float] = []
    for b in bases:
        back, fwd = _walk(alpha, b, truncation)
        kb, kf = _centered_window(len(back), len(fwd), truncation)
        chain = list(reversed(back[:kb])) + [b] + fwd[:kf]
        for p in chain:
            k = _point_key(p)
            if k not in seen:
                seen[k] = p
                ordered.append(p)

    spec = OrbitSpec(
        alpha=alpha,
        points=np.asarray(ordered, dtype=float),
        base_points=tuple(bases),
        truncation=truncation,
    )
    spec.chains = _derive_chains(spec)
    return spec


def _centered_window(len_b: int, len_f: int, truncation: int) -> tuple[int, int]:
    """Keep the base point plus alternating nearest neighbours, forward first."""
    kf = kb = 0
    for i in range(truncation - 1):
        prefer_f = i % 2 == 0
        if prefer_f and kf < len_f:
            kf += 1
        elif not prefer_f and kb < len_b:
            kb += 1
        elif kf < len_f:
            kf += 1
        elif kb < len_b:
            kb += 1
        else:
            break
    return kb, kf


def _derive_chains(spec: OrbitSpec) -> list[OrbitChain]:
    alpha = spec.alpha
    idx = {_point_key(float(p)): i for i, p in enumerate(spec.points)}
    succ: dict[int, int] = {}
    fixed: set[int] = set()
    for j, p in enumerate(spec.points):
        if alpha.domain.contains(float(p), DEFAULT_TOL):
            q = _point_key(float(alpha.apply(np.asarray(p, dtype=float))))
            if q in idx:
                if idx[q] == j:
                    fixed.add(j)
                else:
                    succ[j] = idx[q]
    pred = {v: k for k, v in succ.items()}
    chains: list[OrbitChain] = []
    visited: set[int] = set()
    for j in sorted(fixed):
        chains.append(OrbitChain(indices=[j], minus_truncated=False, plus_truncated=False))
        visited.add(j)
    for j in range(spec.dim):
        if j in visited or j in pred:
            continue
        run = [j]
        visited.add(j)
        while run[-1] in succ:
            nxt = succ[run[-1]]
            if nxt in visited:
                break
            run.append(nxt)
            visited.add(nxt)
        first, last = float(spec.points[run[0]]), float(spec.points[run[-1]])
        chains.append(
            OrbitChain(
                indices=run,
                minus_truncated=alpha.range.contains(first, DEFAULT_TOL),
                plus_truncated=alpha.domain.contains(last, DEFAULT_TOL),
            )
        )
    return chains


@dataclass
class MatrixRep:
    orbit: OrbitSpec
    V: np.ndarray
    Vstar: np.ndarray

    @property
    def dim(self) -> int:
        return self.orbit.dim

    def step_power(self, n: int) -> np.ndarray:
        if n >= 0:
            return np.linalg.matrix_power(self.V, n)
        return np.linalg.matrix_power(self.Vstar, -n)

    def diag(self, f: SupportedFunction) -> np.ndarray:
        return np.diag(f(self.orbit.points))


def matrix_rep(orbit: OrbitSpec) -> MatrixRep:
    idx = {_point_key(float(p)): i for i, p in enumerate(orbit.points)}
    V = np.zeros((orbit.dim, orbit.dim), dtype=complex)
    for j, p in enumerate(orbit.points):
        if orbit.alpha.domain.contains(float(p), DEFAULT_TOL):
            q = _point_key(float(orbit.alpha.apply(np.asarray(p, dtype=float))))
            if q in idx:
                V[idx[q], j] = 1.0
    return MatrixRep(orbit=orbit, V=V, Vstar=V.T.conj())


def represent(x: CrossedProductElement, rep: MatrixRep) -> np.ndarray:
    """Matrix of an element: diagonal coefficients times chain-matrix powers."""
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for n, fn in x.terms.items():
        out += rep.diag(fn) @ rep.step_power(n)
    return out


def excluded_indices(orbit: OrbitSpec, n: int) -> set[int]:
    """Window indices whose step-n checks are polluted by truncation."""
    depth = abs(n)
    out: set[int] = set()
    for chain in orbit.chains:
        if chain.minus_truncated:
            out.update(chain.indices[:depth])
        if chain.plus_truncated:
            out.update(chain.indices[-depth:] if depth else [])
    return out


def _masked_max(mat: np.ndarray, keep: np.ndarray) -> float:
    sub = mat[np.ix_(keep, keep)]
    return float(np.max(np.abs(sub))) if sub.size else 0.0


def covariance_check(
    alg: CrossedProductAlgebra,
    rep: MatrixRep,
    sample_functions: Sequence[SupportedFunction] | None = None,
    ns: Sequence[int] = (-2, -1, 0, 1, 2),
    tol: float = 1e-10,
) -> dict:
    """Conjugation identity, projection shapes, and indicator matching per step."""
    pts = rep.orbit.points
    rows = []
    ok_all = True
    for n in ns:
        pb = alg.power(n)
        Vn = rep.step_power(n)
        excl = excluded_indices(rep.orbit, n)
        keep = np.array([i for i in range(rep.dim) if i not in excl], dtype=int)

        fs = sample_functions
        if fs is None:
            fs = [polynomial([0.5, 1.0, 0.75j], alg.carrier)]
        conj_res = 0.0
        for f in fs:
            fr = f.restrict(alg.interval_n(-n))
            lhs = Vn @ rep.diag(fr) @ Vn.T.conj()
            moved = rep.diag(pullback(fr.restrict(pb.domain), pb))
            conj_res = max(conj_res, _masked_max(lhs - moved, keep))

        PnV = Vn @ Vn.T.conj()
        QnV = Vn.T.conj() @ Vn
        in_range = alg.interval_n(n).contains(pts, DEFAULT_TOL).astype(complex)
        in_domain = alg.interval_n(-n).contains(pts, DEFAULT_TOL).astype(complex)
        zero_one = bool(
            np.all(np.isin(PnV.real, (0.0, 1.0))) and np.all(PnV.imag == 0.0)
            and np.all(np.isin(QnV.real, (0.0, 1.0))) and np.all(QnV.imag == 0.0)
        )
        range_exact = _masked_max(PnV - np.diag(in_range), keep) == 0.0
        domain_exact = _masked_max(QnV - np.diag(in_domain), keep) == 0.0
        proj_exact = _masked_max(PnV - rep.diag(alg.p(n)), keep) == 0.0

        row = {
            "n": int(n),
            "conjugation_residual": conj_res,
            "projections_zero_one": zero_one,
            "range_projection_exact": bool(range_exact),
            "domain_projection_exact": bool(domain_exact),
            "indicator_matches_projection": bool(proj_exact),
            "excluded_indices": sorted(excl),
        }
        row["pass"] = bool(
            conj_res <= tol and zero_one and range_exact and domain_exact and proj_exact
        )
        ok_all = ok_all and row["pass"]
        rows.append(row)
    return {"steps": rows, "pass": ok_all}
