"""Complex-valued functions carrying an explicit support interval.

Every function is a closure plus metadata: values outside the declared
support are hard zero regardless of what the underlying formula would
return, so multiplying by a partial identity or pulling back along a
partial bijection can never leak values off the allowed set. Comparison
is grid-based; exactness claims elsewhere reduce to indicator algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .interval import DEFAULT_TOL, EMPTY, Interval, image_monotone
from .bijection import PartialBijection

RawMap = Callable[[np.ndarray], np.ndarray]

# slack used when deciding whether a support already sits inside a target set
SUPPORT_TOL = 1e-9


class SupportViolation(ValueError):
    """Raised when a function's support escapes the set an operation requires."""


@dataclass(frozen=True)
class SupportedFunction:
    """A bounded complex function on `carrier`, zero outside `support`.

    `raw` is the defining formula; it must accept numpy arrays and be valid
    at least on the support. `deriv`, when present, is the analytic
    derivative of the formula (used by the Poisson machinery; a central
    difference of `raw` is the fallback).
    """

    support: Interval
    raw: RawMap
    carrier: Interval
    label: str = ""
    deriv: RawMap | None = None

    def __call__(self, x):
        scalar = np.isscalar(x) or (hasattr(x, "ndim") and np.asarray(x).ndim == 0)
        xs = np.asarray(x, dtype=float)
        out = np.zeros(xs.shape, dtype=complex)
        if not self.support.is_empty:
            mask = self.support.contains(xs, DEFAULT_TOL)
            if np.any(mask):
                vals = np.asarray(self.raw(xs[mask]), dtype=complex)
                out[mask] = vals
        return complex(out[()]) if scalar else out

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "SupportedFunction") -> "SupportedFunction":
        self._check_carrier(other)
        a, b = self, other
        return SupportedFunction(
            support=a.support.hull(b.support),
            raw=lambda xs: a(xs) + b(xs),
            carrier=a.carrier,
            label=_join(a.label, "+", b.label),
        )

    def __sub__(self, other: "SupportedFunction") -> "SupportedFunction":
        return self + (-other)

    def __neg__(self) -> "SupportedFunction":
        return self.scale(-1.0)

    def __mul__(self, other: "SupportedFunction") -> "SupportedFunction":
        self._check_carrier(other)
        a, b = self, other
        return SupportedFunction(
            support=a.support.intersect(b.support),
            raw=lambda xs: np.asarray(a.raw(xs), dtype=complex) * np.asarray(b.raw(xs), dtype=complex),
            carrier=a.carrier,
            label=_join(a.label, "*", b.label),
        )

    def scale(self, c: complex) -> "SupportedFunction":
        c = complex(c)
        if c == 0:
            return zero_function(self.carrier)
        raw = self.raw
        f = replace(self, raw=lambda xs: c * np.asarray(raw(xs), dtype=complex))
        if self.deriv is not None:
            d = self.deriv
            f = replace(f, deriv=lambda xs: c * np.asarray(d(xs), dtype=complex))
        return f

    def conj(self) -> "SupportedFunction":
        raw = self.raw
        d = self.deriv
        return replace(
            self,
            raw=lambda xs: np.conjugate(np.asarray(raw(xs), dtype=complex)),
            deriv=None if d is None else (lambda xs: np.conjugate(np.asarray(d(xs), dtype=complex))),
            label=f"conj({self.label})" if self.label else "",
        )

    def restrict(self, iv: Interval) -> "SupportedFunction":
        return replace(self, support=self.support.intersect(iv))

    def derivative(self, step: float = 1e-5) -> "SupportedFunction":
        if self.deriv is not None:
            return replace(self, raw=self.deriv, deriv=None, label=f"d({self.label})")
        raw = self.raw

        def central(xs):
            xs = np.asarray(xs, dtype=float)
            hi = np.asarray(raw(xs + step), dtype=complex)
            lo = np.asarray(raw(xs - step), dtype=complex)
            return (hi - lo) / (2.0 * step)

        return replace(self, raw=central, deriv=None, label=f"d({self.label})")

    @property
    def is_zero(self) -> bool:
        return self.support.is_empty

    def _check_carrier(self, other: "SupportedFunction") -> None:
        if self.carrier != other.carrier:
            raise ValueError("functions live on different carrier intervals")


def _join(a: str, op: str, b: str) -> str:
    if a and b:
        return f"({a}{op}{b})"
    return ""


# -- constructors ----------------------------------------------------


def zero_function(carrier: Interval) -> SupportedFunction:
    return SupportedFunction(EMPTY, lambda xs: np.zeros(np.shape(xs), complex), carrier, "0")


def constant(value: complex, carrier: Interval, support: Interval | None = None) -> SupportedFunction:
    value = complex(value)
    if value == 0:
        return zero_function(carrier)
    return SupportedFunction(
        support=carrier if support is None else support,
        raw=lambda xs: np.full(np.shape(xs), value, dtype=complex),
        carrier=carrier,
        label=f"{value}",
        deriv=lambda xs: np.zeros(np.shape(xs), complex),
    )


def partial_identity(iv: Interval, carrier: Interval) -> SupportedFunction:
    """Indicator of iv: the projection-valued coefficient of the step elements."""
    return SupportedFunction(
        support=iv.intersect(carrier),
        raw=lambda xs: np.ones(np.shape(xs), dtype=complex),
        carrier=carrier,
        label=f"1_{iv}",
        deriv=lambda xs: np.zeros(np.shape(xs), complex),
    )


def polynomial(coeffs: Sequence[complex], carrier: Interval, support: Interval | None = None, label: str = "") -> SupportedFunction:
    """Polynomial with ascending coefficients c0 + c1 x + c2 x^2 + ..."""
    cs = np.asarray(list(coeffs), dtype=complex)
    if cs.size == 0:
        return zero_function(carrier)
    dcs = cs[1:] * np.arange(1, cs.size)
    return SupportedFunction(
        support=carrier if support is None else support,
        raw=lambda xs: np.polynomial.polynomial.polyval(np.asarray(xs, float), cs),
        carrier=carrier,
        label=label or "poly",
        deriv=lambda xs: np.polynomial.polynomial.polyval(np.asarray(xs, float), dcs)
        if dcs.size
        else np.zeros(np.shape(xs), complex),
    )


def exp_wave(k: float, carrier: Interval, support: Interval | None = None) -> SupportedFunction:
    """The plane-wave formula exp(i k x)."""
    return SupportedFunction(
        support=carrier if support is None else support,
        raw=lambda xs: np.exp(1j * k * np.asarray(xs, dtype=float)),
        carrier=carrier,
        label=f"exp({k}ix)",
        deriv=lambda xs: 1j * k * np.exp(1j * k * np.asarray(xs, dtype=float)),
    )


def sqrt_affine(a: float, b: float, carrier: Interval, support: Interval | None = None) -> SupportedFunction:
    """sqrt(a + b x) on the region where the radicand is nonnegative."""
    pos = _affine_nonneg_region(a, b)
    sup = (carrier if support is None else support).intersect(pos)

    def raw(xs):
        vals = a + b * np.asarray(xs, dtype=float)
        return np.sqrt(np.clip(vals, 0.0, None)).astype(complex)

    def deriv(xs):
        vals = a + b * np.asarray(xs, dtype=float)
        out = np.zeros(np.shape(xs), complex)
        good = vals > 0
        out[good] = b / (2.0 * np.sqrt(vals[good]))
        return out

    return SupportedFunction(sup, raw, carrier, f"sqrt({a}+{b}x)", deriv)


def _affine_nonneg_region(a: float, b: float) -> Interval:
    if b == 0:
        return Interval.real_line() if a >= 0 else EMPTY
    root = -a / b
    return Interval.at_least(root) if b > 0 else Interval.at_most(root)


def from_descriptor(desc: dict, carrier: Interval) -> SupportedFunction:
    """Build a function from its JSON descriptor (see the CLI formats)."""
    if not isinstance(desc, dict) or "type" not in desc:
        raise ValueError("function descriptor must be an object with a 'type' field")
    support = Interval.parse(desc["support"]) if "support" in desc else None
    kind = desc["type"]
    if kind == "poly":
        coeffs = [_as_complex(c) for c in desc.get("coeffs", [])]
        return polynomial(coeffs, carrier, support)
    if kind == "exp_wave":
        return exp_wave(float(desc["k"]), carrier, support)
    if kind == "sqrt_affine":
        return sqrt_affine(float(desc["a"]), float(desc["b"]), carrier, support)
    if kind == "indicator":
        iv = Interval.parse(desc["interval"])
        return partial_identity(iv if support is None else iv.intersect(support), carrier)
    if kind == "const":
        return constant(_as_complex(desc["value"]), carrier, support)
    if kind == "product":
        factors = desc.get("factors", [])
        if not factors:
            raise ValueError("product descriptor needs at least one factor")
        out = from_descriptor(factors[0], carrier)
        for d in factors[1:]:
            out = out * from_descriptor(d, carrier)
        return out
    raise ValueError(f"unknown function descriptor type {kind!r}")


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex value must be a [re, im] pair, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


# -- operations over a partial bijection ------------------------------


def pullback(f: SupportedFunction, pb: PartialBijection) -> SupportedFunction:
    """Transport f along pb: the result at y is f(pb^{-1}(y)).

    f must be supported inside pb's domain; anything else would push values
    off the ideal the operation is meant to land in, so it is an error.
    """
    if f.support.is_empty:
        return zero_function(f.carrier)
    if not f.support.subset_of(pb.domain, SUPPORT_TOL):
        raise SupportViolation(
            f"support {f.support} is not inside the bijection domain {pb.domain}"
        )
    new_support = image_monotone(f.support.intersect(pb.domain), pb.forward)
    inv = pb.inverse

    def raw(ys):
        return f(inv(np.asarray(ys, dtype=float)))

    return SupportedFunction(new_support, raw, f.carrier, f"pb({f.label})" if f.label else "")


def residual(f: SupportedFunction, g: SupportedFunction, grid_size: int = 101) -> float:
    """Max absolute difference over the default carrier grid."""
    f._check_carrier(g)
    xs = f.carrier.grid(grid_size)
    if xs.size == 0:
        return 0.0
    return float(np.max(np.abs(f(xs) - g(xs))))


def approx_equal(f: SupportedFunction, g: SupportedFunction, grid_size: int = 101, tol: float = 1e-9) -> bool:
    return residual(f, g, grid_size) <= tol
