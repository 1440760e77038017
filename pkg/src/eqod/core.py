"""Core domain types: grids, trajectories, library terms, and support metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid1D",
    "Trajectory",
    "TrajectorySet",
    "LibraryTerm",
    "CoefficientVector",
    "STANDARD_TERMS",
    "term_from_tag",
    "support_from_coeffs",
    "f1_score",
    "coefficient_error",
    "SUPPORT_THRESHOLD",
]

# Support threshold for turning coefficients into a term set.
SUPPORT_THRESHOLD = 1e-3


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic space grid crossed with a uniform time grid.

    The spatial domain is [x0, x0 + length) with nx points; the point
    x0 + length is identified with x0 and not stored. Time runs from
    t_start to t_end inclusive with nt samples.
    """

    x0: float
    length: float
    nx: int
    t_start: float
    t_end: float
    nt: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("domain length must be positive")
        if self.nx < 8 or self.nt < 8:
            raise ValueError("need at least 8 points in each direction")
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def dx(self) -> float:
        return self.length / self.nx

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.nt - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.nt)


@dataclass(frozen=True)
class Trajectory:
    """One field sampled on a Grid1D; values[i, j] = u(x_j, t_i)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nt, self.grid.nx):
            raise ValueError(
                f"values shape {v.shape} does not match grid "
                f"({self.grid.nt}, {self.grid.nx})"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("trajectory contains non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class TrajectorySet:
    """M >= 1 trajectories sharing a single grid."""

    trajectories: tuple[Trajectory, ...]

    def __post_init__(self):
        trajs = tuple(self.trajectories)
        if not trajs:
            raise ValueError("need at least one trajectory")
        g = trajs[0].grid
        if any(t.grid != g for t in trajs[1:]):
            raise ValueError("all trajectories must share one grid")
        object.__setattr__(self, "trajectories", trajs)

    @property
    def grid(self) -> Grid1D:
        return self.trajectories[0].grid

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)


@dataclass(frozen=True, order=True)
class LibraryTerm:
    """Monomial candidate operator: a product of powers of u and its x-derivatives.

    ``powers[d]`` is the exponent of the d-th spatial derivative, d = 0..4,
    so u*u_x is (1, 1, 0, 0, 0) and u^2*u_x is (2, 1, 0, 0, 0).
    """

    powers: tuple[int, int, int, int, int]

    def __post_init__(self):
        if len(self.powers) != 5 or any(p < 0 for p in self.powers) or sum(self.powers) == 0:
            raise ValueError(f"invalid term powers {self.powers}")

    @property
    def tag(self) -> str:
        names = ("u", "u_x", "u_xx", "u_xxx", "u_xxxx")
        parts = []
        for name, p in zip(names, self.powers):
            if p == 1:
                parts.append(name)
            elif p > 1:
                parts.append(f"{name}^{p}")
        return "*".join(parts)

    @property
    def derivative_order(self) -> int:
        return max((d for d, p in enumerate(self.powers) if p > 0), default=0)

    @property
    def power(self) -> int:
        return sum(self.powers)

    def __repr__(self):
        return f"LibraryTerm({self.tag})"


def _t(*powers: int) -> LibraryTerm:
    return LibraryTerm(tuple(powers))


# The standard 10-term candidate set, in canonical column order.
STANDARD_TERMS: tuple[LibraryTerm, ...] = (
    _t(1, 0, 0, 0, 0),  # u
    _t(2, 0, 0, 0, 0),  # u^2
    _t(3, 0, 0, 0, 0),  # u^3
    _t(0, 1, 0, 0, 0),  # u_x
    _t(0, 0, 1, 0, 0),  # u_xx
    _t(0, 0, 0, 1, 0),  # u_xxx
    _t(0, 0, 0, 0, 1),  # u_xxxx
    _t(1, 1, 0, 0, 0),  # u*u_x
    _t(1, 0, 1, 0, 0),  # u*u_xx
    _t(2, 1, 0, 0, 0),  # u^2*u_x
)

_TAG_TO_TERM = {t.tag: t for t in STANDARD_TERMS}


def term_from_tag(tag: str) -> LibraryTerm:
    """Look up a term by its ASCII tag, e.g. "u_xx" or "u*u_x"."""
    try:
        return _TAG_TO_TERM[tag]
    except KeyError:
        names = {"u": 0, "u_x": 1, "u_xx": 2, "u_xxx": 3, "u_xxxx": 4}
        powers = [0, 0, 0, 0, 0]
        for part in tag.split("*"):
            name, _, exp = part.partition("^")
            if name not in names:
                raise ValueError(f"unknown term tag {tag!r}") from None
            powers[names[name]] += int(exp) if exp else 1
        return LibraryTerm(tuple(powers))


@dataclass(frozen=True)
class CoefficientVector:
    """Ordered (term, value) pairs over a term list."""

    terms: tuple[LibraryTerm, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.terms),):
            raise ValueError("one value per term required")
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_dict(cls, entries: dict, terms: tuple[LibraryTerm, ...] = STANDARD_TERMS):
        """Build a vector over ``terms`` from a {term-or-tag: value} mapping."""
        keyed = {
            (term_from_tag(k) if isinstance(k, str) else k): v for k, v in entries.items()
        }
        unknown = set(keyed) - set(terms)
        if unknown:
            raise ValueError(f"terms not in target ordering: {sorted(t.tag for t in unknown)}")
        return cls(terms, np.array([keyed.get(t, 0.0) for t in terms]))

    def as_dict(self) -> dict[LibraryTerm, float]:
        return dict(zip(self.terms, self.values))

    def value(self, term: LibraryTerm) -> float:
        d = self.as_dict()
        return float(d.get(term, 0.0))


def support_from_coeffs(coeffs: CoefficientVector, threshold: float = SUPPORT_THRESHOLD) -> frozenset:
    """Terms whose coefficient magnitude strictly exceeds ``threshold``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return frozenset(t for t, v in zip(coeffs.terms, coeffs.values) if abs(v) > threshold)


def f1_score(pred, truth):
    """Term-level precision, recall, and F1 of a predicted support.

    Precision is defined as 0 for an empty prediction, and F1 is 0 when
    precision + recall vanishes. An empty truth set is an error since
    recall would be undefined.
    """
    pred = frozenset(pred)
    truth = frozenset(truth)
    if not truth:
        raise ValueError("truth support must be nonempty")
    tp = len(pred & truth)
    precision = tp / len(pred) if pred else 0.0
    recall = tp / len(truth)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def coefficient_error(est: CoefficientVector, truth: CoefficientVector) -> float:
    """Mean absolute coefficient error over the standard 10-term universe.

    Terms absent from either vector count as zero; terms outside the
    standard universe are ignored so the error stays comparable across
    library sizes.
    """
    e = est.as_dict()
    t = truth.as_dict()
    return float(
        np.mean([abs(e.get(term, 0.0) - t.get(term, 0.0)) for term in STANDARD_TERMS])
    )
