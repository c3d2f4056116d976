"""Integer-lattice geometry: points, canonical edges, finite domains, seed regions.

Conventions
-----------
A point is a plain tuple of ``d >= 2`` ints.  A domain is an axis-aligned box
given by closed per-axis integer ranges; tubes, slabs and planes are just
particular range choices.  Domain boundaries are hard walls: sites outside a
domain are never enumerated, never susceptible and never relaxed.

Seed regions describe the initial infected sets.  Infinite regions (the full
hyperplane, the negative half-axis, cones) are truncated to finite windows by
explicit parameters; every experiment records its truncation settings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, ContractViolation, DomainError

Coords = tuple  # a lattice point: tuple of d ints


def _check_point(p, d: int | None = None) -> None:
    if not isinstance(p, tuple) or len(p) < 2:
        raise ContractViolation(f"point must be a tuple of >= 2 ints, got {p!r}")
    if d is not None and len(p) != d:
        raise ContractViolation(f"point {p!r} has dimension {len(p)}, expected {d}")


def unit_vector(d: int, axis: int) -> Coords:
    """The standard basis point e_axis in d dimensions (0-based axis)."""
    return tuple(1 if i == axis else 0 for i in range(d))


def axis_point(n: int, d: int = 2) -> Coords:
    """The point (n, 0, ..., 0)."""
    return (n,) + (0,) * (d - 1)


@dataclass(frozen=True)
class Edge:
    """A nearest-neighbor bond in canonical order (lexicographically smaller endpoint first)."""

    low: Coords
    high: Coords

    def __post_init__(self):
        _check_point(self.low)
        _check_point(self.high, len(self.low))
        diffs = [i for i in range(len(self.low)) if self.low[i] != self.high[i]]
        if len(diffs) != 1 or self.high[diffs[0]] - self.low[diffs[0]] != 1:
            raise ContractViolation(
                f"not a canonical nearest-neighbor edge: {self.low!r} -> {self.high!r}"
            )

    @property
    def axis(self) -> int:
        for i in range(len(self.low)):
            if self.low[i] != self.high[i]:
                return i
        raise AssertionError("degenerate edge")  # unreachable after validation


def canonical_edge(p: Coords, q: Coords) -> Edge:
    """The canonical edge between nearest neighbors p and q (order-insensitive)."""
    _check_point(p)
    _check_point(q, len(p))
    if p < q:
        return Edge(p, q)
    return Edge(q, p)


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    """An axis-aligned box of lattice sites, {x : lo_i <= x_i <= hi_i}.

    ``kind`` is informational ("box", "tube", "slab", "plane"); the membership
    and indexing semantics depend only on the ranges.
    """

    lo: Coords
    hi: Coords
    kind: str = "box"

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or len(self.lo) < 2:
            raise ConfigurationError("domain needs matching lo/hi of dimension >= 2")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ConfigurationError(f"empty axis range [{a}, {b}] in domain")

    # -- constructors ------------------------------------------------------

    @classmethod
    def box(cls, d: int, half_width: int) -> "Domain":
        """The centered box {x : |x_i| <= half_width}."""
        if half_width < 0:
            raise ConfigurationError("box half_width must be >= 0")
        return cls((-half_width,) * d, (half_width,) * d, "box")

    @classmethod
    def tube(cls, d: int, b: int, x1_min: int, x1_max: int) -> "Domain":
        """The lateral-radius-b tube around the first axis, cut to x1 in [x1_min, x1_max]."""
        if b < 0:
            raise ConfigurationError("tube radius b must be >= 0")
        return cls((x1_min,) + (-b,) * (d - 1), (x1_max,) + (b,) * (d - 1), "tube")

    @classmethod
    def slab(cls, d: int, x1_min: int, x1_max: int, half_width: int) -> "Domain":
        """x1 in [x1_min, x1_max], |x_i| <= half_width for i >= 2."""
        if half_width < 0:
            raise ConfigurationError("slab half_width must be >= 0")
        return cls(
            (x1_min,) + (-half_width,) * (d - 1),
            (x1_max,) + (half_width,) * (d - 1),
            "slab",
        )

    @classmethod
    def plane(cls, d: int, x1: int, half_width: int) -> "Domain":
        """The (d-1)-dimensional sublattice {x1 = const} with its internal bonds only."""
        return cls(
            (x1,) + (-half_width,) * (d - 1),
            (x1,) + (half_width,) * (d - 1),
            "plane",
        )

    # -- basic queries -------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def contains(self, p: Coords) -> bool:
        _check_point(p, self.dim)
        return all(l <= c <= h for c, l, h in zip(p, self.lo, self.hi))

    def __contains__(self, p: Coords) -> bool:
        return self.contains(p)

    def contains_domain(self, other: "Domain") -> bool:
        return self.dim == other.dim and all(
            sl <= ol and oh <= sh
            for sl, ol, oh, sh in zip(self.lo, other.lo, other.hi, self.hi)
        )

    # -- indexing ------------------------------------------------------------

    def _strides(self) -> tuple:
        shape = self.shape
        strides = [1] * self.dim
        for i in range(self.dim - 2, -1, -1):
            strides[i] = strides[i + 1] * shape[i + 1]
        return tuple(strides)

    def flat_index(self, p: Coords) -> int:
        if not self.contains(p):
            raise DomainError(f"{p!r} is outside {self}")
        return sum((c - l) * s for c, l, s in zip(p, self.lo, self._strides()))

    def site_at(self, flat: int) -> Coords:
        if not 0 <= flat < self.size:
            raise DomainError(f"flat index {flat} out of range for {self}")
        out = []
        for s, l, w in zip(self._strides(), self.lo, self.shape):
            out.append(flat // s % w + l)
        return tuple(out)

    def coords_of(self, flats: np.ndarray) -> np.ndarray:
        """Vectorized site_at: (k,) flat indices -> (k, d) coordinates."""
        flats = np.asarray(flats, dtype=np.int64)
        out = np.empty((flats.shape[0], self.dim), dtype=np.int64)
        for i, (s, l, w) in enumerate(zip(self._strides(), self.lo, self.shape)):
            out[:, i] = flats // s % w + l
        return out

    def flats_of(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized flat_index: (k, d) coordinates -> (k,) flat indices."""
        coords = np.asarray(coords, dtype=np.int64)
        lo = np.asarray(self.lo, dtype=np.int64)
        hi = np.asarray(self.hi, dtype=np.int64)
        if np.any(coords < lo) or np.any(coords > hi):
            raise DomainError("coordinates outside domain")
        strides = np.asarray(self._strides(), dtype=np.int64)
        return (coords - lo) @ strides

    def plane_flats(self, value: int, axis: int = 0) -> np.ndarray:
        """Flat indices of all sites with x_axis == value, in lexicographic order."""
        if not self.lo[axis] <= value <= self.hi[axis]:
            raise DomainError(f"plane x_{axis + 1}={value} misses {self}")
        shape = self.shape
        strides = self._strides()
        rest = [i for i in range(self.dim) if i != axis]
        base = (value - self.lo[axis]) * strides[axis]
        idx = np.zeros(1, dtype=np.int64)
        for i in rest:
            idx = (idx[:, None] + (np.arange(shape[i], dtype=np.int64) * strides[i])[None, :]).ravel()
        return base + idx

    def sites(self) -> Iterator[Coords]:
        """All sites in lexicographic order."""
        ranges = [range(l, h + 1) for l, h in zip(self.lo, self.hi)]
        return iter(product(*ranges))

    def lo_array(self) -> np.ndarray:
        return np.asarray(self.lo, dtype=np.int64)

    def hi_array(self) -> np.ndarray:
        return np.asarray(self.hi, dtype=np.int64)

    def half_width(self) -> int:
        """min over axes of min(-lo_i, hi_i): the largest L-inf ball around 0 inside."""
        return min(min(-l, h) for l, h in zip(self.lo, self.hi))


def neighbors(p: Coords, dom: Domain) -> list:
    """Nearest neighbors of p inside dom, in axis order, minus before plus."""
    if not dom.contains(p):
        raise DomainError(f"{p!r} is outside {dom}")
    out = []
    for axis in range(dom.dim):
        for delta in (-1, 1):
            q = tuple(c + delta if i == axis else c for i, c in enumerate(p))
            if dom.contains(q):
                out.append(q)
    return out


def edges_of(dom: Domain) -> list:
    """All canonical edges with both endpoints in dom (small domains only)."""
    out = []
    for p in dom.sites():
        for axis in range(dom.dim):
            q = tuple(c + 1 if i == axis else c for i, c in enumerate(p))
            if dom.contains(q):
                out.append(Edge(p, q))
    return out


# ---------------------------------------------------------------------------
# Seed regions
# ---------------------------------------------------------------------------


class Region:
    """A finite, explicitly-truncated set of seed sites."""

    def sites(self, d: int) -> list:
        raise NotImplementedError

    def contains(self, p: Coords) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Empty(Region):
    def sites(self, d: int) -> list:
        return []

    def contains(self, p: Coords) -> bool:
        return False


@dataclass(frozen=True)
class Origin(Region):
    def sites(self, d: int) -> list:
        return [(0,) * d]

    def contains(self, p: Coords) -> bool:
        return all(c == 0 for c in p)


@dataclass(frozen=True)
class HyperplaneMinusOrigin(Region):
    """{x : x1 = 0, 0 < max_{i>=2} |x_i| <= half_width}."""

    half_width: int

    def __post_init__(self):
        if self.half_width < 1:
            raise ConfigurationError("hyperplane half_width must be >= 1")

    def sites(self, d: int) -> list:
        out = []
        for lat in product(range(-self.half_width, self.half_width + 1), repeat=d - 1):
            if any(lat):
                out.append((0,) + lat)
        return out

    def contains(self, p: Coords) -> bool:
        if p[0] != 0 or all(c == 0 for c in p[1:]):
            return False
        return max(abs(c) for c in p[1:]) <= self.half_width


@dataclass(frozen=True)
class HalfAxisMinusOrigin(Region):
    """{(-k, 0, ..., 0) : 1 <= k <= depth}."""

    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise ConfigurationError("half-axis depth must be >= 1")

    def sites(self, d: int) -> list:
        return [(-k,) + (0,) * (d - 1) for k in range(1, self.depth + 1)]

    def contains(self, p: Coords) -> bool:
        return -self.depth <= p[0] <= -1 and all(c == 0 for c in p[1:])


@dataclass(frozen=True)
class Cone(Region):
    """{x : x1 <= 0, max_{i>=2} |x_i| <= slope * |x1|} minus the origin, cut at depth.

    The slope is kept rational so membership is exact integer arithmetic.
    """

    slope: Fraction
    depth: int

    def __post_init__(self):
        if not isinstance(self.slope, Fraction):
            object.__setattr__(self, "slope", Fraction(self.slope))
        if self.slope < 0:
            raise ConfigurationError("cone slope must be >= 0")
        if self.depth < 1:
            raise ConfigurationError("cone depth must be >= 1")

    def sites(self, d: int) -> list:
        out = []
        for k in range(1, self.depth + 1):
            bound = int(self.slope * k)  # floor, slope*k is an exact Fraction
            for lat in product(range(-bound, bound + 1), repeat=d - 1):
                out.append((-k,) + lat)
        return out

    def contains(self, p: Coords) -> bool:
        if p[0] > 0 or p[0] < -self.depth or all(c == 0 for c in p):
            return False
        lat = max((abs(c) for c in p[1:]), default=0)
        return Fraction(lat) <= self.slope * (-p[0])


@dataclass(frozen=True)
class Explicit(Region):
    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise ConfigurationError("explicit region has duplicate points")
        object.__setattr__(self, "points", pts)

    def sites(self, d: int) -> list:
        for p in self.points:
            _check_point(p, d)
        return list(self.points)

    def contains(self, p: Coords) -> bool:
        return p in self.points


def region_to_text(r: Region) -> str:
    """Textual region form used in config files and CLI flags."""
    if isinstance(r, Origin):
        return "origin"
    if isinstance(r, Empty):
        return "empty"
    if isinstance(r, HyperplaneMinusOrigin):
        return f"hyperplane:W={r.half_width}"
    if isinstance(r, HalfAxisMinusOrigin):
        return f"halfaxis:L={r.depth}"
    if isinstance(r, Cone):
        return f"cone:s={r.slope},L={r.depth}"
    if isinstance(r, Explicit):
        pts = ";".join("(" + ",".join(str(c) for c in p) + ")" for p in r.points)
        return f"explicit:[{pts}]"
    raise ConfigurationError(f"unknown region type {type(r).__name__}")


def parse_region(text: str) -> Region:
    """Inverse of region_to_text; raises ConfigurationError with a clear message."""
    text = text.strip()
    if text == "origin":
        return Origin()
    if text == "empty":
        return Empty()
    head, _, rest = text.partition(":")
    try:
        if head == "hyperplane":
            key, _, val = rest.partition("=")
            if key != "W":
                raise ValueError("expected W=<int>")
            return HyperplaneMinusOrigin(int(val))
        if head == "halfaxis":
            key, _, val = rest.partition("=")
            if key != "L":
                raise ValueError("expected L=<int>")
            return HalfAxisMinusOrigin(int(val))
        if head == "cone":
            parts = dict(kv.split("=", 1) for kv in rest.split(","))
            return Cone(Fraction(parts["s"]), int(parts["L"]))
        if head == "explicit":
            body = rest.strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise ValueError("expected [(x1,..,xd);...]")
            body = body[1:-1]
            pts = []
            for chunk in filter(None, body.split(";")):
                chunk = chunk.strip()
                if not (chunk.startswith("(") and chunk.endswith(")")):
                    raise ValueError(f"bad point {chunk!r}")
                pts.append(tuple(int(c) for c in chunk[1:-1].split(",")))
            return Explicit(tuple(pts))
    except ConfigurationError:
        raise
    except Exception as exc:
        raise ConfigurationError(f"bad region {text!r}: {exc}") from exc
    raise ConfigurationError(f"unknown region kind {head!r}")


# ---------------------------------------------------------------------------
# Seed configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeedConfig:
    """Initial two-type configuration: a region per type (either may be Empty)."""

    type1: Region
    type2: Region

    @classmethod
    def hyperplane_vs_origin(cls, half_width: int) -> "SeedConfig":
        return cls(HyperplaneMinusOrigin(half_width), Origin())

    @classmethod
    def halfaxis_vs_origin(cls, depth: int) -> "SeedConfig":
        return cls(HalfAxisMinusOrigin(depth), Origin())


def enumerate_seeds(cfg: SeedConfig, d: int):
    """Finite, duplicate-free, disjoint seed lists (type1, type2) in region order."""
    s1 = cfg.type1.sites(d)
    s2 = cfg.type2.sites(d)
    if len(set(s1)) != len(s1) or len(set(s2)) != len(s2):
        raise ConfigurationError("seed region enumerates duplicate points")
    overlap = set(s1) & set(s2)
    if overlap:
        raise ConfigurationError(f"type1/type2 seed regions overlap at {sorted(overlap)[:3]}")
    return s1, s2


# ---------------------------------------------------------------------------
# Lattice symmetries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedPermutation:
    """q_i = signs[i] * p[perm[i]]: a signed coordinate permutation."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        d = len(self.perm)
        if sorted(self.perm) != list(range(d)) or len(self.signs) != d:
            raise ContractViolation("perm must permute 0..d-1 with matching signs")
        if any(s not in (-1, 1) for s in self.signs):
            raise ContractViolation("signs must be +-1")

    @classmethod
    def identity(cls, d: int) -> "SignedPermutation":
        return cls(tuple(range(d)), (1,) * d)

    def apply(self, p: Coords) -> Coords:
        return tuple(self.signs[i] * p[self.perm[i]] for i in range(len(self.perm)))

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self after other: (self.compose(other)).apply(p) == self.apply(other.apply(p))."""
        perm = tuple(other.perm[self.perm[i]] for i in range(len(self.perm)))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(len(self.perm)))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        d = len(self.perm)
        perm = [0] * d
        signs = [1] * d
        for i in range(d):
            perm[self.perm[i]] = i
            signs[self.perm[i]] = self.signs[i]
        return SignedPermutation(tuple(perm), tuple(signs))


def apply_symmetry(p: Coords, g: SignedPermutation) -> Coords:
    return g.apply(p)


def dihedral_symmetries() -> list:
    """The 8 symmetries of the square lattice (d=2), identity first."""
    out = []
    for perm in ((0, 1), (1, 0)):
        for s0 in (1, -1):
            for s1 in (1, -1):
                out.append(SignedPermutation(perm, (s0, s1)))
    out.sort(key=lambda g: (g.perm, g.signs) != ((0, 1), (1, 1)))
    return out
