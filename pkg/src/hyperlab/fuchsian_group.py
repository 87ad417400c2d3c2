"""The deck group of a genus-2 surface as an explicit Fuchsian group.

The concrete group is the regular-octagon group: the octagon centered at 0
with vertex angle pi/4 is a Dirichlet fundamental domain, and its opposite
sides are paired by the eight hyperbolic translations

    tau_k = R_{k pi/4} T R_{k pi/4}^{-1},   cosh(ell/2) = 1 + sqrt(2),

k = 0..3 together with their inverses.  The exposed generators a1, b1, a2, b2
are short words in the tau_k chosen so that the surface relation takes the
standard commutator form [a1,b1][a2,b2] = +-I while every generator keeps the
translation length ell = 2 acosh(1 + sqrt(2)):

    a1 = tau0,  b1 = tau1^-1 tau2 tau3^-1,
    a2 = tau1^-1 tau2 tau3^-1 tau1,  b2 = tau2^-1 tau1.

(The plain tuple (tau0..tau3) satisfies the octagon relation
tau0 tau1^-1 tau2 tau3^-1 tau0^-1 tau1 tau2^-1 tau3 = I instead.)
Conversely tau1 = b1^-1 a2, tau2 = b1^-1 a2 b2^-1, tau3 = b1^-1 b2^-1, so both
sets generate the same group.

Words are tuples of signed generator indices (+1..+4 for a1,b1,a2,b2,
negative for inverses) and serialize as strings over a,b,c,d with capitals
for inverses.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .disc_geometry import (
    BoundaryDirection,
    DiscPoint,
    HyperbolicGeodesic,
    MobiusMap,
    _as_complex,
    hyperbolic_distance,
)

TRANSLATION_LENGTH = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
_LETTERS = "abcd"


class MaxWordLength(RuntimeError):
    """Fundamental-domain reduction exceeded its step budget."""

    def __init__(self, limit: int, point):
        super().__init__(f"reduction exceeded {limit} steps at {point!r}")
        self.limit = limit
        self.point = point


def reduce_word(word) -> tuple[int, ...]:
    """Freely reduce a word (tuple of signed indices)."""
    out: list[int] = []
    for s in word:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def word_to_string(word) -> str:
    return "".join(_LETTERS[s - 1] if s > 0 else _LETTERS[-s - 1].upper() for s in word)


def word_from_string(text: str) -> tuple[int, ...]:
    out = []
    for ch in text:
        idx = _LETTERS.index(ch.lower()) + 1
        out.append(idx if ch.islower() else -idx)
    return reduce_word(out)


@dataclass(frozen=True)
class GroupElement:
    map: MobiusMap
    word: tuple[int, ...]

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(MobiusMap.identity(), ())

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.map @ other.map, reduce_word(self.word + other.word))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.map.inverse(), tuple(-s for s in reversed(self.word)))

    def __str__(self) -> str:
        return word_to_string(self.word) or "e"

    def __call__(self, z):
        return self.map(z)


def _octagon_vertices() -> tuple[complex, ...]:
    # regular octagon with vertex angle pi/4: circumradius acosh(cot^2(pi/8))
    circum = math.acosh(1.0 / math.tan(math.pi / 8.0) ** 2)
    rv = math.tanh(circum / 2.0)
    return tuple(rv * np.exp(1j * (k * math.pi / 4 + math.pi / 8)) for k in range(8))


class FuchsianGroup:
    """Immutable genus-2 octagon group; build via :func:`genus2_group`."""

    def __init__(self):
        c = 1.0 + math.sqrt(2.0)
        s = math.sqrt(c * c - 1.0)
        taus = []
        for k in range(4):
            e = np.exp(1j * k * math.pi / 4)
            taus.append(MobiusMap(complex(c), s * e))
        self._tau = taus

        t0, t1, t2, t3 = taus
        t1i, t2i, t3i = t1.inverse(), t2.inverse(), t3.inverse()
        gen_maps = [t0, t1i @ t2 @ t3i, t1i @ t2 @ t3i @ t1, t2i @ t1]
        self.generators = tuple(
            GroupElement(m, (k + 1,)) for k, m in enumerate(gen_maps)
        )

        # tau_k written over the official generators: used by the reducer so
        # that accumulated words stay in the official alphabet
        tau_words = [
            word_from_string("a"),
            word_from_string("Bc"),
            word_from_string("BcD"),
            word_from_string("BD"),
        ]
        pairings = []
        for k in range(4):
            pairings.append(GroupElement(taus[k], tau_words[k]))
        for k in range(4):
            pairings.append(pairings[k].inverse())
        self.side_pairings = tuple(pairings)   # tau_0..tau_3, tau_0^-1..tau_3^-1
        self._pairing_order = sorted(range(8), key=lambda i: str(self.side_pairings[i]))

        self.translation_length = TRANSLATION_LENGTH
        self.octagon_vertices = tuple(DiscPoint.from_complex(v) for v in _octagon_vertices())
        self.circumradius = math.acosh(1.0 / math.tan(math.pi / 8.0) ** 2)
        self.apothem = TRANSLATION_LENGTH / 2.0
        # orbit points tau_k^{+-1}(0) defining the Dirichlet walls
        self._neighbors = np.array([p.map(0j) for p in self.side_pairings], dtype=complex)
        # kernel-facing arrays (read-only)
        self.pairing_a = np.array([p.map.a for p in self.side_pairings], dtype=complex)
        self.pairing_b = np.array([p.map.b for p in self.side_pairings], dtype=complex)

    # -- membership ---------------------------------------------------------

    def in_domain(self, z, tol: float = 1e-12) -> bool:
        """Closed-domain test: d_h(z, 0) <= d_h(z, tau 0) + tol for all walls."""
        z = _as_complex(z)
        d0 = hyperbolic_distance(z, 0j)
        for p in self._neighbors:
            if d0 > hyperbolic_distance(z, p) + tol:
                return False
        return True

    # -- reduction ----------------------------------------------------------

    def reduce_point(self, z, max_steps: int | None = None):
        """Greedy Dirichlet reduction of a raw complex point.

        Returns (rep, element) with rep = element.map(z) in the closed
        fundamental domain. Each accepted step strictly decreases d_h(., 0);
        wall ties break to the lexicographically smallest pairing word.
        """
        z = _as_complex(z)
        if max_steps is None:
            max_steps = 10 * (1 + int(hyperbolic_distance(z, 0j) / self.translation_length)) + 10
        acc = GroupElement.identity()
        cur = z
        for _ in range(max_steps):
            d0 = hyperbolic_distance(cur, 0j)
            best, best_d = None, d0 - 1e-15
            for i in self._pairing_order:
                cand = self.side_pairings[i].map(cur)
                d = hyperbolic_distance(cand, 0j)
                if d < best_d - 1e-15:
                    best, best_d = i, d
            if best is None:
                return DiscPoint.from_complex(cur), acc
            acc = self.side_pairings[best] @ acc
            cur = self.side_pairings[best].map(cur)
        if self.in_domain(cur, tol=1e-9):
            return DiscPoint.from_complex(cur), acc
        raise MaxWordLength(max_steps, z)

    def enumerate_elements(self, max_len: int):
        """All freely reduced words of length <= max_len over the official
        generators, as GroupElements (identity included)."""
        out = [GroupElement.identity()]
        frontier = [GroupElement.identity()]
        steps = [GroupElement(self.generators[k].map, (k + 1,)) for k in range(4)]
        steps += [g.inverse() for g in steps]
        for _ in range(max_len):
            nxt = []
            for g in frontier:
                for st in steps:
                    h = g @ st
                    if len(h.word) == len(g.word) + 1:
                        nxt.append(h)
            out.extend(nxt)
            frontier = nxt
        return out

    def orbit_points(self, radius: float, max_len: int = 6) -> np.ndarray:
        """Orbit of 0 within hyperbolic distance ``radius``, via side-pairing words."""
        pts = [0j]
        mats = [MobiusMap.identity()]
        frontier = [MobiusMap.identity()]
        for _ in range(max_len):
            nxt = []
            for m in frontier:
                for p in self.side_pairings:
                    mm = m @ p.map
                    z = mm(0j)
                    if hyperbolic_distance(z, 0j) > radius + 1e-9:
                        continue
                    if any(abs(z - q) < 1e-9 for q in pts):
                        continue
                    pts.append(z)
                    mats.append(mm)
                    nxt.append(mm)
            frontier = nxt
        return np.array(pts, dtype=complex)


@functools.lru_cache(maxsize=1)
def genus2_group() -> FuchsianGroup:
    """The standard regular-octagon genus-2 group (cached singleton)."""
    return FuchsianGroup()


def reduce_to_domain(G: FuchsianGroup, x) -> tuple[DiscPoint, GroupElement]:
    """Move x into the closed fundamental domain; returns (rep, word) with
    rep = word.map(x).  Raises MaxWordLength on step-budget exhaustion."""
    return G.reduce_point(_as_complex(x))


@dataclass(frozen=True)
class PositiveSequence:
    geodesic: HyperbolicGeodesic
    times: np.ndarray
    elements: tuple[GroupElement, ...]
    images: tuple[DiscPoint, ...]

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")


def positive_sequence(G: FuchsianGroup, g: HyperbolicGeodesic, times) -> PositiveSequence:
    """Deck transformations returning g(t_n) to the fundamental domain.

    Realizes the quotient view of the forward end of g: tau_n g(t_n) stays in
    the compact closed octagon.
    """
    times = np.asarray(times, dtype=float)
    elements, images = [], []
    for t in times:
        rep, w = G.reduce_point(g.point(float(t)))
        elements.append(w)
        images.append(rep)
    return PositiveSequence(g, times, tuple(elements), tuple(images))
