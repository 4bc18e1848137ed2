"""
Canonical Splitting Classes

Every bipartition of the GHZ family is fixed, up to permutations of the
non-subtracted modes, by how many modes share the subtracted mode's side
(n, composite B), how many sit on the far side (m, composite C), how many
are traced out (p, composite D), and whether the subtracted mode's own
group is traced instead. A class can therefore be named by mode fractions:

    (AB)_{1/2}-C_{1/2}              A with n others | m modes
    Tr(D_{1/4})(AB)_{1/4}-C_{1/2}   as above, p modes traced out
    Tr((AB)_{1/2})C_{1/4}-D_{1/4}   A and n others traced, m | p

Physical mode order used by `physical_spec`: A is mode 0, then the B, C
and D groups in that order.

Text forms accepted by `parse_splitting`:
    canonical labels as above ('-' or unicode minus)
    A+B:n|C:m|trace:p     (B count excludes A; '|trace:p' optional)
    trace:A+B:n|C:m|D:p
    1,2:3,4               1-based physical modes, unlisted modes traced
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.errors import GridError, InvalidPartitionError
from ..schemas import CompositeGrouping, SplittingSpec

Labels = Tuple[str, ...]


def _fraction_text(count: int, N: int) -> str:
    f = Fraction(count, N)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidPartitionError(f"bad mode fraction '{text}'", parameter="splitting") from exc


# ============ Classes ============
@dataclass(frozen=True)
class SplittingPattern:
    """Class named by mode fractions; resolves to counts for any compatible N."""

    ab: Fraction
    c: Fraction
    d: Fraction = Fraction(0)
    a_traced: bool = False

    def __post_init__(self) -> None:
        if self.ab <= 0 or self.c <= 0 or self.d < 0 or self.ab + self.c + self.d > 1:
            raise InvalidPartitionError("fractions must be positive and sum to at most 1",
                                        parameter="splitting")
        if self.a_traced and self.d <= 0:
            raise InvalidPartitionError("a traced subtracted group needs a D side",
                                        parameter="splitting")

    def resolve(self, N: int) -> "CanonicalSplitting":
        counts = [f * N for f in (self.ab, self.c, self.d)]
        if any(c.denominator != 1 for c in counts):
            raise GridError(f"N={N} is not divisible for fractions {self.ab}, {self.c}, {self.d}",
                            parameter="grid")
        ab, m, p = (int(c) for c in counts)
        if ab + m + p != N:
            raise GridError(f"fractions of {self.label} do not cover all modes", parameter="grid")
        return CanonicalSplitting(n=ab - 1, m=m, p=p, a_traced=self.a_traced)

    def fits(self, N: int) -> bool:
        try:
            self.resolve(N)
        except (GridError, InvalidPartitionError):
            return False
        return True

    @property
    def label(self) -> str:
        return CanonicalSplitting._format(
            str(self.ab), str(self.c), str(self.d), self.d > 0, self.a_traced
        )


@dataclass(frozen=True)
class CanonicalSplitting:
    """
    One splitting class for a given N = n + m + p + 1.

    With `a_traced` False the sides are A+B | C and D is traced; with
    `a_traced` True A+B is traced and the sides are C | D.
    """

    n: int
    m: int
    p: int = 0
    a_traced: bool = False

    def __post_init__(self) -> None:
        if self.n < 0 or self.m < 1 or self.p < 0:
            raise InvalidPartitionError(
                f"need n >= 0, m >= 1, p >= 0; got n={self.n}, m={self.m}, p={self.p}",
                parameter="splitting",
            )
        if self.a_traced and self.p < 1:
            raise InvalidPartitionError("tracing the subtracted group leaves no D side",
                                        parameter="splitting")

    @property
    def N(self) -> int:
        return self.n + self.m + self.p + 1

    @property
    def num_traced(self) -> int:
        return self.n + 1 if self.a_traced else self.p

    @property
    def grouping(self) -> CompositeGrouping:
        return CompositeGrouping(n=self.n, m=self.m, p=self.p)

    @staticmethod
    def _format(ab: str, c: str, d: str, has_d: bool, a_traced: bool) -> str:
        if a_traced:
            return f"Tr((AB)_{{{ab}}})C_{{{c}}}-D_{{{d}}}"
        body = f"(AB)_{{{ab}}}-C_{{{c}}}"
        return f"Tr(D_{{{d}}}){body}" if has_d else body

    @property
    def label(self) -> str:
        N = self.N
        return self._format(
            _fraction_text(self.n + 1, N), _fraction_text(self.m, N),
            _fraction_text(self.p, N), self.p > 0, self.a_traced,
        )

    @property
    def pattern(self) -> SplittingPattern:
        N = self.N
        return SplittingPattern(Fraction(self.n + 1, N), Fraction(self.m, N),
                                Fraction(self.p, N), self.a_traced)

    def composite_sides(self) -> Tuple[Labels, Labels, Labels]:
        """(side_a, side_b, traced) as composite labels; empty groups omitted."""
        ab: Labels = ("A", "B") if self.n > 0 else ("A",)
        d: Labels = ("D",) if self.p > 0 else ()
        if self.a_traced:
            return ("C",), d, ab
        return ab, ("C",), d

    def kept_labels(self) -> Labels:
        side_a, side_b, _ = self.composite_sides()
        return side_a + side_b

    def composite_spec(self, labels: Sequence[str]) -> SplittingSpec:
        """SplittingSpec over the composite positions in `labels`."""
        side_a, side_b, traced = self.composite_sides()
        present = list(labels)
        missing = [x for x in side_a + side_b if x not in present]
        if missing:
            raise InvalidPartitionError(f"composites {missing} not in state {tuple(present)}",
                                        parameter="splitting")
        return SplittingSpec(
            side_a=tuple(present.index(x) for x in side_a),
            side_b=tuple(present.index(x) for x in side_b),
            traced=tuple(present.index(x) for x in traced if x in present),
            label=self.label,
        )

    def merged_spec(self, labels: Sequence[str], partner: bool = False) -> SplittingSpec:
        """
        SplittingSpec for a state whose A and B composites are merged into "A".

        With `partner`, one extra mode placed after `labels` joins whichever
        side (or traced set) holds A.
        """
        sides = [tuple(x for x in group if x != "B") for group in self.composite_sides()]
        present = list(labels)
        missing = [x for x in sides[0] + sides[1] if x not in present]
        if missing:
            raise InvalidPartitionError(f"composites {missing} not in state {tuple(present)}",
                                        parameter="splitting")
        indices = [[present.index(x) for x in group if x in present] for group in sides]
        if partner:
            holder = next(i for i, group in enumerate(sides) if "A" in group)
            indices[holder].append(len(present))
        return SplittingSpec(side_a=tuple(indices[0]), side_b=tuple(indices[1]),
                             traced=tuple(indices[2]), label=self.label)

    def physical_groups(self) -> Dict[str, Tuple[int, ...]]:
        a = (0,)
        b = tuple(range(1, self.n + 1))
        c = tuple(range(self.n + 1, self.n + self.m + 1))
        d = tuple(range(self.n + self.m + 1, self.N))
        return {"A": a, "B": b, "C": c, "D": d}

    def physical_spec(self) -> SplittingSpec:
        """Representative SplittingSpec over N physical modes."""
        groups = self.physical_groups()
        side_a, side_b, traced = self.composite_sides()

        def collect(labels: Labels) -> Tuple[int, ...]:
            return tuple(q for x in labels for q in groups[x])

        return SplittingSpec(side_a=collect(side_a), side_b=collect(side_b),
                             traced=collect(traced), label=self.label)


# ============ Class families ============
def four_party_classes(N: int) -> List[CanonicalSplitting]:
    """
    The eight classes of a four-party scheme with N/4 modes per party.

    Three untraced, three with one party traced and two with two parties
    traced.
    """
    if N < 4 or N % 4:
        raise GridError(f"four-party classes need N divisible by 4, got {N}", parameter="N")
    q = N // 4
    return [
        CanonicalSplitting(n=q - 1, m=3 * q),
        CanonicalSplitting(n=2 * q - 1, m=2 * q),
        CanonicalSplitting(n=3 * q - 1, m=q),
        CanonicalSplitting(n=q - 1, m=2 * q, p=q),
        CanonicalSplitting(n=2 * q - 1, m=q, p=q),
        CanonicalSplitting(n=q - 1, m=2 * q, p=q, a_traced=True),
        CanonicalSplitting(n=q - 1, m=q, p=2 * q),
        CanonicalSplitting(n=2 * q - 1, m=q, p=q, a_traced=True),
    ]


def canonical_classes(N: int, max_traced: int = 0) -> List[CanonicalSplitting]:
    """All classes with at most `max_traced` physical modes traced out."""
    if N < 2:
        raise InvalidPartitionError(f"splittings need N >= 2, got {N}", parameter="N")
    classes: List[CanonicalSplitting] = []
    for traced in range(0, min(max_traced, N - 2) + 1):
        for n in range(0, N - 1 - traced):
            classes.append(CanonicalSplitting(n=n, m=N - 1 - n - traced, p=traced))
        # subtracted group traced: n + 1 = traced, remaining split m >= p >= 1
        n = traced - 1
        rest = N - traced
        if n >= 0 and rest >= 2:
            for p in range(1, rest // 2 + 1):
                classes.append(CanonicalSplitting(n=n, m=rest - p, p=p, a_traced=True))
    return classes


def default_classes(N: int, max_traced: int = 0) -> List[CanonicalSplitting]:
    """Classes used for "all-canonical": the four-party set when N allows it."""
    if N >= 4 and N % 4 == 0:
        return four_party_classes(N)
    return canonical_classes(N, max_traced)


# ============ Text forms ============
_NUM = r"(\d+(?:/\d+)?)"
_PLAIN = re.compile(rf"^\(AB\)_\{{{_NUM}\}}-C_\{{{_NUM}\}}$")
_TRACE_D = re.compile(rf"^Tr\(D_\{{{_NUM}\}}\)\(AB\)_\{{{_NUM}\}}-C_\{{{_NUM}\}}$")
_TRACE_AB = re.compile(rf"^Tr\(\(AB\)_\{{{_NUM}\}}\)C_\{{{_NUM}\}}-D_\{{{_NUM}\}}$")
_COUNTS = re.compile(r"^A(?:\+B:(\d+))?\|C:(\d+)(?:\|trace:(\d+))?$")
_COUNTS_TRACED = re.compile(r"^trace:A(?:\+B:(\d+))?\|C:(\d+)\|D:(\d+)$")
_EXPLICIT = re.compile(r"^\d+(?:,\d+)*:\d+(?:,\d+)*$")


def parse_pattern(text: str) -> SplittingPattern:
    """Parse a canonical fraction label."""
    s = text.strip().replace(" ", "").replace("−", "-")
    if m := _PLAIN.match(s):
        return SplittingPattern(_parse_fraction(m[1]), _parse_fraction(m[2]))
    if m := _TRACE_D.match(s):
        return SplittingPattern(_parse_fraction(m[2]), _parse_fraction(m[3]),
                                _parse_fraction(m[1]))
    if m := _TRACE_AB.match(s):
        return SplittingPattern(_parse_fraction(m[1]), _parse_fraction(m[2]),
                                _parse_fraction(m[3]), a_traced=True)
    raise InvalidPartitionError(f"unrecognised splitting label '{text}'", parameter="splitting")


def parse_explicit(text: str, N: int) -> SplittingSpec:
    """'1,2:3,4' with 1-based modes; unlisted modes are traced."""
    s = text.strip().replace(" ", "")
    if not _EXPLICIT.match(s):
        raise InvalidPartitionError(f"bad explicit splitting '{text}'", parameter="splitting")
    left, right = s.split(":")
    side_a = tuple(int(x) - 1 for x in left.split(","))
    side_b = tuple(int(x) - 1 for x in right.split(","))
    if any(not 0 <= q < N for q in side_a + side_b):
        raise InvalidPartitionError(f"mode index outside 1..{N} in '{text}'", parameter="splitting")
    traced = tuple(q for q in range(N) if q not in side_a + side_b)
    try:
        return SplittingSpec(side_a=side_a, side_b=side_b, traced=traced, label=s)
    except ValueError as exc:
        raise InvalidPartitionError(str(exc), parameter="splitting") from exc


def classify(spec: SplittingSpec, N: int, subtracted: int = 0) -> CanonicalSplitting:
    """Canonical class of a physical splitting when `subtracted` is mode A."""
    if spec.modes != tuple(range(N)):
        raise InvalidPartitionError(f"splitting does not cover modes 0..{N - 1}",
                                    parameter="splitting")
    if subtracted in spec.traced:
        m, p = sorted((len(spec.side_a), len(spec.side_b)), reverse=True)
        return CanonicalSplitting(n=len(spec.traced) - 1, m=m, p=p, a_traced=True)
    own, far = (spec.side_a, spec.side_b) if subtracted in spec.side_a else (spec.side_b, spec.side_a)
    return CanonicalSplitting(n=len(own) - 1, m=len(far), p=len(spec.traced))


def parse_splitting(text: str, N: Optional[int] = None) -> CanonicalSplitting:
    """Parse any accepted text form into a class, checking it against N when given."""
    s = text.strip().replace(" ", "")
    if m := _COUNTS.match(s):
        found = CanonicalSplitting(n=int(m[1] or 0), m=int(m[2]), p=int(m[3] or 0))
    elif m := _COUNTS_TRACED.match(s):
        found = CanonicalSplitting(n=int(m[1] or 0), m=int(m[2]), p=int(m[3]), a_traced=True)
    elif _EXPLICIT.match(s):
        if N is None:
            raise InvalidPartitionError("explicit splittings need the mode count",
                                        parameter="splitting")
        return classify(parse_explicit(s, N), N)
    else:
        if N is None:
            raise InvalidPartitionError("fraction labels need the mode count",
                                        parameter="splitting")
        return parse_pattern(s).resolve(N)
    if N is not None and found.N != N:
        raise InvalidPartitionError(f"'{text}' covers {found.N} modes, expected {N}",
                                    parameter="splitting")
    return found


def physical_splittings(N: int, max_traced: int) -> List[SplittingSpec]:
    """Every physical bipartition of N modes with up to `max_traced` traced, labelled."""
    if N < 2:
        raise InvalidPartitionError(f"splittings need N >= 2, got {N}", parameter="N")
    sep = "" if N < 10 else ","

    def name(modes: Sequence[int]) -> str:
        return sep.join(str(q + 1) for q in modes)

    specs: List[SplittingSpec] = []
    for t in range(0, min(max_traced, N - 2) + 1):
        for traced in combinations(range(N), t):
            rest = [q for q in range(N) if q not in traced]
            first, others = rest[0], rest[1:]
            # side_a always holds the lowest remaining mode
            for size in range(0, len(others)):
                for extra in combinations(others, size):
                    side_a = (first,) + extra
                    side_b = tuple(q for q in others if q not in extra)
                    label = f"{name(side_a)}-{name(side_b)}"
                    if traced:
                        label = f"Tr({name(traced)}){label}"
                    specs.append(SplittingSpec(side_a=side_a, side_b=side_b,
                                               traced=traced, label=label))
    return specs
