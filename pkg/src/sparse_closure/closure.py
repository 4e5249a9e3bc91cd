"""Structural closedness rules for masked factorization sets.

The decision procedure is a fixed-order rule dispatch; when no rule applies
the honest answer is Unknown, optionally backed by an emitted solver file
(see sparse_closure.smt).  Membership tests are exact rational, never float.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .patterns import (
    SupportPattern,
    compress_hidden,
    is_lu_pattern,
    restrict_to_hidden,
    row_support_union,
)
from .rational import RationalMatrix, matrix, rank, submatrix


class Closedness(enum.Enum):
    CLOSED = "closed"
    NOT_CLOSED = "not_closed"
    UNKNOWN = "unknown"


# rule identifiers, ordered; first match wins
RULE_SINGLE_LAYER = "single-layer-coordinate-subspace"
RULE_SCALAR_OUTPUT = "scalar-output-row-support"
RULE_DENSE_RANK = "dense-bounded-rank"
RULE_LU_GAP = "lu-antidiagonal-gap"


@dataclass(frozen=True)
class ClosednessVerdict:
    status: Closedness
    rule: Optional[str] = None
    witness: Optional[RationalMatrix] = None
    sentence_path: Optional[str] = None

    def exit_code(self) -> int:
        return {Closedness.CLOSED: 0, Closedness.NOT_CLOSED: 1, Closedness.UNKNOWN: 2}[self.status]


def lu_membership(a) -> bool:
    """Exact test: does the square matrix factor as lower * upper triangular?

    Uses the leading-submatrix rank criterion
        rank(A[:k,:k]) + k >= rank(A[:k,:]) + rank(A[:,:k])  for all k,
    evaluated by rational Gaussian elimination.  Cross-validated in the test
    suite against a closed-form 2x2 oracle and a symbolic feasibility check
    on 3x3 instances.
    """
    m = matrix(a)
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise ValueError("lu_membership expects a square matrix")
    full = range(n)
    for k in range(1, n + 1):
        lead = rank(submatrix(m, range(k), range(k)))
        top = rank(submatrix(m, range(k), full))
        left = rank(submatrix(m, full, range(k)))
        if lead + k < top + left:
            return False
    return True


def closure_gap_witness_lu(d: int) -> RationalMatrix:
    """The anti-diagonal identity: approximable by lower*upper products to any
    precision, never attained.  Defined for d >= 2."""
    if d < 2:
        raise ValueError("the anti-diagonal witness needs d >= 2")
    return tuple(
        tuple(Fraction(1) if c == d - 1 - r else Fraction(0) for c in range(d))
        for r in range(d)
    )


def closedness_verdict(pattern: SupportPattern, smt_path=None) -> ClosednessVerdict:
    """Fixed-order structural dispatch.

    1. one layer: the set is a coordinate subspace, closed;
    2. two layers, scalar output: isomorphic to a coordinate subspace, closed;
    3. two layers, both masks full: all matrices of bounded rank, closed;
    4. the triangular lower-upper pattern: not closed, anti-diagonal witness;
    5. otherwise unknown; when smt_path is given, a solver file for the
       closedness sentence is emitted and referenced in the verdict.
    """
    if pattern.depth == 1:
        return ClosednessVerdict(Closedness.CLOSED, rule=RULE_SINGLE_LAYER)
    if pattern.depth == 2 and pattern.output_dim == 1:
        return ClosednessVerdict(Closedness.CLOSED, rule=RULE_SCALAR_OUTPUT)
    if pattern.depth == 2 and pattern.is_full(0) and pattern.is_full(1):
        return ClosednessVerdict(Closedness.CLOSED, rule=RULE_DENSE_RANK)
    if is_lu_pattern(pattern) and pattern.dims[0] >= 2:
        return ClosednessVerdict(
            Closedness.NOT_CLOSED,
            rule=RULE_LU_GAP,
            witness=closure_gap_witness_lu(pattern.dims[0]),
        )
    sentence_path = None
    if smt_path is not None:
        from .smt import emit_qe_sentence

        emit_qe_sentence(pattern, smt_path)
        sentence_path = str(smt_path)
    return ClosednessVerdict(Closedness.UNKNOWN, sentence_path=sentence_path)


@dataclass(frozen=True)
class SubsetVerdict:
    hidden: tuple[int, ...]  # 0-based, sorted
    status: Closedness
    rule: Optional[str]


@dataclass(frozen=True)
class SufficiencyReport:
    """Outcome of the shallow sufficient-condition check.

    condition1: the output-layer mask is full.
    subset_verdicts: closedness of the factorization set restricted to every
    nonempty hidden subset, in deterministic (size, lexicographic) order.
    holds: condition1 and every subset verdict is Closed.
    """

    condition1_full_output_mask: bool
    subset_verdicts: tuple[SubsetVerdict, ...] = field(default_factory=tuple)
    holds: bool = False

    def to_json(self) -> dict:
        return {
            "condition1_full_output_mask": self.condition1_full_output_mask,
            "subsets": [
                {
                    "hidden": [i + 1 for i in sv.hidden],
                    "status": sv.status.value,
                    "rule": sv.rule,
                }
                for sv in self.subset_verdicts
            ],
            "holds": self.holds,
        }


def check_theorem5_conditions(
    pattern: SupportPattern, max_hidden: int = 16
) -> SufficiencyReport:
    """Evaluate the two-part sufficient condition for a two-layer pattern.

    Enumerates all 2^{N_1} - 1 nonempty hidden subsets, so N_1 is capped
    (default 16, override consciously).  Each subset's restricted pattern is
    compressed onto its hidden neurons before the rule dispatch, which is
    what lets the scalar-output and bounded-rank rules recognize it.
    """
    if pattern.depth != 2:
        raise ValueError("the sufficient condition applies to two-layer patterns")
    n1 = pattern.dims[1]
    if n1 > max_hidden:
        raise ValueError(
            f"refusing to enumerate 2^{n1} hidden subsets (cap {max_hidden}); "
            "raise max_hidden explicitly to force it"
        )
    condition1 = pattern.is_full(1)
    verdicts = []
    all_closed = True
    for size in range(1, n1 + 1):
        for subset in combinations(range(n1), size):
            restricted = restrict_to_hidden(pattern, subset)
            compressed = compress_hidden(restricted, subset)
            v = closedness_verdict(compressed)
            verdicts.append(SubsetVerdict(hidden=subset, status=v.status, rule=v.rule))
            if v.status is not Closedness.CLOSED:
                all_closed = False
    return SufficiencyReport(
        condition1_full_output_mask=condition1,
        subset_verdicts=tuple(verdicts),
        holds=condition1 and all_closed,
    )


def scalar_output_projection_distance(a, pattern: SupportPattern) -> float:
    """Exact infimum for scalar-output two-layer patterns.

    The factorization set is the coordinate subspace on the row-support
    union, so the distance from a (1 x N_0) target is the norm of its
    entries outside that set.
    """
    if pattern.depth != 2 or pattern.output_dim != 1:
        raise ValueError("closed-form distance requires a scalar-output two-layer pattern")
    m = matrix(a)
    if len(m) != 1 or len(m[0]) != pattern.input_dim:
        raise ValueError("target must be 1 x N_0")
    support = row_support_union(pattern)
    sq = sum(float(x) ** 2 for j, x in enumerate(m[0]) if j not in support)
    return sq**0.5


def witness_to_json(w: RationalMatrix) -> list[list[str]]:
    from .rational import format_fraction

    return [[format_fraction(x) for x in row] for row in w]
