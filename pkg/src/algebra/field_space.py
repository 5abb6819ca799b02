"""
Finite-dimensional spaces of polynomial vector fields.

A ``FieldSpace`` stores a linearly independent basis together with the
row-reduced exact-rational coordinate matrix of that basis on the monomial
fields x^e d/dx_i. Membership, coordinates, bracket closure, structure
constants, Killing signatures and quasi-Lie scheme conditions are all decided
exactly on top of it.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ..errors import BasisError, LengthMismatchError, SchemeError, VariableMismatchError
from ..logging_config import PerformanceLogger, get_logger
from .polynomial import PolyVectorField, Slot, bracket, to_fraction


logger = get_logger(__name__)

DEFAULT_MAX_DIM = 64


def _slot_key(slot: Slot) -> Tuple:
    index, exponent = slot
    return (index, tuple(-e for e in exponent))


@dataclass(frozen=True)
class SpanMembership:
    """Result of a span membership test: coordinates or the nonzero residual."""

    coordinates: Optional[Tuple[Fraction, ...]]
    residual: PolyVectorField

    @property
    def is_member(self) -> bool:
        return self.coordinates is not None


@dataclass(frozen=True)
class FieldSpace:
    """
    Span of linearly independent polynomial vector fields.

    Attributes:
        variables: Shared variable list
        basis: Ordered, linearly independent basis fields
        slots: Ordered monomial index (component, exponent) of the basis
        echelon: Reduced row echelon form of the basis coordinate matrix
        pivots: Pivot column of each echelon row
        transform: Matrix T with echelon = T * coordinates(basis)
    """

    variables: Tuple[str, ...]
    basis: Tuple[PolyVectorField, ...]
    slots: Tuple[Slot, ...]
    echelon: Tuple[Tuple[Fraction, ...], ...]
    pivots: Tuple[int, ...]
    transform: Tuple[Tuple[Fraction, ...], ...]

    @classmethod
    def from_fields(
        cls, fields: Sequence[PolyVectorField], variables: Optional[Sequence[str]] = None
    ) -> "FieldSpace":
        """
        Build a space from linearly independent fields.

        Raises:
            BasisError: If the fields are linearly dependent
            VariableMismatchError: If the fields use different variable lists
        """
        fields = tuple(fields)
        if variables is None:
            if not fields:
                raise BasisError("An empty space needs an explicit variable list")
            variables = fields[0].variables
        variables = tuple(variables)
        for f in fields:
            if f.variables != variables:
                raise VariableMismatchError(variables, f.variables)

        slot_set = set()
        for f in fields:
            slot_set.update(f.slots())
        slots = tuple(sorted(slot_set, key=_slot_key))
        column = {s: k for k, s in enumerate(slots)}

        r, m = len(fields), len(slots)
        if r == 0:
            return cls(variables, (), slots, (), (), ())

        rows = []
        for a, f in enumerate(fields):
            row = [QQ.zero] * (m + r)
            for s, coeff in f.slots().items():
                row[column[s]] = QQ(coeff.numerator, coeff.denominator)
            row[m + a] = QQ.one
            rows.append(row)
        reduced, pivots = DomainMatrix(rows, (r, m + r), QQ).rref()
        if len(pivots) < r or any(p >= m for p in pivots):
            raise BasisError(f"The {r} basis fields are linearly dependent")

        entries = [[to_fraction(v) for v in row] for row in reduced.to_list()]
        return cls(
            variables=variables,
            basis=fields,
            slots=slots,
            echelon=tuple(tuple(row[:m]) for row in entries),
            pivots=tuple(pivots),
            transform=tuple(tuple(row[m:]) for row in entries),
        )

    @classmethod
    def spanned_by(
        cls, fields: Sequence[PolyVectorField], variables: Optional[Sequence[str]] = None
    ) -> "FieldSpace":
        """Build a space from the independent subset of ``fields`` (first occurrences kept)."""
        fields = list(fields)
        if variables is None and fields:
            variables = fields[0].variables
        space = cls.from_fields((), variables)
        for f in fields:
            if not span_contains(space, f).is_member:
                space = cls.from_fields(space.basis + (f,), variables)
        return space

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, A: PolyVectorField) -> bool:
        return span_contains(self, A).is_member

    def reduce_slots(
        self, values: Dict[Slot, Any], to_scalar: Callable[[Fraction], Any] = lambda f: f
    ) -> Tuple[List[Any], Dict[Slot, Any]]:
        """
        Reduce a slot vector against the echelon rows.

        Works for exact rationals and, with ``to_scalar=sympy.Rational``,
        for symbolic coefficients.

        Returns:
            (coordinates in the basis, residual slot vector)
        """
        coeffs = [values.get(self.slots[p], 0) for p in self.pivots]
        residual = dict(values)
        for c, row in zip(coeffs, self.echelon):
            if c == 0:
                continue
            for k, entry in enumerate(row):
                if entry:
                    s = self.slots[k]
                    residual[s] = residual.get(s, 0) - c * to_scalar(entry)
        coordinates = []
        for a in range(self.dimension):
            total = 0
            for j, c in enumerate(coeffs):
                t = self.transform[j][a]
                if t and c != 0:
                    total = total + c * to_scalar(t)
            coordinates.append(total)
        return coordinates, residual

    def change_of_basis(self, other: "FieldSpace") -> Tuple[Tuple[Fraction, ...], ...]:
        """
        Coordinates of each basis field of ``self`` in the basis of ``other``.

        Raises:
            BasisError: If some basis field of self is not in other
        """
        rows = []
        for a, f in enumerate(self.basis):
            m = span_contains(other, f)
            if not m.is_member:
                raise BasisError(f"Basis field {a} is not in the target span")
            rows.append(m.coordinates)
        return tuple(rows)

    def same_span(self, other: "FieldSpace") -> bool:
        if self.variables != other.variables or self.dimension != other.dimension:
            return False
        return all(other.contains(f) for f in self.basis)


def span_contains(S: FieldSpace, A: PolyVectorField) -> SpanMembership:
    """
    Decide exactly whether A lies in S.

    Returns:
        SpanMembership with coordinates in S's basis, or with the nonzero
        residual field when A is not a member.

    Raises:
        VariableMismatchError: If A is defined over other variables
    """
    if A.variables != S.variables:
        raise VariableMismatchError(S.variables, A.variables)
    coordinates, residual = S.reduce_slots(A.slots())
    residual = {s: v for s, v in residual.items() if v != 0}
    residual_field = PolyVectorField.from_slots(S.variables, residual)
    if residual:
        return SpanMembership(None, residual_field)
    return SpanMembership(tuple(Fraction(c) for c in coordinates), residual_field)


@dataclass(frozen=True)
class StructureConstants:
    """
    Structure constants c[a][b][g] with [X_a, X_b] = sum_g c[a][b][g] X_g.
    """

    dimension: int
    tensor: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]

    def __post_init__(self):
        r = self.dimension
        if len(self.tensor) != r or any(
            len(row) != r or any(len(entry) != r for entry in row) for row in self.tensor
        ):
            raise LengthMismatchError(f"Structure constant tensor is not {r}x{r}x{r}")

    @classmethod
    def abelian(cls, dimension: int) -> "StructureConstants":
        zero = tuple(Fraction(0) for _ in range(dimension))
        return cls(dimension, tuple(tuple(zero for _ in range(dimension)) for _ in range(dimension)))

    @classmethod
    def of_basis(cls, space: FieldSpace) -> Optional["StructureConstants"]:
        """Structure constants of a bracket-closed space, or None if it is not closed."""
        r = space.dimension
        tensor = [[None] * r for _ in range(r)]
        zero = tuple(Fraction(0) for _ in range(r))
        for a in range(r):
            tensor[a][a] = zero
            for b in range(a + 1, r):
                m = span_contains(space, bracket(space.basis[a], space.basis[b]))
                if not m.is_member:
                    return None
                tensor[a][b] = m.coordinates
                tensor[b][a] = tuple(-c for c in m.coordinates)
        return cls(r, tuple(tuple(row) for row in tensor))

    def bracket_coordinates(self, a: int, b: int) -> Tuple[Fraction, ...]:
        return self.tensor[a][b]

    def antisymmetry_defect(self) -> Fraction:
        r = self.dimension
        return max(
            (abs(self.tensor[a][b][g] + self.tensor[b][a][g])
             for a in range(r) for b in range(r) for g in range(r)),
            default=Fraction(0),
        )

    def jacobi_defect(self) -> Fraction:
        """Largest violation of the Jacobi identity (zero for a Lie algebra)."""
        r = self.dimension
        c = self.tensor
        worst = Fraction(0)
        for a in range(r):
            for b in range(a + 1, r):
                for g in range(b + 1, r):
                    for e in range(r):
                        total = sum(
                            c[b][g][d] * c[a][d][e]
                            + c[g][a][d] * c[b][d][e]
                            + c[a][b][d] * c[g][d][e]
                            for d in range(r)
                        )
                        worst = max(worst, abs(total))
        return worst

    def killing_matrix(self) -> sympy.Matrix:
        """K[a][b] = sum_{g,d} c[a][g][d] c[b][d][g], exactly."""
        r = self.dimension
        c = self.tensor
        entries = [
            [
                sum(c[a][g][d] * c[b][d][g] for g in range(r) for d in range(r))
                for b in range(r)
            ]
            for a in range(r)
        ]
        return sympy.Matrix(r, r, lambda i, j: sympy.Rational(entries[i][j].numerator, entries[i][j].denominator))

    def to_lists(self) -> List[List[List[str]]]:
        return [[[str(v) for v in entry] for entry in row] for row in self.tensor]


@dataclass(frozen=True)
class KillingSignature:
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def nondegenerate(self) -> bool:
        return self.n_zero == 0

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)


def killing_signature(c: StructureConstants) -> KillingSignature:
    """
    Inertia of the Killing form, by exact sign counting.

    The characteristic polynomial of the (symmetric, rational) Killing matrix
    is split into square-free factors; each factor's positive and negative
    roots are counted with Sturm sequences and weighted by multiplicity.
    """
    r = c.dimension
    if r == 0:
        return KillingSignature(0, 0, 0)
    lam = sympy.Symbol("lambda")
    char = sympy.Poly(c.killing_matrix().charpoly(lam).as_expr(), lam, domain=QQ)

    # multiplicity of the eigenvalue 0 = number of vanishing low-order coefficients
    coeffs = char.all_coeffs()
    n_zero = 0
    while n_zero < len(coeffs) - 1 and coeffs[-1 - n_zero] == 0:
        n_zero += 1
    reduced = sympy.Poly(coeffs[: len(coeffs) - n_zero], lam, domain=QQ)

    n_plus = n_minus = 0
    _, factors = reduced.sqf_list()
    for factor, multiplicity in factors:
        leading = abs(factor.LC())
        bound = 1 + max((abs(a) / leading for a in factor.all_coeffs()[1:]), default=0)
        positive = factor.count_roots(0, bound)
        negative = factor.count_roots(-bound, 0)
        if positive + negative != factor.degree():
            raise ValueError("Killing matrix has non-real eigenvalues")
        n_plus += multiplicity * positive
        n_minus += multiplicity * negative

    signature = KillingSignature(n_plus, n_minus, n_zero)
    logger.debug(f"Killing signature of {r}-dimensional algebra: {signature.as_tuple()}")
    return signature


@dataclass(frozen=True)
class BracketWitness:
    """A bracket [left, right] of basis fields together with its failed residual."""

    left: int
    right: int
    bracket: PolyVectorField
    residual: PolyVectorField


def find_witness(
    witnesses: Sequence[BracketWitness], left: int, right: int
) -> Optional[BracketWitness]:
    """The witness for the pair (left, right) in either order, if present."""
    for witness in witnesses:
        if {witness.left, witness.right} == {left, right}:
            return witness
    return None


@dataclass(frozen=True)
class ClosureResult:
    """Outcome of :func:`close_under_bracket`."""

    space: FieldSpace
    structure_constants: Optional[StructureConstants]
    closed: bool
    adjoined: Tuple[BracketWitness, ...] = ()
    overflow: Optional[BracketWitness] = None

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def witness(self) -> Optional[BracketWitness]:
        """First bracket that escaped the generating set, if any."""
        if self.adjoined:
            return self.adjoined[0]
        return self.overflow

    @property
    def witnesses(self) -> Tuple[BracketWitness, ...]:
        """Every escaping bracket in processing order, the overflow last."""
        return self.adjoined + ((self.overflow,) if self.overflow else ())

    def witness_for(self, left: int, right: int) -> Optional[BracketWitness]:
        return find_witness(self.witnesses, left, right)


def close_under_bracket(
    generators: Sequence[PolyVectorField], max_dim: int = DEFAULT_MAX_DIM
) -> ClosureResult:
    """
    Adjoin brackets of basis pairs until the span is bracket-closed.

    Pairs (i, j), i < j, are processed with j increasing over the growing
    basis; every bracket that is not yet in the span is appended. Exceeding
    ``max_dim`` stops the process with ``closed=False`` (not an exception).
    """
    generators = list(generators)
    if not generators:
        raise BasisError("close_under_bracket needs at least one generator")
    space = FieldSpace.spanned_by(generators)
    basis = list(space.basis)
    if len(basis) > max_dim:
        return ClosureResult(space, None, False)

    adjoined: List[BracketWitness] = []
    with PerformanceLogger("close_under_bracket", logger) as perf:
        j = 1
        while j < len(basis):
            for i in range(j):
                br = bracket(basis[i], basis[j])
                membership = span_contains(space, br)
                if membership.is_member:
                    continue
                witness = BracketWitness(i, j, br, membership.residual)
                if len(basis) >= max_dim:
                    perf.set_metrics(dimension=len(basis), closed=False)
                    logger.info(
                        f"Bracket closure exceeded max_dim={max_dim} at pair ({i}, {j})"
                    )
                    return ClosureResult(space, None, False, tuple(adjoined), witness)
                adjoined.append(witness)
                basis.append(br)
                space = FieldSpace.from_fields(basis)
                logger.debug(f"Adjoined [{i}, {j}]; dimension now {len(basis)}")
            j += 1

        constants = StructureConstants.of_basis(space)
        perf.set_metrics(dimension=space.dimension, closed=True)

    logger.info(f"Bracket closure reached dimension {space.dimension}")
    return ClosureResult(space, constants, True, tuple(adjoined))


@dataclass(frozen=True)
class SchemeReport:
    """
    Bracket conditions of a candidate quasi-Lie scheme S(W, V2).

    Each witness list holds every pair whose bracket failed the corresponding
    membership test, in processing order.
    """

    w_closed: bool
    action_ok: bool
    v2_closed: bool
    w_witnesses: Tuple[BracketWitness, ...] = ()
    action_witnesses: Tuple[BracketWitness, ...] = ()
    v2_witnesses: Tuple[BracketWitness, ...] = ()

    @property
    def is_scheme(self) -> bool:
        return self.w_closed and self.action_ok

    @property
    def w_witness(self) -> Optional[BracketWitness]:
        return self.w_witnesses[0] if self.w_witnesses else None

    @property
    def action_witness(self) -> Optional[BracketWitness]:
        return self.action_witnesses[0] if self.action_witnesses else None

    @property
    def v2_witness(self) -> Optional[BracketWitness]:
        return self.v2_witnesses[0] if self.v2_witnesses else None

    def v2_witness_for(self, left: int, right: int) -> Optional[BracketWitness]:
        return find_witness(self.v2_witnesses, left, right)


def _failures(
    pairs, left: Sequence[PolyVectorField], right: Sequence[PolyVectorField], target: FieldSpace
) -> Tuple[BracketWitness, ...]:
    found = []
    for i, j in pairs:
        br = bracket(left[i], right[j])
        membership = span_contains(target, br)
        if not membership.is_member:
            found.append(BracketWitness(i, j, br, membership.residual))
    return tuple(found)


def check_scheme(W: FieldSpace, V2: FieldSpace) -> SchemeReport:
    """
    Check [W, W] in W, [W, V2] in V2 and whether V2 itself is bracket-closed.

    Raises:
        SchemeError: If some basis field of W is not in V2
    """
    if W.variables != V2.variables:
        raise VariableMismatchError(W.variables, V2.variables)
    for a, w in enumerate(W.basis):
        if not V2.contains(w):
            raise SchemeError(f"W basis field {a} is not contained in V2", index=a)

    with PerformanceLogger("check_scheme", logger):
        w_basis, v_basis = W.basis, V2.basis
        w_fail = _failures(
            [(i, j) for i in range(len(w_basis)) for j in range(i + 1, len(w_basis))],
            w_basis, w_basis, W,
        )
        action_fail = _failures(
            [(i, j) for i in range(len(w_basis)) for j in range(len(v_basis))],
            w_basis, v_basis, V2,
        )
        v2_fail = _failures(
            [(i, j) for j in range(len(v_basis)) for i in range(j)],
            v_basis, v_basis, V2,
        )

    report = SchemeReport(
        w_closed=not w_fail,
        action_ok=not action_fail,
        v2_closed=not v2_fail,
        w_witnesses=w_fail,
        action_witnesses=action_fail,
        v2_witnesses=v2_fail,
    )
    logger.info(
        f"Scheme check: w_closed={report.w_closed}, action_ok={report.action_ok}, "
        f"v2_closed={report.v2_closed}"
    )
    return report
