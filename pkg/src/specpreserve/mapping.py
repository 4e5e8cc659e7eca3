"""Structured linear-map solver: all members A of the Jordan/Lie algebra
with ``A X = B``, the feasibility test, and the Frobenius-minimal member.

The whole solution family is

    A(Z) = B X^+ + e1 e2 H^-1 [(H B X^+)* - (X^+)* (X* H B)* X^+]
           + H^-1 (I - X X^+)* Z (I - X X^+)

over free parameters Z with ``Z* = e1 e2 Z``; Z = 0 gives the unique
Frobenius-minimal solution.  Star is the star of the space throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ScalarProductSpace,
    StructureClass,
    ToleranceProfile,
    as_matrix,
    frob,
    pseudoinverse,
    z_symmetry_residual,
)
from .errors import ArgumentError, StructureError

__all__ = [
    "FeasibilityReport",
    "StructuredMapSolution",
    "feasibility_check",
    "map_family",
    "solve_structured",
    "minimal_structured",
]

ABS_FLOOR = 1e-14


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the solvability test for ``A X = B`` with A structured.

    feasible is True when both the range condition ``B X^+ X = B`` and the
    symmetry condition ``X* H B = e1 e2 (X* H B)*`` hold at the tolerance;
    violations lists (condition name, residual, threshold) for the failed
    ones.
    """

    feasible: bool
    range_residual: float
    symmetry_residual: float
    violations: tuple


def feasibility_check(X, B, space: ScalarProductSpace, cls: StructureClass,
                      tol: ToleranceProfile | None = None) -> FeasibilityReport:
    """Check whether some structured A satisfies ``A X = B``."""
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    X = as_matrix(X, "X")
    B = as_matrix(B, "B")
    if X.shape != B.shape or X.shape[0] != space.n:
        raise ArgumentError(
            f"X and B must both be {space.n} x p, got {X.shape} and {B.shape}")
    Xd = pseudoinverse(X, tol.rank_tol)
    r_range = float(np.linalg.norm(B @ Xd @ X - B))
    thr_range = tol.residual_tol * frob(B) + ABS_FLOOR * max(1.0, frob(B))

    W = space.star_mat(X) @ space.H @ B
    s = space.epsilon1 * cls.epsilon2
    r_sym = float(np.linalg.norm(W - s * space.star_mat(W)))
    # the floor follows the rounding scale of forming W itself: W can vanish
    # identically (isotropic X) while carrying O(eps |X||B|) noise
    thr_sym = tol.residual_tol * frob(W) + ABS_FLOOR * max(
        1.0, frob(X) * frob(B))

    violations = []
    if r_range > thr_range:
        violations.append(("range_condition", r_range, thr_range))
    if r_sym > thr_sym:
        violations.append(("symmetry_condition", r_sym, thr_sym))
    return FeasibilityReport(
        feasible=not violations,
        range_residual=r_range,
        symmetry_residual=r_sym,
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class StructuredMapSolution:
    """The Z = 0 solution plus everything needed to enumerate the family."""

    family_base: np.ndarray
    projector: np.ndarray
    space: ScalarProductSpace
    cls: StructureClass

    def with_z(self, Z, tol: ToleranceProfile | None = None) -> np.ndarray:
        """Family member for an admissible parameter Z (``Z* = e1 e2 Z``)."""
        tol = tol or ToleranceProfile()
        Z = as_matrix(Z, "Z")
        r = z_symmetry_residual(Z, self.space, self.cls)
        if r > tol.structure_tol * max(1.0, frob(Z)):
            raise StructureError(
                "z_symmetry",
                f"Z fails Z* = e1 e2 Z (residual {r:.3e})", residual=r)
        P = self.projector
        return self.family_base + self.space.h_solve(
            self.space.star_mat(P) @ Z @ P)


def map_family(X, B, space: ScalarProductSpace, cls: StructureClass,
               tol: ToleranceProfile | None = None) -> StructuredMapSolution:
    """Solve ``A X = B`` over the structured class, returning the family.

    Raises StructureError when the feasibility conditions fail.
    """
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    X = as_matrix(X, "X")
    B = as_matrix(B, "B")
    report = feasibility_check(X, B, space, cls, tol)
    if not report.feasible:
        names = ", ".join(v[0] for v in report.violations)
        raise StructureError(
            "feasibility",
            f"A X = B has no structured solution: {names} failed "
            f"(range {report.range_residual:.3e}, symmetry {report.symmetry_residual:.3e})",
            residual=max(report.range_residual, report.symmetry_residual))

    H = space.H
    st = space.star_mat
    Xd = pseudoinverse(X, tol.rank_tol)
    n = space.n
    P = np.eye(n) - X @ Xd
    BXd = B @ Xd
    W = st(X) @ H @ B
    s = space.epsilon1 * cls.epsilon2
    base = BXd + s * space.h_solve(st(H @ BXd) - st(Xd) @ st(W) @ Xd)
    return StructuredMapSolution(family_base=base, projector=P, space=space, cls=cls)


def solve_structured(X, B, space: ScalarProductSpace, cls: StructureClass,
                     Z=None, tol: ToleranceProfile | None = None) -> np.ndarray:
    """Structured solution of ``A X = B`` for one choice of parameter Z."""
    family = map_family(X, B, space, cls, tol)
    if Z is None:
        return family.family_base
    return family.with_z(Z, tol)


def minimal_structured(X, B, space: ScalarProductSpace, cls: StructureClass,
                       tol: ToleranceProfile | None = None) -> np.ndarray:
    """The unique Frobenius-minimal structured solution of ``A X = B``."""
    return map_family(X, B, space, cls, tol).family_base
