"""Structured invariant-subspace workflows: reproduce a subspace, preserve
one, preserve a complementary pair (with or without knowing the fixed pair),
and the closed-form rank-bounded no-spillover update.

All updates stay inside the Jordan/Lie algebra of the space.  The central
compatibility condition is on the Gram matrix ``G = X* H X``: a target
restriction L is reachable by a structured perturbation iff
``G L = e2 L* G``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    ScalarProductSpace,
    StructureClass,
    ToleranceProfile,
    as_matrix,
    frob,
    numerical_rank,
    pseudoinverse,
)
from .errors import ArgumentError, StructureError
from .mapping import solve_structured

__all__ = [
    "CompatibilityReport",
    "lambda_compatibility",
    "reproduce_invariant",
    "preserve_invariant",
    "preserve_complementary",
    "no_spillover",
    "gram_matrix",
    "gram_inverse_apply",
]

SPECTRAL_SEPARATION = 1e-6
COND_WARN = 1e8


@dataclass(frozen=True)
class CompatibilityReport:
    """Result of the reachability test for a target restriction.

    condition_residual measures ``|G L - e2 L* G|``; compatible is the
    thresholded verdict; notes carries human-readable hints.
    """

    condition_residual: float
    compatible: bool
    notes: str = ""


def gram_matrix(X, space: ScalarProductSpace) -> np.ndarray:
    """The form's Gram matrix ``X* H X`` of a chain/basis matrix."""
    X = as_matrix(X, "X")
    return space.star_mat(X) @ space.H @ X


def lambda_compatibility(X_a, Lambda_a, space: ScalarProductSpace,
                         cls: StructureClass,
                         tol: ToleranceProfile | None = None) -> CompatibilityReport:
    """Test whether Lambda_a can be the restriction of a structured update
    on range(X_a): requires ``(X_a* H X_a) L_a = e2 L_a* (X_a* H X_a)``."""
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    X_a = as_matrix(X_a, "X_a")
    Lambda_a = as_matrix(Lambda_a, "Lambda_a")
    p = X_a.shape[1]
    if Lambda_a.shape != (p, p):
        raise ArgumentError("Lambda_a must be p x p for X_a with p columns")
    if numerical_rank(X_a, tol.rank_tol) < p:
        raise StructureError("rank", "X_a is rank deficient")
    G = gram_matrix(X_a, space)
    r = float(np.linalg.norm(G @ Lambda_a - cls.epsilon2 * space.star_mat(Lambda_a) @ G))
    scale = max(1.0, frob(G) * frob(Lambda_a))
    ok = r <= tol.structure_tol * scale
    notes = "" if ok else (
        "target restriction is unreachable for this structure; "
        "adjust Lambda_a so that G L = e2 L* G")
    return CompatibilityReport(condition_residual=r, compatible=ok, notes=notes)


def reproduce_invariant(A, X_a, Lambda_a, space: ScalarProductSpace,
                        cls: StructureClass, Z=None,
                        tol: ToleranceProfile | None = None) -> np.ndarray:
    """Structured perturbation making range(X_a) invariant with restriction
    Lambda_a.  Z = None yields the Frobenius-minimal member of the family."""
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    X_a = as_matrix(X_a, "X_a")
    Lambda_a = as_matrix(Lambda_a, "Lambda_a")
    compat = lambda_compatibility(X_a, Lambda_a, space, cls, tol)
    if not compat.compatible:
        raise StructureError(
            "lambda_compatibility",
            f"Lambda_a incompatible with the structure "
            f"(residual {compat.condition_residual:.3e})",
            residual=compat.condition_residual)
    B = X_a @ Lambda_a - A @ X_a
    return solve_structured(X_a, B, space, cls, Z, tol)


def preserve_invariant(A, X_c, Lambda_c, R, Lambda_a, space: ScalarProductSpace,
                       cls: StructureClass, Z=None,
                       tol: ToleranceProfile | None = None,
                       eig_tol: float = 1e-6) -> np.ndarray:
    """Structured perturbation keeping the invariant subspace range(X_c)
    invariant, in the re-basis X_c R, with new restriction Lambda_a."""
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    X_c = as_matrix(X_c, "X_c")
    Lambda_c = as_matrix(Lambda_c, "Lambda_c")
    Lambda_a = as_matrix(Lambda_a, "Lambda_a")
    R = as_matrix(R, "R")
    p = X_c.shape[1]
    if R.shape != (p, p):
        raise ArgumentError("R must be p x p")
    if numerical_rank(R, tol.rank_tol) < p:
        raise StructureError("nonsingular_R", "R is numerically singular")
    r = np.linalg.norm(A @ X_c - X_c @ Lambda_c)
    if r > eig_tol * max(frob(A) * frob(X_c), 1e-300):
        raise StructureError(
            "invariant_pair_residual",
            f"A X_c = X_c Lambda_c fails (residual {r:.3e})", residual=float(r))
    GR = space.star_mat(R) @ gram_matrix(X_c, space) @ R
    rc = float(np.linalg.norm(
        GR @ Lambda_a - cls.epsilon2 * space.star_mat(Lambda_a) @ GR))
    if rc > tol.structure_tol * max(1.0, frob(GR) * frob(Lambda_a)):
        raise StructureError(
            "lambda_compatibility",
            f"Lambda_a incompatible in the basis X_c R (residual {rc:.3e})",
            residual=rc)
    Rt = R @ Lambda_a - Lambda_c @ R
    return solve_structured(X_c @ R, X_c @ Rt, space, cls, Z, tol)


def _spectral_gap(Lambda_c, Lambda_f, space, cls):
    ec = np.linalg.eigvals(as_matrix(Lambda_c))
    ef = np.linalg.eigvals(as_matrix(Lambda_f))
    paired = np.array([cls.epsilon2 * space.star_scalar(l) for l in ec])
    return float(np.min(np.abs(paired[:, None] - ef[None, :])))


def preserve_complementary(A, X_c, Lambda_a, X_f, Lambda_f,
                           space: ScalarProductSpace, cls: StructureClass,
                           tol: ToleranceProfile | None = None,
                           eig_tol: float = 1e-6,
                           separation: float = SPECTRAL_SEPARATION) -> np.ndarray:
    """Structured perturbation reassigning the restriction on range(X_c) to
    Lambda_a while fixing the complementary invariant pair (X_f, Lambda_f).

    Requires the paired spectrum of the changed block to be disjoint from
    the fixed spectrum; near-violations degrade the Gram matrix and are
    reported.
    """
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    X_c = as_matrix(X_c, "X_c")
    X_f = as_matrix(X_f, "X_f")
    Lambda_a = as_matrix(Lambda_a, "Lambda_a")
    Lambda_f = as_matrix(Lambda_f, "Lambda_f")
    n = space.n
    p = X_c.shape[1]
    Lambda_c = pseudoinverse(X_c, tol.rank_tol) @ A @ X_c
    rc = np.linalg.norm(A @ X_c - X_c @ Lambda_c)
    rf = np.linalg.norm(A @ X_f - X_f @ Lambda_f)
    scale = max(frob(A), 1e-300)
    if rc > eig_tol * scale * frob(X_c):
        raise StructureError(
            "invariant_pair_residual",
            f"range(X_c) is not invariant under A (residual {rc:.3e})",
            residual=float(rc))
    if rf > eig_tol * scale * frob(X_f):
        raise StructureError(
            "invariant_pair_residual",
            f"(X_f, Lambda_f) is not an invariant pair (residual {rf:.3e})",
            residual=float(rf))
    gap = _spectral_gap(Lambda_c, Lambda_f, space, cls)
    spectral_scale = max(1.0, frob(np.linalg.eigvals(Lambda_c)), frob(np.linalg.eigvals(Lambda_f)))
    if gap < separation * spectral_scale:
        raise StructureError(
            "spectral_disjointness",
            f"paired spectrum of the changed block meets the fixed spectrum "
            f"(min gap {gap:.3e})", residual=gap)
    if gap < 10 * separation * spectral_scale:
        G = gram_matrix(X_c, space)
        warnings.warn(
            f"spectral gap {gap:.3e} is close to the separation threshold; "
            f"Gram 1-norm condition {np.real(np.linalg.cond(G, 1)):.2e}",
            stacklevel=2)

    W = gram_matrix(X_c, space) @ Lambda_a
    s = space.epsilon1 * cls.epsilon2
    rw = float(np.linalg.norm(W - s * space.star_mat(W)))
    if rw > tol.structure_tol * max(1.0, frob(W)):
        raise StructureError(
            "lambda_compatibility",
            f"Lambda_a incompatible with the structure (residual {rw:.3e})",
            residual=rw)

    X = np.hstack([X_c, X_f])
    if X.shape != (n, n):
        raise ArgumentError("[X_c X_f] must be square")
    if numerical_rank(X, tol.rank_tol) < n:
        raise StructureError("nonsingular_basis", "[X_c X_f] is numerically singular")
    B = np.hstack([X_c @ Lambda_a - A @ X_c, np.zeros((n, n - p))])
    Xi = np.linalg.inv(X)
    st = space.star_mat
    H = space.H
    BXi = B @ Xi
    delta = BXi + s * space.h_solve(st(H @ BXi) - st(Xi) @ st(st(X) @ H @ B) @ Xi)
    return delta


def gram_inverse_apply(G, RHS):
    """Solve ``G Y = RHS`` by LU with partial pivoting plus one step of
    iterative refinement; returns (Y, one_norm_condition_estimate)."""
    G = as_matrix(G, "G")
    lu, piv = scipy.linalg.lu_factor(G)
    cond = float(np.real(np.linalg.cond(G, 1)))
    Y = scipy.linalg.lu_solve((lu, piv), RHS)
    Y = Y + scipy.linalg.lu_solve((lu, piv), RHS - G @ Y)
    return Y, cond


def no_spillover(A, X_c, Lambda_c, Lambda_a, space: ScalarProductSpace,
                 cls: StructureClass, tol: ToleranceProfile | None = None,
                 eig_tol: float = 1e-6) -> np.ndarray:
    """Closed-form structured update touching nothing outside range(X_c):

        delta = X_c (L_a - L_c) (X_c* H X_c)^-1 X_c* H

    Every invariant pair of A with spectrum disjoint from the changed block
    is annihilated by delta, known or not; the rank of delta equals the
    rank of ``L_a - L_c`` and never exceeds the number of changed columns.
    """
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    X_c = as_matrix(X_c, "X_c")
    Lambda_c = as_matrix(Lambda_c, "Lambda_c")
    Lambda_a = as_matrix(Lambda_a, "Lambda_a")
    p = X_c.shape[1]
    if Lambda_c.shape != (p, p) or Lambda_a.shape != (p, p):
        raise ArgumentError("Lambda_c and Lambda_a must be p x p")
    r = np.linalg.norm(A @ X_c - X_c @ Lambda_c)
    if r > eig_tol * max(frob(A) * frob(X_c), 1e-300):
        raise StructureError(
            "invariant_pair_residual",
            f"A X_c = X_c Lambda_c fails (residual {r:.3e})", residual=float(r))
    W = gram_matrix(X_c, space) @ Lambda_a
    s = space.epsilon1 * cls.epsilon2
    rw = float(np.linalg.norm(W - s * space.star_mat(W)))
    if rw > tol.structure_tol * max(1.0, frob(W)):
        raise StructureError(
            "lambda_compatibility",
            f"Lambda_a incompatible with the structure (residual {rw:.3e})",
            residual=rw)

    G = gram_matrix(X_c, space)
    if numerical_rank(G, tol.rank_tol) < p:
        raise StructureError(
            "gram_singular",
            "X_c* H X_c is numerically singular; the changed block is not "
            "paired selfcontained (check eigenvalue pairing of the selection)")
    Y, cond = gram_inverse_apply(G, space.star_mat(X_c) @ space.H)
    if cond > COND_WARN:
        warnings.warn(
            f"Gram matrix badly conditioned (1-norm estimate {cond:.2e}); "
            "the no-spillover guarantee degrades", stacklevel=2)
    return X_c @ (Lambda_a - Lambda_c) @ Y
