"""Structured eigenvalue reassignment.

Given a validated assembly (X_c, Lambda_c, Lambda_a) for a structured A,
two constructors are provided: the full parametric family

    delta = X_c D X^+ + e2 H^-1 (X^+)* D* X* H - H^-1 (X^+)* X* H X D X^+
            + H^-1 (I - X X^+)* Z (I - X X^+),      D = Lambda_a - Lambda_c

over admissible parameters Z, and the closed-form no-spillover update

    delta = X_c D (X_c* H X_c)^-1 X_c* H

whose rank equals rank(D) and which leaves every other Jordan pair of A
untouched, known or not.  Real arrangements produce real perturbations;
realness is verified, never silently truncated.
"""

from __future__ import annotations

import warnings
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
from .diagnostics import PerturbationReport, verify_reassignment
from .errors import ArgumentError, RealnessError, StructureError
from .spectral import (
    ReassignmentAssembly,
    ReassignmentGroup,
    ReassignmentSpec,
    assemble_complex,
    assemble_real_jordan,
    assemble_real_lie,
    certificate_residual,
)
from .subspaces import gram_inverse_apply

__all__ = [
    "ReassignmentResult",
    "reassign_family",
    "reassign_no_spillover",
    "reassign_simple",
]

IMAG_CAST_TOL = 1e-10


@dataclass(frozen=True)
class ReassignmentResult:
    """A perturbation together with its verification bundle."""

    delta: np.ndarray
    report: PerturbationReport | None


def _check_certificate(assembly, space, cls, tol):
    r = certificate_residual(assembly, space, cls)
    G = space.star_mat(assembly.X_c) @ space.H @ assembly.X_c
    scale = max(1.0, frob(G) * frob(assembly.Lambda_a - assembly.Lambda_c))
    if r > tol.structure_tol * scale:
        raise StructureError(
            "symmetry_certificate",
            f"assembly fails the Gram symmetry certificate "
            f"(residual {r:.3e}); the requested targets are incompatible "
            f"with the structure", residual=r)


def _check_z(Z, assembly, space, cls, tol):
    if Z is None:
        return None
    Z = as_matrix(Z, "Z")
    if Z.shape != (space.n, space.n):
        raise ArgumentError("Z must be n x n")
    r = z_symmetry_residual(Z, space, cls)
    if r > tol.structure_tol * max(1.0, frob(Z)):
        raise StructureError(
            "z_symmetry", f"Z fails Z* = e1 e2 Z (residual {r:.3e})", residual=r)
    if assembly.real_output and np.max(np.abs(Z.imag)) > tol.structure_tol * max(1.0, frob(Z)):
        raise StructureError(
            "z_real", "real arrangements require a real parameter Z")
    return Z


def _finalize(delta, assembly):
    if not assembly.real_output:
        return delta
    scale = max(frob(delta), 1e-300)
    imax = float(np.max(np.abs(delta.imag)))
    if imax > IMAG_CAST_TOL * scale:
        raise RealnessError(
            f"perturbation promised real has imaginary part {imax:.3e} "
            f"(relative {imax / scale:.3e}); check conjugate consistency "
            f"of the supplied chains", imag_magnitude=imax)
    return delta.real


def reassign_family(A, assembly: ReassignmentAssembly, space: ScalarProductSpace,
                    cls: StructureClass, Z=None,
                    tol: ToleranceProfile | None = None,
                    verify: bool = True) -> ReassignmentResult:
    """Member of the parametric family of structured perturbations replacing
    the assembly's current eigenvalues by its targets while keeping the
    aggregated Jordan chains.

    Z = None takes the Z = 0 member.  The result satisfies
    ``(A + delta) X_c = X_c Lambda_a`` and stays in the algebra.
    """
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    n = space.n
    if A.shape != (n, n):
        raise ArgumentError("A must match the space dimension")
    _check_certificate(assembly, space, cls, tol)
    Z = _check_z(Z, assembly, space, cls, tol)

    X = assembly.X_c
    D = assembly.Lambda_a - assembly.Lambda_c
    st = space.star_mat
    H = space.H
    Xd = pseudoinverse(X, tol.rank_tol)
    delta = X @ D @ Xd
    delta = delta + cls.epsilon2 * space.h_solve(st(Xd) @ st(D) @ st(X) @ H)
    delta = delta - space.h_solve(st(Xd) @ st(X) @ H @ X @ D @ Xd)
    if Z is not None:
        P = np.eye(n) - X @ Xd
        delta = delta + space.h_solve(st(P) @ Z @ P)
    delta = _finalize(delta, assembly)
    report = None
    if verify:
        report = verify_reassignment(
            A, delta, assembly, space, cls, tol=tol,
            match_tol=max(1e-6, tol.residual_tol), check_spillover=False)
    return ReassignmentResult(delta=delta, report=report)


def reassign_no_spillover(A, assembly: ReassignmentAssembly,
                          space: ScalarProductSpace, cls: StructureClass,
                          fixed_spectrum_guard=None,
                          allow_guard_violation: bool = False,
                          tol: ToleranceProfile | None = None,
                          verify: bool = True) -> ReassignmentResult:
    """Closed-form no-spillover perturbation of rank ``rank(L_a - L_c)``.

    Every Jordan pair of A whose eigenvalue avoids the changed family stays
    a Jordan pair of ``A + delta`` even when unknown.  When the fixed
    spectrum is known, pass it as fixed_spectrum_guard to certify the
    disjointness hypothesis; collisions are a hard error unless
    allow_guard_violation is set, which degrades to a warning and voids the
    no-spillover guarantee.
    """
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    n = space.n
    if A.shape != (n, n):
        raise ArgumentError("A must match the space dimension")
    _check_certificate(assembly, space, cls, tol)

    if fixed_spectrum_guard is not None:
        guard = np.asarray(list(fixed_spectrum_guard), dtype=complex)
        for what, values in (("changed eigenvalue family", assembly.current_values),
                             ("target values", assembly.target_values)):
            scale = max(1.0, float(np.max(np.abs(values))),
                        float(np.max(np.abs(guard))))
            gap = float(np.min(np.abs(values[:, None] - guard[None, :])))
            if gap <= 1e-6 * scale:
                msg = (f"fixed spectrum meets the {what} (min gap {gap:.3e}); "
                       "the no-spillover hypothesis fails")
                if not allow_guard_violation:
                    raise StructureError("spectral_disjointness", msg,
                                         residual=gap)
                warnings.warn(msg + "; proceeding without the guarantee",
                              stacklevel=2)

    X = assembly.X_c
    G = space.star_mat(X) @ space.H @ X
    p = G.shape[0]
    s = np.linalg.svd(G, compute_uv=False)
    if s.size == 0 or s[-1] <= tol.rank_tol * max(1.0, s[0]):
        raise StructureError(
            "gram_singular",
            "X_c* H X_c is numerically singular; the changed family is not "
            "self-contained under the eigenvalue pairing")
    Y, cond = gram_inverse_apply(G, space.star_mat(X) @ space.H)
    if cond > 1e8:
        warnings.warn(
            f"Gram matrix badly conditioned (1-norm estimate {cond:.2e})",
            stacklevel=2)
    delta = X @ (assembly.Lambda_a - assembly.Lambda_c) @ Y
    delta = _finalize(delta, assembly)
    report = None
    if verify:
        report = verify_reassignment(
            A, delta, assembly, space, cls, tol=tol, gram_condition=cond,
            match_tol=max(1e-6, tol.residual_tol), check_spillover=True)
    return ReassignmentResult(delta=delta, report=report)


def reassign_simple(A, eigpairs, targets, space: ScalarProductSpace,
                    cls: StructureClass, Z=None, mode: str = "no-spillover",
                    complete_pairing: bool = False,
                    tol: ToleranceProfile | None = None,
                    snap_tol: float = 1e-8,
                    verify: bool = True) -> ReassignmentResult:
    """Convenience wrapper for simple, mutually distinct eigenvalues.

    eigpairs is a sequence of (eigenvalue, eigenvector); targets the
    parallel sequence of replacement values.  The wrapper builds one-column
    chains, snaps near-conjugate inputs into exact conjugate pairs, selects
    the arrangement matching the space (complex, real Lie or real Jordan)
    and dispatches by mode: "no-spillover" (default, Z must be None) or
    "family" (Z allowed).

    complete_pairing inserts missing conjugate partner groups
    automatically; this only works in a real-field space, where the partner
    chain is the conjugate of the given one.  Partners under the
    ``lambda -> e2 lambda*`` pairing that involve independent eigenvector
    data (for instance -lambda in the real Lie case) are never invented.
    """
    tol = tol or ToleranceProfile()
    cls = StructureClass.parse(cls)
    A = as_matrix(A, "A")
    eigpairs = [(complex(l), np.asarray(x, dtype=complex).reshape(-1, 1))
                for l, x in eigpairs]
    targets = [complex(t) for t in targets]
    if len(eigpairs) != len(targets):
        raise ArgumentError("eigpairs and targets must have equal length")

    values = [l for l, _ in eigpairs]
    scale = max([1.0] + [abs(v) for v in values])
    band = snap_tol * scale
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= band:
                raise StructureError(
                    "multiplicity",
                    f"eigenvalues {values[i]:.6g} and {values[j]:.6g} coincide; "
                    "simple reassignment needs distinct simple eigenvalues "
                    "(build Jordan chains and use the assembly path instead)")

    groups = [ReassignmentGroup(current=l, target=t, chains=(x,))
              for (l, x), t in zip(eigpairs, targets)]

    if complete_pairing:
        if space.field != "real":
            raise ArgumentError(
                "complete_pairing can only invent conjugate partners, which "
                "requires a real-field space")
        extra = []
        have = [g.current for g in groups]
        for g in groups:
            c = np.conj(g.current)
            if abs(c - g.current) <= band:
                continue
            if any(abs(c - v) <= band for v in have):
                continue
            extra.append(ReassignmentGroup(
                current=c, target=np.conj(g.target),
                chains=(np.conj(g.chains[0]),)))
            have.append(c)
        groups = groups + extra

    spec = ReassignmentSpec(groups=tuple(groups))
    chain_tol = max(1e-6, tol.residual_tol)
    if space.field == "real":
        if cls is StructureClass.LIE:
            assembly = assemble_real_lie(A, spec, space, cls,
                                         snap_tol=snap_tol, chain_tol=chain_tol)
        else:
            assembly = assemble_real_jordan(A, spec, space, cls,
                                            snap_tol=snap_tol, chain_tol=chain_tol)
    else:
        assembly = assemble_complex(A, spec, space, cls,
                                    snap_tol=snap_tol, chain_tol=chain_tol)

    if mode == "family":
        return reassign_family(A, assembly, space, cls, Z=Z, tol=tol, verify=verify)
    if mode == "no-spillover":
        if Z is not None:
            raise ArgumentError("the no-spillover update has no free parameter Z")
        return reassign_no_spillover(A, assembly, space, cls, tol=tol, verify=verify)
    raise ArgumentError(f"unknown mode {mode!r} (expected 'family' or 'no-spillover')")
