"""Scalar-product spaces, adjoints and shared numerical kernels.

A space is defined by a unitary matrix H with ``H* = eps1 * H`` (star is
either plain transpose or conjugate transpose) through the form
``<x, y> = y* H x``.  The adjoint of A with respect to that form is
``H^-1 A* H``; requiring the adjoint to equal ``+A`` or ``-A`` carves out
the Jordan and Lie algebras this library works in.  With H the block flip
``[[0, I], [I, 0]]`` these are the familiar Hamiltonian-type classes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ArgumentError, StructureError

__all__ = [
    "StructureClass",
    "ToleranceProfile",
    "ScalarProductSpace",
    "adjoint",
    "structure_residual",
    "is_member",
    "pseudoinverse",
    "numerical_rank",
    "sample_structured",
    "z_symmetry_residual",
    "frob",
]

DEFAULT_STRUCTURE_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-10
DEFAULT_RESIDUAL_TOL = 1e-8


def frob(A) -> float:
    """Frobenius norm, accepting anything array-like (including scalars)."""
    return float(np.linalg.norm(np.atleast_1d(np.asarray(A))))


def as_matrix(A, name="matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ArgumentError(f"{name} must be 2-dimensional, got shape {A.shape}")
    return A


class StructureClass(enum.Enum):
    """Which algebra of the scalar product a matrix is required to live in.

    The enum value is the sign eps2 appearing in ``adjoint(A) = eps2 * A``:
    +1 selects the Jordan algebra, -1 the Lie algebra.
    """

    JORDAN = 1
    LIE = -1

    @property
    def epsilon2(self) -> int:
        return self.value

    @classmethod
    def parse(cls, value) -> "StructureClass":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("jordan", "j", "+1", "1"):
            return cls.JORDAN
        if key in ("lie", "l", "-1"):
            return cls.LIE
        raise ArgumentError(f"unknown structure class {value!r}")


@dataclass(frozen=True)
class ToleranceProfile:
    """Numerical thresholds shared by every operation.

    structure_tol gates membership checks, rank_tol is the relative
    singular-value cutoff, residual_tol gates interpolation residuals.
    The defaults suit double-precision data; matrices transcribed at a
    few decimals need a user profile around 1e-3.
    """

    structure_tol: float = DEFAULT_STRUCTURE_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    residual_tol: float = DEFAULT_RESIDUAL_TOL

    def __post_init__(self):
        for name in ("structure_tol", "rank_tol", "residual_tol"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ArgumentError(f"{name} must lie strictly between 0 and 1, got {v}")


def _normalize_star(star) -> str:
    key = str(star).strip().lower().replace("-", "").replace("_", "")
    if key in ("t", "transpose", "bilinear"):
        return "T"
    if key in ("ct", "*", "conjugatetranspose", "conjugate", "sesquilinear", "h"):
        return "CT"
    raise ArgumentError(f"unknown star flavor {star!r} (expected 't' or 'ct')")


@dataclass(frozen=True)
class ScalarProductSpace:
    """The matrix H, the star flavor and the sign eps1 defining the form.

    Parameters
    ----------
    H : array_like
        Unitary (orthogonal when real) n-by-n matrix with ``H* = eps1 H``.
    star : str
        ``"t"`` for the bilinear form (plain transpose) or ``"ct"`` for the
        sesquilinear form (conjugate transpose).
    field : str, optional
        ``"real"`` or ``"complex"``; inferred from H when omitted.  A real
        space restricts members to real matrices but still admits complex
        eigenvector data, on which the form acts sesquilinearly.
    structure_tol : float
        Validation threshold for unitarity and the eps1 symmetry of H.

    The sign eps1 is detected from H and both defining properties are
    checked at construction; an H that fails them (for instance one typed
    in at too few decimals for the requested tolerance) is rejected rather
    than re-orthogonalized.
    """

    H: np.ndarray
    star: str = "CT"
    field: str = dc_field(default="")
    epsilon1: int = 0
    structure_tol: float = DEFAULT_STRUCTURE_TOL

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        n = H.shape[0]
        if H.shape[0] != H.shape[1]:
            raise ArgumentError(f"H must be square, got shape {H.shape}")
        star = _normalize_star(self.star)
        field = self.field or ("real" if np.max(np.abs(H.imag)) == 0.0 else "complex")
        if field not in ("real", "complex"):
            raise ArgumentError(f"unknown field {self.field!r}")
        if field == "real":
            if np.max(np.abs(H.imag)) > self.structure_tol:
                raise StructureError(
                    "real_space_H", "real-field space requires a real H",
                    residual=float(np.max(np.abs(H.imag))))
            H = H.real.astype(complex)
            star = "T"

        Hs = H.T if star == "T" and field == "complex" else H.conj().T
        r_plus = np.linalg.norm(Hs - H)
        r_minus = np.linalg.norm(Hs + H)
        eps1 = 1 if r_plus <= r_minus else -1
        scale = max(1.0, float(np.linalg.norm(H)))
        sym_res = min(r_plus, r_minus)
        if sym_res > self.structure_tol * scale:
            raise StructureError(
                "H_star_symmetry",
                f"H fails H* = +/-H at tolerance {self.structure_tol:g} "
                f"(residual {sym_res:.3e})",
                residual=float(sym_res))
        # unitarity is always with respect to the conjugate transpose, even
        # when the form itself is bilinear
        unit_res = float(np.linalg.norm(H.conj().T @ H - np.eye(n)))
        if unit_res > self.structure_tol * max(1.0, scale**2):
            raise StructureError(
                "H_unitary",
                f"H fails unitarity at tolerance {self.structure_tol:g} "
                f"(residual {unit_res:.3e})",
                residual=unit_res)

        H = H.copy()
        H.setflags(write=False)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "star", star)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "epsilon1", eps1)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @property
    def bilinear(self) -> bool:
        """True when the form on the working field is the plain-transpose one.

        A real space reports True: transpose and conjugate transpose agree
        on real matrices.  Matrix-level star operations on complex data in a
        real space nevertheless conjugate, because complex eigenvector data
        of a real matrix lives in the complexification of the space, where
        the form extends sesquilinearly.
        """
        return self.star == "T"

    def star_mat(self, M) -> np.ndarray:
        """Apply the star of this space to matrix data."""
        M = np.asarray(M, dtype=complex)
        if self.star == "T" and self.field == "complex":
            return M.T.copy()
        return M.conj().T.copy()

    def star_scalar(self, lam) -> complex:
        if self.star == "T" and self.field == "complex":
            return complex(lam)
        return complex(np.conj(lam))

    def h_solve(self, B) -> np.ndarray:
        """Solve H X = B by a dense solve (robust to H given at low precision)."""
        return np.linalg.solve(self.H, np.asarray(B, dtype=complex))

    # -- common presets -------------------------------------------------

    @classmethod
    def identity(cls, n, *, star="CT", field="complex", structure_tol=DEFAULT_STRUCTURE_TOL):
        return cls(np.eye(n), star=star, field=field, structure_tol=structure_tol)

    @classmethod
    def flip(cls, n, *, star="CT", field="complex", structure_tol=DEFAULT_STRUCTURE_TOL):
        """H = [[0, I], [I, 0]] (n must be even)."""
        if n % 2:
            raise ArgumentError("flip space needs even dimension")
        m = n // 2
        H = np.zeros((n, n))
        H[:m, m:] = np.eye(m)
        H[m:, :m] = np.eye(m)
        return cls(H, star=star, field=field, structure_tol=structure_tol)

    @classmethod
    def skewj(cls, n, *, star="CT", field="complex", structure_tol=DEFAULT_STRUCTURE_TOL):
        """H = [[0, I], [-I, 0]] (n must be even)."""
        if n % 2:
            raise ArgumentError("skewj space needs even dimension")
        m = n // 2
        H = np.zeros((n, n))
        H[:m, m:] = np.eye(m)
        H[m:, :m] = -np.eye(m)
        return cls(H, star=star, field=field, structure_tol=structure_tol)

    @classmethod
    def signature(cls, signs, *, star="CT", field="complex", structure_tol=DEFAULT_STRUCTURE_TOL):
        """H = diag(signs) with signs in {+1, -1}."""
        signs = np.asarray(signs, dtype=float)
        if not np.all(np.isin(signs, (1.0, -1.0))):
            raise ArgumentError("signature entries must be +1 or -1")
        return cls(np.diag(signs), star=star, field=field, structure_tol=structure_tol)


def adjoint(A, space: ScalarProductSpace) -> np.ndarray:
    """Adjoint of A with respect to the scalar product: ``H^-1 A* H``."""
    A = as_matrix(A, "A")
    n = space.n
    if A.shape != (n, n):
        raise ArgumentError(f"A has shape {A.shape}, space has dimension {n}")
    return space.h_solve(space.star_mat(A) @ space.H)


def structure_residual(A, space: ScalarProductSpace, cls: StructureClass) -> float:
    """Frobenius distance of A from its defining symmetry, ``|adj(A) - eps2 A|``."""
    A = as_matrix(A, "A")
    cls = StructureClass.parse(cls)
    return float(np.linalg.norm(adjoint(A, space) - cls.epsilon2 * A))


def is_member(A, space: ScalarProductSpace, cls: StructureClass,
              tol: ToleranceProfile | float = None) -> bool:
    """True when A belongs to the Jordan/Lie algebra at the given tolerance."""
    if tol is None:
        tol = ToleranceProfile()
    structure_tol = tol.structure_tol if isinstance(tol, ToleranceProfile) else float(tol)
    A = as_matrix(A, "A")
    return structure_residual(A, space, cls) <= structure_tol * max(1.0, frob(A))


def pseudoinverse(X, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values below
    ``rank_tol * sigma_max`` treated as zero."""
    X = as_matrix(X, "X")
    return np.linalg.pinv(X, rcond=rank_tol)


def numerical_rank(X, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count of singular values above ``rank_tol * sigma_max``."""
    X = np.asarray(X, dtype=complex)
    if X.size == 0:
        return 0
    s = np.linalg.svd(X, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def z_symmetry_residual(Z, space: ScalarProductSpace, cls: StructureClass) -> float:
    """Distance of Z from the admissible parameter class ``Z* = eps1 eps2 Z``.

    This is the symmetry the free parameter of the structured linear-map
    solver must carry; it differs from membership in the algebra itself.
    """
    Z = as_matrix(Z, "Z")
    cls = StructureClass.parse(cls)
    s = space.epsilon1 * cls.epsilon2
    return float(np.linalg.norm(space.star_mat(Z) - s * Z))


def sample_structured(space: ScalarProductSpace, cls: StructureClass, seed,
                      scale: float = 1.0) -> np.ndarray:
    """Seeded random matrix with ``Z* = eps1 eps2 Z``, by symmetrization.

    Real spaces get real samples.  The output is the admissible free
    parameter for the structured solver family.
    """
    cls = StructureClass.parse(cls)
    rng = np.random.default_rng(seed)
    n = space.n
    M = rng.standard_normal((n, n))
    if space.field == "complex":
        M = M + 1j * rng.standard_normal((n, n))
    M = scale * M
    s = space.epsilon1 * cls.epsilon2
    return (M + s * space.star_mat(M)) / 2.0
