"""Isometric representations, their commutants, and first cohomology.

A representation assigns an isometric matrix to each generator of a
presentation; relators must evaluate to the identity within tolerance. A
cocycle assigns a vector to each generator subject to the relator
constraints induced by the twisted chain rule

    b(uv) = b(u) + pi(u) b(v),      b(s^-1) = -pi(s)^-1 b(s).

Cocycle-value tuples live in the coordinate space C^(g*d) (generator values
concatenated); the cocycle space is the null space of the stacked relator
expansion, coboundaries are the image of v -> (pi(s)v - v)_s, and class
representatives are chosen orthogonal to the coboundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    REAL,
    ToleranceProfile,
    as_field_array,
    frobenius,
    null_space_basis,
    numerical_rank,
    orthonormal_columns,
    random_vector,
    residual_ok,
    unvec,
)
from .words import GroupPresentation, Word


class RepresentationError(ValueError):
    """Generator matrices fail isometry or relator identities."""


class CocycleError(ValueError):
    """Generator vectors violate the relator constraints."""


class Representation:
    """Per-generator isometric matrices over a declared scalar field."""

    def __init__(
        self,
        presentation: GroupPresentation,
        field: str,
        matrices,
        dim: int | None = None,
        tol: ToleranceProfile = DEFAULT_TOL,
        validate: bool = True,
    ) -> None:
        matrices = tuple(as_field_array(m, field) for m in matrices)
        if len(matrices) != presentation.num_generators:
            raise RepresentationError(
                f"expected {presentation.num_generators} matrices, got {len(matrices)}"
            )
        if matrices:
            dim = matrices[0].shape[0]
        elif dim is None:
            raise RepresentationError("dimension is required for a generator-free presentation")
        if dim < 1:
            raise RepresentationError("dimension must be >= 1")
        eye = np.eye(dim)
        for name, m in zip(presentation.generators, matrices):
            if m.shape != (dim, dim):
                raise RepresentationError(f"matrix for {name!r} has shape {m.shape}, expected {(dim, dim)}")
            defect = frobenius(m.conj().T @ m - eye)
            if validate and not residual_ok(defect, 1.0, tol.eps_residual):
                raise RepresentationError(f"matrix for {name!r} is not an isometry (defect {defect:.3e})")
        self.presentation = presentation
        self.field = field
        self.matrices = matrices
        self.dim = dim
        self.tol = tol
        if validate:
            for i, relator in enumerate(presentation.relators):
                defect = frobenius(self.evaluate(relator) - eye)
                if not residual_ok(defect, np.sqrt(dim), tol.eps_residual):
                    raise RepresentationError(
                        f"relator {i} does not evaluate to the identity (defect {defect:.3e})"
                    )

    def isometry_defects(self) -> list[float]:
        eye = np.eye(self.dim)
        return [frobenius(m.conj().T @ m - eye) for m in self.matrices]

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float64 if self.field == REAL else np.complex128)

    def evaluate(self, word: Word) -> np.ndarray:
        """Matrix of a word; inverse letters use the adjoint (isometry)."""
        self.presentation.check_word(word)
        result = np.eye(self.dim, dtype=self.dtype)
        for gen, sign in word.letters:
            m = self.matrices[gen]
            result = result @ (m if sign > 0 else m.conj().T)
        return result

    def relator_residual(self, word: Word) -> float:
        return frobenius(self.evaluate(word) - np.eye(self.dim))

    def __repr__(self) -> str:
        return (
            f"Representation(generators={self.presentation.generators}, "
            f"field={self.field!r}, dim={self.dim})"
        )


class Cocycle:
    """One vector per generator, extended to all words by the chain rule."""

    def __init__(
        self,
        representation: Representation,
        values,
        tol: ToleranceProfile | None = None,
        validate: bool = True,
    ) -> None:
        tol = tol or representation.tol
        values = tuple(as_field_array(v, representation.field) for v in values)
        if len(values) != representation.presentation.num_generators:
            raise CocycleError(
                f"expected {representation.presentation.num_generators} vectors, got {len(values)}"
            )
        for v in values:
            if v.shape != (representation.dim,):
                raise CocycleError(f"value has shape {v.shape}, expected ({representation.dim},)")
        self.representation = representation
        self.values = values
        if validate:
            scale = max((float(np.linalg.norm(v)) for v in values), default=0.0)
            for i, relator in enumerate(representation.presentation.relators):
                defect = float(np.linalg.norm(self.extend(relator)))
                if not residual_ok(defect, scale, tol.eps_residual):
                    raise CocycleError(f"relator {i} has cocycle residual {defect:.3e}")

    def relator_residuals(self) -> list[float]:
        return [
            float(np.linalg.norm(self.extend(r)))
            for r in self.representation.presentation.relators
        ]

    def extend(self, word: Word) -> np.ndarray:
        """Value on an arbitrary word via b(uv) = b(u) + pi(u) b(v)."""
        rep = self.representation
        rep.presentation.check_word(word)
        value = np.zeros(rep.dim, dtype=rep.dtype)
        prefix = np.eye(rep.dim, dtype=rep.dtype)
        for gen, sign in word.letters:
            m = rep.matrices[gen]
            if sign > 0:
                value = value + prefix @ self.values[gen]
                prefix = prefix @ m
            else:
                minv = m.conj().T
                value = value - prefix @ (minv @ self.values[gen])
                prefix = prefix @ minv
        return value

    def coordinates(self) -> np.ndarray:
        """Concatenated generator values."""
        if not self.values:
            return np.zeros(0, dtype=self.representation.dtype)
        return np.concatenate(self.values)

    def __repr__(self) -> str:
        return f"Cocycle(dim={self.representation.dim}, generators={len(self.values)})"


def cocycle_from_coordinates(rep: Representation, coords: np.ndarray) -> Cocycle:
    d, g = rep.dim, rep.presentation.num_generators
    coords = np.asarray(coords).reshape(g * d)
    return Cocycle(rep, tuple(coords[i * d : (i + 1) * d] for i in range(g)))


def coboundary(rep: Representation, vector) -> Cocycle:
    """The cocycle v -> (pi(s) v - v)_s of the action conjugated to fix v."""
    vector = as_field_array(vector, rep.field)
    return Cocycle(rep, tuple(m @ vector - vector for m in rep.matrices))


def fixed_subspace(rep: Representation, tol: ToleranceProfile | None = None) -> np.ndarray:
    """Orthonormal basis of the joint fixed space of all generator matrices."""
    tol = tol or rep.tol
    if rep.presentation.num_generators == 0:
        return np.eye(rep.dim, dtype=rep.dtype)
    stacked = np.vstack([m - np.eye(rep.dim) for m in rep.matrices])
    return null_space_basis(stacked, tol)


def commutant_basis(rep: Representation, tol: ToleranceProfile | None = None) -> list[np.ndarray]:
    """Basis over the declared field of {T : T pi(s) = pi(s) T for all s}.

    Real representations get the real commutant; complex ones the complex
    commutant. The identity always lies in the returned span.
    """
    tol = tol or rep.tol
    d = rep.dim
    eye = np.eye(d, dtype=rep.dtype)
    if rep.presentation.num_generators == 0:
        basis = np.eye(d * d, dtype=rep.dtype)
        return [unvec(basis[:, k], d, d) for k in range(d * d)]
    # row-major vec: vec(T M) = (I (x) M^T) vec(T), vec(M T) = (M (x) I) vec(T)
    blocks = [np.kron(eye, m.T) - np.kron(m, eye) for m in rep.matrices]
    basis = null_space_basis(np.vstack(blocks), tol)
    return [unvec(basis[:, k], d, d) for k in range(basis.shape[1])]


def _relator_coefficient_matrix(rep: Representation) -> np.ndarray:
    """Stacked linear map sending generator-value tuples to relator values."""
    d, g = rep.dim, rep.presentation.num_generators
    rows = []
    for relator in rep.presentation.relators:
        coeffs = [np.zeros((d, d), dtype=rep.dtype) for _ in range(g)]
        prefix = np.eye(d, dtype=rep.dtype)
        for gen, sign in relator.letters:
            m = rep.matrices[gen]
            if sign > 0:
                coeffs[gen] = coeffs[gen] + prefix
                prefix = prefix @ m
            else:
                minv = m.conj().T
                coeffs[gen] = coeffs[gen] - prefix @ minv
                prefix = prefix @ minv
        rows.append(np.hstack(coeffs) if g else np.zeros((d, 0), dtype=rep.dtype))
    if not rows:
        return np.zeros((0, g * d), dtype=rep.dtype)
    return np.vstack(rows)


@dataclass(frozen=True)
class CohomologyBasis:
    """Bases for cocycles, coboundaries, and class representatives.

    ``class_representatives`` are cocycles whose coordinate vectors are
    orthonormal and orthogonal to the coboundary span, so class coordinates
    of any cocycle z are simply <h_i, z>.
    """

    cocycle_basis: tuple[Cocycle, ...]
    coboundary_basis: tuple[Cocycle, ...]
    class_representatives: tuple[Cocycle, ...]

    @property
    def dims(self) -> tuple[int, int, int]:
        return (
            len(self.cocycle_basis),
            len(self.coboundary_basis),
            len(self.class_representatives),
        )

    def class_coordinates(self, cocycle: Cocycle) -> np.ndarray:
        coords = cocycle.coordinates()
        return np.array([h.coordinates().conj() @ coords for h in self.class_representatives])

    def cocycle_from_class(self, coefficients: np.ndarray) -> Cocycle:
        reps = self.class_representatives
        if len(reps) == 0:
            raise ValueError("cohomology is trivial; no class representatives")
        rep = reps[0].representation
        coords = sum(c * h.coordinates() for c, h in zip(coefficients, reps))
        return cocycle_from_coordinates(rep, coords)


def first_cohomology(rep: Representation, tol: ToleranceProfile | None = None) -> CohomologyBasis:
    """Cocycle space, coboundary space, and orthogonal class representatives."""
    tol = tol or rep.tol
    d, g = rep.dim, rep.presentation.num_generators
    z_basis = null_space_basis(_relator_coefficient_matrix(rep), tol)  # (g*d, nz)

    if g:
        boundary_map = np.vstack([m - np.eye(d) for m in rep.matrices])  # (g*d, d)
    else:
        boundary_map = np.zeros((0, d), dtype=rep.dtype)
    b_basis = orthonormal_columns(boundary_map, tol)

    # class representatives: orthogonal complement of the coboundaries inside
    # the cocycle space; computed as the null space of the pairing B*Z whose
    # singular values are exactly 1 per coboundary direction, so the rank
    # cut never mistakes roundoff for a cohomology class
    if z_basis.shape[1] and b_basis.shape[1]:
        combos = null_space_basis(b_basis.conj().T @ z_basis, tol)
        h_basis = z_basis @ combos
    else:
        h_basis = z_basis

    return CohomologyBasis(
        tuple(cocycle_from_coordinates(rep, z_basis[:, k]) for k in range(z_basis.shape[1])),
        tuple(cocycle_from_coordinates(rep, b_basis[:, k]) for k in range(b_basis.shape[1])),
        tuple(cocycle_from_coordinates(rep, h_basis[:, k]) for k in range(h_basis.shape[1])),
    )


def commutant_action_on_classes(
    rep: Representation,
    basis: CohomologyBasis,
    commutant: list[np.ndarray] | None = None,
    tol: ToleranceProfile | None = None,
) -> list[np.ndarray]:
    """Matrices of the commutant acting on cohomology-class coordinates.

    An operator T commuting with the representation maps cocycles to
    cocycles by acting on values; the induced map on classes is expressed in
    the representative coordinates (coboundary components project away).
    """
    tol = tol or rep.tol
    if commutant is None:
        commutant = commutant_basis(rep, tol)
    h = len(basis.class_representatives)
    out = []
    for t_mat in commutant:
        action = np.zeros((h, h), dtype=rep.dtype)
        for j, h_j in enumerate(basis.class_representatives):
            moved = Cocycle(rep, tuple(t_mat @ v for v in h_j.values))
            action[:, j] = basis.class_coordinates(moved)
        out.append(action)
    return out


@dataclass(frozen=True)
class CocycleSearchResult:
    """Outcome of the randomized search for a separating cohomology class."""

    found: bool
    witness: "Cocycle | None"
    trials_used: int
    probabilistic: bool = True

    def __bool__(self) -> bool:
        return self.found


def search_irreducible_cocycle(
    rep: Representation,
    trials: int = 20,
    seed: int | None = 0,
    tol: ToleranceProfile | None = None,
) -> CocycleSearchResult:
    """Look for a cocycle whose class has trivial commutant annihilator.

    A sampled class xi is a candidate when the map S -> S.xi on the
    commutant has full rank; candidates are confirmed by running the affine
    irreducibility decision on the assembled action. A negative answer after
    all trials is probabilistic (the separating set is either empty or
    generic, so one generic sample decides with probability 1).
    """
    from .actions import AffineAction, decide_irreducibility

    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = tol or rep.tol
    basis = first_cohomology(rep, tol)
    h = len(basis.class_representatives)
    if h == 0:
        return CocycleSearchResult(False, None, 0)
    commutant = commutant_basis(rep, tol)
    action_mats = commutant_action_on_classes(rep, basis, commutant, tol)
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        xi = random_vector(h, rep.field, rng)
        annihilator_map = np.column_stack([m @ xi for m in action_mats])
        s = np.linalg.svd(annihilator_map, compute_uv=False)
        if numerical_rank(s, tol) < len(commutant):
            continue
        witness = basis.cocycle_from_class(xi)
        verdict = decide_irreducibility(AffineAction(rep, witness), tol)
        if not verdict.reducible:
            return CocycleSearchResult(True, witness, trial + 1)
    return CocycleSearchResult(False, None, trials)
