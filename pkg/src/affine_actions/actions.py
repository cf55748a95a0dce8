"""Affine isometric actions and the commutant-based irreducibility decision.

An affine action pairs a representation with a cocycle: g acts by
v -> pi(g)v + b(g). An affine map Av = Tv + t commutes with the whole action
iff, writing U = T - I,

    U pi(s) = pi(s) U   and   U b(s) = (pi(s) - I) t      for all generators s.

The action is irreducible exactly when every solution of this homogeneous
system has U = 0; in that case the solutions are precisely the translations
along the fixed space of the representation. When some solution has U != 0,
a proper invariant affine subspace is extracted from a spectral projector of
U*U, and that witness is re-verified before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_field_array,
    frobenius,
    hermitian_eigensystem,
    null_space_basis,
    numerical_rank,
    orthonormal_columns,
    random_vector,
    residual_ok,
    solve_affine_system,
    unvec,
    vec,
)
from .reps import Cocycle, Representation
from .words import Word


class ActionError(ValueError):
    """Mismatched or invalid affine-action inputs."""


class WitnessError(ValueError):
    """A supplied witness fails its defining equations."""


class InternalCheckError(RuntimeError):
    """A certified result failed its own re-verification."""


@dataclass(frozen=True)
class AffineMap:
    """An affine transformation v -> linear @ v + translation."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self) -> None:
        if self.linear.shape[0] != self.translation.shape[0]:
            raise ActionError("linear part and translation have mismatched dimensions")

    def __call__(self, point: np.ndarray) -> np.ndarray:
        return self.linear @ point + self.translation

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other."""
        return AffineMap(self.linear @ other.linear, self.linear @ other.translation + self.translation)

    @property
    def deviation(self) -> np.ndarray:
        """U = T - I, the homogeneous unknown of the commutant system."""
        return self.linear - np.eye(self.linear.shape[0])


def affine_map_distance(a: AffineMap, b: AffineMap) -> float:
    return max(frobenius(a.linear - b.linear), float(np.linalg.norm(a.translation - b.translation)))


@dataclass(frozen=True)
class AffineSubspace:
    """base + span(directions); directions form an orthonormal column set."""

    base: np.ndarray
    directions: np.ndarray

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.base.shape[0]

    def residual_of(self, point: np.ndarray) -> float:
        delta = point - self.base
        return float(np.linalg.norm(delta - self.directions @ (self.directions.conj().T @ delta)))

    def contains(self, point: np.ndarray, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        return residual_ok(self.residual_of(point), float(np.linalg.norm(point)), tol.eps_residual)


class AffineAction:
    """A representation together with a cocycle on the same presentation."""

    def __init__(self, rep: Representation, cocycle: Cocycle) -> None:
        if cocycle.representation is not rep:
            raise ActionError("cocycle was built for a different representation")
        self.rep = rep
        self.cocycle = cocycle

    @classmethod
    def from_values(cls, rep: Representation, values) -> "AffineAction":
        return cls(rep, Cocycle(rep, values))

    @property
    def presentation(self):
        return self.rep.presentation

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def field(self) -> str:
        return self.rep.field

    @property
    def tol(self) -> ToleranceProfile:
        return self.rep.tol

    def evaluate(self, word: Word) -> AffineMap:
        return AffineMap(self.rep.evaluate(word), self.cocycle.extend(word))

    def generator_maps(self) -> list[AffineMap]:
        return [AffineMap(m, v) for m, v in zip(self.rep.matrices, self.cocycle.values)]

    def __repr__(self) -> str:
        return f"AffineAction(dim={self.dim}, field={self.field!r}, generators={self.presentation.generators})"


@dataclass(frozen=True)
class CommutantPair:
    """A basis solution (U, t) of the affine commutant system."""

    deviation: np.ndarray
    translation: np.ndarray

    def as_affine_map(self) -> AffineMap:
        return AffineMap(self.deviation + np.eye(self.deviation.shape[0]), self.translation)

    @property
    def deviation_norm(self) -> float:
        return frobenius(self.deviation)


def _commutant_system(action: AffineAction) -> np.ndarray:
    """Rows of the homogeneous system in the unknown (vec U, t).

    Value rows are divided by 1 + ||b(s)|| so that huge or tiny cocycles do
    not skew the rank decision; row scaling leaves the null space intact.
    """
    d = action.dim
    eye = np.eye(d, dtype=action.rep.dtype)
    blocks = []
    for m, b in zip(action.rep.matrices, action.cocycle.values):
        commute = np.hstack([np.kron(eye, m.T) - np.kron(m, eye), np.zeros((d * d, d), dtype=m.dtype)])
        value = np.hstack([np.kron(eye, b[None, :]), -(m - eye)]) / (1.0 + np.linalg.norm(b))
        blocks.extend([commute, value])
    if not blocks:
        return np.zeros((0, d * d + d), dtype=action.rep.dtype)
    return np.vstack(blocks)


def _split_solution(column: np.ndarray, dim: int) -> CommutantPair:
    return CommutantPair(unvec(column[: dim * dim], dim, dim), column[dim * dim :])


def affine_commutant(action: AffineAction, tol: ToleranceProfile | None = None) -> list[CommutantPair]:
    """Orthonormal basis of the solution space {(U, t)} of the commutant system.

    The full affine commutant of the action is { v -> (I+U)v + t } over the
    span of the returned pairs.
    """
    tol = tol or action.tol
    basis = null_space_basis(_commutant_system(action), tol)
    return [_split_solution(basis[:, k], action.dim) for k in range(basis.shape[1])]


def commutant_residual(action: AffineAction, pair_or_map) -> float:
    """Worst residual of the commutant equations over all generators."""
    u, t = pair_or_map.deviation, pair_or_map.translation
    worst = 0.0
    eye = np.eye(action.dim)
    for m, b in zip(action.rep.matrices, action.cocycle.values):
        worst = max(worst, frobenius(u @ m - m @ u))
        worst = max(worst, float(np.linalg.norm(u @ b - (m - eye) @ t)))
    return worst


@dataclass(frozen=True)
class IrreducibilityVerdict:
    """Outcome of the commutant decision, with verified witness data.

    Reducible verdicts carry an affine commutant element with U != 0 and the
    invariant affine subspace extracted from it. Irreducible verdicts carry
    an orthonormal basis of the representation's fixed space: the commutant
    then consists exactly of the translations along it.
    """

    reducible: bool
    commutant: tuple[CommutantPair, ...]
    witness_map: AffineMap | None = None
    witness_subspace: AffineSubspace | None = None
    translation_directions: np.ndarray | None = None

    @property
    def irreducible(self) -> bool:
        return not self.reducible

    @property
    def tag(self) -> str:
        return "Reducible" if self.reducible else "Irreducible"


def fixed_points(action: AffineAction, tol: ToleranceProfile | None = None) -> AffineSubspace | None:
    """All points fixed by every generator, or None when there are none."""
    tol = tol or action.tol
    d = action.dim
    if action.presentation.num_generators == 0:
        return AffineSubspace(np.zeros(d, dtype=action.rep.dtype), np.eye(d, dtype=action.rep.dtype))
    matrix = np.vstack([m - np.eye(d) for m in action.rep.matrices])
    rhs = np.concatenate([-b for b in action.cocycle.values])
    solution = solve_affine_system(matrix, rhs, tol)
    if solution is None:
        return None
    return AffineSubspace(solution.particular, solution.homogeneous)


def check_invariance(action: AffineAction, subspace: AffineSubspace, tol: ToleranceProfile | None = None) -> float:
    """Worst defect of alpha(s)K inside K over all generators."""
    tol = tol or action.tol
    worst = 0.0
    d_mat = subspace.directions
    for m, b in zip(action.rep.matrices, action.cocycle.values):
        image = m @ subspace.base + b
        worst = max(worst, subspace.residual_of(image))
        if d_mat.shape[1]:
            moved = m @ d_mat
            worst = max(worst, frobenius(moved - d_mat @ (d_mat.conj().T @ moved)))
    return worst


def invariant_subspace_from_witness(
    action: AffineAction, witness: AffineMap, tol: ToleranceProfile | None = None
) -> AffineSubspace:
    """Proper invariant affine subspace extracted from a commutant element.

    With U = T - I nonzero, the top eigenspace of U*U carries a projector E
    commuting with the representation; the projected cocycle is forced to be
    the coboundary of v0 = (U*U|_ImE)^-1 E U* t, so {x : Ex = -v0} is
    invariant. The result is re-verified and never returned silently broken.
    """
    tol = tol or action.tol
    u = witness.deviation
    t = witness.translation
    if frobenius(u) <= tol.eps_residual:
        raise WitnessError("witness has linear part equal to the identity (U = 0)")
    residual = commutant_residual(action, witness)
    if not residual_ok(residual, frobenius(u) + float(np.linalg.norm(t)), tol.eps_residual):
        raise WitnessError(f"witness fails the commutant equations (residual {residual:.3e})")

    gram = u.conj().T @ u
    top_value, top_basis = hermitian_eigensystem(gram, tol)[-1]
    if top_value <= tol.eps_eig:
        raise InternalCheckError("top eigenvalue of U*U is numerically indistinguishable from zero")
    return _subspace_from_projector(action, top_basis, u, t, tol)


def _subspace_from_projector(
    action: AffineAction,
    basis: np.ndarray,
    u: np.ndarray,
    t: np.ndarray,
    tol: ToleranceProfile,
) -> AffineSubspace:
    """K = {x : Ex = -v0} for E the projector onto span(basis)."""
    compressed = basis.conj().T @ (u.conj().T @ u) @ basis
    v0 = basis @ np.linalg.solve(compressed, basis.conj().T @ (u.conj().T @ t))
    directions = null_space_basis(basis.conj().T, tol)
    subspace = AffineSubspace(-v0, directions)
    if subspace.dim >= action.dim:
        raise InternalCheckError("extracted subspace is not proper")
    defect = check_invariance(action, subspace, tol)
    if not residual_ok(defect, 1.0 + float(np.linalg.norm(v0)), tol.eps_residual):
        raise InternalCheckError(f"extracted subspace is not invariant (defect {defect:.3e})")
    return subspace


def _normalized_witness(pair: CommutantPair) -> AffineMap:
    """The commutant element rescaled so its deviation has unit norm.

    The system is homogeneous, so scaling preserves membership; without it a
    large cocycle makes every unit basis vector carry an almost-invisible U
    and the spectral extraction would sit at the noise floor.
    """
    scale = pair.deviation_norm
    return AffineMap(np.eye(pair.deviation.shape[0]) + pair.deviation / scale, pair.translation / scale)


def decide_irreducibility(action: AffineAction, tol: ToleranceProfile | None = None) -> IrreducibilityVerdict:
    """Decide irreducibility via the affine commutant.

    Irreducible iff every solution pair has U = 0. Since pure-translation
    solutions (U = 0) force their vector into the fixed space, that is
    equivalent to the scale-free test used here: the solution space is no
    larger than the fixed space. The generator equations suffice because
    commuting with each generator map forces commuting with every word
    (tested as a property, not assumed). Reducible verdicts attach the
    max-norm witness and its extracted invariant subspace; irreducible
    verdicts are checked against the fixed space (the commutant must be
    exactly the translations along it).
    """
    tol = tol or action.tol
    pairs = affine_commutant(action, tol)

    from .reps import fixed_subspace

    fixed = fixed_subspace(action.rep, tol)
    if len(pairs) > fixed.shape[1]:
        best = max(pairs, key=lambda p: p.deviation_norm)
        witness = _normalized_witness(best)
        subspace = invariant_subspace_from_witness(action, witness, tol)
        return IrreducibilityVerdict(True, tuple(pairs), witness, subspace)

    if len(pairs) != fixed.shape[1]:
        raise InternalCheckError(
            f"commutant dimension {len(pairs)} < fixed-space dimension {fixed.shape[1]}"
        )
    for pair in pairs:
        off = pair.translation - fixed @ (fixed.conj().T @ pair.translation)
        if not residual_ok(float(np.linalg.norm(off)), 1.0, tol.eps_residual):
            raise InternalCheckError("commutant translation leaves the fixed space")
    return IrreducibilityVerdict(False, tuple(pairs), translation_directions=fixed)


def project_action(action: AffineAction, basis: np.ndarray, tol: ToleranceProfile | None = None) -> AffineAction:
    """Compress the action onto an invariant subspace, in the supplied basis.

    ``basis`` must have orthonormal columns spanning a subspace invariant
    under the representation; the projected cocycle is the orthogonal
    projection of the original one.
    """
    tol = tol or action.tol
    basis = np.asarray(basis)
    if basis.ndim != 2 or basis.shape[0] != action.dim or basis.shape[1] == 0:
        raise ActionError(f"basis must be (dim x k) with k >= 1, got {basis.shape}")
    k = basis.shape[1]
    if not residual_ok(frobenius(basis.conj().T @ basis - np.eye(k)), 1.0, tol.eps_residual):
        raise ActionError("basis columns are not orthonormal")
    for name, m in zip(action.presentation.generators, action.rep.matrices):
        moved = m @ basis
        defect = frobenius(moved - basis @ (basis.conj().T @ moved))
        if not residual_ok(defect, 1.0, tol.eps_residual):
            raise ActionError(f"subspace is not invariant under generator {name!r} (defect {defect:.3e})")
    rep = Representation(
        action.presentation,
        action.field,
        tuple(basis.conj().T @ m @ basis for m in action.rep.matrices),
        dim=k,
        tol=tol,
    )
    return AffineAction.from_values(rep, tuple(basis.conj().T @ b for b in action.cocycle.values))


def direct_sum(a1: AffineAction, a2: AffineAction) -> AffineAction:
    """Block-diagonal representation with concatenated cocycle values."""
    if a1.presentation != a2.presentation:
        raise ActionError("direct sum requires identical presentations")
    if a1.field != a2.field:
        raise ActionError("direct sum requires a common scalar field")
    d1, d2 = a1.dim, a2.dim
    matrices = []
    for m1, m2 in zip(a1.rep.matrices, a2.rep.matrices):
        block = np.zeros((d1 + d2, d1 + d2), dtype=m1.dtype)
        block[:d1, :d1] = m1
        block[d1:, d1:] = m2
        matrices.append(block)
    rep = Representation(a1.presentation, a1.field, matrices, dim=d1 + d2, tol=a1.tol)
    values = tuple(np.concatenate([v1, v2]) for v1, v2 in zip(a1.cocycle.values, a2.cocycle.values))
    return AffineAction.from_values(rep, values)


def conjugate_by_translation(action: AffineAction, vector) -> AffineAction:
    """Replace the cocycle b by b + (pi(.)v - v); the verdict is unchanged."""
    vector = as_field_array(vector, action.field)
    values = tuple(b + m @ vector - vector for m, b in zip(action.rep.matrices, action.cocycle.values))
    return AffineAction.from_values(action.rep, values)


@dataclass(frozen=True)
class EquivalenceResult:
    """Search outcome for an invertible affine intertwiner."""

    equivalent: bool
    intertwiner: AffineMap | None
    probabilistic: bool

    def __bool__(self) -> bool:
        return self.equivalent


def intertwining_residual(a1: AffineAction, a2: AffineAction, mapping: AffineMap) -> float:
    """Worst defect of mapping à alpha1(s) = alpha2(s) à mapping over generators."""
    worst = 0.0
    for g1, g2 in zip(a1.generator_maps(), a2.generator_maps()):
        worst = max(worst, affine_map_distance(mapping.compose(g1), g2.compose(mapping)))
    return worst


def check_equivalence(
    a1: AffineAction,
    a2: AffineAction,
    trials: int = 20,
    seed: int | None = 0,
    tol: ToleranceProfile | None = None,
) -> EquivalenceResult:
    """Search the intertwiner system for an invertible solution.

    Solves {T pi1(s) = pi2(s) T, T b1(s) - (pi2(s)-I)t = b2(s)} exactly,
    then samples the affine solution set for an invertible T. An unsolvable
    system is a definite NotFound; exhausted sampling is probabilistic.
    """
    if a1.presentation != a2.presentation:
        raise ActionError("equivalence requires identical presentations")
    if a1.field != a2.field:
        raise ActionError("equivalence requires a common scalar field")
    tol = tol or a1.tol
    d1, d2 = a1.dim, a2.dim
    eye1, eye2 = np.eye(d1, dtype=a1.rep.dtype), np.eye(d2, dtype=a2.rep.dtype)
    rows, rhs = [], []
    for (m1, b1), (m2, b2) in zip(
        zip(a1.rep.matrices, a1.cocycle.values), zip(a2.rep.matrices, a2.cocycle.values)
    ):
        rows.append(np.hstack([np.kron(eye2, m1.T) - np.kron(m2, eye1), np.zeros((d2 * d1, d2), dtype=m1.dtype)]))
        rhs.append(np.zeros(d2 * d1, dtype=m1.dtype))
        # equilibrate the value rows so cocycle magnitude cannot skew ranks
        weight = 1.0 / (1.0 + max(np.linalg.norm(b1), np.linalg.norm(b2)))
        rows.append(weight * np.hstack([np.kron(eye2, b1[None, :]), -(m2 - eye2)]))
        rhs.append(weight * b2)
    if not rows:
        rows.append(np.zeros((0, d2 * d1 + d2), dtype=a1.rep.dtype))
        rhs.append(np.zeros(0, dtype=a1.rep.dtype))
    solution = solve_affine_system(np.vstack(rows), np.concatenate(rhs), tol)
    if solution is None:
        return EquivalenceResult(False, None, probabilistic=False)
    if d1 != d2:
        return EquivalenceResult(False, None, probabilistic=False)

    rng = np.random.default_rng(seed)
    candidates = [solution.particular]
    for _ in range(trials):
        coeffs = random_vector(solution.dim, a1.field, rng)
        candidates.append(solution.particular + solution.homogeneous @ coeffs)
    for column in candidates:
        t_mat = unvec(column[: d2 * d1], d2, d1)
        singular = np.linalg.svd(t_mat, compute_uv=False)
        if numerical_rank(singular, tol) < d1:
            continue
        mapping = AffineMap(t_mat, column[d2 * d1 :])
        scale = max(frobenius(t_mat), float(np.linalg.norm(mapping.translation)), 1.0)
        if residual_ok(intertwining_residual(a1, a2, mapping), scale, tol.eps_residual):
            return EquivalenceResult(True, mapping, probabilistic=False)
    return EquivalenceResult(False, None, probabilistic=True)


@dataclass(frozen=True)
class EquivalentProjections:
    """Equivalent projected actions witnessing reducibility of a direct sum.

    ``intertwiner`` maps the first projected action to the second, in the
    coordinates of ``v1_basis`` and ``v2_basis``.
    """

    v1_basis: np.ndarray
    v2_basis: np.ndarray
    intertwiner: AffineMap

    def ambient_map(self) -> AffineMap:
        """The intertwiner as a map between the ambient subspaces."""
        linear = self.v2_basis @ self.intertwiner.linear @ self.v1_basis.conj().T
        return AffineMap(linear, self.v2_basis @ self.intertwiner.translation)


@dataclass(frozen=True)
class DirectSumAnalysis:
    sum_action: AffineAction
    verdict: IrreducibilityVerdict
    projections: EquivalentProjections | None

    @property
    def irreducible(self) -> bool:
        return self.verdict.irreducible


def _extraction_candidates(
    action: AffineAction, pairs: list[CommutantPair], d1: int, seed: int | None
) -> list[CommutantPair]:
    """Commutant elements to try for the transverse-subspace extraction."""
    d = action.dim
    if not pairs:
        return []
    columns = np.column_stack([np.concatenate([vec(p.deviation), p.translation]) for p in pairs])
    candidates: list[CommutantPair] = []
    if 2 * d1 == d:
        # the coordinate-swap element certifies the diagonal whenever the two
        # summands literally coincide; its projection onto the solution space
        # is always a valid commutant element
        eye = np.eye(d1)
        swap_dev = np.block([[-eye, eye], [eye, -eye]]).astype(action.rep.dtype)
        target = np.concatenate([vec(swap_dev), np.zeros(d, dtype=action.rep.dtype)])
        candidates.append(_split_solution(columns @ (columns.conj().T @ target), d))
    candidates.extend(sorted(pairs, key=lambda p: -p.deviation_norm))
    rng = np.random.default_rng(seed)
    for _ in range(10):
        coeffs = random_vector(len(pairs), action.field, rng)
        candidates.append(_split_solution(columns @ coeffs, d))
    return candidates


def analyze_direct_sum(
    a1: AffineAction,
    a2: AffineAction,
    tol: ToleranceProfile | None = None,
    seed: int | None = 0,
) -> DirectSumAnalysis:
    """Decide a1 (+) a2 and, when reducible, exhibit equivalent projections.

    A reducible sum of irreducible actions always admits a linear invariant
    subspace K, transverse to both summands, on which the cocycle is a
    coboundary; the graph map of K intertwines the projected actions. K is
    found among eigenspaces of U*U over commutant elements; every returned
    intertwiner is verified against the projected generator maps.
    """
    sum_action = direct_sum(a1, a2)
    tol = tol or sum_action.tol
    verdict = decide_irreducibility(sum_action, tol)
    if verdict.irreducible:
        return DirectSumAnalysis(sum_action, verdict, None)

    d1 = a1.dim
    pairs = list(verdict.commutant)
    for raw in _extraction_candidates(sum_action, pairs, d1, seed):
        if raw.deviation_norm <= 1e-12:
            continue
        pair = CommutantPair(
            raw.deviation / raw.deviation_norm, raw.translation / raw.deviation_norm
        )
        gram = pair.deviation.conj().T @ pair.deviation
        clusters = hermitian_eigensystem(gram, tol)
        for value, basis in reversed(clusters):
            if value <= tol.eps_eig:
                continue
            projections = _try_graph_extraction(a1, a2, sum_action, pair, basis, tol)
            if projections is not None:
                return DirectSumAnalysis(sum_action, verdict, projections)
    raise InternalCheckError(
        "reducible direct sum, but no commutant element produced a verified "
        "pair of equivalent projections"
    )


def _try_graph_extraction(
    a1: AffineAction,
    a2: AffineAction,
    sum_action: AffineAction,
    pair: CommutantPair,
    basis: np.ndarray,
    tol: ToleranceProfile,
) -> EquivalentProjections | None:
    """Attempt the graph-map construction on one U*U eigenspace."""
    d1 = a1.dim
    u, t = pair.deviation, pair.translation
    k = basis.shape[1]
    compressed = basis.conj().T @ (u.conj().T @ u) @ basis
    v0 = basis @ np.linalg.solve(compressed, basis.conj().T @ (u.conj().T @ t))

    q1, q2 = basis[:d1], basis[d1:]
    if min(q1.shape) == 0 or min(q2.shape) == 0:
        return None
    s1 = np.linalg.svd(q1, compute_uv=False)
    s2 = np.linalg.svd(q2, compute_uv=False)
    # transversality: both coordinate projections injective on the eigenspace;
    # absolute floor as well, since a nearly-contained eigenspace has
    # uniformly tiny singular values that a relative cut would keep
    if min(s1.min(), s2.min()) <= tol.eps_rank:
        return None
    if numerical_rank(s1, tol) < k or numerical_rank(s2, tol) < k:
        return None
    w1 = orthonormal_columns(q1, tol)
    w2 = orthonormal_columns(q2, tol)

    m1 = w1.conj().T @ q1
    m2 = w2.conj().T @ q2
    graph = m2 @ np.linalg.inv(m1)
    linear = np.linalg.inv(-graph.conj().T)

    shift = -v0
    c1 = w1.conj().T @ shift[:d1]
    c2 = w2.conj().T @ shift[d1:]
    mapping = AffineMap(linear, c2 - linear @ c1)

    try:
        p1 = project_action(a1, w1, tol)
        p2 = project_action(a2, w2, tol)
    except ValueError:  # non-invariant basis or near-tolerance rep validation
        return None
    scale = max(frobenius(mapping.linear), float(np.linalg.norm(mapping.translation)), 1.0)
    if residual_ok(intertwining_residual(p1, p2, mapping), scale, tol.eps_residual):
        return EquivalentProjections(w1, w2, mapping)
    return None
