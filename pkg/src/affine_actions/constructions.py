"""Structural constructions: restriction, induction, and class-specific tests.

Restriction evaluates an action on subgroup generator words over a free
presentation (the Schur decision needs no relators). Induction along a
coset table builds the block-permutation action on n*d coordinates from the
fundamental-domain formula; the ambient relator residuals of the result are
what validates the table's Schreier words. The remaining operations are
property checks tied to specific group classes (center, free abelian,
Heisenberg-like) plus a Monte-Carlo convex-hull probe of orbits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .actions import AffineAction, decide_irreducibility
from .linalg import (
    REAL,
    ToleranceProfile,
    as_field_array,
    frobenius,
    numerical_rank,
    residual_ok,
)
from .reps import Representation
from .words import CosetTable, GroupPresentation, Word, free_presentation, validate_coset_table


class ConstructionError(ValueError):
    """Invalid inputs to a structural construction."""


@dataclass(frozen=True)
class SubgroupSpec:
    """A subgroup given by generator words in an ambient presentation."""

    ambient: GroupPresentation
    generator_words: tuple[Word, ...]
    presentation: GroupPresentation | None = None

    def __init__(
        self,
        ambient: GroupPresentation,
        generator_words,
        presentation: GroupPresentation | None = None,
    ) -> None:
        words = tuple(
            w if isinstance(w, Word) else ambient.parse_word(w) for w in generator_words
        )
        for w in words:
            ambient.check_word(w)
        if presentation is not None and presentation.num_generators != len(words):
            raise ConstructionError(
                "subgroup presentation generator count does not match the word list"
            )
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "generator_words", words)
        object.__setattr__(self, "presentation", presentation)


@dataclass(frozen=True)
class InducedSetup:
    """Ambient and subgroup presentations plus the coset table linking them."""

    ambient: GroupPresentation
    subgroup: GroupPresentation
    table: CosetTable


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class PropertyReport:
    name: str
    checks: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[PropertyCheck]:
        return [c for c in self.checks if not c.passed]


def restrict_action(action: AffineAction, sub: SubgroupSpec) -> AffineAction:
    """Action of the subgroup, over the free presentation on its generators."""
    if sub.ambient != action.presentation:
        raise ConstructionError("subgroup spec targets a different presentation")
    if sub.presentation is not None:
        names = sub.presentation.generators
    else:
        names = tuple(f"h{i}" for i in range(len(sub.generator_words)))
    free = free_presentation(names)
    matrices = tuple(action.rep.evaluate(w) for w in sub.generator_words)
    rep = Representation(free, action.field, matrices, dim=action.dim, tol=action.tol)
    values = tuple(action.cocycle.extend(w) for w in sub.generator_words)
    return AffineAction.from_values(rep, values)


def induce_action(action: AffineAction, setup: InducedSetup, tol: ToleranceProfile | None = None) -> AffineAction:
    """Induce a subgroup action to the ambient group along a coset table.

    Generator s sends the block at coset y to coset sigma_s(y), twisted by
    the subgroup element u_{s,y} = t_{sigma_s(y)}^-1 s t_y evaluated in the
    subgroup action; the induced cocycle places b(u_{s,y}) in the target
    block. Ambient relator residuals of the result validate the Schreier
    words: bad table data fails representation or cocycle construction.
    """
    tol = tol or action.tol
    if action.presentation != setup.subgroup:
        raise ConstructionError("action is not over the setup's subgroup presentation")
    report = validate_coset_table(setup.ambient, setup.table)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise ConstructionError(f"coset table fails combinatorial validation: {names}")
    n = setup.table.num_cosets
    d = action.dim
    dtype = action.rep.dtype
    matrices = []
    values = []
    for perm, schreier_row in zip(setup.table.action, setup.table.schreier):
        big = np.zeros((n * d, n * d), dtype=dtype)
        vec_parts = np.zeros(n * d, dtype=dtype)
        for y in range(n):
            x = perm[y]
            setup.subgroup.check_word(schreier_row[y])
            big[x * d : (x + 1) * d, y * d : (y + 1) * d] = action.rep.evaluate(schreier_row[y])
            vec_parts[x * d : (x + 1) * d] = action.cocycle.extend(schreier_row[y])
        matrices.append(big)
        values.append(vec_parts)
    rep = Representation(setup.ambient, action.field, matrices, dim=n * d, tol=tol)
    return AffineAction.from_values(rep, values)


def check_restriction_theorem(
    action: AffineAction,
    sub: SubgroupSpec,
    index_certificate: CosetTable,
    tol: ToleranceProfile | None = None,
) -> PropertyReport:
    """Irreducibility must survive restriction to a finite-index subgroup.

    The coset table only serves as a finite-index certificate here; its
    combinatorial invariants are checked, the Schreier words are not used.
    """
    tol = tol or action.tol
    checks = []
    table_report = validate_coset_table(sub.ambient, index_certificate)
    checks.append(
        PropertyCheck(
            "index-certificate",
            table_report.passed,
            "" if table_report.passed else ", ".join(c.name for c in table_report.failures()),
        )
    )
    ambient_verdict = decide_irreducibility(action, tol)
    checks.append(
        PropertyCheck(
            "ambient-irreducible",
            ambient_verdict.irreducible,
            "" if ambient_verdict.irreducible else "restriction theorem needs an irreducible input",
        )
    )
    if ambient_verdict.irreducible:
        restricted = restrict_action(action, sub)
        verdict = decide_irreducibility(restricted, tol)
        detail = ""
        if verdict.reducible:
            detail = (
                "restricted action reducible; witness deviation norm "
                f"{max(p.deviation_norm for p in verdict.commutant):.3e}"
            )
        checks.append(PropertyCheck("restriction-irreducible", verdict.irreducible, detail))
    return PropertyReport("finite-index-restriction", tuple(checks))


def check_center_translations(
    action: AffineAction, central_words, tol: ToleranceProfile | None = None
) -> PropertyReport:
    """Central elements of an irreducible action translate along the fixed space.

    Each word must first commute with every generator at the representation
    level; failing that is a precondition error for that word.
    """
    from .reps import fixed_subspace

    tol = tol or action.tol
    presentation = action.presentation
    words = [w if isinstance(w, Word) else presentation.parse_word(w) for w in central_words]
    checks = []
    verdict = decide_irreducibility(action, tol)
    checks.append(
        PropertyCheck(
            "action-irreducible",
            verdict.irreducible,
            "" if verdict.irreducible else "center check applies to irreducible actions",
        )
    )
    fixed = fixed_subspace(action.rep, tol)
    for i, word in enumerate(words):
        label = presentation.format_word(word)
        matrix = action.rep.evaluate(word)
        central_defect = max(
            (frobenius(matrix @ m - m @ matrix) for m in action.rep.matrices), default=0.0
        )
        if not residual_ok(central_defect, 1.0, tol.eps_residual):
            checks.append(
                PropertyCheck(
                    f"central[{i}]:{label}",
                    False,
                    f"word is not central at the representation level (defect {central_defect:.3e})",
                )
            )
            continue
        linear_defect = frobenius(matrix - np.eye(action.dim))
        value = action.cocycle.extend(word)
        off_fixed = float(np.linalg.norm(value - fixed @ (fixed.conj().T @ value)))
        ok = residual_ok(linear_defect, 1.0, tol.eps_residual) and residual_ok(
            off_fixed, float(np.linalg.norm(value)), tol.eps_residual
        )
        detail = "" if ok else f"linear defect {linear_defect:.3e}, off-fixed norm {off_fixed:.3e}"
        checks.append(PropertyCheck(f"translation[{i}]:{label}", ok, detail))
    return PropertyReport("center-translations", tuple(checks))


def _commutator_pair(word: Word) -> tuple[int, int] | None:
    """Indices (i, j) when the word is a commutator of two distinct generators."""
    if len(word.letters) != 4:
        return None
    (g0, s0), (g1, s1), (g2, s2), (g3, s3) = word.letters
    if g0 != g2 or g1 != g3 or g0 == g1:
        return None
    if s0 == -s2 and s1 == -s3:
        return (min(g0, g1), max(g0, g1))
    return None


def is_free_abelian(presentation: GroupPresentation) -> bool:
    """True when the relators are exactly the pairwise generator commutators."""
    k = presentation.num_generators
    needed = {(i, j) for i in range(k) for j in range(i + 1, k)}
    seen = set()
    for relator in presentation.relators:
        pair = _commutator_pair(relator)
        if pair is None:
            return False
        seen.add(pair)
    return seen == needed


def _lattice_word(exponents: tuple[int, ...]) -> Word:
    letters = []
    for index, power in enumerate(exponents):
        sign = 1 if power >= 0 else -1
        letters.extend(((index, sign),) * abs(power))
    return Word(tuple(letters))


@dataclass(frozen=True)
class QuadraticFormResult:
    """Parallelogram-identity scan of x -> ||b(x)||^2 over a lattice window."""

    quadratic: bool
    violation: tuple[tuple[int, ...], tuple[int, ...]] | None
    window: int
    max_defect: float

    @property
    def tag(self) -> str:
        return "Quadratic" if self.quadratic else "ViolatedAt"


def quadratic_form_test(
    action: AffineAction, window: int = 3, tol: ToleranceProfile | None = None
) -> QuadraticFormResult:
    """Check ||b(.)||^2 for the parallelogram identity on a free-abelian group.

    Requires the cocycle values to span the whole space (totality); under
    that hypothesis the identity holds on the lattice iff the action is
    irreducible, which is what the accompanying property suite asserts.
    """
    tol = tol or action.tol
    presentation = action.presentation
    if not is_free_abelian(presentation):
        raise ConstructionError("quadratic form test requires a free abelian presentation")
    if window < 1:
        raise ConstructionError("window must be >= 1")
    k = presentation.num_generators
    values = np.column_stack(action.cocycle.values) if k else np.zeros((action.dim, 0))
    singular = np.linalg.svd(values, compute_uv=False) if min(values.shape) else np.zeros(0)
    if numerical_rank(singular, tol) < action.dim:
        raise ConstructionError("cocycle values do not span the space (totality fails)")

    span = range(-2 * window, 2 * window + 1)
    psi = {
        x: float(np.linalg.norm(action.cocycle.extend(_lattice_word(x))) ** 2)
        for x in itertools.product(span, repeat=k)
    }
    scale = max(psi.values(), default=0.0)
    inner = sorted(
        itertools.product(range(-window, window + 1), repeat=k),
        key=lambda x: (max(map(abs, x), default=0), sum(map(abs, x)), tuple(-c for c in x)),
    )
    max_defect = 0.0
    for x in inner:
        for y in inner:
            plus = tuple(a + b for a, b in zip(x, y))
            minus = tuple(a - b for a, b in zip(x, y))
            defect = abs(psi[plus] + psi[minus] - 2.0 * (psi[x] + psi[y]))
            max_defect = max(max_defect, defect)
            if not residual_ok(defect, scale, tol.eps_residual):
                return QuadraticFormResult(False, (x, y), window, defect)
    return QuadraticFormResult(True, None, window, max_defect)


_HEISENBERG_CLASS = "heisenberg"
_ABELIAN_CLASS = "abelian"


def _is_heisenberg_shaped(presentation: GroupPresentation) -> bool:
    """Three generators x, y, z with [x,y] = z central.

    Matches relator sets of the form {[x,y]z^-1 or z^-1... , [x,z], [y,z]}
    up to generator order: one relator expressing a commutator of two
    generators as a third, plus commutators making the third central.
    """
    if presentation.num_generators != 3:
        return False
    central_pairs = set()
    bracket: tuple[int, int, int] | None = None
    for relator in presentation.relators:
        pair = _commutator_pair(relator)
        if pair is not None:
            central_pairs.add(pair)
            continue
        if len(relator.letters) != 5:
            return False
        (g0, s0), (g1, s1), (g2, s2), (g3, s3), (g4, s4) = relator.letters
        if g0 == g2 and g1 == g3 and s0 == -s2 and s1 == -s3 and s4 == -1 and g4 not in (g0, g1):
            if bracket is not None:
                return False
            bracket = (g0, g1, g4)
            continue
        return False
    if bracket is None:
        return False
    z = bracket[2]
    needed = {tuple(sorted((z, g))) for g in range(3) if g != z}
    return needed <= central_pairs


def fixture_class(presentation: GroupPresentation) -> str | None:
    if is_free_abelian(presentation):
        return _ABELIAN_CLASS
    if _is_heisenberg_shaped(presentation):
        return _HEISENBERG_CLASS
    return None


def check_translation_characterization(
    action: AffineAction, class_tag: str, tol: ToleranceProfile | None = None
) -> PropertyReport:
    """Irreducible abelian/nilpotent actions are spanning translation actions.

    Refuses presentations outside the recognized fixture classes (free
    abelian; Heisenberg-shaped for the nilpotent tag). For a reducible
    action the conclusion is vacuous and reported as such.
    """
    tol = tol or action.tol
    tag = class_tag.lower()
    if tag not in (_ABELIAN_CLASS, "nilpotent"):
        raise ConstructionError(f"class tag must be 'abelian' or 'nilpotent', got {class_tag!r}")
    cls = fixture_class(action.presentation)
    if cls is None or (tag == _ABELIAN_CLASS and cls != _ABELIAN_CLASS):
        raise ConstructionError(
            f"presentation is not in the {class_tag} fixture class; the characterization does not apply"
        )
    verdict = decide_irreducibility(action, tol)
    if verdict.reducible:
        return PropertyReport(
            "translation-characterization",
            (PropertyCheck("vacuous", True, "action is reducible; nothing to check"),),
        )
    checks = []
    worst = max(
        (frobenius(m - np.eye(action.dim)) for m in action.rep.matrices), default=0.0
    )
    checks.append(
        PropertyCheck(
            "linear-part-trivial",
            residual_ok(worst, 1.0, tol.eps_residual),
            f"max generator deviation from identity {worst:.3e}",
        )
    )
    values = np.column_stack(action.cocycle.values) if action.cocycle.values else np.zeros((action.dim, 0))
    singular = np.linalg.svd(values, compute_uv=False) if min(values.shape) else np.zeros(0)
    spanning = numerical_rank(singular, tol) == action.dim
    checks.append(PropertyCheck("cocycle-spans", spanning))
    return PropertyReport("translation-characterization", tuple(checks))


@dataclass(frozen=True)
class ProbeResult:
    point: tuple[float, ...]
    hull_distance: float


@dataclass(frozen=True)
class OrbitHullReport:
    """Monte-Carlo evidence about the convex hull of one orbit.

    Distances come from an iterative nearest-point scheme and are evidence
    only; they never prove that orbits are enveloping.
    """

    orbit_size: int
    probes: tuple[ProbeResult, ...]

    @property
    def max_distance(self) -> float:
        return max((p.hull_distance for p in self.probes), default=0.0)

    def far_probes(self, threshold: float) -> list[ProbeResult]:
        return [p for p in self.probes if p.hull_distance > threshold]


def _hull_distance(points: np.ndarray, target: np.ndarray, iterations: int = 256) -> float:
    """Distance from target to conv(points) by nearest-vertex refinement."""
    gaps = points - target
    current = gaps[int(np.argmin(np.einsum("ij,ij->i", gaps, gaps)))]
    for step in range(1, iterations + 1):
        scores = gaps @ current
        best = gaps[int(np.argmin(scores))]
        # Frank-Wolfe gap: current is (near) optimal when no vertex improves
        if current @ (current - best) <= 1e-14:
            break
        direction = best - current
        denom = float(direction @ direction)
        if denom == 0.0:
            break
        gamma = min(1.0, max(0.0, float(-(current @ direction)) / denom))
        if gamma == 0.0:
            break
        current = current + gamma * direction
    return float(np.linalg.norm(current))


def _probe_grid(dim: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    axis = np.linspace(-radius, radius, 5)
    if dim <= 3:
        grid = np.array(list(itertools.product(axis, repeat=dim)))
    else:
        grid = rng.standard_normal((200, dim))
        grid *= radius * rng.random((200, 1)) ** (1.0 / dim) / np.linalg.norm(grid, axis=1, keepdims=True)
    return grid[np.linalg.norm(grid, axis=1) <= radius + 1e-12]


def orbit_hull_probe(
    action: AffineAction,
    origin,
    budget: int = 200,
    radius: float = 5.0,
    seed: int | None = 0,
    max_word_length: int = 12,
    tol: ToleranceProfile | None = None,
) -> OrbitHullReport:
    """Sample the orbit of a point and measure probe distances to its hull.

    Irreducible finite-dimensional real actions have enveloping orbits, so
    persistent positive distances inside the sampled ball are (Monte-Carlo)
    evidence of reducibility; small distances everywhere are evidence the
    hull fills the ball.
    """
    if action.field != REAL:
        raise ConstructionError("orbit probe is defined for real actions")
    if budget < 1:
        raise ConstructionError("budget must be >= 1")
    origin = as_field_array(origin, REAL)
    rng = np.random.default_rng(seed)
    g = action.presentation.num_generators
    points = [origin]
    for _ in range(budget):
        length = int(rng.integers(0, max_word_length + 1))
        if g == 0 or length == 0:
            word = Word()
        else:
            letters = tuple(
                (int(rng.integers(0, g)), 1 if rng.random() < 0.5 else -1) for _ in range(length)
            )
            word = Word(letters)
        points.append(action.evaluate(word)(origin))
    cloud = np.array(points)
    probes = tuple(
        ProbeResult(tuple(float(c) for c in q), _hull_distance(cloud, q))
        for q in _probe_grid(action.dim, radius, rng)
    )
    return OrbitHullReport(len(points), probes)
