"""Shared builders for the test suite: presentations, random isometric
representations by group class, random cocycles, and the brute-force
joint-eigenspace oracle used to cross-check the commutant decision on
abelian groups."""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from affine_actions import (
    AffineAction,
    Cocycle,
    GroupPresentation,
    Representation,
    ToleranceProfile,
    first_cohomology,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TOL = ToleranceProfile()


def z_group() -> GroupPresentation:
    return GroupPresentation(["t"])


def z2_group() -> GroupPresentation:
    return GroupPresentation(["t1", "t2"], ["t1 t2 t1^-1 t2^-1"])


def f2_group() -> GroupPresentation:
    return GroupPresentation(["a", "b"])


def dihedral_group() -> GroupPresentation:
    return GroupPresentation(["t", "s"], ["s s", "s t s t"])


def heisenberg_group() -> GroupPresentation:
    return GroupPresentation(
        ["x", "y", "z"],
        ["x y x^-1 y^-1 z^-1", "x z x^-1 z^-1", "y z y^-1 z^-1"],
    )


def c3_group() -> GroupPresentation:
    return GroupPresentation(["s"], ["s s s"])


def s3_group() -> GroupPresentation:
    return GroupPresentation(["s", "t"], ["s s", "t t t", "s t s t"])


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    gauss = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diagonal(r))


def random_isometry(dim: int, field: str, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(dim, rng) if field == "complex" else random_orthogonal(dim, rng)


def random_field_vector(dim: int, field: str, rng: np.random.Generator) -> np.ndarray:
    if field == "complex":
        return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return rng.standard_normal(dim)


def random_cocycle(rep: Representation, rng: np.random.Generator, scale: float = 1.0) -> Cocycle:
    """Random element of the cocycle space (valid by construction)."""
    basis = first_cohomology(rep).cocycle_basis
    if not basis:
        return Cocycle(rep, tuple(np.zeros(rep.dim, dtype=rep.dtype) for _ in rep.matrices))
    coeffs = random_field_vector(len(basis), rep.field, rng) * scale
    coords = sum(c * z.coordinates() for c, z in zip(coeffs, basis))
    d = rep.dim
    return Cocycle(rep, tuple(coords[i * d : (i + 1) * d] for i in range(len(rep.matrices))))


def random_action(rep: Representation, rng: np.random.Generator, scale: float = 1.0) -> AffineAction:
    return AffineAction(rep, random_cocycle(rep, rng, scale))


# -- commuting (abelian / Heisenberg-like) representation builders ----------


def _unit_phase(rng: np.random.Generator, away_from_one: float = 0.3) -> complex:
    angle = rng.uniform(away_from_one, 2 * np.pi - away_from_one)
    return complex(np.cos(angle), np.sin(angle))


def random_commuting_unitaries(
    dim: int, count: int, rng: np.random.Generator, trivial_prob: float = 0.4
) -> list[np.ndarray]:
    """Simultaneously diagonal unitaries in a common random eigenbasis.

    Each diagonal slot is forced to the exact value 1 with probability
    ``trivial_prob`` (shared across all generators) so both fixed and moving
    eigenspaces occur; the remaining phases stay away from 1.
    """
    q = random_unitary(dim, rng)
    trivial = rng.random(dim) < trivial_prob
    mats = []
    for _ in range(count):
        diag = np.array([1.0 + 0j if fix else _unit_phase(rng) for fix in trivial])
        mats.append(q @ np.diag(diag) @ q.conj().T)
    return mats


def random_commuting_orthogonals(
    dim: int, count: int, rng: np.random.Generator, trivial_prob: float = 0.4
) -> list[np.ndarray]:
    """Commuting real isometries: shared 2x2 rotation blocks plus fixed axes."""
    q = random_orthogonal(dim, rng)
    blocks: list[int] = []
    remaining = dim
    while remaining >= 2:
        if rng.random() < trivial_prob:
            blocks.append(1)
            remaining -= 1
        else:
            blocks.append(2)
            remaining -= 2
    blocks.extend([1] * remaining)
    mats = []
    for _ in range(count):
        mat = np.zeros((dim, dim))
        pos = 0
        for size in blocks:
            if size == 1:
                mat[pos, pos] = 1.0
            else:
                angle = rng.uniform(0.3, 2 * np.pi - 0.3)
                c, s = np.cos(angle), np.sin(angle)
                mat[pos : pos + 2, pos : pos + 2] = [[c, -s], [s, c]]
            pos += size
        mats.append(q @ mat @ q.T)
    return mats


def random_abelian_rep(presentation: GroupPresentation, dim: int, field: str, rng) -> Representation:
    k = presentation.num_generators
    if field == "complex":
        mats = random_commuting_unitaries(dim, k, rng)
    else:
        mats = random_commuting_orthogonals(dim, k, rng)
    return Representation(presentation, field, mats, dim=dim)


def identity_rep(presentation: GroupPresentation, dim: int, field: str) -> Representation:
    dtype = complex if field == "complex" else float
    return Representation(
        presentation, field, [np.eye(dim, dtype=dtype)] * presentation.num_generators, dim=dim
    )


def random_heisenberg_rep(dim: int, field: str, rng, genuine_prob: float = 0.5) -> Representation:
    """Either an abelianized representation (z -> 1) or, over C in dimension
    3, the clock-and-shift representation with central z, conjugated by a
    random isometry."""
    heis = heisenberg_group()
    if field == "complex" and dim == 3 and rng.random() < genuine_prob:
        omega = np.exp(2j * np.pi / 3)
        shift = np.roll(np.eye(3), 1, axis=0).astype(complex)
        clock = np.diag([1.0 + 0j, omega, omega**2])
        center = (1 / omega) * np.eye(3, dtype=complex)
        q = random_unitary(3, rng)
        mats = [q @ m @ q.conj().T for m in (shift, clock, center)]
        return Representation(heis, "complex", mats, dim=3)
    if field == "complex":
        x, y = random_commuting_unitaries(dim, 2, rng)
        eye = np.eye(dim, dtype=complex)
    else:
        x, y = random_commuting_orthogonals(dim, 2, rng)
        eye = np.eye(dim)
    return Representation(heis, field, [x, y, eye], dim=dim)


# -- finite group representations -------------------------------------------


def random_c3_rep(dim: int, field: str, rng) -> Representation:
    c3 = c3_group()
    if field == "complex":
        omega = np.exp(2j * np.pi / 3)
        diag = np.diag([omega ** int(rng.integers(0, 3)) for _ in range(dim)])
        q = random_unitary(dim, rng)
        return Representation(c3, "complex", [q @ diag @ q.conj().T], dim=dim)
    mat = np.zeros((dim, dim))
    pos = 0
    while pos < dim:
        if dim - pos >= 2 and rng.random() < 0.7:
            sign = 1.0 if rng.random() < 0.5 else -1.0
            c, s = np.cos(2 * np.pi / 3), sign * np.sin(2 * np.pi / 3)
            mat[pos : pos + 2, pos : pos + 2] = [[c, -s], [s, c]]
            pos += 2
        else:
            mat[pos, pos] = 1.0
            pos += 1
    q = random_orthogonal(dim, rng)
    return Representation(c3, "real", [q @ mat @ q.T], dim=dim)


_S3_IRREPS = {
    # name -> (dim, s-matrix, t-matrix)
    "trivial": (1, np.array([[1.0]]), np.array([[1.0]])),
    "sign": (1, np.array([[-1.0]]), np.array([[1.0]])),
    "standard": (
        2,
        np.array([[1.0, 0.0], [0.0, -1.0]]),
        np.array(
            [
                [np.cos(2 * np.pi / 3), -np.sin(2 * np.pi / 3)],
                [np.sin(2 * np.pi / 3), np.cos(2 * np.pi / 3)],
            ]
        ),
    ),
}


def random_s3_rep(max_dim: int, field: str, rng) -> Representation:
    names = list(_S3_IRREPS)
    chosen: list[str] = []
    total = 0
    while True:
        name = names[int(rng.integers(0, len(names)))]
        dim = _S3_IRREPS[name][0]
        if total + dim > max_dim:
            if total:
                break
            continue
        chosen.append(name)
        total += dim
        if total == max_dim or rng.random() < 0.3:
            break
    s_mat = np.zeros((total, total))
    t_mat = np.zeros((total, total))
    pos = 0
    for name in chosen:
        dim, s_blk, t_blk = _S3_IRREPS[name]
        s_mat[pos : pos + dim, pos : pos + dim] = s_blk
        t_mat[pos : pos + dim, pos : pos + dim] = t_blk
        pos += dim
    q = random_isometry(total, field, rng)
    mats = [q @ s_mat @ q.conj().T, q @ t_mat @ q.conj().T]
    return Representation(s3_group(), field, mats, dim=total)


# -- dihedral and free-group representations --------------------------------


def random_dihedral_rep(dim: int, field: str, rng) -> Representation:
    """Random direct sum of the 1-dim characters and 2-dim reflection reps."""
    blocks_s = []
    blocks_t = []
    total = 0
    while total < dim:
        if dim - total >= 2 and rng.random() < 0.6:
            angle = rng.uniform(0.3, 2 * np.pi - 0.3)
            c, s = np.cos(angle), np.sin(angle)
            blocks_t.append(np.array([[c, -s], [s, c]]))
            blocks_s.append(np.array([[1.0, 0.0], [0.0, -1.0]]))
            total += 2
        else:
            blocks_t.append(np.array([[1.0 if rng.random() < 0.5 else -1.0]]))
            blocks_s.append(np.array([[1.0 if rng.random() < 0.5 else -1.0]]))
            total += 1
    t_mat = np.zeros((dim, dim))
    s_mat = np.zeros((dim, dim))
    pos = 0
    for bt, bs in zip(blocks_t, blocks_s):
        k = bt.shape[0]
        t_mat[pos : pos + k, pos : pos + k] = bt
        s_mat[pos : pos + k, pos : pos + k] = bs
        pos += k
    q = random_isometry(dim, field, rng)
    mats = [q @ t_mat @ q.conj().T, q @ s_mat @ q.conj().T]
    return Representation(dihedral_group(), field, mats, dim=dim)


def random_free_rep(presentation: GroupPresentation, dim: int, field: str, rng) -> Representation:
    mats = [random_isometry(dim, field, rng) for _ in presentation.generators]
    return Representation(presentation, field, mats, dim=dim)


def random_action_for(presentation: GroupPresentation, dim: int, field: str, rng) -> AffineAction:
    """Random action for the presentations used across the suites."""
    names = presentation.generators
    if names == ("t",) and not presentation.relators:
        rep = random_free_rep(presentation, dim, field, rng)
    elif presentation.relators and presentation == dihedral_group():
        rep = random_dihedral_rep(dim, field, rng)
    elif not presentation.relators:
        rep = random_free_rep(presentation, dim, field, rng)
    else:
        rep = random_abelian_rep(presentation, dim, field, rng)
    return random_action(rep, rng)


def total_random_abelian_action(rng) -> AffineAction | None:
    """Random free-abelian action whose cocycle values span the space, or
    None when the sample misses totality. Half the samples have identity
    linear part (mostly irreducible), half mix nontrivial eigenvalues in
    (always reducible)."""
    presentation = z_group() if rng.random() < 0.4 else z2_group()
    k = presentation.num_generators
    dim = int(rng.integers(1, k + 1))
    if rng.random() < 0.5:
        rep = identity_rep(presentation, dim, "complex")
    else:
        rep = random_abelian_rep(presentation, dim, "complex", rng)
    action = random_action(rep, rng)
    values = np.column_stack(action.cocycle.values)
    if np.linalg.matrix_rank(values, tol=1e-6) < dim:
        return None
    return action


# -- brute-force oracle for abelian actions ---------------------------------


def _split_blocks_by(matrix: np.ndarray, blocks: list[np.ndarray], cluster_tol: float) -> list[np.ndarray]:
    refined = []
    for block in blocks:
        compressed = block.conj().T @ matrix @ block
        values, vectors = np.linalg.eig(compressed)
        order = np.argsort(np.angle(values))
        values, vectors = values[order], vectors[:, order]
        start = 0
        groups = []
        for i in range(1, len(values) + 1):
            if i == len(values) or abs(values[i] - values[start]) > cluster_tol:
                groups.append(list(range(start, i)))
                start = i
        for group in groups:
            span = vectors[:, group]
            q, _ = np.linalg.qr(span)
            refined.append(block @ q)
    return refined


def joint_eigenspaces(matrices: list[np.ndarray], cluster_tol: float = 1e-6) -> list[np.ndarray]:
    dim = matrices[0].shape[0] if matrices else 0
    blocks = [np.eye(dim, dtype=complex)]
    for matrix in matrices:
        blocks = _split_blocks_by(matrix.astype(complex), blocks, cluster_tol)
    return blocks


def _is_coboundary_on(w: np.ndarray, matrices, values, residual_tol: float) -> bool:
    rows = [w.conj().T @ m @ w - np.eye(w.shape[1]) for m in matrices]
    rhs = [w.conj().T @ v for v in values]
    stacked = np.vstack(rows)
    target = np.concatenate(rhs)
    # truncated-SVD solve: singular values below tolerance count as zero,
    # otherwise a 1e-16 roundoff entry would "solve" for a fixed point at
    # distance 1e16
    u, s, vh = np.linalg.svd(stacked, full_matrices=False)
    keep = s > residual_tol * max(float(s[0]) if s.size else 0.0, 1.0)
    if np.any(keep):
        solution = vh[keep].conj().T @ ((u[:, keep].conj().T @ target) / s[keep])
    else:
        solution = np.zeros(stacked.shape[1], dtype=stacked.dtype)
    residual = np.linalg.norm(stacked @ solution - target)
    return residual <= residual_tol * (1.0 + np.linalg.norm(target))


def abelian_oracle_is_irreducible(
    action: AffineAction, residual_tol: float = 1e-8, cluster_tol: float = 1e-6
) -> bool:
    """Brute force over explicit invariant subspaces, independent of the
    commutant path: candidates are all sums of joint eigenspaces, where the
    eigenvalue-one block (on which every subspace is invariant) may be
    replaced by the complement of the projected cocycle span inside it. A
    candidate witnesses reducibility when the projected cocycle on it is a
    coboundary (least-squares solve)."""
    matrices = [m.astype(complex) for m in action.rep.matrices]
    values = [v.astype(complex) for v in action.cocycle.values]
    if not matrices:
        return False
    blocks = joint_eigenspaces(matrices, cluster_tol)
    alternatives: list[list[np.ndarray | None]] = []
    for w in blocks:
        options: list[np.ndarray | None] = [w]
        if all(np.linalg.norm(w.conj().T @ m @ w - np.eye(w.shape[1])) < cluster_tol for m in matrices):
            projected = np.column_stack([w.conj().T @ v for v in values])
            u, s, _ = np.linalg.svd(projected, full_matrices=True)
            rank = int(np.sum(s > residual_tol)) if s.size else 0
            complement = w @ u[:, rank:]
            options.append(complement if complement.shape[1] else None)
        alternatives.append(options)
    for choices in itertools.product(*[range(len(opts) + 1) for opts in alternatives]):
        parts = []
        for opts, choice in zip(alternatives, choices):
            if choice == 0:
                continue  # block left out entirely
            picked = opts[choice - 1]
            if picked is not None:
                parts.append(picked)
        if not parts:
            continue
        w = np.hstack(parts)
        if w.shape[1] and _is_coboundary_on(w, matrices, values, residual_tol):
            return False
    return True
