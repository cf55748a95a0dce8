"""JSON problem files and machine-readable result documents.

A problem file declares a presentation, a scalar field, per-generator
matrices (flat row-major number arrays; complex scalars as [re, im] pairs)
and cocycle vectors, plus optional tolerances, a subgroup, a coset table,
central words, and a seed. Parsing is strict: unknown fields, wrong shapes
and undeclared names are errors with a pointer to the offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actions import AffineAction, AffineMap, AffineSubspace
from .constructions import InducedSetup, SubgroupSpec
from .linalg import COMPLEX, REAL, ToleranceProfile
from .reps import Cocycle, Representation
from .words import CosetTable, GroupPresentation, Word

FORMAT_VERSION = "1"


class ProblemFileError(ValueError):
    """Malformed problem file; the message names the offending location."""


def _scalar_to_json(value, field: str):
    if field == COMPLEX:
        return [float(np.real(value)), float(np.imag(value))]
    return float(np.real(value))


def _scalar_from_json(value, field: str, where: str):
    if field == COMPLEX:
        if not (isinstance(value, list) and len(value) == 2):
            raise ProblemFileError(f"{where}: complex entries must be [re, im] pairs")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ProblemFileError(f"{where}: expected a real number, got {value!r}")


def array_to_json(array: np.ndarray, field: str) -> list:
    return [_scalar_to_json(v, field) for v in np.asarray(array).reshape(-1)]


def array_from_json(data, field: str, shape: tuple[int, ...], where: str) -> np.ndarray:
    if not isinstance(data, list):
        raise ProblemFileError(f"{where}: expected an array")
    expected = int(np.prod(shape)) if shape else 0
    if len(data) != expected:
        raise ProblemFileError(f"{where}: expected {expected} entries, got {len(data)}")
    values = [_scalar_from_json(v, field, where) for v in data]
    dtype = np.complex128 if field == COMPLEX else np.float64
    return np.array(values, dtype=dtype).reshape(shape)


def _presentation_from_json(data, where: str) -> GroupPresentation:
    if not isinstance(data, dict):
        raise ProblemFileError(f"{where}: expected an object with generators/relators")
    generators = data.get("generators")
    if not isinstance(generators, list) or not all(isinstance(g, str) for g in generators):
        raise ProblemFileError(f"{where}.generators: expected a list of strings")
    relators = data.get("relators", [])
    if not isinstance(relators, list) or not all(isinstance(r, str) for r in relators):
        raise ProblemFileError(f"{where}.relators: expected a list of word strings")
    try:
        return GroupPresentation(tuple(generators), tuple(relators))
    except ValueError as exc:
        raise ProblemFileError(f"{where}: {exc}") from exc


def presentation_to_json(presentation: GroupPresentation) -> dict:
    return {
        "generators": list(presentation.generators),
        "relators": [presentation.format_word(r) for r in presentation.relators],
    }


def _coset_table_from_json(data, ambient: GroupPresentation, subgroup: GroupPresentation | None, where: str) -> CosetTable:
    if not isinstance(data, dict):
        raise ProblemFileError(f"{where}: expected an object")
    transversal_raw = data.get("transversal")
    if not isinstance(transversal_raw, list) or not transversal_raw:
        raise ProblemFileError(f"{where}.transversal: expected a non-empty list of word strings")
    transversal = tuple(ambient.parse_word(w) for w in transversal_raw)
    action_raw = data.get("action")
    schreier_raw = data.get("schreier")
    if not isinstance(action_raw, dict) or not isinstance(schreier_raw, dict):
        raise ProblemFileError(f"{where}: action and schreier must map generator names to rows")
    action_rows = []
    schreier_rows = []
    word_parser = subgroup.parse_word if subgroup is not None else ambient.parse_word
    for name in ambient.generators:
        if name not in action_raw:
            raise ProblemFileError(f"{where}.action: missing generator {name!r}")
        if name not in schreier_raw:
            raise ProblemFileError(f"{where}.schreier: missing generator {name!r}")
        row = action_raw[name]
        if not isinstance(row, list) or not all(isinstance(x, int) for x in row):
            raise ProblemFileError(f"{where}.action.{name}: expected a list of coset indices")
        action_rows.append(tuple(row))
        words = schreier_raw[name]
        if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
            raise ProblemFileError(f"{where}.schreier.{name}: expected a list of word strings")
        schreier_rows.append(tuple(word_parser(w) for w in words))
    extra = set(action_raw) - set(ambient.generators)
    if extra:
        raise ProblemFileError(f"{where}.action: unknown generators {sorted(extra)}")
    return CosetTable(transversal, action_rows, schreier_rows)


def coset_table_to_json(table: CosetTable, ambient: GroupPresentation, subgroup: GroupPresentation | None) -> dict:
    fmt = subgroup.format_word if subgroup is not None else ambient.format_word
    return {
        "transversal": [ambient.format_word(w) for w in table.transversal],
        "action": {name: list(row) for name, row in zip(ambient.generators, table.action)},
        "schreier": {
            name: [fmt(w) for w in row] for name, row in zip(ambient.generators, table.schreier)
        },
    }


@dataclass(frozen=True)
class ProblemFile:
    """Parsed contents of a problem file (not yet validated numerically)."""

    field: str
    presentation: GroupPresentation
    dim: int
    matrices: tuple[np.ndarray, ...]
    cocycle_values: tuple[np.ndarray, ...]
    tolerances: ToleranceProfile | None = None
    subgroup: SubgroupSpec | None = None
    coset_table: CosetTable | None = None
    central_words: tuple[Word, ...] = ()
    seed: int | None = None

    def build_action(self, tol: ToleranceProfile | None = None) -> AffineAction:
        tol = tol or self.tolerances or ToleranceProfile()
        rep = Representation(self.presentation, self.field, self.matrices, dim=self.dim, tol=tol)
        return AffineAction(rep, Cocycle(rep, self.cocycle_values, tol))


_KNOWN_KEYS = {
    "format_version",
    "field",
    "presentation",
    "dim",
    "matrices",
    "cocycle",
    "tolerances",
    "subgroup",
    "coset_table",
    "central_words",
    "seed",
}


def problem_from_dict(data: dict) -> ProblemFile:
    if not isinstance(data, dict):
        raise ProblemFileError("top level: expected a JSON object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ProblemFileError(f"unknown top-level keys: {sorted(unknown)}")
    if data.get("format_version") != FORMAT_VERSION:
        raise ProblemFileError(
            f"format_version: expected {FORMAT_VERSION!r}, got {data.get('format_version')!r}"
        )
    field = data.get("field")
    if field not in (REAL, COMPLEX):
        raise ProblemFileError(f"field: expected 'real' or 'complex', got {field!r}")
    presentation = _presentation_from_json(data.get("presentation"), "presentation")
    dim = data.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise ProblemFileError(f"dim: expected a positive integer, got {dim!r}")

    matrices_raw = data.get("matrices", {})
    cocycle_raw = data.get("cocycle", {})
    for key, raw in (("matrices", matrices_raw), ("cocycle", cocycle_raw)):
        if not isinstance(raw, dict):
            raise ProblemFileError(f"{key}: expected an object keyed by generator name")
        extra = set(raw) - set(presentation.generators)
        if extra:
            raise ProblemFileError(f"{key}: undeclared generators {sorted(extra)}")
        missing = set(presentation.generators) - set(raw)
        if missing:
            raise ProblemFileError(f"{key}: missing generators {sorted(missing)}")
    matrices = tuple(
        array_from_json(matrices_raw[name], field, (dim, dim), f"matrices.{name}")
        for name in presentation.generators
    )
    values = tuple(
        array_from_json(cocycle_raw[name], field, (dim,), f"cocycle.{name}")
        for name in presentation.generators
    )

    tolerances = None
    if "tolerances" in data:
        tol_raw = data["tolerances"]
        if not isinstance(tol_raw, dict) or set(tol_raw) - {"rank", "residual", "eig"}:
            raise ProblemFileError("tolerances: expected keys among rank/residual/eig")
        try:
            tolerances = ToleranceProfile(
                eps_rank=float(tol_raw.get("rank", 1e-8)),
                eps_residual=float(tol_raw.get("residual", 1e-8)),
                eps_eig=float(tol_raw.get("eig", 1e-8)),
            )
        except ValueError as exc:
            raise ProblemFileError(f"tolerances: {exc}") from exc

    subgroup = None
    if "subgroup" in data:
        sub_raw = data["subgroup"]
        if not isinstance(sub_raw, dict) or "generators" not in sub_raw:
            raise ProblemFileError("subgroup: expected an object with a generators list")
        sub_pres = None
        if "presentation" in sub_raw:
            sub_pres = _presentation_from_json(sub_raw["presentation"], "subgroup.presentation")
        try:
            subgroup = SubgroupSpec(presentation, tuple(sub_raw["generators"]), sub_pres)
        except ValueError as exc:
            raise ProblemFileError(f"subgroup: {exc}") from exc

    coset_table = None
    if "coset_table" in data:
        sub_pres = subgroup.presentation if subgroup is not None else None
        coset_table = _coset_table_from_json(data["coset_table"], presentation, sub_pres, "coset_table")

    central = tuple(
        presentation.parse_word(w) if isinstance(w, str) else w
        for w in data.get("central_words", [])
    )
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ProblemFileError(f"seed: expected an integer, got {seed!r}")
    return ProblemFile(
        field, presentation, dim, matrices, values, tolerances, subgroup, coset_table, central, seed
    )


def problem_to_dict(problem: ProblemFile) -> dict:
    data: dict = {
        "format_version": FORMAT_VERSION,
        "field": problem.field,
        "presentation": presentation_to_json(problem.presentation),
        "dim": problem.dim,
        "matrices": {
            name: array_to_json(m, problem.field)
            for name, m in zip(problem.presentation.generators, problem.matrices)
        },
        "cocycle": {
            name: array_to_json(v, problem.field)
            for name, v in zip(problem.presentation.generators, problem.cocycle_values)
        },
    }
    if problem.tolerances is not None:
        data["tolerances"] = {
            "rank": problem.tolerances.eps_rank,
            "residual": problem.tolerances.eps_residual,
            "eig": problem.tolerances.eps_eig,
        }
    if problem.subgroup is not None:
        sub: dict = {
            "generators": [
                problem.presentation.format_word(w) for w in problem.subgroup.generator_words
            ]
        }
        if problem.subgroup.presentation is not None:
            sub["presentation"] = presentation_to_json(problem.subgroup.presentation)
        data["subgroup"] = sub
    if problem.coset_table is not None:
        sub_pres = problem.subgroup.presentation if problem.subgroup is not None else None
        data["coset_table"] = coset_table_to_json(problem.coset_table, problem.presentation, sub_pres)
    if problem.central_words:
        data["central_words"] = [problem.presentation.format_word(w) for w in problem.central_words]
    if problem.seed is not None:
        data["seed"] = problem.seed
    return data


def load_problem(path: str | Path) -> ProblemFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return problem_from_dict(data)
    except ProblemFileError as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc


def save_problem(problem: ProblemFile, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n")


def load_induction_setup(path: str | Path) -> InducedSetup:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ProblemFileError(f"{path}: top level: expected a JSON object")
    if data.get("format_version") != FORMAT_VERSION:
        raise ProblemFileError(f"{path}: format_version must be {FORMAT_VERSION!r}")
    try:
        ambient = _presentation_from_json(data.get("ambient"), "ambient")
        subgroup = _presentation_from_json(data.get("subgroup"), "subgroup")
        table = _coset_table_from_json(data.get("coset_table"), ambient, subgroup, "coset_table")
    except ProblemFileError as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc
    return InducedSetup(ambient, subgroup, table)


def induction_setup_to_dict(setup: InducedSetup) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "ambient": presentation_to_json(setup.ambient),
        "subgroup": presentation_to_json(setup.subgroup),
        "coset_table": coset_table_to_json(setup.table, setup.ambient, setup.subgroup),
    }


def action_to_problem(action: AffineAction, tolerances: ToleranceProfile | None = None) -> ProblemFile:
    return ProblemFile(
        action.field,
        action.presentation,
        action.dim,
        action.rep.matrices,
        action.cocycle.values,
        tolerances,
    )


def affine_map_to_json(mapping: AffineMap, field: str) -> dict:
    return {
        "linear": array_to_json(mapping.linear, field),
        "translation": array_to_json(mapping.translation, field),
        "shape": list(mapping.linear.shape),
    }


def subspace_to_json(subspace: AffineSubspace, field: str) -> dict:
    return {
        "base": array_to_json(subspace.base, field),
        "directions": array_to_json(subspace.directions, field),
        "dim": subspace.dim,
        "ambient_dim": subspace.ambient_dim,
    }
