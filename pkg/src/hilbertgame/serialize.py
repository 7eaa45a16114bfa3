"""JSON/CSV encoding of games, states and reports.

Complex numbers travel as ``[re, im]`` pairs and matrices as row-major lists
of rows. JSON output is canonical: sorted keys and floats written with 17
significant digits, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .equilibrium import CommonEigenstate, EquilibriumReport, SpectrumReport
from .errors import RejectedInput
from .game import GameDefinition, canonical_pd, pure_density
from .strategy import Euler, ThetaPhi


class MalformedInput(RejectedInput):
    """Input document could not be decoded; the message names the first bad position."""


# -- decoding ---------------------------------------------------------------


def _scalar(value, where: str) -> complex:
    if isinstance(value, bool):
        raise MalformedInput(f"{where}: expected a number or [re, im] pair, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    raise MalformedInput(f"{where}: expected a number or [re, im] pair, got {value!r}")


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(row, list) for row in obj):
        raise MalformedInput(f"{where}: expected a non-empty list of rows")
    width = len(obj[0])
    rows = []
    for i, row in enumerate(obj):
        if len(row) != width:
            raise MalformedInput(f"{where}[{i}]: row has {len(row)} entries, expected {width}")
        rows.append([_scalar(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows, dtype=np.complex128)


def vector_from_json(obj, where: str = "vector") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise MalformedInput(f"{where}: expected a non-empty list")
    return np.array([_scalar(x, f"{where}[{i}]") for i, x in enumerate(obj)], dtype=np.complex128)


def _load_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def game_from_json(doc) -> GameDefinition:
    """Either ``{"r", "s", "t", "p"}`` or ``{"rho0", "P1", "P2"}``."""
    if not isinstance(doc, dict):
        raise MalformedInput("game document must be a JSON object")
    if {"r", "s", "t", "p"} <= doc.keys():
        vals = []
        for key in "rstp":
            v = doc[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise MalformedInput(f"{key}: expected a real number, got {v!r}")
            vals.append(float(v))
        return canonical_pd(*vals)
    missing = {"rho0", "P1", "P2"} - doc.keys()
    if missing:
        raise MalformedInput(f"game document lacks {sorted(missing)} (and is not an r/s/t/p game)")
    return GameDefinition(
        matrix_from_json(doc["rho0"], "rho0"),
        matrix_from_json(doc["P1"], "P1"),
        matrix_from_json(doc["P2"], "P2"),
    )


def load_game(path) -> GameDefinition:
    return game_from_json(_load_json(path))


def game_to_json(g: GameDefinition) -> dict:
    if g.params is not None:
        return dict(zip("rstp", g.params))
    return {"rho0": matrix_to_json(g.rho0), "P1": matrix_to_json(g.p1), "P2": matrix_to_json(g.p2)}


def load_state(path) -> np.ndarray:
    """16x16 density from ``{"rho": matrix}`` or a pure ``{"vector": [...]}`` (normalised)."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise MalformedInput(f"{path}: state document must be a JSON object")
    if "rho" in doc:
        rho = matrix_from_json(doc["rho"], "rho")
    elif "vector" in doc:
        vec = vector_from_json(doc["vector"], "vector")
        if vec.shape != (16,):
            raise MalformedInput(f"vector: expected 16 entries, got {vec.shape[0]}")
        rho = pure_density(vec)
    else:
        raise MalformedInput(f"{path}: state document needs a 'rho' or 'vector' key")
    if rho.shape != (16, 16):
        raise MalformedInput(f"rho: expected a 16x16 matrix, got {rho.shape[0]}x{rho.shape[1]}")
    return rho


# -- encoding ---------------------------------------------------------------


def pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m) -> list:
    return [[pair(z) for z in row] for row in np.asarray(m)]


def vector_to_json(v) -> list:
    return [pair(z) for z in np.asarray(v).ravel()]


def _params_to_json(p):
    if isinstance(p, (ThetaPhi, Euler)):
        return p.as_dict()
    return p


def spectrum_to_json(report: SpectrumReport) -> dict:
    return {
        "eigenvalues": [float(x) for x in report.decomposition.eigenvalues],
        "clusters": [
            {"value": v, "multiplicity": m}
            for v, m in zip(report.values, report.multiplicities)
        ],
    }


def common_state_to_json(c: CommonEigenstate) -> dict:
    out = {"payoffs": list(c.payoffs), "state": vector_to_json(c.state), "unitary_flags": list(c.unitary_flags)}
    if c.factors is not None:
        out["factors"] = [vector_to_json(f) for f in c.factors]
    return out


def report_to_json(report: EquilibriumReport, include_state: bool = True) -> dict:
    out = {
        "kind": report.kind,
        "payoffs": list(report.payoffs),
        "unitary_flags": list(report.unitary_flags),
        "deviation_margin": report.deviation_margin,
        "margins": list(report.margins),
        "best_responses": list(report.best_responses),
        "strategy_set": report.strategy_set,
    }
    if include_state and report.state is not None:
        st = np.asarray(report.state)
        out["state"] = vector_to_json(st) if st.ndim == 1 else matrix_to_json(st)
    if report.profile is not None:
        out["profile"] = [_params_to_json(p) for p in report.profile]
    if report.grid_spacing is not None:
        out["grid_spacing"] = report.grid_spacing
    if report.common_states:
        out["common_states"] = [common_state_to_json(c) for c in report.common_states]
    return out


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        if x == 0.0:
            x = 0.0  # drop negative zero
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys, 17 significant digits, no whitespace)."""
    return _encode(obj) + "\n"


SCAN_HEADER = ("gamma1", "gamma2", "E1", "E2", "margin")


def scan_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_HEADER)
    for rep in reports:
        gammas = [
            format(p.mixing_angle, ".17g") if isinstance(p, (ThetaPhi, Euler)) else ""
            for p in (rep.profile or (None, None))
        ]
        writer.writerow(gammas + [format(v, ".17g") for v in (*rep.payoffs, rep.deviation_margin)])
    return buf.getvalue()
