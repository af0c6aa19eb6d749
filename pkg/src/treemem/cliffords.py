"""Single-qubit Clifford bookkeeping for the graph-state engine.

The 24 single-qubit Cliffords (modulo global phase) are enumerated once at
import time by closing {I, H, S} under multiplication.  All later work is
integer table lookups: composition, inversion, and conjugation action on
the Pauli letters.  Vertex "frames" in :mod:`treemem.graphstate` are indices
into this table.
"""

from __future__ import annotations

import numpy as np

PAULI_X = "X"
PAULI_Y = "Y"
PAULI_Z = "Z"
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

_MAT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
}


def _same_up_to_phase(a: np.ndarray, b: np.ndarray) -> bool:
    # |tr(a^dagger b)| == 2 holds iff two 2x2 unitaries agree up to phase
    return abs(np.trace(a.conj().T @ b)) > 2.0 - 1e-8


def _close_group() -> list[np.ndarray]:
    mats = [_MAT["I"]]
    frontier = [_MAT["I"]]
    while frontier:
        nxt = []
        for a in frontier:
            for g in (_MAT["H"], _MAT["S"]):
                prod = a @ g
                if not any(_same_up_to_phase(prod, m) for m in mats):
                    mats.append(prod)
                    nxt.append(prod)
        frontier = nxt
    return mats


MATRICES: list[np.ndarray] = _close_group()
ORDER = len(MATRICES)
assert ORDER == 24, f"expected 24 single-qubit Cliffords, built {ORDER}"


def index_of(m: np.ndarray) -> int:
    """Index of a 2x2 unitary in the table (must be Clifford up to phase)."""
    m = np.asarray(m, dtype=complex)
    for i, c in enumerate(MATRICES):
        if _same_up_to_phase(m, c):
            return i
    raise ValueError("matrix is not a single-qubit Clifford")


COMPOSE = np.zeros((ORDER, ORDER), dtype=np.int8)
for _i, _a in enumerate(MATRICES):
    for _j, _b in enumerate(MATRICES):
        COMPOSE[_i, _j] = index_of(_a @ _b)

INVERSE = np.zeros(ORDER, dtype=np.int8)
for _i, _a in enumerate(MATRICES):
    INVERSE[_i] = index_of(_a.conj().T)


def _conj_tables() -> tuple[dict, dict]:
    """For frame F and Pauli P: F^dagger P F = sign * P' (measurement view)."""
    letter = {}
    sign = {}
    for i, f in enumerate(MATRICES):
        for p in PAULIS:
            m = f.conj().T @ _MAT[p] @ f
            for q in PAULIS:
                for s in (1, -1):
                    if np.allclose(m, s * _MAT[q], atol=1e-8):
                        letter[i, p] = q
                        sign[i, p] = s
                        break
                else:
                    continue
                break
            else:
                raise AssertionError("conjugated Pauli not found")
    return letter, sign


_CONJ_LETTER, _CONJ_SIGN = _conj_tables()


def conj_in(frame: int, pauli: str) -> tuple[str, int]:
    """F^dagger P F as (letter, sign): measuring P on the framed qubit."""
    return _CONJ_LETTER[frame, pauli], _CONJ_SIGN[frame, pauli]


def conj_out(frame: int, pauli: str) -> tuple[str, int]:
    """F P F^dagger as (letter, sign): pushing a Pauli out through the frame."""
    inv = int(INVERSE[frame])
    return _CONJ_LETTER[inv, pauli], _CONJ_SIGN[inv, pauli]


ID = index_of(_MAT["I"])
H = index_of(_MAT["H"])
S = index_of(_MAT["S"])
SDG = index_of(_MAT["S"].conj().T)
X = index_of(_MAT["X"])
Y = index_of(_MAT["Y"])
Z = index_of(_MAT["Z"])

# sqrt(+iY) and sqrt(-iY) are the Hadamard-like byproducts of X measurements;
# sqrt(+iZ) ~ S-dagger and sqrt(-iZ) ~ S appear after Y measurements.
SQRT_IY_POS = index_of(np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2.0))
SQRT_IY_NEG = index_of(np.array([[1, -1], [1, 1]], dtype=complex) / np.sqrt(2.0))
SQRT_IZ_POS = SDG
SQRT_IZ_NEG = S

BY_NAME = {"I": ID, "H": H, "S": S, "SDG": SDG, "X": X, "Y": Y, "Z": Z}


def compose(first: int, then: int) -> int:
    """Index of the product (then * first): `first` acts before `then`."""
    return int(COMPOSE[then, first])
