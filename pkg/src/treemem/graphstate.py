"""Exact small-scale graph-state engine.

State model: ``|psi> = (tensor of vertex frames) CZ_edges |+...+>``.  The
graph (vertices, edges) evolves under the standard local-complementation
measurement rules; frames are single-qubit Cliffords from
:mod:`treemem.cliffords` and absorb all measurement byproducts.  A dense
statevector oracle (:meth:`GraphState.to_statevector`) provides ground truth
for every rule at test scale.

Heralded loss is modelled by marking vertices: a lost vertex keeps its bonds
(its entanglement persists) but can never produce a direct outcome; callers
excise it once its Z value has been inferred from neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from . import cliffords as cl

DEFAULT_STATEVECTOR_CAP = 14


class Basis(Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


@dataclass(frozen=True)
class RotatedBasis:
    """Equatorial (X-Y plane) measurement basis; dense-oracle path only."""

    angle: float

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.angle), np.sin(self.angle)
        return np.array([[0, c - 1j * s], [c + 1j * s, 0]], dtype=complex)


class FusionTag(Enum):
    SUCCESS = "success"
    FAILURE_ZZ = "failure_zz"
    ERASURE = "erasure"


@dataclass(frozen=True)
class FusionOutcome:
    """Heralded result of one Type-II gate, keyed by detector counts."""

    tag: FusionTag
    detector_counts: tuple[int, int] = (1, 1)

    def __post_init__(self):
        n1, n2 = self.detector_counts
        if not (0 <= n1 <= 2 and 0 <= n2 <= 2):
            raise ValueError("detector counts must be 0, 1 or 2 per mode")
        expected = classify_counts(self.detector_counts)
        if expected is not self.tag:
            raise ValueError(
                f"counts {self.detector_counts} imply {expected}, not {self.tag}"
            )


def classify_counts(counts: tuple[int, int]) -> FusionTag:
    n1, n2 = counts
    if (n1, n2) == (1, 1):
        return FusionTag.SUCCESS
    if (n1, n2) in ((2, 0), (0, 2)):
        return FusionTag.FAILURE_ZZ
    if n1 + n2 < 2:
        return FusionTag.ERASURE
    raise ValueError(f"impossible detector counts {counts}")


SUCCESS = FusionOutcome(FusionTag.SUCCESS, (1, 1))
FAILURE_ZZ = FusionOutcome(FusionTag.FAILURE_ZZ, (2, 0))
ERASURE = FusionOutcome(FusionTag.ERASURE, (0, 0))

_RNG = np.random.default_rng()


class GraphState:
    """Mutable graph state with per-vertex Clifford frames and loss marks."""

    def __init__(self) -> None:
        self._adj: dict[int, set[int]] = {}
        self.lost: set[int] = set()
        self.frame: dict[int, int] = {}
        self.outcome_log: list[tuple[int, str, int]] = []

    # -- structure ---------------------------------------------------------

    @property
    def vertices(self) -> set[int]:
        return set(self._adj)

    @property
    def num_vertices(self) -> int:
        return len(self._adj)

    def edges(self) -> set[frozenset[int]]:
        out = set()
        for v, nb in self._adj.items():
            for u in nb:
                out.add(frozenset((u, v)))
        return out

    def neighbors(self, v: int) -> set[int]:
        self._require(v)
        return set(self._adj[v])

    def degree(self, v: int) -> int:
        self._require(v)
        return len(self._adj[v])

    def has_edge(self, a: int, b: int) -> bool:
        return a in self._adj and b in self._adj[a]

    def _require(self, v: int) -> None:
        if v not in self._adj:
            raise ValueError(f"unknown vertex {v}")

    def add_vertex(self, v: int) -> None:
        if v in self._adj:
            raise ValueError(f"vertex {v} already exists")
        self._adj[v] = set()

    def add_cz(self, a: int, b: int) -> None:
        """Toggle the bond a-b (a physical controlled-phase gate).

        Vertex frames must preserve the Z axis for the gate to remain a plain
        edge toggle; a frame sending Z to -Z contributes a Z byproduct on the
        partner vertex.
        """
        if a == b:
            raise ValueError("self-loops are not allowed")
        self._require(a)
        self._require(b)
        for v, other in ((a, b), (b, a)):
            letter, sign = cl.conj_in(self.frame.get(v, cl.ID), "Z")
            if letter != "Z":
                raise ValueError(
                    f"vertex {v} frame does not preserve the Z axis; "
                    "cannot apply a direct bond"
                )
            if sign < 0:
                self._compose_graph_side(other, cl.Z)
        if b in self._adj[a]:
            self._adj[a].discard(b)
            self._adj[b].discard(a)
        else:
            self._adj[a].add(b)
            self._adj[b].add(a)

    def apply_local(self, v: int, clifford: int | str) -> None:
        """Apply a single-qubit Clifford (e.g. a waveplate) to vertex v."""
        self._require(v)
        idx = cl.BY_NAME[clifford] if isinstance(clifford, str) else int(clifford)
        cur = self.frame.get(v, cl.ID)
        self._set_frame(v, cl.compose(cur, idx))

    def mark_lost(self, v: int) -> None:
        self._require(v)
        self.lost.add(v)

    def copy(self) -> "GraphState":
        g = GraphState()
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        g.lost = set(self.lost)
        g.frame = dict(self.frame)
        g.outcome_log = list(self.outcome_log)
        return g

    def to_json_dict(self) -> dict:
        return {
            "vertices": sorted(self._adj),
            "edges": sorted(sorted(e) for e in self.edges()),
            "lost": sorted(self.lost),
        }

    # -- frames ------------------------------------------------------------

    def _set_frame(self, v: int, idx: int) -> None:
        if idx == cl.ID:
            self.frame.pop(v, None)
        else:
            self.frame[v] = idx

    def _compose_graph_side(self, v: int, idx: int) -> None:
        """Compose a byproduct that acts on the graph side (before the frame)."""
        cur = self.frame.get(v, cl.ID)
        self._set_frame(v, cl.compose(idx, cur))

    def frame_of(self, v: int) -> int:
        self._require(v)
        return self.frame.get(v, cl.ID)

    # -- measurements ------------------------------------------------------

    def measure(
        self,
        v: int,
        basis: Basis,
        outcome: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
    ) -> int:
        """Measure vertex v in a Pauli basis and remove it from the graph.

        Returns the physical outcome (+1/-1).  `outcome` forces it; forcing
        an outcome of probability zero raises.  Lost vertices cannot be
        measured directly.
        """
        if not isinstance(basis, Basis):
            raise ValueError("graph-rule measurements support Pauli bases only")
        self._require(v)
        if v in self.lost:
            raise ValueError(
                f"vertex {v} is lost; its outcome must be inferred indirectly"
            )
        letter, sign = cl.conj_in(self.frame.get(v, cl.ID), basis.value)
        deterministic = letter == "X" and not self._adj[v]
        if deterministic:
            phys = sign  # graph-side outcome is +1 for X on an isolated |+>
            if outcome is not None and outcome != phys:
                raise ValueError("forced outcome has probability zero")
        elif outcome is not None:
            phys = 1 if outcome > 0 else -1
        else:
            phys = 1 if (rng or _RNG).random() < 0.5 else -1
        graph_outcome = phys * sign
        self._measure_graph_pauli(v, letter, graph_outcome)
        self.outcome_log.append((v, basis.value, phys))
        return phys

    def excise_z(self, v: int, outcome: int) -> None:
        """Remove a vertex whose Z value was inferred indirectly.

        Applies the Z-measurement graph rule with the supplied outcome; the
        vertex may be lost (that is the intended use).
        """
        self._require(v)
        self.lost.discard(v)
        self._measure_graph_pauli(v, "Z", 1 if outcome > 0 else -1)
        self.outcome_log.append((v, "Z*", 1 if outcome > 0 else -1))

    def _local_complement(self, v: int) -> None:
        nbrs = sorted(self._adj[v])
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1 :]:
                if b in self._adj[a]:
                    self._adj[a].discard(b)
                    self._adj[b].discard(a)
                else:
                    self._adj[a].add(b)
                    self._adj[b].add(a)

    def _delete_vertex(self, v: int) -> None:
        for u in self._adj[v]:
            self._adj[u].discard(v)
        del self._adj[v]
        self.lost.discard(v)
        self.frame.pop(v, None)

    def _measure_graph_pauli(self, v: int, pauli: str, outcome: int) -> None:
        """Apply the graph measurement rule for a graph-side Pauli at v."""
        nbrs = sorted(self._adj[v])
        if pauli == "Z":
            if outcome < 0:
                for u in nbrs:
                    self._compose_graph_side(u, cl.Z)
            self._delete_vertex(v)
        elif pauli == "Y":
            corr = cl.SQRT_IZ_NEG if outcome > 0 else cl.SQRT_IZ_POS
            for u in nbrs:
                self._compose_graph_side(u, corr)
            self._local_complement(v)
            self._delete_vertex(v)
        elif pauli == "X":
            if not nbrs:
                self._delete_vertex(v)
                return
            w = nbrs[0]  # special neighbour: lowest id, for reproducibility
            nv = set(self._adj[v])
            nw = set(self._adj[w])
            if outcome > 0:
                self._compose_graph_side(w, cl.SQRT_IY_POS)
                zset = nv - nw - {w}
            else:
                self._compose_graph_side(w, cl.SQRT_IY_NEG)
                zset = nw - nv - {v}
            for u in sorted(zset):
                self._compose_graph_side(u, cl.Z)
            self._local_complement(w)
            self._local_complement(v)
            self._local_complement(w)
            self._delete_vertex(v)
        else:  # pragma: no cover
            raise AssertionError(pauli)

    # -- fusion ------------------------------------------------------------

    def fuse_type2(
        self,
        a: int,
        b: int,
        outcome: FusionOutcome,
        forced: Optional[tuple[int, int]] = None,
        rng: Optional[np.random.Generator] = None,
    ) -> tuple[int, int] | None:
        """Consume vertices a and b with a Type-II fusion gate.

        Success implements the joint two-qubit parity measurement; in the
        bond configurations the protocol uses this joins every neighbour of
        a to every neighbour of b.  Same-detector failure Z-measures both
        inputs; an erasure marks both as lost.  Returns the two parity
        outcomes on success, the two Z outcomes on failure, None on erasure.
        """
        self._require(a)
        self._require(b)
        if a == b:
            raise ValueError("fusion needs two distinct vertices")
        if a in self.lost or b in self.lost:
            raise ValueError("cannot fuse lost vertices")
        if outcome.tag is FusionTag.ERASURE:
            self.mark_lost(a)
            self.mark_lost(b)
            return None
        if outcome.tag is FusionTag.FAILURE_ZZ:
            o1 = self.measure(a, Basis.Z, None if forced is None else forced[0], rng)
            o2 = self.measure(b, Basis.Z, None if forced is None else forced[1], rng)
            return (o1, o2)
        # success path
        if b in self._adj[a]:
            raise ValueError("fusion inputs must not be adjacent")
        la1, sa1 = cl.conj_in(self.frame.get(a, cl.ID), "X")
        lb1, sb1 = cl.conj_in(self.frame.get(b, cl.ID), "Z")
        la2, sa2 = cl.conj_in(self.frame.get(a, cl.ID), "Z")
        lb2, sb2 = cl.conj_in(self.frame.get(b, cl.ID), "X")
        if "Y" in (la1, lb1, la2, lb2):
            raise ValueError("vertex frames outside the protocol's fusion classes")
        na = self._adj[a] - {b}
        nb = self._adj[b] - {a}
        if na & nb:
            raise ValueError("fusion inputs must have disjoint neighbourhoods")
        if forced is not None:
            p1, p2 = forced
        else:
            r = rng or _RNG
            p1 = 1 if r.random() < 0.5 else -1
            p2 = 1 if r.random() < 0.5 else -1
        o1 = p1 * sa1 * sb1
        o2 = p2 * sa2 * sb2
        pair = (la1, lb1)
        if pair == ("X", "Z"):
            self._fuse_cz_class(a, b, na, nb, o1, o2)
        elif pair == ("Z", "X"):
            self._fuse_cz_class(b, a, nb, na, o1, o2)
        elif pair == ("X", "X"):
            self._fuse_bell_class(a, b, na, nb, s_x=o1, s_p=o2)
        else:  # ("Z", "Z")
            self._fuse_bell_class(a, b, na, nb, s_x=o2, s_p=o1)
        self.outcome_log.append((a, "fuse", p1))
        self.outcome_log.append((b, "fuse", p2))
        return (p1, p2)

    def _fuse_cz_class(self, a, b, na, nb, o1, o2) -> None:
        """Measure {X_a Z_b, Z_a X_b}: bipartite join of the neighbourhoods."""
        self._delete_vertex(a)
        self._delete_vertex(b)
        for u in sorted(na):
            for v in sorted(nb):
                self._adj[u].add(v)
                self._adj[v].add(u)
        if o1 < 0:
            for v in sorted(nb):
                self._compose_graph_side(v, cl.Z)
        if o2 < 0:
            for u in sorted(na):
                self._compose_graph_side(u, cl.Z)

    def _fuse_bell_class(self, a, b, na, nb, s_x, s_p) -> None:
        """Measure {X_a X_b, Z_a Z_b}: merge the vertices, then X-measure."""
        # contract b into a; the merged vertex is a redundantly encoded qubit
        # whose logical X is the measured X_a X_b
        self._delete_vertex(b)
        self._set_frame(a, cl.ID)
        for v in sorted(nb):
            self._adj[a].add(v)
            self._adj[v].add(a)
        if s_p < 0:
            for v in sorted(nb):
                self._compose_graph_side(v, cl.Z)
        self._measure_graph_pauli(a, "X", s_x)

    # -- stabilizers and dense oracle ---------------------------------------

    def stabilizer_generators(self) -> list[tuple[int, dict[int, str]]]:
        """One signed Pauli string per live vertex, frames folded in."""
        gens = []
        for v in sorted(self._adj):
            letters = {v: "X"}
            for u in self._adj[v]:
                letters[u] = "Z"
            sign = 1
            out = {}
            for w, p in letters.items():
                q, s = cl.conj_out(self.frame.get(w, cl.ID), p)
                out[w] = q
                sign *= s
            gens.append((sign, out))
        return gens

    def to_statevector(self, max_qubits: int = DEFAULT_STATEVECTOR_CAP) -> np.ndarray:
        """Dense amplitudes over sorted vertices (test oracle)."""
        order = sorted(self._adj)
        n = len(order)
        if n > max_qubits:
            raise ValueError(f"{n} qubits exceeds the statevector cap {max_qubits}")
        psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
        pos = {v: i for i, v in enumerate(order)}
        idx = np.arange(2**n)
        for e in self.edges():
            i, j = (pos[v] for v in e)
            mask = ((idx >> (n - 1 - i)) & 1) & ((idx >> (n - 1 - j)) & 1)
            psi[mask == 1] *= -1.0
        for v, f in self.frame.items():
            psi = apply_single_qubit(psi, n, pos[v], cl.MATRICES[f])
        return psi


def new_graph(n: int) -> GraphState:
    """n isolated |+> vertices, ids 0..n-1."""
    if n < 0:
        raise ValueError("vertex count must be non-negative")
    g = GraphState()
    for v in range(n):
        g.add_vertex(v)
    return g


# -- dense helpers (oracle side) --------------------------------------------

_PAULI_MATS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def apply_single_qubit(psi: np.ndarray, n: int, pos: int, mat: np.ndarray) -> np.ndarray:
    t = psi.reshape((2,) * n)
    t = np.tensordot(mat, t, axes=([1], [pos]))
    t = np.moveaxis(t, 0, pos)
    return t.reshape(-1)


def apply_pauli_string(psi: np.ndarray, n: int, letters: dict[int, str]) -> np.ndarray:
    out = psi
    for pos, p in letters.items():
        out = apply_single_qubit(out, n, pos, _PAULI_MATS[p])
    return out


def pauli_expectation(psi: np.ndarray, n: int, letters: dict[int, str]) -> complex:
    return complex(np.vdot(psi, apply_pauli_string(psi, n, letters)))


def project_measure(
    psi: np.ndarray, n: int, pos: int, basis: str | RotatedBasis, outcome: int
) -> tuple[np.ndarray, float]:
    """Project a qubit onto a +/-1 outcome, drop it, renormalize.

    Returns (state on n-1 qubits, outcome probability).
    """
    if isinstance(basis, RotatedBasis):
        mat = basis.matrix()
    else:
        mat = _PAULI_MATS[basis]
    vals, vecs = np.linalg.eigh(mat)
    eig = vecs[:, np.argmin(np.abs(vals - outcome))]
    t = psi.reshape((2,) * n)
    reduced = np.tensordot(eig.conj(), t, axes=([0], [pos])).reshape(-1)
    prob = float(np.vdot(reduced, reduced).real)
    if prob > 1e-12:
        reduced = reduced / np.sqrt(prob)
    return reduced, prob


def states_equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    if a.shape != b.shape:
        return False
    return abs(abs(np.vdot(a, b)) - 1.0) < tol
