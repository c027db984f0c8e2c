"""Tensor-network evaluation of diagrams.

Every vertex becomes a small tensor (one binary index per incident wire);
edges are contractions.  A greedy planner picks a deterministic pairwise
contraction order that keeps intermediate ranks small.  Two modes:

* ``"exact"`` -- numpy object arrays holding :class:`ExactScalar`; results
  are bit-for-bit reproducible elements of Q(i)[sqrt(2)].
* ``"float"`` -- complex128 arrays (needed for irrational phases).

Matrix convention: inputs index columns and outputs index rows; wire 0 is
the most significant bit on each side.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .exact import ExactScalar
from .graph import B, Diagram, H, VertexData, X, Z, phase_is_exact

__all__ = [
    "Tensor",
    "ContractionPlan",
    "RankCapExceeded",
    "vertex_tensor",
    "plan_contraction",
    "eval_diagram",
    "to_matrix",
    "plug_basis",
]

DEFAULT_RANK_CAP_EXACT = 24
DEFAULT_RANK_CAP_FLOAT = 28


class RankCapExceeded(RuntimeError):
    """Raised when no contraction order stays under the rank cap."""


def _rank_cap(mode: str, rank_cap: Optional[int]) -> int:
    if rank_cap is not None:
        return rank_cap
    env = os.environ.get("SPINNET_RANK_CAP")
    if env:
        return int(env)
    return DEFAULT_RANK_CAP_EXACT if mode == "exact" else DEFAULT_RANK_CAP_FLOAT


# -- vertex tensors -------------------------------------------------------


def _exact_phase_factor(phase: Fraction) -> ExactScalar:
    """exp(i * phase * pi) for phase with denominator dividing 4."""
    k = 4 * Fraction(phase)
    if k.denominator != 1:
        raise ValueError(f"phase {phase}*pi has no exact representation")
    return ExactScalar.phase_quarter(k.numerator)


def vertex_tensor(data: VertexData, degree: int, mode: str = "exact") -> np.ndarray:
    """The tensor of one vertex with the given number of incident wires."""
    shape = (2,) * degree
    if mode == "exact":
        if data.kind in (Z, X) and not phase_is_exact(data.phase):
            raise ValueError(
                f"phase {data.phase}*pi requires float mode"
            )
        if data.kind == Z:
            t = np.full(shape, ExactScalar.zero(), dtype=object)
            t[(0,) * degree] = t[(0,) * degree] + ExactScalar.one()
            t[(1,) * degree] = t[(1,) * degree] + _exact_phase_factor(data.phase)
            return t
        if data.kind == X:
            ph = _exact_phase_factor(data.phase)
            norm = ExactScalar.inv_sqrt2() ** degree
            even = norm * (ExactScalar.one() + ph)
            odd = norm * (ExactScalar.one() - ph)
            t = np.empty(shape, dtype=object)
            for idx in itertools.product((0, 1), repeat=degree):
                t[idx] = even if sum(idx) % 2 == 0 else odd
            return t
        if data.kind == H:
            t = np.full(shape, ExactScalar.one(), dtype=object)
            t[(1,) * degree] = data.label
            return t
        raise ValueError(f"no tensor for vertex kind {data.kind!r}")
    if mode == "float":
        if data.kind == Z:
            t = np.zeros(shape, dtype=complex)
            t[(0,) * degree] += 1.0
            t[(1,) * degree] += np.exp(1j * np.pi * float(data.phase))
            return t
        if data.kind == X:
            ph = np.exp(1j * np.pi * float(data.phase))
            norm = (0.5 ** 0.5) ** degree
            t = np.empty(shape, dtype=complex)
            for idx in itertools.product((0, 1), repeat=degree):
                t[idx] = norm * (1 + ph if sum(idx) % 2 == 0 else 1 - ph)
            return t
        if data.kind == H:
            t = np.ones(shape, dtype=complex)
            t[(1,) * degree] = data.label.to_complex()
            return t
        raise ValueError(f"no tensor for vertex kind {data.kind!r}")
    raise ValueError(f"unknown mode {mode!r}")


# -- node skeleton --------------------------------------------------------

# Port labels: ("e", edge_index) for contracted wires,
#              ("open", boundary_vertex_id) for dangling boundary wires.


def _node_skeleton(d: Diagram) -> dict[int, list[tuple]]:
    """Map node key -> ordered port labels.

    Node keys: vertex id for spiders/H-boxes; ``-1 - boundary_id`` for the
    identity node inserted on a wire running between two boundaries.
    """
    boundary = {v for v, data in d.vertices.items() if data.kind == B}
    nodes: dict[int, list[tuple]] = {
        v: [] for v, data in d.vertices.items() if data.kind != B
    }
    for i, (a, b) in enumerate(d.edges):
        a_b, b_b = a in boundary, b in boundary
        if a_b and b_b:
            nodes[-1 - min(a, b)] = [("open", a), ("open", b)]
        elif a_b:
            nodes[b].append(("open", a))
        elif b_b:
            nodes[a].append(("open", b))
        elif a == b:
            nodes[a].extend([("e", i), ("e", i)])
        else:
            nodes[a].append(("e", i))
            nodes[b].append(("e", i))
    return nodes


@dataclass
class ContractionPlan:
    """A deterministic pairwise merge order with its cost accounting."""

    steps: list[tuple[int, int]] = field(default_factory=list)
    peak_rank: int = 0
    cost: int = 0  # sum over steps of 2**(number of distinct indices involved)


def plan_contraction(d: Diagram, rank_cap: Optional[int] = None, mode: str = "exact") -> ContractionPlan:
    """Greedy pairwise contraction order minimising intermediate rank.

    At each step the pair of connected nodes whose merge has the smallest
    resulting rank is chosen (ties: smaller merge cost, then smallest node
    keys).  Raises :class:`RankCapExceeded` if the peak rank exceeds the cap.
    """
    cap = _rank_cap(mode, rank_cap)
    nodes = {k: list(ports) for k, ports in _node_skeleton(d).items()}
    # Self-loop ports contract within one node before planning proper.
    for k, ports in nodes.items():
        seen: dict[tuple, int] = {}
        for p in list(ports):
            if p[0] == "e":
                seen[p] = seen.get(p, 0) + 1
        for p, cnt in seen.items():
            if cnt == 2:
                nodes[k] = [q for q in nodes[k] if q != p]
    plan = ContractionPlan()
    plan.peak_rank = max((len(p) for p in nodes.values()), default=0)
    if plan.peak_rank > cap:
        raise RankCapExceeded(
            f"initial vertex rank {plan.peak_rank} exceeds cap {cap}"
        )
    while len(nodes) > 1:
        best = None
        keys = sorted(nodes)
        # Prefer pairs that share an edge; fall back to outer products.
        candidates = []
        edge_owner: dict[tuple, int] = {}
        for k in keys:
            for p in nodes[k]:
                if p[0] == "e":
                    if p in edge_owner and edge_owner[p] != k:
                        candidates.append((edge_owner[p], k))
                    else:
                        edge_owner[p] = k
        if not candidates:
            candidates = [(keys[0], k) for k in keys[1:]]
        for k1, k2 in candidates:
            p1, p2 = nodes[k1], nodes[k2]
            shared = sum(1 for p in set(p1) & set(p2) if p[0] == "e")
            merged_rank = len(p1) + len(p2) - 2 * shared
            step_cost = 2 ** (len(p1) + len(p2) - shared)
            key = (merged_rank, step_cost, min(k1, k2), max(k1, k2))
            if best is None or key < best[0]:
                best = (key, k1, k2)
        _, k1, k2 = best
        p1, p2 = nodes.pop(k1), nodes.pop(k2)
        shared = set(p1) & set(p2)
        shared = {p for p in shared if p[0] == "e"}
        merged = [p for p in p1 if p not in shared] + [p for p in p2 if p not in shared]
        if len(merged) > cap:
            raise RankCapExceeded(
                f"contraction needs intermediate rank {len(merged)} > cap {cap}; "
                "raise the cap (SPINNET_RANK_CAP) or simplify the diagram first"
            )
        knew = min(k1, k2)
        nodes[knew] = merged
        plan.steps.append((min(k1, k2), max(k1, k2)))
        plan.peak_rank = max(plan.peak_rank, len(merged))
        plan.cost += 2 ** (len(p1) + len(p2) - len(shared))
    return plan


# -- evaluation -----------------------------------------------------------


@dataclass
class Tensor:
    """Evaluation result: data axes follow ``inputs + outputs`` wire order."""

    data: np.ndarray
    n_inputs: int
    n_outputs: int
    mode: str

    def to_numpy(self) -> np.ndarray:
        """complex128 view of the data."""
        if self.mode == "float":
            return self.data
        flat = np.array(
            [x.to_complex() if isinstance(x, ExactScalar) else complex(x) for x in self.data.reshape(-1)],
            dtype=complex,
        )
        return flat.reshape(self.data.shape)

    def to_matrix(self) -> np.ndarray:
        """Matrix with rows indexed by outputs, columns by inputs (wire 0 = MSB)."""
        ni, no = self.n_inputs, self.n_outputs
        perm = list(range(ni, ni + no)) + list(range(ni))
        return np.transpose(self.data, axes=perm).reshape(2 ** no, 2 ** ni)

    def scalar_value(self):
        if self.n_inputs or self.n_outputs:
            raise ValueError("tensor has open wires")
        return self.data.reshape(()).item() if self.data.shape == () else self.data.item()


def _tensordot(a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
    if axes == 0 or axes == ([], []):
        return np.tensordot(a, b, axes=0)
    return np.tensordot(a, b, axes=axes)


def eval_diagram(
    d: Diagram,
    mode: str = "exact",
    plan: Optional[ContractionPlan] = None,
    rank_cap: Optional[int] = None,
) -> Tensor:
    """Contract a diagram to its tensor.

    In exact mode the entries are :class:`ExactScalar`; float mode returns
    complex128.  The result axes are ordered inputs-then-outputs.
    """
    if plan is None:
        plan = plan_contraction(d, rank_cap=rank_cap, mode=mode)
    skeleton = _node_skeleton(d)
    tensors: dict[int, tuple[list[tuple], np.ndarray]] = {}
    one = ExactScalar.one() if mode == "exact" else 1.0 + 0j
    for k, ports in skeleton.items():
        if k < 0:  # identity node on a boundary-boundary wire
            if mode == "exact":
                t = np.full((2, 2), ExactScalar.zero(), dtype=object)
                t[0, 0] = ExactScalar.one()
                t[1, 1] = ExactScalar.one()
            else:
                t = np.eye(2, dtype=complex)
        else:
            t = vertex_tensor(d.vertices[k], len(ports), mode)
        # Trace out self-loop port pairs.
        ports = list(ports)
        while True:
            dup = None
            for i, p in enumerate(ports):
                if p[0] == "e" and p in ports[i + 1:]:
                    dup = (i, i + 1 + ports[i + 1:].index(p))
                    break
            if dup is None:
                break
            i, j = dup
            t = np.asarray(np.trace(t, axis1=i, axis2=j))
            ports = [p for n, p in enumerate(ports) if n not in (i, j)]
        tensors[k] = (ports, t)
    for k1, k2 in plan.steps:
        ports1, t1 = tensors.pop(k1)
        ports2, t2 = tensors.pop(k2)
        shared = [p for p in ports1 if p[0] == "e" and p in ports2]
        ax1 = [ports1.index(p) for p in shared]
        # ports may repeat only via self-loops, already traced, so index() is safe
        ax2 = [ports2.index(p) for p in shared]
        t = _tensordot(t1, t2, axes=(ax1, ax2)) if shared else _tensordot(t1, t2, 0)
        merged = [p for p in ports1 if p not in shared] + [p for p in ports2 if p not in shared]
        tensors[min(k1, k2)] = (merged, t)
    # Combine any remaining disconnected components (plan covers them, but a
    # diagram with zero vertices lands here too).
    items = [tensors[k] for k in sorted(tensors)]
    if items:
        ports, t = items[0]
        for p2, t2 in items[1:]:
            t = _tensordot(t, t2, 0)
            ports = ports + p2
    else:
        ports, t = [], np.array(one)
    scalar = d.scalar if mode == "exact" else d.scalar.to_complex()
    if t.shape == ():
        t = t * scalar if mode == "float" else np.array(t.item() * scalar, dtype=object)
    else:
        t = t * scalar
    # Reorder open ports to the diagram's boundary order.
    order = [("open", v) for v in list(d.inputs) + list(d.outputs)]
    if sorted(map(repr, ports)) != sorted(map(repr, order)):
        raise ValueError("boundary wires do not match open ports")
    perm = [ports.index(p) for p in order]
    t = np.transpose(t, axes=perm) if perm else t
    return Tensor(t, len(d.inputs), len(d.outputs), mode)


def to_matrix(d: Diagram, mode: str = "exact", **kw) -> np.ndarray:
    """Evaluate and reshape to the (outputs x inputs) matrix."""
    return eval_diagram(d, mode=mode, **kw).to_matrix()


# -- basis plugging -------------------------------------------------------


def plug_basis(
    d: Diagram,
    assignment: dict[int, int],
    normalize: bool = False,
) -> Diagram:
    """Plug computational basis states/effects into boundary wires.

    ``assignment`` maps boundary vertex ids to bits.  Each plugged boundary
    becomes a phase-0 (bit 0) or phase-pi (bit 1) X-spider, i.e. the
    unnormalised state sqrt(2)|0> or sqrt(2)|1>.  With ``normalize=True``
    the diagram scalar is divided by sqrt(2) per plug, yielding the exact
    basis amplitude instead of the raw diagram value.
    """
    out = d.copy()
    for v, bit in assignment.items():
        if v not in out.vertices or out.vertices[v].kind != B:
            raise ValueError(f"vertex {v} is not a boundary")
        if bit not in (0, 1):
            raise ValueError(f"bit for wire {v} must be 0 or 1")
        out.vertices[v] = VertexData(X, Fraction(bit))
        out.inputs = [w for w in out.inputs if w != v]
        out.outputs = [w for w in out.outputs if w != v]
        if normalize:
            out.mul_scalar(ExactScalar.inv_sqrt2())
    return out
