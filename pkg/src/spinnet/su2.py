"""Diagram builders for SU(2) recoupling objects.

The construction realises spin-j systems as symmetrised bundles of 2j
qubit wires:

* :func:`cswap_gadget` -- a Fredkin gate with the control post-selected.
* :func:`crown` -- the control-state gadget steering one symmetrisation
  stage; stage i superposes the all-zero pattern with the i-1 one-hot
  patterns on i-1 control wires.
* :func:`symmetriser` -- the projector onto the symmetric subspace of n
  qubit wires, built from crowns and CSWAPs; evaluates exactly to S_n.
* :func:`yutsis_link` / :func:`connector` -- the edge operator
  sum_m (-1)^(j-m) |j m><j m| on a 2j-wire bundle.
* :func:`vertex_3jm`, :func:`vertex_4jm`, :func:`assemble_network`,
  :func:`network_6j`, :func:`theta_network`, :func:`loop_network` --
  intertwiner vertices and closed recoupling networks.

Builders return raw diagrams whose exact evaluation matches the
unnormalised diagrammatic value, together with a :class:`CorrectionFactor`
(products of lambda_n bundle normalisations, 1/N vertex normalisations and
basis-plug norms) that rescales raw values to Wigner-symbol conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exact import (
    ExactScalar,
    HalfInteger,
    RadicalNumber,
    factorial,
    half_integer_range,
    sqrt_rational,
)
from .graph import B, Diagram, X, Z
from .tensor import eval_diagram, plug_basis
from .wigner import SpinLike, _hi, triangle_ok

__all__ = [
    "CorrectionFactor",
    "VertexSpec",
    "NodeSpec",
    "EdgeSpec",
    "OpenLegSpec",
    "NetworkSpec",
    "cswap_gadget",
    "crown",
    "symmetriser",
    "lambda_n",
    "binor_N",
    "symmetric_isometry",
    "yutsis_link",
    "connector",
    "vertex_3jm",
    "vertex_4jm",
    "assemble_network",
    "network_6j",
    "theta_network",
    "loop_network",
    "plug_leg_state",
    "plug_vertex_arguments",
    "exact_matrix",
    "project_to_spin_basis",
    "corrected_spin_matrix",
    "check_su2_invariance",
    "check_symmetriser_commutation",
]

_PI = Fraction(1)
_INV_SQRT2 = ExactScalar.inv_sqrt2()


# -- bookkeeping ----------------------------------------------------------


@dataclass
class CorrectionFactor:
    """Multiplicative correction from raw diagram value to symbol value."""

    lambdas: RadicalNumber = field(default_factory=RadicalNumber.one)
    norms: RadicalNumber = field(default_factory=RadicalNumber.one)
    plug_norm: RadicalNumber = field(default_factory=RadicalNumber.one)
    notes: list[str] = field(default_factory=list)

    @property
    def value(self) -> RadicalNumber:
        return self.lambdas * self.norms * self.plug_norm

    def times_lambda(self, j: SpinLike, note: str) -> None:
        self.lambdas = self.lambdas * lambda_n(_hi(j).twice)
        self.notes.append(note)

    def times_inv_norm(self, j1: SpinLike, j2: SpinLike, j3: SpinLike) -> None:
        self.norms = self.norms / binor_N(j1, j2, j3)
        self.notes.append(f"1/N({j1},{j2},{j3})")


@dataclass
class VertexSpec:
    """A 3-valent vertex: three spins plus an 'i'/'o' orientation per leg."""

    spins: tuple[SpinLike, SpinLike, SpinLike]
    orientation: str = "iio"

    def __post_init__(self) -> None:
        if len(self.spins) != 3:
            raise ValueError("VertexSpec needs exactly three spins")
        if len(self.orientation) != 3 or set(self.orientation) - {"i", "o"}:
            raise ValueError("orientation must be three letters from 'io'")
        if not triangle_ok(*self.spins):
            raise ValueError(f"inadmissible spin triad {self.spins}")


@dataclass
class NodeSpec:
    """A network vertex (three legs, referenced by index 0..2)."""

    spins: tuple[SpinLike, SpinLike, SpinLike]


@dataclass
class EdgeSpec:
    """Internal edge from (tail node, leg) to (head node, leg); the arrow
    points tail -> head."""

    tail: tuple[int, int]
    head: tuple[int, int]
    spin: SpinLike


@dataclass
class OpenLegSpec:
    """A dangling leg of a network node; orientation 'i' means ingoing."""

    node: int
    leg: int
    spin: SpinLike
    orientation: str = "o"


@dataclass
class NetworkSpec:
    nodes: list[NodeSpec]
    edges: list[EdgeSpec]
    open_legs: list[OpenLegSpec] = field(default_factory=list)


# -- scalar factors -------------------------------------------------------


def lambda_n(n: int) -> RadicalNumber:
    """Normalisation of the n-wire symmetriser construction.

    lambda_n = 2^(n(n-1)/4) / n! * (1/2)^(beta + sum_{i=4}^n (2^ceil(log2 i) - 1))
    with beta = 1 for n >= 3 and 0 otherwise.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= 1:
        return RadicalNumber.one()
    e = n * (n - 1) // 2  # one sqrt(2) per CSWAP
    beta = 1 if n >= 3 else 0
    halves = beta + sum(2 ** math.ceil(math.log2(i)) - 1 for i in range(4, n + 1))
    q = Fraction(2 ** (e // 2), factorial(n) * 2 ** halves)
    out = RadicalNumber.from_rational(q)
    if e % 2:
        out = out * RadicalNumber({2: 1})
    return out


def binor_N(j1: SpinLike, j2: SpinLike, j3: SpinLike) -> RadicalNumber:
    """Vertex normalisation N = sqrt((J+1)! prod (J-2ji)! / prod (2ji)!)
    where J = j1+j2+j3."""
    t1, t2, t3 = _hi(j1).twice, _hi(j2).twice, _hi(j3).twice
    if not triangle_ok(j1, j2, j3):
        raise ValueError(f"inadmissible spin triad ({j1}, {j2}, {j3})")
    J = (t1 + t2 + t3) // 2
    num = (
        factorial(J + 1)
        * factorial((-t1 + t2 + t3) // 2)
        * factorial((t1 - t2 + t3) // 2)
        * factorial((t1 + t2 - t3) // 2)
    )
    den = factorial(t1) * factorial(t2) * factorial(t3)
    return sqrt_rational(Fraction(num, den))


def symmetric_isometry(j: SpinLike) -> list[list[RadicalNumber]]:
    """The (2j+1) x 2^(2j) isometry from qubit wires to the spin-j space.

    Rows are labelled m = j .. -j (decreasing); the entry at a bit string
    with j-m ones is sqrt((j+m)!(j-m)!/(2j)!); |1/2, +1/2> is |0>.
    """
    tj = _hi(j).twice
    n = tj  # number of qubit wires
    rows = []
    for m in half_integer_range(_hi(j)):
        k = (tj - m.twice) // 2  # number of ones
        amp = sqrt_rational(Fraction(factorial((tj + m.twice) // 2) * factorial(k), factorial(tj)))
        row = []
        for bits in range(2 ** n):
            row.append(amp if bin(bits).count("1") == k else RadicalNumber.zero())
        rows.append(row)
    return rows


# -- in-place construction helpers ---------------------------------------
#
# A "port" is a vertex id that expects exactly one more incident edge.


def _add_cswap(d: Diagram, c: int, t1: int, t2: int) -> tuple[int, int]:
    """Fredkin gate exchanging the t1/t2 wires when the control wire carries
    |1>; the control is consumed.  Returns the outgoing (t1, t2) ports.

    Realised as CNOT(t1->t2) . CCNOT(c,t2 -> t1) . CNOT(t1->t2) with the
    doubly-controlled phase as an H-box; carries a 1/sqrt(2) calibration so
    a bare gadget matches the postselected Fredkin matrix exactly.
    """
    z1 = d.add_z()  # first CNOT control, on t1
    x1 = d.add_x()  # first CNOT target, on t2
    d.add_edge(t1, z1)
    d.add_edge(t2, x1)
    d.add_edge(z1, x1)
    ha = d.add_h()  # Hadamard pair turning a CCZ into a CCNOT on t1
    zt = d.add_z()
    hb = d.add_h()
    d.add_edge(z1, ha)
    d.add_edge(ha, zt)
    d.add_edge(zt, hb)
    zc = d.add_z()  # control tap
    z2 = d.add_z()  # t2 tap
    hbox = d.add_h()
    d.add_edge(c, zc)
    d.add_edge(x1, z2)
    d.add_edge(zc, hbox)
    d.add_edge(z2, hbox)
    d.add_edge(zt, hbox)
    z3 = d.add_z()  # second CNOT control, on t1
    x2 = d.add_x()  # second CNOT target, on t2
    d.add_edge(hb, z3)
    d.add_edge(z2, x2)
    d.add_edge(z3, x2)
    d.mul_scalar(_INV_SQRT2)
    return z3, x2


def _add_crown(d: Diagram, stage: int) -> list[int]:
    """Control states for symmetrisation stage ``stage`` (>= 2).

    Returns stage-1 ports carrying the equal superposition of the all-zero
    control pattern and the stage-1 one-hot patterns.
    """
    if stage < 2:
        raise ValueError("stage must be >= 2")
    n = stage - 1  # number of control wires
    if n == 1:
        return [d.add_z()]
    if stage == 3:
        za, zb = d.add_z(), d.add_z()
        h = d.add_h()
        tap = d.add_z()
        d.add_edge(za, h)
        d.add_edge(zb, h)
        d.add_edge(tap, h)
        return [za, zb]
    k = math.ceil(math.log2(stage))
    tops = [d.add_z() for _ in range(k)]
    controls: list[int] = []
    patterns = list(range(1, 2 ** k))
    for g in patterns:
        hbox = d.add_h()
        for t in range(k):
            bit = (g >> (k - 1 - t)) & 1
            xs = d.add_x(Fraction(0) if bit else _PI)
            d.add_edge(tops[t], xs)
            d.add_edge(xs, hbox)
        if len(controls) < n:
            had = d.add_h()
            d.add_edge(hbox, had)
            controls.append(had)
        else:
            tap = d.add_z()
            d.add_edge(hbox, tap)
    return controls


def _add_symmetriser(d: Diagram, ports: list[int]) -> list[int]:
    """Symmetriser structure over the given wire ports (calibration scalars
    folded in by :func:`_add_cswap`; the lambda_n factor is NOT included)."""
    ports = list(ports)
    n = len(ports)
    for stage in range(2, n + 1):
        controls = _add_crown(d, stage)
        for k in range(stage - 1):
            ports[k], ports[stage - 1] = _add_cswap(d, controls[k], ports[k], ports[stage - 1])
    return ports


def _add_wire_op(d: Diagram, port: int, kind: str, phase: Fraction) -> int:
    v = d.add_z(phase) if kind == Z else d.add_x(phase)
    d.add_edge(port, v)
    return v


def _add_cup(d: Diagram) -> tuple[int, int]:
    """A singlet pair |10> - |01>: the first returned port carries the |1>."""
    x = d.add_x(_PI)
    z = d.add_z(_PI)
    d.add_edge(x, z)
    return x, z


# -- public gadgets -------------------------------------------------------


def cswap_gadget() -> Diagram:
    """Postselected Fredkin gate: 3 inputs (control, t1, t2), 2 outputs."""
    d = Diagram()
    c, t1, t2 = d.add_input(), d.add_input(), d.add_input()
    o1, o2 = _add_cswap(d, c, t1, t2)
    b1, b2 = d.add_output(), d.add_output()
    d.add_edge(o1, b1)
    d.add_edge(o2, b2)
    return d


def crown(stage: int) -> Diagram:
    """The stage-th control-state gadget as a standalone diagram with
    stage-1 output wires."""
    d = Diagram()
    for p in _add_crown(d, stage):
        b = d.add_output()
        d.add_edge(p, b)
    return d


def symmetriser(n: int) -> Diagram:
    """n-wire symmetriser; evaluates exactly to the projector S_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    d = Diagram()
    ports = [d.add_input() for _ in range(n)]
    ports = _add_symmetriser(d, ports)
    for p in ports:
        b = d.add_output()
        d.add_edge(p, b)
    d.mul_scalar(lambda_n(n).to_exact_scalar())
    return d


def yutsis_link(j: SpinLike) -> Diagram:
    """The edge operator sum_m (-1)^(j-m) |j m><j m| on a 2j-wire bundle."""
    tj = _hi(j).twice
    d = Diagram()
    ports = [d.add_input() for _ in range(tj)]
    ports = _add_symmetriser(d, ports)
    for p in ports:
        zp = _add_wire_op(d, p, Z, _PI)
        b = d.add_output()
        d.add_edge(zp, b)
    d.mul_scalar(lambda_n(tj).to_exact_scalar())
    return d


def connector(j: SpinLike) -> Diagram:
    """Alias for :func:`yutsis_link`: the operator inserted on a summed
    internal edge of a network."""
    return yutsis_link(j)


# -- vertices -------------------------------------------------------------


def _strand_counts(js: Sequence[HalfInteger]) -> tuple[int, int, int]:
    t1, t2, t3 = (j.twice for j in js)
    n12 = (t1 + t2 - t3) // 2
    n13 = (t1 + t3 - t2) // 2
    n23 = (t2 + t3 - t1) // 2
    return n12, n13, n23


def _vertex_sign(js: Sequence[HalfInteger]) -> int:
    """Overall sign fixing the vertex phase convention to match the
    standard 3jm symbol.

    With the cup-end convention of :func:`_add_vertex_core` (lower leg
    index takes the |1> end) the construction differs from the 3jm tensor
    by exactly (-1)^(2*j2); calibrated against exact vertex matrices over
    many triads and orientations.
    """
    return -1 if js[1].twice % 2 else 1


def _add_vertex_core(d: Diagram, js: Sequence[HalfInteger]) -> list[list[int]]:
    """Singlet cups realising a bare 3-valent vertex; returns per-leg ports
    (2j_k ports for leg k)."""
    if not triangle_ok(*js):
        raise ValueError(f"inadmissible spin triad {tuple(str(j) for j in js)}")
    n12, n13, n23 = _strand_counts(js)
    legs: list[list[Optional[int]]] = [
        [None] * (n12 + n13),
        [None] * (n12 + n23),
        [None] * (n13 + n23),
    ]
    # Pairing layout: leg1 = [12-strands | 13-strands], leg2 = [12 | 23],
    # leg3 = [13 | 23].  The lower-numbered leg takes the |1> cup end.
    for k in range(n12):
        a, b = _add_cup(d)
        legs[0][k] = a
        legs[1][k] = b
    for k in range(n13):
        a, b = _add_cup(d)
        legs[0][n12 + k] = a
        legs[2][k] = b
    for k in range(n23):
        a, b = _add_cup(d)
        legs[1][n12 + k] = a
        legs[2][n13 + k] = b
    return [list(leg) for leg in legs]


def _finish_open_leg(
    d: Diagram, ports: list[int], ingoing: bool
) -> list[int]:
    """Symmetrise a leg's cup ports and wrap ingoing legs with X(pi)."""
    ports = _add_symmetriser(d, ports)
    if ingoing:
        ports = [_add_wire_op(d, p, X, _PI) for p in ports]
    boundaries = []
    for p in ports:
        b = d.add_boundary()
        d.add_edge(p, b)
        boundaries.append(b)
    return boundaries


def _connect_internal_edge(d: Diagram, tail_ports: list[int], head_ports: list[int]) -> None:
    """Summed edge between two vertex cores: Z(pi) metric per wire, one
    symmetriser, X(pi) arrow per wire on the head side."""
    ports = [_add_wire_op(d, p, Z, _PI) for p in tail_ports]
    ports = _add_symmetriser(d, ports)
    ports = [_add_wire_op(d, p, X, _PI) for p in ports]
    for p, h in zip(ports, head_ports):
        d.add_edge(p, h)


def vertex_3jm(spec: VertexSpec) -> tuple[Diagram, CorrectionFactor]:
    """Diagram for a 3-valent intertwiner vertex.

    Boundary wires: 2j per leg; ingoing legs contribute inputs, outgoing
    legs outputs, both in leg order.  The corrected spin-basis matrix
    (raw evaluation, projected with :func:`symmetric_isometry` and scaled
    by the correction value) equals the 3jm matrix of
    :func:`spinnet.wigner.yutsis_matrix_3`.
    """
    js = [_hi(j) for j in spec.spins]
    d = Diagram()
    leg_ports = _add_vertex_core(d, js)
    ins: list[int] = []
    outs: list[int] = []
    for k, (ports, o) in enumerate(zip(leg_ports, spec.orientation)):
        bounds = _finish_open_leg(d, ports, ingoing=(o == "i"))
        (ins if o == "i" else outs).extend(bounds)
    d.inputs = ins
    d.outputs = outs
    d.mul_scalar(ExactScalar(_vertex_sign(js)))
    corr = CorrectionFactor()
    for j in js:
        corr.times_lambda(j, f"lambda({j})")
    corr.times_inv_norm(*js)
    return d, corr


def vertex_4jm(
    spins: Sequence[SpinLike], j: SpinLike, orientation: str = "iioo"
) -> tuple[Diagram, CorrectionFactor]:
    """4-valent intertwiner with channel spin j: two 3-valent vertices
    joined by a summed internal edge.

    Legs 1,2 sit on the first vertex and legs 3,4 on the second; boundary
    wires follow leg order 1..4.
    """
    if len(spins) != 4 or len(orientation) != 4 or set(orientation) - {"i", "o"}:
        raise ValueError("need 4 spins and an orientation like 'iioo'")
    js = [_hi(x) for x in spins]
    jc = _hi(j)
    spec = NetworkSpec(
        nodes=[NodeSpec((js[0], js[1], jc)), NodeSpec((jc, js[2], js[3]))],
        edges=[EdgeSpec(tail=(0, 2), head=(1, 0), spin=jc)],
        open_legs=[
            OpenLegSpec(0, 0, js[0], orientation[0]),
            OpenLegSpec(0, 1, js[1], orientation[1]),
            OpenLegSpec(1, 1, js[2], orientation[2]),
            OpenLegSpec(1, 2, js[3], orientation[3]),
        ],
    )
    return assemble_network(spec)


def assemble_network(spec: NetworkSpec) -> tuple[Diagram, CorrectionFactor]:
    """Assemble 3-valent vertex cores, summed internal edges and open legs
    into one diagram.

    Boundary wires follow the order of ``spec.open_legs``.  The correction
    collects one lambda per edge (internal or open), 1/N per vertex, and
    nothing else.
    """
    d = Diagram()
    corr = CorrectionFactor()
    cores: list[list[list[int]]] = []
    used: set[tuple[int, int]] = set()
    for node in spec.nodes:
        js = [_hi(x) for x in node.spins]
        cores.append(_add_vertex_core(d, js))
        d.mul_scalar(ExactScalar(_vertex_sign(js)))
        corr.times_inv_norm(*js)
    for e in spec.edges:
        tn, tl = e.tail
        hn, hl = e.head
        for ref in (e.tail, e.head):
            if ref in used:
                raise ValueError(f"leg {ref} used twice")
            used.add(ref)
        jc = _hi(e.spin)
        if (
            _hi(spec.nodes[tn].spins[tl]).twice != jc.twice
            or _hi(spec.nodes[hn].spins[hl]).twice != jc.twice
        ):
            raise ValueError(f"edge spin {e.spin} does not match node legs")
        _connect_internal_edge(d, cores[tn][tl], cores[hn][hl])
        corr.times_lambda(jc, f"lambda(edge {e.tail}->{e.head})")
    ins: list[int] = []
    outs: list[int] = []
    for leg in spec.open_legs:
        ref = (leg.node, leg.leg)
        if ref in used:
            raise ValueError(f"leg {ref} used twice")
        used.add(ref)
        jl = _hi(leg.spin)
        if _hi(spec.nodes[leg.node].spins[leg.leg]).twice != jl.twice:
            raise ValueError(f"open leg spin {leg.spin} does not match node")
        bounds = _finish_open_leg(d, cores[leg.node][leg.leg], ingoing=(leg.orientation == "i"))
        (ins if leg.orientation == "i" else outs).extend(bounds)
        corr.times_lambda(jl, f"lambda(open leg {ref})")
    for n, node in enumerate(spec.nodes):
        for l in range(3):
            if (n, l) not in used:
                raise ValueError(f"leg ({n}, {l}) of node {n} left unconnected")
    d.inputs = ins
    d.outputs = outs
    return d, corr


def network_6j(
    j1: SpinLike, j2: SpinLike, j3: SpinLike, j4: SpinLike, j5: SpinLike, j6: SpinLike
) -> tuple[Diagram, CorrectionFactor]:
    """The closed tetrahedral network whose corrected value is the 6j
    symbol {j1 j2 j3; j4 j5 j6}."""
    spec = NetworkSpec(
        nodes=[
            NodeSpec((j1, j2, j3)),
            NodeSpec((j1, j5, j6)),
            NodeSpec((j4, j2, j6)),
            NodeSpec((j3, j4, j5)),
        ],
        edges=[
            EdgeSpec(tail=(1, 0), head=(0, 0), spin=j1),
            EdgeSpec(tail=(2, 1), head=(0, 1), spin=j2),
            EdgeSpec(tail=(3, 0), head=(0, 2), spin=j3),
            EdgeSpec(tail=(2, 0), head=(3, 1), spin=j4),
            EdgeSpec(tail=(3, 2), head=(1, 1), spin=j5),
            EdgeSpec(tail=(1, 2), head=(2, 2), spin=j6),
        ],
    )
    return assemble_network(spec)


def theta_network(
    j1: SpinLike, j2: SpinLike, j3: SpinLike
) -> tuple[Diagram, CorrectionFactor]:
    """The closed two-vertex network; corrected value (-1)^(j1+j2+j3).

    The two vertices carry opposite cyclic orientation (the second one has
    its first two legs swapped), as required for the closed graph."""
    spec = NetworkSpec(
        nodes=[NodeSpec((j1, j2, j3)), NodeSpec((j2, j1, j3))],
        edges=[
            EdgeSpec(tail=(0, 0), head=(1, 1), spin=j1),
            EdgeSpec(tail=(0, 1), head=(1, 0), spin=j2),
            EdgeSpec(tail=(0, 2), head=(1, 2), spin=j3),
        ],
    )
    return assemble_network(spec)


def loop_network(j: SpinLike) -> tuple[Diagram, CorrectionFactor]:
    """A closed loop of spin j; corrected value 2j+1.

    The two half-edge decorations of a loop cancel pairwise, leaving the
    trace of the bundle symmetriser.
    """
    tj = _hi(j).twice
    d = Diagram()
    junctions = [d.add_z() for _ in range(tj)]
    ports = _add_symmetriser(d, list(junctions))
    for p, start in zip(ports, junctions):
        d.add_edge(p, start)
    corr = CorrectionFactor()
    corr.times_lambda(j, f"lambda(loop {j})")
    return d, corr


# -- basis plugs ----------------------------------------------------------


def plug_leg_state(
    d: Diagram,
    boundaries: Sequence[int],
    j: SpinLike,
    m: SpinLike,
    corr: Optional[CorrectionFactor] = None,
) -> Diagram:
    """Plug the spin state |j m> into a leg's 2j boundary wires.

    Supported: extremal m = +-j (product basis plugs) and the j=1, m=0
    symmetric state.  The plug norm (one 1/sqrt(2) per sqrt(2) of
    unnormalised plug amplitude) is recorded on ``corr`` when given.
    """
    jh, mh = _hi(j), _hi(m)
    if len(boundaries) != jh.twice:
        raise ValueError(f"leg of spin {jh} needs {jh.twice} wires")
    norm = RadicalNumber.one()
    if mh.twice == jh.twice:
        out = plug_basis(d, {b: 0 for b in boundaries})
        norm = sqrt_rational(Fraction(1, 2)) ** jh.twice
    elif mh.twice == -jh.twice:
        out = plug_basis(d, {b: 1 for b in boundaries})
        norm = sqrt_rational(Fraction(1, 2)) ** jh.twice
    elif jh.twice == 2 and mh.twice == 0:
        out = d.copy()
        xs = out.add_x(_PI)
        for b in boundaries:
            if out.vertices[b].kind != B:
                raise ValueError(f"vertex {b} is not a boundary")
            (edge_idx, other) = next(
                (i, bb if aa == b else aa)
                for i, (aa, bb) in enumerate(out.edges)
                if aa == b or bb == b
            )
            del out.edges[edge_idx]
            out.add_edge(other, xs)
            del out.vertices[b]
            out.inputs = [w for w in out.inputs if w != b]
            out.outputs = [w for w in out.outputs if w != b]
        norm = sqrt_rational(Fraction(1, 2))
    else:
        raise NotImplementedError(f"no plug gadget for |{jh} {mh}>")
    if corr is not None:
        corr.plug_norm = corr.plug_norm * norm
        corr.notes.append(f"plug |{jh},{mh}>")
    return out


# -- exact matrix helpers -------------------------------------------------


def exact_matrix(d: Diagram) -> list[list[RadicalNumber]]:
    """Exact (outputs x inputs) matrix of a diagram with real entries."""
    m = eval_diagram(d, mode="exact").to_matrix()
    return [[x.to_radical() for x in row] for row in m]


def _kron_isometry(spins: Sequence[HalfInteger]) -> list[list[RadicalNumber]]:
    mat = [[RadicalNumber.one()]]
    for j in spins:
        p = symmetric_isometry(j)
        mat = [
            [a * b for a in row1 for b in row2]
            for row1 in mat
            for row2 in p
        ]
    return mat


def project_to_spin_basis(
    qubit_matrix: Sequence[Sequence[RadicalNumber]],
    in_spins: Sequence[SpinLike],
    out_spins: Sequence[SpinLike],
) -> list[list[RadicalNumber]]:
    """Conjugate a qubit-wire matrix with symmetric isometries:
    P_out . M . P_in^T, giving the spin-basis matrix."""
    p_in = _kron_isometry([_hi(j) for j in in_spins])
    p_out = _kron_isometry([_hi(j) for j in out_spins])
    rows_q = len(qubit_matrix)
    cols_q = len(qubit_matrix[0]) if rows_q else 0
    if len(p_out[0]) != rows_q or len(p_in[0]) != cols_q:
        raise ValueError("isometry dimensions do not match the matrix")
    out = []
    for r in range(len(p_out)):
        row = []
        for c in range(len(p_in)):
            acc = RadicalNumber.zero()
            for a in range(rows_q):
                pa = p_out[r][a]
                if pa.is_zero():
                    continue
                for b in range(cols_q):
                    pb = p_in[c][b]
                    if pb.is_zero() or qubit_matrix[a][b].is_zero():
                        continue
                    acc = acc + pa * qubit_matrix[a][b] * pb
            row.append(acc)
        out.append(row)
    return out


def plug_vertex_arguments(
    d: Diagram,
    corr: CorrectionFactor,
    spins: Sequence[SpinLike],
    ms: Sequence[SpinLike],
    orientation: str,
) -> Diagram:
    """Plug magnetic arguments into every open leg of a vertex diagram.

    An ingoing leg with argument m receives the dual state |j, -m>, an
    outgoing leg receives |j, m>; the closed diagram's corrected value is
    then the symbol at (m1, ..., mk).  Plug norms accumulate on ``corr``.
    """
    ins, outs = list(d.inputs), list(d.outputs)
    for j, m, o in zip(spins, ms, orientation):
        tw = _hi(j).twice
        if o == "i":
            bounds, ins = ins[:tw], ins[tw:]
            d = plug_leg_state(d, bounds, j, -_hi(m), corr)
        else:
            bounds, outs = outs[:tw], outs[tw:]
            d = plug_leg_state(d, bounds, j, m, corr)
    if ins or outs:
        raise ValueError("leg spins do not cover all boundary wires")
    return d


def corrected_spin_matrix(
    d: Diagram,
    corr: CorrectionFactor,
    in_spins: Sequence[SpinLike],
    out_spins: Sequence[SpinLike],
) -> list[list[RadicalNumber]]:
    """Exact spin-basis matrix of a vertex diagram: the qubit-wire matrix
    conjugated with symmetric isometries and scaled by the correction.
    Matches :func:`spinnet.wigner.yutsis_matrix_3` / ``yutsis_matrix_4``."""
    q = exact_matrix(d)
    m = project_to_spin_basis(q, in_spins, out_spins)
    c = corr.value
    return [[c * x for x in row] for row in m]


# -- SU(2) invariance checks (float path) ---------------------------------


def _euler_unitary(alpha: float, beta: float, gamma: float) -> np.ndarray:
    rz = lambda t: np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])
    rx = lambda t: np.array(
        [
            [np.cos(t / 2), -1j * np.sin(t / 2)],
            [-1j * np.sin(t / 2), np.cos(t / 2)],
        ]
    )
    return rz(alpha) @ rx(beta) @ rz(gamma)


def check_su2_invariance(
    spec: VertexSpec, trials: int = 10, seed: int = 0
) -> float:
    """Max deviation of U_out^dagger M U_in from M over random group
    elements U = Rz Rx Rz; an intertwiner vertex gives ~0 (float path).

    Output wires carry the defining representation U; input wires sit
    behind the arrow decoration and a dual cup, so they carry the
    sigma_x-conjugated complex conjugate representation sigma_x U* sigma_x
    (equivalent to U by the spin-1/2 self-duality).
    """
    d, _ = vertex_3jm(spec)
    m = eval_diagram(d, mode="float").to_matrix()
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        a, b, g = rng.uniform(0, 2 * np.pi, size=3)
        u = _euler_unitary(a, b, g)
        u_dual = sx @ u.conj() @ sx
        u_in = np.array([[1.0 + 0j]])
        for _w in range(len(d.inputs)):
            u_in = np.kron(u_in, u_dual)
        u_out = np.array([[1.0 + 0j]])
        for _w in range(len(d.outputs)):
            u_out = np.kron(u_out, u)
        worst = max(worst, float(np.abs(u_out.conj().T @ m @ u_in - m).max()))
    return worst


def check_symmetriser_commutation(
    n: int, trials: int = 5, seed: int = 0
) -> float:
    """Max deviation between S_n . U^(x n) and U^(x n) . S_n, evaluated
    through the float diagram path with irrational spider phases."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        a, b, g = rng.uniform(0.0, 2.0, size=3)  # phases in units of pi
        sides = []
        for before in (True, False):
            d = symmetriser(n)
            d = d.copy()
            wires = d.inputs if before else d.outputs
            for w in wires:
                # The same operator Z(g) X(b) Z(a) on every wire; the chain
                # is laid out boundary-first on inputs and reversed on
                # outputs so both sides see an identical matrix.
                (ei, other) = next(
                    (i, bb if aa == w else aa)
                    for i, (aa, bb) in enumerate(d.edges)
                    if aa == w or bb == w
                )
                del d.edges[ei]
                za = d.add_z(float(a))
                xb = d.add_x(float(b))
                zg = d.add_z(float(g))
                d.add_edge(za, xb)
                d.add_edge(xb, zg)
                if before:
                    d.add_edge(w, za)
                    d.add_edge(zg, other)
                else:
                    d.add_edge(other, za)
                    d.add_edge(zg, w)
            sides.append(eval_diagram(d, mode="float").to_matrix())
        worst = max(worst, float(np.abs(sides[0] - sides[1]).max()))
    return worst
