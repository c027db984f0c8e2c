"""Rewrite engine: per-rule soundness, derived scalars, simplification."""

from fractions import Fraction

import numpy as np
import pytest

from spinnet.exact import ExactScalar
from spinnet.graph import Diagram
from spinnet.rewrite import (
    DEFAULT_SIMPLIFY_RULES,
    FULL_SIMPLIFY_RULES,
    RULES,
    apply_rule,
    check_rule_soundness,
    derived_scalar_table,
    find_matches,
    simplify,
)
from spinnet.su2 import cswap_gadget, symmetriser
from spinnet.tensor import eval_diagram, plug_basis, to_matrix


@pytest.mark.parametrize("rule", sorted(RULES))
def test_rule_soundness_200_trials(rule):
    assert check_rule_soundness(rule, trials=200, seed=0) == 0


def test_negative_control_detects_wrong_scalar():
    # An hh-cancel surgery applied *without* its x2 scalar must change the
    # diagram's tensor, and the exact comparison must see it.
    d = Diagram()
    u, v = d.add_h(), d.add_h()
    d.add_edge(u, v)
    d.add_edge(d.add_input(), u)
    d.add_edge(v, d.add_output())
    good = apply_rule(d, "hh-cancel")
    bad = good.copy()
    bad.mul_scalar(ExactScalar(Fraction(1, 2)))  # undo the derived scalar
    before = to_matrix(d)
    assert bool(np.all(to_matrix(good) == before))
    assert not bool(np.all(to_matrix(bad) == before))


def test_derived_scalars_are_cached_and_exact():
    d = Diagram()
    u, v = d.add_h(), d.add_h()
    d.add_edge(u, v)
    d.add_edge(d.add_input(), u)
    d.add_edge(v, d.add_output())
    apply_rule(d, "hh-cancel")
    table = derived_scalar_table()
    assert any("hh-cancel" in k for k in table)
    key = next(k for k in table if "hh-cancel" in k and "open" in k)
    assert ExactScalar.deserialize(table[key]) == ExactScalar(2)


def test_fuse_adds_phases():
    d = Diagram()
    a = d.add_z(Fraction(1, 2))
    b = d.add_z(Fraction(1))
    d.add_edge(a, b)
    d.add_edge(d.add_input(), a)
    d.add_edge(b, d.add_output())
    out = apply_rule(d, "fuse")
    (spider,) = [v for v, data in out.vertices.items() if data.kind == "Z"]
    assert Fraction(out.vertices[spider].phase) % 2 == Fraction(3, 2)


def test_apply_rule_rejects_bad_site():
    d = Diagram()
    a = d.add_z()
    b = d.add_z()
    d.add_edge(a, b)
    with pytest.raises(ValueError):
        apply_rule(d, "fuse", site=(a + 99, b))
    with pytest.raises(KeyError):
        find_matches(d, "no-such-rule")


def test_simplify_reaches_fixpoint_and_preserves_tensor():
    d = symmetriser(3)
    before = to_matrix(d)
    sd, trace = simplify(d)
    assert len(trace) > 0
    assert len(sd.vertices) < len(d.vertices)
    for rule in DEFAULT_SIMPLIFY_RULES:
        assert find_matches(sd, rule) == []
    assert bool(np.all(to_matrix(sd) == before))


def test_simplify_trace_records_rules():
    d = Diagram()
    a = d.add_z()
    b = d.add_z()
    d.add_edge(a, b)
    d.add_edge(d.add_input(), a)
    d.add_edge(b, d.add_output())
    _, trace = simplify(d)
    assert [r for r, _ in trace.steps][:1] == ["fuse"]


class TestCswapDerivations:
    """Plugging the Fredkin control with a basis state and simplifying must
    reproduce the closed-form branches: identity for |0>, swap for |1>."""

    def test_control_zero_collapses_to_wires(self):
        g = cswap_gadget()
        d = plug_basis(g, {g.inputs[0]: 0})
        before = to_matrix(d)
        sd, trace = simplify(d, rules=FULL_SIMPLIFY_RULES)
        # Everything cancels: only the four boundary vertices remain.
        assert all(data.kind == "B" for data in sd.vertices.values())
        assert len(trace) > 5
        identity = np.eye(4, dtype=object)
        want = np.where(identity == 1, ExactScalar.one(), ExactScalar.zero())
        assert bool(np.all(to_matrix(sd) == want))
        assert bool(np.all(before == want))

    def test_control_one_gives_swap(self):
        g = cswap_gadget()
        d = plug_basis(g, {g.inputs[0]: 1})
        before = to_matrix(d)
        sd, trace = simplify(d, rules=FULL_SIMPLIFY_RULES)
        assert len(trace) > 0
        assert len(sd.vertices) < len(d.vertices)
        swap = np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=object
        )
        want = np.where(swap == 1, ExactScalar.one(), ExactScalar.zero())
        assert bool(np.all(to_matrix(sd) == want))
        assert bool(np.all(before == want))
