from fractions import Fraction

import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from k3mds import linalg
from k3mds.discriminant import (discriminant_form, form_from_values, fqf_isomorphic, genus_equal,
                                milgram_defect, mod2, verify_isomorphism)
from k3mds.lattice import Lattice, parse_spec

from conftest import SMALL_CORPUS

SPECS = ["U", "U(2)", "A1", "A2", "A3", "D4", "D5", "E6", "E7", "E8(2)", "<4>+<-2>",
         "<2>+<-8>", "U+<-4>", "U(2)+A1^3", "A1^3", "<4>+<-2>+<-2>", "U(3)+A2", "D4+A1^2",
         "U+E8^2+A1^2", "<6>+<-10>"]

specs = st.sampled_from(SPECS)


def _elementary_product(n, ops):
    M = linalg.identity(n)
    for i, j, c in ops:
        if i != j:
            for k in range(n):
                M[i][k] += c * M[j][k]
    return M


def base_changed(L, ops):
    P = _elementary_product(L.rank, [(i % L.rank, j % L.rank, c) for i, j, c in ops])
    return Lattice(linalg.mat_mul(linalg.mat_mul(P, L.gram), linalg.transpose(P)))


ops = st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30), st.integers(-3, 3)), max_size=6)


@given(specs)
def test_group_matches_smith_form(spec):
    L = parse_spec(spec)
    f = discriminant_form(L)
    ref = sympy_snf(sympy.Matrix(L.gram), domain=sympy.ZZ)
    factors = sorted(abs(int(ref[i, i])) for i in range(L.rank))
    assert sorted(f.invariant_factors) == [d for d in factors if d > 1]
    assert f.order == abs(L.det())


@given(specs)
def test_q_and_b_are_computed_from_lifts(spec):
    L = parse_spec(spec)
    f = discriminant_form(L)
    G = L.gram
    for i, x in enumerate(f.lifts or ()):
        assert mod2(linalg.bilinear(G, x, x)) == f.q_gens[i]
        # lifts lie in the dual and have the right order
        assert all(Fraction(v).denominator == 1 for v in linalg.mat_vec(G, x))
        for j, y in enumerate(f.lifts):
            assert (linalg.bilinear(G, x, y) - f.b_matrix[i][j]).denominator == 1


@given(specs)
def test_q_is_a_quadratic_refinement(spec):
    f = discriminant_form(parse_spec(spec))
    elems = list(f.elements())[:40]
    for a in elems[:10]:
        for c in elems[:10]:
            # q(a + c) = q(a) + q(c) + 2 b(a, c) mod 2
            lhs = f.q(f.add(a, c))
            rhs = mod2(f.q(a) + f.q(c) + 2 * f.b(a, c))
            assert lhs == rhs
            assert f.b(a, c) == f.b(c, a)
        for k in range(-3, 4):
            assert f.q(f.scale(k, a)) == mod2(k * k * f.q(a))


@given(specs)
def test_milgram_holds(spec):
    assert milgram_defect(parse_spec(spec)) < 1e-9


def test_milgram_on_corpus():
    for L in SMALL_CORPUS.values():
        if L.det() != 0:
            assert milgram_defect(L) < 1e-9


def test_structure_strings():
    assert discriminant_form(parse_spec("<4>+<-2>")).structure() == "Z/2 + Z/4"
    assert discriminant_form(parse_spec("U+E8^2+A1^2")).structure() == "(Z/2)^2"
    assert discriminant_form(parse_spec("E8")).structure() == "0"


def test_lifts_of_cyclic_summands():
    f = discriminant_form(parse_spec("<4>+<-2>"))
    assert f.invariant_factors == (2, 4)
    assert [list(x) for x in f.lifts] == [[0, Fraction(1, 2)], [Fraction(1, 4), 0]]


def test_isotropic_elements_e8_2():
    f = discriminant_form(parse_spec("E8(2)"))
    assert f.is_integral()
    # nonzero elements with q = 0 mod 2 in the (Z/2)^8 quadratic space of plus type
    assert len(f.isotropic_elements(2)) == 135


@given(specs, ops)
def test_genus_equal_under_base_change(spec, moves):
    L = parse_spec(spec)
    M = base_changed(L, moves)
    v = genus_equal(L, M)
    assert v.kind == "yes"
    iso = fqf_isomorphic(discriminant_form(L), discriminant_form(M))
    assert iso.kind == "yes" and verify_isomorphism(discriminant_form(L), discriminant_form(M),
                                                      iso.witness)


@given(specs, specs)
def test_genus_equal_symmetric(s1, s2):
    L1, L2 = parse_spec(s1), parse_spec(s2)
    assert genus_equal(L1, L2).kind == genus_equal(L2, L1).kind
    assert genus_equal(L1, L1).kind == "yes"


def test_genus_distinctions():
    assert genus_equal(parse_spec("<2>"), parse_spec("<-2>")).kind == "no"
    assert genus_equal(parse_spec("U"), parse_spec("U(2)")).kind == "no"
    assert genus_equal(parse_spec("U(2)"), parse_spec("<2>+<-2>")).kind == "no"
    assert genus_equal(parse_spec("E8"), parse_spec("D8")).kind == "no"


def test_genus_known_isomorphisms():
    assert genus_equal(parse_spec("U+D8+D4+A1"), parse_spec("U+E8+A1^5")).kind == "yes"
    assert genus_equal(parse_spec("U(2)+A1^8"), parse_spec("<2>+<-2>^9")).kind == "yes"
    assert genus_equal(parse_spec("U+E8(2)"), parse_spec("U(2)+E8(2)")).kind == "no"


def test_indefinite_isomorphism_flag():
    v = genus_equal(parse_spec("U+A1"), parse_spec("U+A1"))
    assert v.assumption


def test_form_from_values_and_nonisomorphic():
    q1 = form_from_values((2,), (Fraction(1, 2),), ((Fraction(1, 2),),))
    q2 = form_from_values((2,), (Fraction(3, 2),), ((Fraction(1, 2),),))
    assert fqf_isomorphic(q1, q1).kind == "yes"
    assert fqf_isomorphic(q1, q2).kind == "no"
    assert q1.gauss_sum() != q2.gauss_sum()
