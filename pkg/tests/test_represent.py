import itertools

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from k3mds.lattice import Lattice, parse_spec
from k3mds.represent import (ConstraintSystem, ReprConfig, ReprError, affine_solutions,
                             brute_force_mod, fincke_pohst, l1_shell, minus2_dot1_exists,
                             mod_problem, represents, satisfies, solvable_mod)

from conftest import SMALL_CORPUS


@st.composite
def even_grams(draw, max_rank=3, entry=4):
    n = draw(st.integers(1, max_rank))
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        G[i][i] = 2 * draw(st.integers(-entry, entry))
        for j in range(i + 1, n):
            G[i][j] = G[j][i] = draw(st.integers(-entry, entry))
    return Lattice(G)


@st.composite
def systems(draw, L, allow_coset=True):
    n = L.rank
    target = 2 * draw(st.integers(-5, 5))
    linear = []
    if draw(st.booleans()):
        v = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
        linear.append((v, draw(st.integers(-3, 3))))
    coset = None
    if allow_coset and draw(st.booleans()):
        w = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
        coset = (w, draw(st.integers(1, 3)))
    return ConstraintSystem.build(target, linear, coset, nonzero=draw(st.booleans()))


def brute_search(L, sys_, bound):
    for v in itertools.product(range(-bound, bound + 1), repeat=L.rank):
        if satisfies(L, sys_, v):
            return list(v)
    return None


@given(st.data(), st.sampled_from([2, 3, 4, 8, 9]), st.booleans())
def test_dp_matches_brute_force_random(data, m, half):
    L = data.draw(even_grams())
    sys_ = data.draw(systems(L))
    prob = mod_problem(L, sys_, m, half_norm=half)
    assert solvable_mod(prob) == brute_force_mod(prob)


@pytest.mark.parametrize("name", sorted(k for k, L in SMALL_CORPUS.items() if L.rank <= 4))
@pytest.mark.parametrize("m", [2, 3, 4, 8, 9])
def test_dp_matches_brute_force_corpus(name, m):
    L = SMALL_CORPUS[name]
    for target in (-6, -4, -2, 0, 2):
        for half in (False, True):
            prob = mod_problem(L, ConstraintSystem.build(target), m, half_norm=half)
            assert solvable_mod(prob) == brute_force_mod(prob)


@given(st.data(), st.sampled_from([2, 3, 4]), st.sampled_from([2, 3]))
def test_congruence_monotone(data, m, k):
    # a solution mod m·k reduces to one mod m
    L = data.draw(even_grams())
    sys_ = data.draw(systems(L))
    if solvable_mod(mod_problem(L, sys_, m * k)):
        assert solvable_mod(mod_problem(L, sys_, m))


@given(st.data())
def test_obstruction_soundness_rank_le_2(data):
    L = data.draw(even_grams(max_rank=2))
    sys_ = data.draw(systems(L, allow_coset=False))
    v = represents(L, sys_)
    if v.kind == "Witness":
        assert satisfies(L, sys_, v.vector)
    elif v.obstructed:
        assert brute_search(L, sys_, 50) is None


@given(st.data())
def test_obstruction_soundness_rank3(data):
    L = data.draw(even_grams(max_rank=3))
    assume(L.rank == 3)
    sys_ = data.draw(systems(L))
    v = represents(L, sys_, ReprConfig(bound=6, search_cap=5000))
    if v.kind == "Witness":
        assert satisfies(L, sys_, v.vector)
    elif v.obstructed:
        assert brute_search(L, sys_, 12) is None


@given(st.data(), st.randoms(use_true_random=False))
def test_obstruction_soundness_sampled(data, rnd):
    L = data.draw(even_grams(max_rank=5, entry=3))
    assume(L.rank >= 4)
    sys_ = data.draw(systems(L))
    v = represents(L, sys_, ReprConfig(moduli=(2, 3, 4, 8, 9), bound=3, search_cap=2000))
    if v.kind == "Witness":
        assert satisfies(L, sys_, v.vector)
    elif v.obstructed:
        for _ in range(3000):
            p = [rnd.randint(-8, 8) for _ in range(L.rank)]
            assert not satisfies(L, sys_, p)


@pytest.mark.parametrize("spec,roots", [("A1", 2), ("A2", 6), ("D4", 24), ("E6", 72), ("E8", 240)])
def test_fincke_pohst_root_counts(spec, roots):
    L = parse_spec(spec)
    H = [[-x for x in row] for row in L.gram]
    sols = list(fincke_pohst(H, [0] * L.rank, 0, 2))
    assert len(sols) == roots
    assert all(L.norm(z) == -2 for z in sols)


def test_known_verdicts():
    assert represents(parse_spec("<4>+<-2>"), ConstraintSystem.build(-6)).describe() == \
        "ObstructedMod(9)"
    v = represents(parse_spec("<2>+<-8>"), ConstraintSystem.build(0, nonzero=True))
    assert v.kind == "Witness" and parse_spec("<2>+<-8>").norm(v.vector) == 0
    v = represents(parse_spec("U"), ConstraintSystem.build(-2))
    assert v.kind == "Witness"
    assert represents(parse_spec("E8"), ConstraintSystem.build(-4)).kind == "Witness"
    assert represents(parse_spec("E8"), ConstraintSystem.build(2)).kind == "NoneExhaustive"


def test_half_norm_gives_smaller_modulus():
    cfg = ReprConfig(half_norm=True)
    v = represents(parse_spec("<4>+<-2>"), ConstraintSystem.build(-6), cfg)
    assert v.kind == "ObstructedMod" and v.norm_modulus == 2 * v.modulus


def test_linear_infeasible():
    L = parse_spec("A1^2")
    sys_ = ConstraintSystem.build(-2, [([1, 1], 1)])
    assert represents(L, sys_).kind == "NoneExhaustive"


def test_validation():
    with pytest.raises(ReprError):
        represents(parse_spec("U"), ConstraintSystem.build(-3))
    with pytest.raises(ReprError):
        represents(parse_spec("U"), ConstraintSystem.build(-2, [([1, 0, 0], 1)]))


def test_affine_solutions_cover_constraints():
    L = parse_spec("U+A1")
    sys_ = ConstraintSystem.build(-2, [([0, 0, 1], 2)], coset=([1, 1, 1], 2))
    aff = affine_solutions(L, sys_)
    for z in itertools.product(range(-2, 3), repeat=len(aff.K)):
        v = aff.point(z)
        assert L.pair(v, [0, 0, 1]) == 2 and all((a - 1) % 2 == 0 for a in v)


def test_l1_shell_counts():
    # number of points of L1 norm r in Z^k (unbounded box)
    assert sum(1 for _ in l1_shell(2, 3, 3)) == 12
    assert sum(1 for _ in l1_shell(3, 2, 2)) == 18
    assert list(l1_shell(1, 0, 5)) == [(0,)]


def sd(d):
    return Lattice([[0, 1, 1], [1, -2, d - 2], [1, d - 2, -2]])


@pytest.mark.parametrize("d", [2, 4, 6, 12, 36])
def test_minus2_dot1_even_d(d):
    v = minus2_dot1_exists(sd(d), [0, 0, 1])
    assert v.describe() == "ObstructedMod(2)"


def test_minus2_dot1_odd_d():
    v = minus2_dot1_exists(sd(3), [0, 0, 1])
    assert v.kind == "Witness" and list(v.vector) == [0, 1, 0]
    v = minus2_dot1_exists(sd(5), [0, 0, 1])
    assert v.describe() == "ObstructedMod(9)"
    sys_ = ConstraintSystem.build(-2, [([0, 0, 1], 1)])
    assert brute_search(sd(5), sys_, 15) is None


def test_minus2_dot1_parity_fast_path():
    L = parse_spec("U+E8^2+A1^2")
    N = [0] * 20
    N[-1] = 1
    v = minus2_dot1_exists(L, N)
    assert v.kind == "ObstructedMod" and v.strategy == "parity"


def test_minus2_dot1_validation():
    with pytest.raises(ReprError):
        minus2_dot1_exists(sd(4), [1, 0, 0])
    with pytest.raises(ReprError):
        minus2_dot1_exists(sd(4), [0, 0])
