import pytest

from demazure.errors import GroupTooLarge, InvalidLattice, NotARoot, UnknownType
from demazure.intlinalg import lattice_index
from demazure.rootdata import build, enumerate_weyl, subword_bruhat_leq

from oracles import positive_root_count, subword_leq, weyl_bfs

SMALL = ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "A1xA2"]


def test_a2_adjoint():
    d = build("A2", "adj")
    assert len(d.roots) == 6
    assert d.cartan_determinant() == 3


def test_g2_lattices_coincide():
    for lat in ("adj", "sc"):
        d = build("G2", lat)
        assert len(d.roots) == 12 and d.cartan_determinant() == 1
    assert lattice_index(build("G2", "adj").basis) == 1


def test_c1_simply_connected_root_is_twice_weight():
    d = build("C1", "sc")
    pos = d.positive_roots
    assert len(pos) == 1 and pos[0].lattice == (2,)


@pytest.mark.parametrize("name", SMALL + ["F4", "B4", "C4", "D5"])
@pytest.mark.parametrize("lattice", ["adj", "sc"])
def test_datum_invariants(name, lattice):
    d = build(name, lattice)
    npos, total = positive_root_count(d.cartan)
    assert len(d.roots) == total and len(d.positive_roots) == npos
    for r in d.roots:
        assert r.pair(r.lattice) == 2
        for k in range(len(d.roots)):
            img = d.reflection_matrix(k)
            out = tuple(sum(img[i][j] * r.lattice[j] for j in range(d.rank)) for i in range(d.rank))
            assert d.is_root(out)
    assert d.cartan_determinant() == d.expected_determinant()


@pytest.mark.parametrize("name", SMALL)
def test_weyl_group_matches_bfs(name):
    d = build(name, "sc")
    W = enumerate_weyl(d)
    oracle = weyl_bfs(d.cartan)
    assert len(W) == len(oracle)
    assert sorted(W.length(w) for w in range(len(W))) == sorted(oracle.values())
    assert W.length(W.longest) == len(d.positive_roots)


@pytest.mark.parametrize("name,order,top", [("A2", 6, 3), ("B2", 8, 4), ("G2", 12, 6)])
def test_weyl_examples(name, order, top):
    W = enumerate_weyl(build(name, "adj"))
    assert len(W) == order and W.length(W.longest) == top


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "A3"])
def test_bruhat_matches_subword_oracle(name):
    W = enumerate_weyl(build(name, "adj"))

    def mul(a, b):
        return W.mul(a, b)

    for u in range(len(W)):
        for w in range(len(W)):
            want = subword_leq(W.word(u), W.word(w), mul, 0, W.word_to_element)
            assert W.bruhat_leq(u, w) == want
            assert subword_bruhat_leq(W, u, w) == want


def test_bruhat_examples():
    W = enumerate_weyl(build("A2", "adj"))
    s1 = W.word_to_element([1])
    s1s2 = W.word_to_element([1, 2])
    s2s1 = W.word_to_element([2, 1])
    assert W.bruhat_leq(s1, s1s2)
    assert not W.bruhat_leq(s1s2, s2s1)
    assert all(W.bruhat_leq(0, w) and W.bruhat_leq(w, W.longest) for w in range(len(W)))


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "C3", "D4"])
def test_inversion_sets(name):
    d = build(name, "adj")
    W = enumerate_weyl(d)
    assert W.inversion_set(0) == frozenset()
    assert W.inversion_set(W.longest) == frozenset(range(len(d.positive_roots)))
    for k in range(len(d.positive_roots)):
        s = W.reflection_element(k)
        if W.length(s) == 1:
            assert W.inversion_set(s) == {k}
    for w in range(1, len(W)):
        assert len(W.inversion_set(w)) == W.length(w) == len(W.word(w))
        # inv(s_i v') = {alpha_i} union s_i(inv(v')) for a reduced word (i) o I_{v'}
        i = W.word(w)[0]
        rest = W.word_to_element(W.word(w)[1:])
        si = W.simple(i)
        ai = d.simple_index(i)
        want = {ai} | {W.root_action(si, b) for b in W.inversion_set(rest)}
        assert W.inversion_set(w) == want


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "A3", "B3"])
def test_canonical_words_are_greedy_and_reduced(name):
    W = enumerate_weyl(build(name, "adj"))
    for w in range(len(W)):
        word = W.word(w)
        assert W.is_reduced(word)
        assert W.word_to_element(word) == w
        if word:
            assert word[0] == min(W.left_descents(w))
    ordered = [(W.length(w), W.word(w)) for w in range(len(W))]
    assert ordered == sorted(ordered)


def test_reflection_action():
    d = build("A2", "adj")
    W = enumerate_weyl(d)
    s1 = W.simple(1)
    assert W.act(s1, (1, 0)) == (-1, 0)
    assert W.act(s1, (0, 1)) == (1, 1)
    for k in range(len(d.roots)):
        s = W.reflection_element(k)
        assert W.mul(s, s) == 0
    assert not W.is_reduced((1, 1))
    with pytest.raises(NotARoot):
        W.word_to_element([3])


def test_intermediate_lattice():
    d = build("A3", {"basis": [[1, 0, 1], [0, 1, 0], [0, 0, 2]]})
    assert d.lattice_kind == "intermediate" and len(d.roots) == 12
    assert lattice_index(d.basis) == 2
    with pytest.raises(InvalidLattice) as exc:
        build("A2", [[2, 0], [0, 2]])
    assert exc.value.details["failed"] == "root_lattice"
    with pytest.raises(InvalidLattice):
        build("A2", [[1, 0], [2, 0]])
    with pytest.raises(InvalidLattice):
        build("A2", "tiny")


def test_errors():
    with pytest.raises(UnknownType):
        build("Q2")
    with pytest.raises(GroupTooLarge):
        enumerate_weyl(build("E8"))
    assert len(enumerate_weyl(build("F4"))) == 1152


def test_torsion_prime_table():
    assert build("G2").torsion_primes() == (2,)
    assert build("A3").torsion_primes() == ()
    assert build("B3").torsion_primes() == (2,)
    assert build("F4").torsion_primes() == (2, 3)
    assert build("E8").torsion_primes() == (2, 3, 5)
