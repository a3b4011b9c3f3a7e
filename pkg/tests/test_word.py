import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import expand, naive_reduce
from socketkit.errors import ParseError, UnknownGenerator
from socketkit.word import (
    Alphabet,
    Substitution,
    Word,
    apply,
    commutator,
    conjugate,
    cyclic_reduce,
    generates_cyclic,
    invert,
    is_conjugate,
    reduce,
    verify_identity,
)

W = Word.parse
GENS = ["x", "y", "z", "u", "v"]

syllable = st.tuples(st.sampled_from(GENS), st.integers(-4, 4).filter(bool))
words = st.lists(syllable, max_size=25).map(lambda s: Word(tuple(s)))


def power_commutator(n1: int, n2: int, a_exp: int | None = None) -> Substitution:
    src = Alphabet(["z1", "z2", "a1", "b1"])
    images = {
        "z1": W(f"x^{n2}"),
        "z2": W(f"y x^{-n1} y^-1"),
        "a1": W(f"x^{n1 * n2 if a_exp is None else a_exp}"),
        "b1": W("y"),
    }
    return Substitution(src, Alphabet(["x", "y"]), images)


class TestParseAndFormat:
    def test_round_trip(self):
        assert str(W("x^2 y^-1 x")) == "x^2 y^-1 x"
        assert str(W("x^1")) == "x"

    def test_empty_is_identity(self):
        assert W("") == Word()
        assert str(Word()) == ""

    @pytest.mark.parametrize(
        "text,column",
        [("x ^2", 3), ("x y^", 3), ("1x", 1), ("x x^0", 3), ("a b^-1 c^+", 8)],
    )
    def test_bad_tokens_report_column(self, text, column):
        with pytest.raises(ParseError) as info:
            W(text)
        assert info.value.column == column

    def test_signed_exponent(self):
        assert W("x^+3") == W("x^3")


class TestReduce:
    @pytest.mark.parametrize(
        "raw,expected",
        [("x x^-1", ""), ("x^2 x^3", "x^5"), ("y x^-1 x y^-1 y", "y")],
    )
    def test_examples(self, raw, expected):
        assert str(reduce(W(raw))) == expected

    @given(words)
    def test_matches_naive_oracle(self, w):
        assert list(reduce(w).letters()) == naive_reduce(expand(w.syllables))

    @given(words)
    def test_idempotent(self, w):
        assert reduce(reduce(w)) == reduce(w)

    @given(words)
    def test_inverse_cancels(self, w):
        assert not (w * invert(w)).syllables
        assert not (invert(w) * w).syllables

    @given(words, words)
    def test_length_subadditive(self, u, v):
        u, v = reduce(u), reduce(v)
        assert len(u * v) <= len(u) + len(v)


class TestInvertConjugateCommutator:
    @pytest.mark.parametrize("w,expected", [("", ""), ("x y", "y^-1 x^-1"), ("x^3 y^-2", "y^2 x^-3")])
    def test_invert(self, w, expected):
        assert str(invert(W(w))) == expected

    def test_conjugate(self):
        assert conjugate(W("x x^-1 y"), Word()) == W("y")
        assert str(conjugate(W("x"), W("y"))) == "y x y^-1"
        assert str(conjugate(W("y x y^-1"), W("y^-1"))) == "x"

    def test_commutator(self):
        assert commutator(W("x y"), W("x y")) == Word()
        assert str(commutator(W("x"), W("y"))) == "x y x^-1 y^-1"
        assert commutator(W("x"), Word()) == Word()


class TestApply:
    def test_identity_substitution(self):
        a = Alphabet(["x", "y"])
        assert apply(Substitution.identity(a), W("x x^-1 y^2")) == W("y^2")

    def test_power_commutator_images(self):
        s = power_commutator(3, 5)
        assert str(apply(s, W("z1^3 z2^5"))) == "x^15 y x^-15 y^-1"

    def test_trivial_substitution(self):
        a = Alphabet(["x", "y"])
        s = Substitution(a, Alphabet([]), {"x": Word(), "y": Word()})
        assert apply(s, W("x y^3 x^-2")) == Word()

    def test_unknown_generator(self):
        s = Substitution.identity(Alphabet(["x"]))
        with pytest.raises(UnknownGenerator):
            apply(s, W("q"))

    def test_images_must_cover_source(self):
        with pytest.raises(ValueError):
            Substitution(Alphabet(["x", "y"]), Alphabet(["x"]), {"x": W("x")})

    def test_images_checked_against_target(self):
        with pytest.raises(UnknownGenerator):
            Substitution(Alphabet(["x"]), Alphabet(["y"]), {"x": W("q")})

    @given(words, words, st.lists(words, min_size=5, max_size=5))
    def test_homomorphism_and_inversion(self, u, v, imgs):
        s = Substitution(Alphabet(GENS), Alphabet(GENS), dict(zip(GENS, imgs)))
        assert apply(s, u * v) == apply(s, u) * apply(s, v)
        assert apply(s, invert(u)) == invert(apply(s, u))


class TestVerifyIdentity:
    def test_power_commutator_3_5(self):
        rep = verify_identity(power_commutator(3, 5), W("z1^3 z2^5"), W("a1 b1 a1^-1 b1^-1"))
        assert rep.trivial and rep.residual == Word()

    def test_identity(self):
        s = Substitution.identity(Alphabet(["x", "y"]))
        assert verify_identity(s, W("x y"), W("x y")).trivial

    def test_wrong_exponent(self):
        rep = verify_identity(power_commutator(3, 5, a_exp=14), W("z1^3 z2^5"), W("a1 b1 a1^-1 b1^-1"))
        assert not rep.trivial and len(rep.residual) > 0


class TestCyclicity:
    @pytest.mark.parametrize(
        "ws,expected",
        [(["x^2", "x^-5"], True), (["x", "y"], False), (["x y x^-1", "x y^3 x^-1"], True), (["", "x y"], True)],
    )
    def test_examples(self, ws, expected):
        assert generates_cyclic([W(t) for t in ws]) is expected

    @given(words.filter(lambda w: bool(reduce(w))))
    def test_single_word(self, w):
        assert generates_cyclic([w])

    @given(words, st.lists(st.integers(-4, 4), min_size=1, max_size=4))
    def test_powers_of_common_root(self, root, exps):
        fam = [root**e for e in exps]
        assert generates_cyclic(fam)
        # closure under products and inverses keeps the verdict
        assert generates_cyclic(fam + [fam[0] * fam[-1], invert(fam[0])])


class TestConjugacy:
    @pytest.mark.parametrize(
        "u,v,expected",
        [("x y", "y x", True), ("x", "x^-1", False), ("y x^3 y^-1", "x^3", True)],
    )
    def test_examples(self, u, v, expected):
        assert is_conjugate(W(u), W(v)) is expected

    @given(words, words, words)
    def test_explicit_conjugates(self, w, g, h):
        a = conjugate(w, g)
        b = conjugate(w, h)
        assert is_conjugate(w, w)
        assert is_conjugate(w, a) and is_conjugate(a, w)
        assert is_conjugate(a, b)

    @given(words, words)
    def test_matches_abelian_obstruction(self, u, v):
        # conjugate words have equal exponent sums
        if is_conjugate(u, v):
            for g in GENS:
                assert u.exponent_sum(g) == v.exponent_sum(g)

    @given(words)
    def test_cyclic_reduce_is_conjugate(self, w):
        c = cyclic_reduce(w)
        assert is_conjugate(w, c)
        if len(c) >= 2:
            letters = list(c.letters())
            assert letters[0] != (letters[-1][0], -letters[-1][1])
