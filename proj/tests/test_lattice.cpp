#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "stnets/lattice.hpp"

using namespace stnets;

namespace {

Rational rnd_q(std::mt19937_64& rng) {
    long num = (long)(rng() % 17) - 8;
    long den = 1 + (long)(rng() % 6);
    return rat(num, den);
}

Element rnd(std::mt19937_64& rng, const RieszSpace& space) {
    switch (space.kind) {
        case RieszSpace::Kind::Rationals: return scalar(rnd_q(rng));
        case RieszSpace::Kind::RationalVector: {
            std::vector<Rational> c;
            for (std::uint32_t i = 0; i < space.dim; ++i) c.push_back(rnd_q(rng));
            return vector_of(std::move(c));
        }
        case RieszSpace::Kind::FinSuppSeq: {
            std::vector<std::pair<std::uint32_t, Rational>> entries;
            std::uint32_t used = 0;
            for (int i = 0, k = (int)(rng() % 4); i < k; ++i) {
                std::uint32_t idx = 1 + (std::uint32_t)(rng() % 10);
                if ((used >> idx) & 1u) continue;
                used |= 1u << idx;
                entries.push_back({idx, rnd_q(rng)});
            }
            return finsupp_of(std::move(entries));
        }
    }
    return scalar(Rational(0));
}

const std::vector<RieszSpace>& spaces() {
    static const std::vector<RieszSpace> s = {RieszSpace::rationals(), RieszSpace::vector(3),
                                              RieszSpace::finsupp()};
    return s;
}

} // namespace

TEST_CASE("space flags and construction errors") {
    CHECK(RieszSpace::rationals().dedekind_complete());
    CHECK(RieszSpace::vector(4).dedekind_complete());
    CHECK_FALSE(RieszSpace::finsupp().dedekind_complete());
    CHECK_THROWS_AS(RieszSpace::vector(0), Error);

    CHECK(to_string(RieszSpace::rationals()) == "rationals");
    CHECK(to_string(RieszSpace::vector(3)) == "vector(3)");
    CHECK(to_string(RieszSpace::finsupp()) == "finsupp");

    CHECK_THROWS_AS(finsupp_of({{2, Rational(1)}, {2, Rational(2)}}), Error);
    CHECK_THROWS_AS(finsupp_of({{0, Rational(1)}}), Error);
    CHECK(is_zero(finsupp_of({{3, Rational(0)}})));

    // operations across spaces are refused
    CHECK_THROWS_AS(add(scalar(Rational(1)), vector_of({Rational(1), Rational(0), Rational(0)})),
                    Error);
    CHECK_THROWS_AS(
        sup(vector_of({Rational(1), Rational(0)}), vector_of({Rational(1)})), Error);
}

TEST_CASE("vector space laws, seeded") {
    std::mt19937_64 rng(3);
    for (const auto& space : spaces()) {
        const Element z = zero(space);
        for (int t = 0; t < 150; ++t) {
            Element x = rnd(rng, space), y = rnd(rng, space), w = rnd(rng, space);
            Rational a = rnd_q(rng), b = rnd_q(rng);
            CHECK(add(x, y) == add(y, x));
            CHECK(add(add(x, y), w) == add(x, add(y, w)));
            CHECK(add(x, z) == x);
            CHECK(add(x, neg(x)) == z);
            CHECK(sub(x, y) == add(x, neg(y)));
            CHECK(scale(a, add(x, y)) == add(scale(a, x), scale(a, y)));
            CHECK(scale(a + b, x) == add(scale(a, x), scale(b, x)));
            CHECK(scale(a * b, x) == scale(a, scale(b, x)));
        }
    }
}

TEST_CASE("lattice laws, seeded") {
    std::mt19937_64 rng(5);
    for (const auto& space : spaces()) {
        const Element z = zero(space);
        for (int t = 0; t < 150; ++t) {
            Element x = rnd(rng, space), y = rnd(rng, space), w = rnd(rng, space);
            CHECK(sup(x, y) == sup(y, x));
            CHECK(inf(x, y) == inf(y, x));
            CHECK(sup(sup(x, y), w) == sup(x, sup(y, w)));
            CHECK(inf(inf(x, y), w) == inf(x, inf(y, w)));
            CHECK(sup(x, inf(x, y)) == x);
            CHECK(inf(x, sup(x, y)) == x);
            CHECK(add(sup(x, y), inf(x, y)) == add(x, y));

            // order interplay
            CHECK(leq(inf(x, y), x));
            CHECK(leq(x, sup(x, y)));
            CHECK((leq(x, y) == (sup(x, y) == y)));
            CHECK((leq(x, y) == (inf(x, y) == x)));

            // translation invariance and positive homogeneity
            CHECK(sup(add(x, w), add(y, w)) == add(sup(x, y), w));
            Rational a = rnd_q(rng);
            if (a > 0) CHECK(sup(scale(a, x), scale(a, y)) == scale(a, sup(x, y)));
            if (a < 0) CHECK(sup(scale(a, x), scale(a, y)) == scale(a, inf(x, y)));
        }
    }
}

TEST_CASE("absolute value identities") {
    std::mt19937_64 rng(8);
    for (const auto& space : spaces()) {
        const Element z = zero(space);
        for (int t = 0; t < 150; ++t) {
            Element x = rnd(rng, space), y = rnd(rng, space);
            AbsParts parts = abs_parts(x);
            CHECK(parts.abs == abs(x));
            CHECK(parts.abs == sup(x, neg(x)));
            CHECK(parts.pos == sup(x, z));
            CHECK(parts.negp == sup(neg(x), z));
            CHECK(sub(parts.pos, parts.negp) == x);
            CHECK(add(parts.pos, parts.negp) == parts.abs);
            CHECK(inf(parts.pos, parts.negp) == z);
            CHECK(leq(z, parts.abs));
            CHECK(abs(neg(x)) == abs(x));
            CHECK(leq(abs(add(x, y)), add(abs(x), abs(y))));
            // solid: |y| <= |x| pointwise survives scaling by 1/2
            CHECK(leq(abs(scale(rat(1, 2), x)), abs(x)));
        }
    }
}

TEST_CASE("incomparability is the normal situation in dimension two") {
    Element a = vector_of({Rational(1), Rational(0)});
    Element b = vector_of({Rational(0), Rational(1)});
    CHECK_FALSE(leq(a, b));
    CHECK_FALSE(leq(b, a));
    CHECK(sup(a, b) == vector_of({Rational(1), Rational(1)}));
    CHECK(inf(a, b) == zero(RieszSpace::vector(2)));

    // sparse supports behave the same
    Element u = unit_seq(1), v = unit_seq(4, rat(2, 3));
    CHECK_FALSE(leq(u, v));
    CHECK_FALSE(leq(v, u));
    CHECK(sup(u, v) == add(u, v));
    CHECK(inf(u, v) == zero(RieszSpace::finsupp()));
    // with a negative entry the pair becomes comparable
    CHECK(leq(unit_seq(4, rat(-2, 3)), u));
}

TEST_CASE("birkhoff inequality, exhaustive over small supports and seeded") {
    // brute-force oracle: compute both sides and compare with leq
    auto oracle = [](const Element& x, const Element& xp, const Element& w, const Element& wp) {
        Element lhs = abs(sub(sup(x, w), sup(xp, wp)));
        Element rhs = add(abs(sub(x, xp)), abs(sub(w, wp)));
        return leq(lhs, rhs);
    };
    std::mt19937_64 rng(13);
    for (const auto& space : spaces()) {
        for (int t = 0; t < 400; ++t) {
            Element x = rnd(rng, space), xp = rnd(rng, space);
            Element w = rnd(rng, space), wp = rnd(rng, space);
            CHECK(birkhoff_check(x, xp, w, wp));
            CHECK(oracle(x, xp, w, wp));
        }
    }
}

TEST_CASE("archimedean probe") {
    ArchimedeanProbe p = archimedean_probe(vector_of({Rational(2), rat(1, 3), Rational(0)}), 64);
    CHECK(p.accepted);
    CHECK(is_zero(p.infimum));
    CHECK_THROWS_AS(archimedean_probe(vector_of({Rational(-1), Rational(0), Rational(0)}), 64),
                    Error);
}

TEST_CASE("dedekind suprema exist exactly where advertised") {
    RieszSpace v3 = RieszSpace::vector(3);
    std::vector<Element> fam = {
        vector_of({Rational(1), Rational(0), rat(1, 2)}),
        vector_of({Rational(0), Rational(2), rat(1, 3)}),
        vector_of({rat(1, 2), Rational(1), Rational(0)}),
    };
    Element s = dedekind_sup(fam, v3);
    CHECK(s == vector_of({Rational(1), Rational(2), rat(1, 2)}));
    for (const auto& f : fam) CHECK(leq(f, s));

    CHECK(dedekind_sup({scalar(rat(1, 3)), scalar(rat(1, 2))}, RieszSpace::rationals()) ==
          scalar(rat(1, 2)));

    CHECK_THROWS_AS(dedekind_sup({unit_seq(1), unit_seq(2)}, RieszSpace::finsupp()), Error);
    CHECK_THROWS_AS(dedekind_sup({}, v3), Error);
}

TEST_CASE("element printing round meaning") {
    CHECK(to_string(scalar(rat(-2, 3))) == "-2/3");
    CHECK(to_string(vector_of({Rational(1), rat(-2, 3), Rational(0)})) == "(1, -2/3, 0)");
    CHECK(to_string(finsupp_of({{5, rat(-2, 3)}, {1, Rational(1)}})) == "{1: 1, 5: -2/3}");
    CHECK(to_string(zero(RieszSpace::finsupp())) == "{}");
}
