#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <functional>
#include <random>

#include "stnets/index_measure.hpp"

using namespace stnets;

namespace {

// Independent membership oracles, written against the definitions rather than
// the SetExpr machinery.
using Member = std::function<bool(std::uint64_t)>;

Member oracle_ap(std::uint64_t a, std::uint64_t d) {
    return [=](std::uint64_t n) { return n >= a && (n - a) % d == 0; };
}

Member oracle_square() {
    return [](std::uint64_t n) {
        std::uint64_t r = (std::uint64_t)std::sqrt((double)n);
        while (r * r > n) --r;
        while ((r + 1) * (r + 1) <= n) ++r;
        return r * r == n;
    };
}

std::uint64_t oracle_count(const Member& m, std::uint64_t k) {
    std::uint64_t c = 0;
    for (std::uint64_t n = 1; n <= k; ++n)
        if (m(n)) ++c;
    return c;
}

/// Small random expression together with its oracle.
struct Sample {
    SetExprPtr expr;
    Member member;
};

Sample gen_sample(std::mt19937_64& rng, int depth) {
    auto pick = [&](std::uint64_t bound) { return rng() % bound; };
    if (depth == 0 || pick(3) == 0) {
        switch (pick(3)) {
            case 0: {
                std::vector<std::uint64_t> elems;
                for (std::uint64_t i = 0, k = 1 + pick(5); i < k; ++i)
                    elems.push_back(1 + pick(200));
                auto e = finite_list(elems);
                return {e, [e](std::uint64_t n) { return contains(*e, n); }};
            }
            case 1: {
                std::uint64_t d = 1 + pick(12), a = 1 + pick(d);
                return {arith_prog(a, d), oracle_ap(a, d)};
            }
            default: return {named_predicate("squares"), oracle_square()};
        }
    }
    Sample l = gen_sample(rng, depth - 1);
    switch (pick(3)) {
        case 0: {
            Sample r = gen_sample(rng, depth - 1);
            return {set_union(l.expr, r.expr),
                    [l, r](std::uint64_t n) { return l.member(n) || r.member(n); }};
        }
        case 1: {
            Sample r = gen_sample(rng, depth - 1);
            return {set_intersection(l.expr, r.expr),
                    [l, r](std::uint64_t n) { return l.member(n) && r.member(n); }};
        }
        default:
            return {set_complement(l.expr), [l](std::uint64_t n) { return !l.member(n); }};
    }
}

} // namespace

TEST_CASE("index order, join and intervals") {
    CHECK(index_leq(Index::nat(3), Index::nat(3)));
    CHECK(index_leq(Index::nat(3), Index::nat(9)));
    CHECK_FALSE(index_leq(Index::nat(9), Index::nat(3)));

    // pairs are ordered componentwise and can be incomparable
    CHECK_FALSE(index_leq(Index::pair(1, 2), Index::pair(2, 1)));
    CHECK_FALSE(index_leq(Index::pair(2, 1), Index::pair(1, 2)));
    Index j = join(IndexKind::PairNaturals, Index::pair(1, 2), Index::pair(2, 1));
    CHECK(j == Index::pair(2, 2));
    CHECK(index_leq(Index::pair(1, 2), j));
    CHECK(index_leq(Index::pair(2, 1), j));

    CHECK_THROWS_AS(index_leq(Index::nat(1), Index::pair(1, 1)), Error);

    OrderInterval iv = order_interval(IndexKind::Naturals, Index::nat(3), Index::nat(7));
    CHECK(iv.finite);
    for (std::uint64_t n = 1; n <= 10; ++n) CHECK(contains(*iv.set, n) == (n >= 3 && n <= 7));

    CHECK_THROWS_AS(order_interval(IndexKind::Naturals, Index::nat(7), Index::nat(3)), Error);
    // symbolic intervals with distinct endpoints live in a dense chain
    CHECK(order_interval(IndexKind::SymbolicUncountable, Index::sym("a"), Index::sym("a")).finite);
    CHECK_THROWS_AS(
        order_interval(IndexKind::SymbolicUncountable, Index::sym("a"), Index::sym("b")), Error);
}

TEST_CASE("membership of leaves matches the definitions") {
    auto ap = arith_prog(3, 5);
    auto ap_oracle = oracle_ap(3, 5);
    auto sq = named_predicate("squares");
    auto sq_oracle = oracle_square();
    for (std::uint64_t n = 1; n <= 600; ++n) {
        CHECK(contains(*ap, n) == ap_oracle(n));
        CHECK(contains(*sq, n) == sq_oracle(n));
    }
    auto fin = finite_list({5, 2, 9, 2});
    for (std::uint64_t n = 1; n <= 12; ++n)
        CHECK(contains(*fin, n) == (n == 2 || n == 5 || n == 9));
    CHECK_FALSE(contains(*empty_set(), 1));
    CHECK(contains(*full_set(), 1));
    CHECK_THROWS_AS(named_predicate("primes"), Error);
}

TEST_CASE("boolean combinators against random oracles") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
        Sample s = gen_sample(rng, 3);
        for (std::uint64_t n = 1; n <= 400; ++n) CHECK(contains(*s.expr, n) == s.member(n));
    }
}

TEST_CASE("periodic normal form") {
    auto check_canonical = [](const SetExprPtr& e, std::uint64_t period,
                              std::vector<std::uint32_t> residues) {
        auto p = normalize(*e);
        REQUIRE(p.has_value());
        CHECK(p->period == period);
        CHECK(p->residues == residues);
        CHECK(p->plus.empty());
        CHECK(p->minus.empty());
    };
    check_canonical(evens(), 2, {0});
    check_canonical(odds(), 2, {1});
    check_canonical(set_union(evens(), odds()), 1, {0});
    check_canonical(set_intersection(arith_prog(1, 2), arith_prog(1, 3)), 6, {1});
    check_canonical(set_complement(arith_prog(1, 3)), 3, {0, 2});
    // 4 is already in ap(1,3), so the union normalizes without exceptions
    check_canonical(set_union(arith_prog(1, 3), finite_list({4})), 3, {1});

    auto plus5 = normalize(*set_union(arith_prog(1, 3), finite_list({5})));
    REQUIRE(plus5.has_value());
    CHECK(plus5->residues == std::vector<std::uint32_t>{1});
    CHECK(plus5->plus == std::vector<std::uint64_t>{5});

    auto minus1 = normalize(*set_intersection(odds(), set_complement(finite_list({1, 3}))));
    REQUIRE(minus1.has_value());
    CHECK(minus1->minus == std::vector<std::uint64_t>{1, 3});

    auto emptyp = normalize(*set_intersection(evens(), odds()));
    REQUIRE(emptyp.has_value());
    CHECK(emptyp->is_empty());

    CHECK_FALSE(normalize(*named_predicate("squares")).has_value());
    CHECK_FALSE(normalize(*set_union(evens(), named_predicate("cubes"))).has_value());

    // normal-form membership equals expression membership
    std::mt19937_64 rng(11);
    int normalized = 0;
    for (int t = 0; t < 60; ++t) {
        Sample s = gen_sample(rng, 2);
        auto p = normalize(*s.expr);
        if (!p) continue;
        ++normalized;
        for (std::uint64_t n = 1; n <= 300; ++n) CHECK(p->member(n) == s.member(n));
    }
    CHECK(normalized > 10);
}

TEST_CASE("symbolic emptiness, disjointness and inclusion") {
    CHECK(symbolic_empty(set_intersection(evens(), odds())) == Tri::Yes);
    CHECK(symbolic_empty(evens()) == Tri::No);
    CHECK(symbolic_disjoint(evens(), odds()) == Tri::Yes);
    CHECK(symbolic_disjoint(arith_prog(1, 4), arith_prog(3, 4)) == Tri::Yes);
    CHECK(symbolic_subset(finite_list({2, 4, 8}), evens()) == Tri::Yes);
    CHECK(symbolic_subset(evens(), odds()) == Tri::No);

    // propositional reasoning sees S against c(S) even through predicates
    auto sq = named_predicate("squares");
    CHECK(symbolic_empty(set_intersection(sq, set_complement(sq))) == Tri::Yes);
    // sampling refutes: 1 is both a square and a cube
    CHECK(symbolic_disjoint(sq, named_predicate("cubes")) == Tri::No);
    CHECK(symbolic_subset(sq, named_predicate("cubes")) == Tri::No);
    // squares are 0 or 1 mod 4; emptiness against ap(3,4) is true but not provable here
    CHECK(symbolic_empty(set_intersection(sq, arith_prog(3, 4))) == Tri::Unknown);

    CHECK(tail_disjoint_bound(sq, set_complement(sq)) == std::uint64_t{0});
    CHECK(tail_subset_bound(set_intersection(evens(), sq), evens()).has_value());
    auto bounded = tail_disjoint_bound(finite_list({3, 17}), full_set());
    REQUIRE(bounded.has_value());
    CHECK(*bounded >= 17);
}

TEST_CASE("prefix count: serial, parallel and oracle agree") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 15; ++t) {
        Sample s = gen_sample(rng, 3);
        for (std::uint64_t k : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{100},
                                std::uint64_t{1023}, std::uint64_t{4096}}) {
            std::uint64_t expect = oracle_count(s.member, k);
            CHECK(prefix_count_serial(*s.expr, k) == expect);
            CHECK(prefix_count_parallel(*s.expr, k) == expect);
            CHECK(prefix_count(*s.expr, k) == expect);
        }
    }
    // a larger sieve, predicate-heavy so the periodic fast path cannot answer
    auto hard = set_intersection(set_complement(named_predicate("squares")),
                                 set_union(arith_prog(2, 3), named_predicate("cubes")));
    std::uint64_t k = 1u << 16;
    CHECK(prefix_count_serial(*hard, k) == prefix_count_parallel(*hard, k));
}

TEST_CASE("density is exactly 1/d on arithmetic progressions") {
    for (std::uint64_t d = 1; d <= 64; ++d) {
        for (std::uint64_t a = 1; a <= d; ++a) {
            MeasureValue v = density(*arith_prog(a, d));
            REQUIRE(v.is_exact());
            CHECK(v.lo == rat(1, (long)d));
        }
        // counting oracle: exactly m members up to d*m
        CHECK(prefix_count(*arith_prog(d, d), d * 512) == 512);
    }
}

TEST_CASE("density additivity and complements on periodic pairs") {
    std::mt19937_64 rng(99);
    MeasurePtr mu = periodic_density_measure();
    for (int t = 0; t < 120; ++t) {
        std::uint64_t d = 2 + rng() % 23;
        std::uint64_t r1 = 1 + rng() % d, r2 = 1 + rng() % d;
        if (r1 == r2) r2 = (r2 % d) + 1;
        auto s1 = arith_prog(r1, d), s2 = arith_prog(r2, d);
        MeasureValue v1 = mu->eval(s1), v2 = mu->eval(s2);
        MeasureValue vu = mu->eval(set_union(s1, s2));
        REQUIRE(vu.is_exact());
        CHECK(vu.lo == v1.lo + v2.lo);
        MeasureValue vc = mu->eval(set_complement(s1));
        CHECK(vc.lo == Rational(1) - v1.lo);
    }
}

TEST_CASE("refinement intervals are nested and honest") {
    // leading decimal digit 1: the textbook set without an asymptotic density
    PredicateInfo lead1;
    lead1.name = "lead1";
    lead1.member = [](std::uint64_t n) {
        while (n >= 10) n /= 10;
        return n == 1;
    };
    lead1.infinite = true;
    auto s = predicate(lead1);

    BoundsRefinement r = density_refinement(*s, default_schedule());
    REQUIRE(r.horizons.size() == default_schedule().size());
    for (std::size_t j = 0; j + 1 < r.lo_tail.size(); ++j) {
        CHECK(r.lo_tail[j] <= r.lo_tail[j + 1]);
        CHECK(r.hi_tail[j] >= r.hi_tail[j + 1]);
    }
    MeasureValue v = density(*s);
    REQUIRE(v.kind == MeasureValue::Kind::Bounds);
    CHECK(v.lo > 0);
    CHECK(v.hi < 1);
    CHECK(v.lo < v.hi);

    // oscillation is real: prefix densities at 2*10^k and 10^k disagree persistently
    Rational low = prefix_density(*s, 100000), high = prefix_density(*s, 200000);
    CHECK(high - low > rat(1, 4));
}

TEST_CASE("periodic density measure field and values") {
    MeasurePtr mu = periodic_density_measure();
    CHECK(mu->name() == "periodic-density");
    CHECK(mu->domain() == IndexKind::Naturals);
    CHECK(mu->in_field(evens()));
    CHECK_FALSE(mu->in_field(named_predicate("squares")));
    CHECK(measure_eval(*mu, evens()).lo == rat(1, 2));
    CHECK(measure_eval(*mu, full_set()).lo == 1);
    CHECK(measure_eval(*mu, finite_list({1, 2, 3})).lo == 0);
    CHECK_THROWS_AS(measure_eval(*mu, named_predicate("squares")), Error);
}

TEST_CASE("prefix bounds measure absorbs declared densities") {
    MeasurePtr mu = prefix_bounds_measure();
    auto sq = named_predicate("squares");
    CHECK(mu->in_field(sq));
    CHECK(measure_eval(*mu, sq) == MeasureValue::exact(Rational(0)));
    CHECK(measure_eval(*mu, set_complement(sq)) == MeasureValue::exact(Rational(1)));
    CHECK(measure_eval(*mu, set_union(sq, named_predicate("cubes"))) ==
          MeasureValue::exact(Rational(0)));
    CHECK(measure_eval(*mu, set_intersection(set_complement(sq),
                                             set_complement(finite_list({1, 2})))) ==
          MeasureValue::exact(Rational(1)));
    CHECK(measure_eval(*mu, set_union(arith_prog(1, 2), sq)) ==
          MeasureValue::exact(rat(1, 2)));
}

TEST_CASE("cocountable measure over the symbolic index set") {
    MeasurePtr mu = cocountable_measure();
    CHECK(mu->domain() == IndexKind::SymbolicUncountable);
    auto small = listed({Atom{"a", {}}, Atom{"b", {}}});
    auto big = colisted({Atom{"z", {}}});
    CHECK(measure_eval(*mu, small).lo == 0);
    CHECK(measure_eval(*mu, big).lo == 1);
    CHECK(measure_eval(*mu, set_complement(small)).lo == 1);
    CHECK(measure_eval(*mu, set_union(small, small)).lo == 0);
    CHECK(measure_eval(*mu, set_intersection(big, set_complement(small))).lo == 1);
    CHECK_FALSE(mu->in_field(evens()));
}

TEST_CASE("evens relative measure") {
    MeasurePtr mu = evens_relative_measure();
    CHECK(measure_eval(*mu, evens()).lo == 1);
    CHECK(measure_eval(*mu, odds()).lo == 0);
    CHECK(measure_eval(*mu, full_set(IndexKind::Naturals)).lo == 1);
    CHECK(measure_eval(*mu, arith_prog(2, 4)).lo == rat(1, 2));
    CHECK(measure_eval(*mu, finite_list({2, 4})).lo == 0);
    CHECK(measure_eval(*mu, set_complement(finite_list({2, 4}))).lo == 1);
}

TEST_CASE("measure registry") {
    CHECK(measure_names() == std::vector<std::string>{"cocountable", "evens-relative",
                                                      "periodic-density", "prefix-bounds"});
    for (const auto& n : measure_names()) CHECK(measure_by_name(n)->name() == n);
    CHECK_THROWS_AS(measure_by_name("uniform"), Error);
}

TEST_CASE("axioms pass for the shipped measures") {
    std::vector<SetExprPtr> nat_samples = {
        evens(),
        odds(),
        arith_prog(1, 3),
        arith_prog(2, 3),
        arith_prog(3, 3),
        finite_list({1, 5, 9}),
        set_complement(finite_list({2})),
        set_union(arith_prog(1, 4), arith_prog(2, 4)),
        named_predicate("squares"),
        set_complement(named_predicate("squares")),
    };
    for (const char* name : {"periodic-density", "prefix-bounds", "evens-relative"}) {
        AxiomReport rep = axioms_check(*measure_by_name(name), nat_samples, 5);
        INFO(name);
        for (const auto& f : rep.failures) INFO(f.axiom, ": ", f.lhs, " / ", f.rhs, " ", f.detail);
        CHECK(rep.pass());
        CHECK(rep.disjoint_pairs_checked > 0);
        CHECK(rep.nested_pairs_checked > 0);
    }

    std::vector<SetExprPtr> sym_samples = {
        listed({Atom{"a", {}}}),
        listed({Atom{"b", {}}, Atom{"c", {}}}),
        colisted({Atom{"a", {}}}),
        set_complement(listed({Atom{"b", {}}})),
    };
    AxiomReport rep = axioms_check(*cocountable_measure(), sym_samples, 5);
    CHECK(rep.pass());
}

TEST_CASE("value formatting") {
    CHECK(to_string(MeasureValue::exact(rat(1, 2))) == "1/2 (exact)");
    CHECK(to_string(MeasureValue::exact(Rational(0))) == "0 (exact)");
    CHECK(to_string(MeasureValue::bounds(rat(1, 8), rat(1, 4), 1024)) ==
          "[1/8, 1/4] (bounds, horizon 1024)");
    CHECK(to_string(MeasureValue::undetermined()) == "undetermined");
}
