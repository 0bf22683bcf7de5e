#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>

#include "stnets/suite.hpp"

using namespace stnets;

TEST_CASE("splitmix64 matches the reference stream") {
    SplitMix64 r(0);
    // Published outputs of splitmix64 seeded with 0.
    CHECK(r.next() == 0xE220A8397B1DCDAFull);
    CHECK(r.next() == 0x6E789E6AA1B965F4ull);
    CHECK(r.next() == 0x06C45D188009454Full);

    SplitMix64 a(12345), b(12345);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    SplitMix64 c(7);
    for (int i = 0; i < 200; ++i) {
        CHECK(c.below(10) < 10);
        CHECK(c.below(1) == 0);
        Rational q = c.rational(8, 6);
        CHECK(abs(q.get_num()) <= 8);
        CHECK(q.get_den() >= 1);
        CHECK(q.get_den() <= 6);
    }
}

TEST_CASE("mix_seed is a pure function of seed, label and trial") {
    CHECK(mix_seed(42, "prop/x", 3) == mix_seed(42, "prop/x", 3));
    CHECK(mix_seed(42, "prop/x", 3) != mix_seed(42, "prop/x", 4));
    CHECK(mix_seed(42, "prop/x", 3) != mix_seed(42, "prop/y", 3));
    CHECK(mix_seed(42, "prop/x", 3) != mix_seed(43, "prop/x", 3));

    // Streams for nearby trials do not collide over a short window.
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 64; ++t) seen.insert(mix_seed(1, "p", t));
    CHECK(seen.size() == 64);
}

TEST_CASE("generators produce what they promise") {
    std::vector<RieszSpace> spaces = {RieszSpace::rationals(), RieszSpace::vector(3),
                                      RieszSpace::finsupp()};
    for (const auto& space : spaces) {
        SplitMix64 rng(99);
        for (int i = 0; i < 50; ++i) {
            Element e = gen_element(rng, space);
            CHECK(leq(e, e)); // lives in the space, ops work
            Element p = gen_positive_element(rng, space);
            CHECK(leq(zero(space), p));
            CHECK(!is_zero(p));
        }
    }
}

TEST_CASE("convergent-net generators are re-verified by the checkers") {
    std::vector<RieszSpace> spaces = {RieszSpace::rationals(), RieszSpace::vector(3),
                                      RieszSpace::finsupp()};
    std::vector<MeasurePtr> measures = {measure_by_name("periodic-density"),
                                        measure_by_name("prefix-bounds")};
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto& space = spaces[seed % spaces.size()];
        auto os = gen_order_convergent_net(seed, space);
        CHECK(check_order_conv(os.net, os.limit, os.dominating).accepted());

        const auto& mu = *measures[seed % measures.size()];
        auto ss = gen_st_convergent_net(seed, space, mu);
        CHECK(check_st_order_conv(ss.net, ss.limit, ss.witness, mu).accepted());

        auto ms = gen_monotone_st_net(seed, space, mu);
        CHECK(check_st_order_conv(ms.net, ms.limit, ms.witness, mu).accepted());
        CHECK(is_decreasing_on(ms.net, full_set()).accepted());
    }
}

TEST_CASE("every property passes a short run and unknown names are rejected") {
    const auto& names = property_names();
    CHECK(names.size() >= 10);
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());

    SuiteConfig cfg;
    cfg.seed = 7;
    cfg.trials = 20;
    for (const auto& name : names) {
        PropertyResult r = run_property(name, cfg);
        CHECK(r.name == name);
        CHECK(r.trials == cfg.trials);
        INFO(name, ": ", r.failures.empty() ? "" : r.failures.front().verdict);
        CHECK(r.pass());
    }

    CHECK_THROWS_AS((void)run_property("no-such-property", cfg), Error);
    try {
        (void)run_property("no-such-property", cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownProperty);
    }
}

TEST_CASE("run_all is deterministic and parallel-agnostic") {
    SuiteConfig cfg;
    cfg.seed = 42;
    cfg.trials = 8;

    SuiteReport r1 = run_all(cfg);
    SuiteReport r2 = run_all(cfg);
    std::string j1 = report_to_json(r1);
    CHECK(j1 == report_to_json(r2));
    CHECK(j1.size() > 0);
    CHECK(j1.back() == '\n');

    SuiteConfig serial = cfg;
    serial.parallel = false;
    SuiteReport r3 = run_all(serial);
    r3.config.parallel = true; // the config echo is the only allowed difference
    CHECK(report_to_json(r3) == j1);

    CHECK(r1.all_pass());
    CHECK(report_to_text(r1).find("overall: pass") != std::string::npos);
}

TEST_CASE("run_all sections carry the advertised content") {
    SuiteConfig cfg;
    cfg.seed = 42;
    cfg.trials = 8;
    SuiteReport r = run_all(cfg);

    REQUIRE(r.properties.size() == property_names().size());
    for (std::size_t i = 0; i < r.properties.size(); ++i) {
        CHECK(r.properties[i].name == property_names()[i]);
        CHECK(r.properties[i].pass());
    }

    CHECK(r.lattice.pass());
    CHECK(r.lattice.birkhoff_quadruples == cfg.trials * 20);
    CHECK(r.lattice.lattice_law_triples > 0);

    REQUIRE(r.measure_axioms.size() == cfg.measures.size());
    for (std::size_t i = 0; i < r.measure_axioms.size(); ++i) {
        CHECK(r.measure_axioms[i].measure == cfg.measures[i]);
        CHECK(r.measure_axioms[i].pass);
        CHECK(r.measure_axioms[i].disjoint_pairs > 0);
    }

    CHECK(r.c0.order_convergence_rejected);
    CHECK(r.c0.order_rejections.size() >= 3);
    CHECK(r.c0.exceptional_is_odds);
    CHECK(r.c0.exceptional_density == MeasureValue::exact(rat(1, 2)));
    CHECK(!r.c0.st_witness_found_periodic);
    CHECK(r.c0.evens_restriction_zero);
    CHECK(r.c0.st_accepts_evens_relative);
    CHECK(!r.c0.discrepancy_note.empty());
    CHECK(!r.c0.unboundedness_note.empty());

    REQUIRE(r.corrupted_measure_witness.has_value());
    CHECK(r.corrupted_measure_witness->find("additive") != std::string::npos);

    SuiteConfig quiet = cfg;
    quiet.include_corrupted_measure_demo = false;
    SuiteReport rq = run_all(quiet);
    CHECK(!rq.corrupted_measure_witness.has_value());
    CHECK(rq.all_pass());
}

TEST_CASE("a zero-trial run is vacuous but well formed") {
    SuiteConfig cfg;
    cfg.trials = 0;
    SuiteReport r = run_all(cfg);
    CHECK(r.vacuous);
    CHECK(r.all_pass());
    for (const auto& p : r.properties) CHECK(p.trials == 0);
    CHECK(report_to_json(r).find("\"vacuous\": true") != std::string::npos);
}

TEST_CASE("the corrupted measure demo has teeth") {
    MeasurePtr mu = corrupted_density_measure();
    CHECK(mu->eval(evens()) == MeasureValue::exact(rat(3, 4)));
    CHECK(mu->eval(odds()) == MeasureValue::exact(rat(1, 2)));
    // Away from the corrupted set it agrees with the honest density.
    CHECK(mu->eval(arith_prog(1, 4)) == periodic_density_measure()->eval(arith_prog(1, 4)));

    std::vector<SetExprPtr> samples = {evens(), odds(), arith_prog(1, 4), arith_prog(3, 4),
                                       finite_list({1, 2, 3})};
    AxiomReport rep = axioms_check(*mu, samples, 5);
    CHECK(!rep.pass());
    CHECK(!rep.additive);
    REQUIRE(!rep.failures.empty());
    bool found = false;
    for (const auto& f : rep.failures)
        if (f.axiom == "additive" && !f.lhs.empty() && !f.rhs.empty()) found = true;
    CHECK(found);

    // The honest measure passes on the very same samples.
    CHECK(axioms_check(*periodic_density_measure(), samples, 5).pass());
}

TEST_CASE("the interleaved example report stands on its own") {
    C0ExampleReport c0 = c0_example_report({measure_by_name("periodic-density"),
                                            measure_by_name("prefix-bounds")});
    CHECK(c0.order_convergence_rejected);
    for (const auto& rej : c0.order_rejections) {
        CHECK(!rej.dominating.empty());
        CHECK(!rej.verdict.empty());
    }
    CHECK(c0.exceptional_set == to_string(*normalize(*odds())));
    CHECK(c0.exceptional_is_odds);
    CHECK(to_string(c0.exceptional_density) == "1/2 (exact)");
    CHECK(c0.discrepancy_note.find("evens") != std::string::npos);
}

TEST_CASE("lattice self test is seed-stable") {
    std::vector<RieszSpace> spaces = {RieszSpace::rationals(), RieszSpace::vector(3),
                                      RieszSpace::finsupp()};
    LatticeSelfTest a = lattice_self_test(9, 40, spaces);
    CHECK(a.pass());
    CHECK(a.birkhoff_quadruples == 40);
    CHECK(a.lattice_law_triples > 0);
    LatticeSelfTest b = lattice_self_test(9, 40, spaces);
    CHECK(a.birkhoff_quadruples == b.birkhoff_quadruples);
    CHECK(a.lattice_law_triples == b.lattice_law_triples);
}
