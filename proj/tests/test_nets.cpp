#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stnets/nets.hpp"

using namespace stnets;

namespace {

const RieszSpace V3 = RieszSpace::vector(3);
const RieszSpace Q = RieszSpace::rationals();

Element v3(long a, long b, long c) { return vector_of({Rational(a), Rational(b), Rational(c)}); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

/// x + (1/n) u over vector(3)
Net harmonic_net(const Element& x, const Element& u) {
    return make_net(V3, {}, tail_form(x, u, zero(V3), rat(1, 2)));
}

/// spikes on the squares over the rationals, harmonic elsewhere
Net spike_net(const Rational& x, const Rational& h, const Rational& spike) {
    return make_net(Q, {},
                    tail_spike(named_predicate("squares"), scalar(spike),
                               tail_form(scalar(x), scalar(h), zero(Q), rat(1, 2))));
}

} // namespace

TEST_CASE("evaluation matches the closed forms") {
    Element x = v3(1, -2, 0), u = v3(2, 1, 0), g = v3(0, 3, 1);
    Net f = make_net(V3, {}, tail_form(x, u, g, rat(2, 3)));
    Rational r(2, 3);
    Rational rn = 1;
    for (std::uint64_t n = 1; n <= 40; ++n) {
        rn *= r;
        Element expect = add(x, add(scale(rat(1, (long)n), u), scale(rn, g)));
        CHECK(eval(f, n) == expect);
    }

    // prefix overrides the tail
    Net with_prefix = make_net(V3, {v3(9, 9, 9), v3(8, 8, 8)}, tail_form(x, u, g, rat(2, 3)));
    CHECK(eval(with_prefix, 1) == v3(9, 9, 9));
    CHECK(eval(with_prefix, 2) == v3(8, 8, 8));
    CHECK(eval(with_prefix, 3) == eval(f, 3));

    Net s = spike_net(Rational(1), Rational(2), Rational(7));
    for (std::uint64_t n = 1; n <= 150; ++n) {
        std::uint64_t r0 = (std::uint64_t)std::sqrt((double)n);
        bool square = r0 * r0 == n || (r0 + 1) * (r0 + 1) == n;
        Element expect = square ? scalar(Rational(7))
                                : scalar(Rational(1) + Rational(2) / (long)n);
        CHECK(eval(s, n) == expect);
    }

    Net c0 = unit_interleave_net();
    CHECK(eval(c0, 1) == unit_seq(1));
    CHECK(eval(c0, 2) == zero(RieszSpace::finsupp()));
    CHECK(eval(c0, 7) == unit_seq(4));
    CHECK(eval(c0, 100) == zero(RieszSpace::finsupp()));

    // masked net: kept on evens, zero on odds
    Net m = mask(f, evens());
    for (std::uint64_t n = 1; n <= 30; ++n)
        CHECK(eval(m, n) == (n % 2 == 0 ? eval(f, n) : zero(V3)));
}

TEST_CASE("tail construction is validated") {
    CHECK(code_of([] { tail_form(v3(0, 0, 0), v3(0, 0, 0), v3(1, 0, 0), rat(3, 2)); }) ==
          ErrorCode::InvalidArgument);
    CHECK_NOTHROW(tail_form(v3(0, 0, 0), v3(1, 0, 0), v3(0, 0, 0), rat(3, 2))); // unused ratio
    CHECK(code_of([] { tail_form(v3(0, 0, 0), scalar(Rational(1)), v3(0, 0, 0), rat(1, 2)); }) ==
          ErrorCode::SpaceMismatch);
    CHECK(code_of([] {
              tail_spike(listed({Atom{"a", {}}}), scalar(Rational(1)),
                         tail_const(scalar(Rational(0))));
          }) == ErrorCode::DomainMismatch);
    CHECK(code_of([] { make_net(Q, {v3(1, 1, 1)}, tail_const(scalar(Rational(0)))); }) ==
          ErrorCode::SpaceMismatch);
    CHECK(code_of([] { tail_unit_interleave(), make_net(Q, {}, tail_unit_interleave()); }) ==
          ErrorCode::SpaceMismatch);
}

TEST_CASE("decrease along a set") {
    Element x = v3(1, 0, 2), u = v3(1, 2, 0);
    Net dec = harmonic_net(x, u);
    Verdict v = is_decreasing_on(dec, full_set());
    CHECK(v.accepted());

    // high value on the evens: the very first step 1 -> 2 already rises
    Net spiky = make_net(Q, {},
                         tail_spike(evens(), scalar(Rational(5)),
                                    tail_harmonic(scalar(Rational(1)))));
    Verdict bad = is_decreasing_on(spiky, full_set());
    CHECK(bad.status == Status::Rejected);
    REQUIRE(bad.pair.has_value());
    CHECK(bad.pair->first == 1);
    CHECK(bad.pair->second == 2);

    // off the spikes the same net decreases
    CHECK(is_decreasing_on(spiky, odds()).accepted());

    CHECK(code_of([&] { is_decreasing_on(dec, finite_list({1, 2, 3})); }) ==
          ErrorCode::EmptyDelta);

    // increasing net is rejected with the offending pair
    Net inc = make_net(V3, {}, tail_form(x, neg(u), zero(V3), rat(1, 2)));
    Verdict vi = is_decreasing_on(inc, full_set());
    CHECK(vi.status == Status::Rejected);
    CHECK(vi.pair.has_value());
}

TEST_CASE("infimum along a set") {
    Element x = v3(1, 0, 2), u = v3(1, 2, 0);
    Net dec = harmonic_net(x, u);
    auto inf_full = infimum_on(dec, full_set());
    REQUIRE(inf_full.has_value());
    CHECK(*inf_full == x);

    // restriction ignores spikes outside the set
    Net spiky = make_net(Q, {},
                         tail_spike(evens(), scalar(Rational(5)),
                                    tail_harmonic(scalar(Rational(1)))));
    auto inf_odds = infimum_on(spiky, odds());
    REQUIRE(inf_odds.has_value());
    CHECK(*inf_odds == scalar(Rational(0)));

    CHECK(code_of([&] { infimum_on(spiky, full_set()); }) == ErrorCode::NotDecreasing);

    // the interleaved net on the evens is identically zero
    auto inf_evens = infimum_on(unit_interleave_net(), evens());
    REQUIRE(inf_evens.has_value());
    CHECK(is_zero(*inf_evens));
}

TEST_CASE("order convergence checker") {
    Element x = v3(1, -1, 0), u = v3(2, 1, 1);
    Net net = make_net(V3, {}, tail_form(x, u, zero(V3), rat(1, 2)));
    Net dom = make_net(V3, {}, tail_form(zero(V3), u, zero(V3), rat(1, 2)));
    CHECK(check_order_conv(net, x, dom).accepted());

    // wrong limit: rejected at a concrete index
    Verdict wrong = check_order_conv(net, v3(5, 5, 5), dom);
    CHECK(wrong.status == Status::Rejected);
    CHECK(wrong.index.has_value());

    // dominating net whose infimum is not zero
    Net flat = constant_net(v3(1, 1, 1));
    Verdict vf = check_order_conv(net, x, flat);
    CHECK(vf.status == Status::Rejected);
    CHECK(vf.clause == "dominating-infimum");

    // dominating net that decays too fast to dominate
    Net weak = make_net(V3, {}, tail_form(zero(V3), scale(rat(1, 3), u), zero(V3), rat(1, 2)));
    Verdict vw = check_order_conv(net, x, weak);
    CHECK(vw.status == Status::Rejected);
    CHECK(vw.index.has_value());

    // the interleaved example defeats the entire template family
    Net c0 = unit_interleave_net();
    Element z = zero(RieszSpace::finsupp());
    auto family = dominating_templates(c0, z);
    CHECK(family.size() >= 3);
    for (const Net& tpl : family) {
        Verdict v = check_order_conv(c0, z, tpl);
        CHECK(v.status == Status::Rejected);
        CHECK((v.index.has_value() || v.pair.has_value()));
    }
}

TEST_CASE("statistically decreasing checker") {
    MeasurePtr pd = measure_by_name("periodic-density");
    MeasurePtr pb = measure_by_name("prefix-bounds");

    Net dec = make_net(Q, {}, tail_form(scalar(rat(1, 3)), scalar(Rational(1)), zero(Q), rat(1, 2)));
    SetExprPtr almost = set_complement(finite_list({4, 10}));
    Verdict ok = check_st_decreasing(dec, scalar(rat(1, 3)), almost, *pd);
    CHECK(ok.accepted());
    REQUIRE(ok.measure.has_value());
    CHECK(*ok.measure == MeasureValue::exact(Rational(1)));
    REQUIRE(ok.infimum.has_value());
    CHECK(*ok.infimum == scalar(rat(1, 3)));

    // delta of measure 1/2 is not enough, and the verdict says why
    Verdict half = check_st_decreasing(dec, scalar(rat(1, 3)), evens(), *pd);
    CHECK(half.status == Status::Rejected);
    CHECK(half.clause == "measure-one");
    REQUIRE(half.measure.has_value());
    CHECK(*half.measure == MeasureValue::exact(rat(1, 2)));

    // wrong infimum claim
    Verdict off = check_st_decreasing(dec, scalar(Rational(0)), almost, *pd);
    CHECK(off.status == Status::Rejected);
    CHECK(off.clause == "infimum");

    // sets the measure cannot price exactly raise rather than guess
    PredicateInfo lead1;
    lead1.name = "lead1";
    lead1.member = [](std::uint64_t n) {
        while (n >= 10) n /= 10;
        return n == 1;
    };
    lead1.infinite = true;
    CHECK(code_of([&] { check_st_decreasing(dec, scalar(rat(1, 3)), predicate(lead1), *pb); }) ==
          ErrorCode::UndeterminedMeasure);
    CHECK(code_of([&] {
              check_st_decreasing(dec, scalar(rat(1, 3)), named_predicate("squares"), *pd);
          }) == ErrorCode::OutsideField);
}

TEST_CASE("statistical order convergence with explicit witnesses") {
    MeasurePtr pb = measure_by_name("prefix-bounds");
    Net net = spike_net(Rational(1), Rational(2), Rational(7));
    Element x = scalar(Rational(1));
    Net p = make_net(Q, {}, tail_form(zero(Q), scalar(Rational(2)), zero(Q), rat(1, 2)));
    SetExprPtr off_spikes = set_complement(named_predicate("squares"));

    Verdict v = check_st_order_conv(net, x, Witness{p, off_spikes}, *pb);
    CHECK(v.accepted());

    // the same witness on the full set meets a spike
    Verdict on_full = check_st_order_conv(net, x, Witness{p, full_set()}, *pb);
    CHECK(on_full.status == Status::Rejected);
    REQUIRE(on_full.index.has_value());
    CHECK(contains(*named_predicate("squares"), *on_full.index));
    CHECK(abs(sub(eval(net, *on_full.index), x)) != inf(abs(sub(eval(net, *on_full.index), x)),
                                                        eval(p, *on_full.index)));

    // periodic density cannot price the spike complement at all
    MeasurePtr pd = measure_by_name("periodic-density");
    CHECK(code_of([&] { check_st_order_conv(net, x, Witness{p, off_spikes}, *pd); }) ==
          ErrorCode::OutsideField);
}

TEST_CASE("exceptional sets satisfy their defining property") {
    Net net = spike_net(Rational(1), Rational(2), Rational(7));
    Element x = scalar(Rational(1));
    Net p = make_net(Q, {}, tail_form(zero(Q), scalar(Rational(2)), zero(Q), rat(1, 2)));
    auto exc = exceptional_set(net, x, p);
    REQUIRE(exc.has_value());
    for (std::uint64_t n = 1; n <= 1500; ++n) {
        bool violated = !leq(abs(sub(eval(net, n), x)), eval(p, n));
        CHECK(contains(**exc, n) == violated);
    }

    // interleaved units against the zero candidate: exactly the odds
    Net c0 = unit_interleave_net();
    Element z = zero(RieszSpace::finsupp());
    auto exc0 = exceptional_set(c0, z, constant_net(z));
    REQUIRE(exc0.has_value());
    auto np = normalize(**exc0);
    auto no = normalize(*odds());
    REQUIRE(np.has_value());
    CHECK(*np == *no);
}

TEST_CASE("pointwise combinations evaluate exactly and stay closed") {
    Element xa = v3(1, 0, -1), ha = v3(2, -1, 0), ga = v3(0, 1, 1);
    Element xb = v3(0, 2, 1), hb = v3(-1, 1, 2), gb = v3(1, 0, -2);
    Net a = make_net(V3, {}, tail_form(xa, ha, ga, rat(1, 2)));
    Net b = make_net(V3, {}, tail_form(xb, hb, gb, rat(1, 2)));

    auto probe = [&](const Net& combined, auto op) {
        for (std::uint64_t n = 1; n <= 150; ++n)
            CHECK(eval(combined, n) == op(eval(a, n), eval(b, n)));
    };
    probe(combine(a, b, CombineOp::Add), [](const Element& l, const Element& r) { return add(l, r); });
    probe(combine(a, b, CombineOp::Sub), [](const Element& l, const Element& r) { return sub(l, r); });
    probe(combine(a, b, CombineOp::Sup), [](const Element& l, const Element& r) { return sup(l, r); });
    probe(combine(a, b, CombineOp::Inf), [](const Element& l, const Element& r) { return inf(l, r); });

    CHECK(combine(a, b, CombineOp::Add).tail->kind == TailRule::Kind::Form);
    CHECK(combine(a, b, CombineOp::Sup).tail->kind == TailRule::Kind::Form);

    Net sc = combine_scale(rat(-3, 2), a);
    Net ab = combine_abs(a);
    Net ng = combine_neg(a);
    for (std::uint64_t n = 1; n <= 150; ++n) {
        CHECK(eval(sc, n) == scale(rat(-3, 2), eval(a, n)));
        CHECK(eval(ab, n) == abs(eval(a, n)));
        CHECK(eval(ng, n) == neg(eval(a, n)));
    }

    // unary ops through combine() are refused
    CHECK(code_of([&] { combine(a, b, CombineOp::Abs); }) == ErrorCode::InvalidArgument);

    // distinct geometric ratios do not stay closed; evaluation is still exact
    // and the symbolic checkers answer honestly instead of guessing
    Net c = make_net(V3, {}, tail_form(xb, hb, gb, rat(1, 3)));
    Net mixed = combine(a, c, CombineOp::Add);
    CHECK(mixed.tail->kind == TailRule::Kind::Combined);
    for (std::uint64_t n = 1; n <= 60; ++n)
        CHECK(eval(mixed, n) == add(eval(a, n), eval(c, n)));
    Verdict v = is_decreasing_on(mixed, full_set());
    CHECK(v.status == Status::Undetermined);
}

TEST_CASE("branch combinations distribute over the pieces") {
    Net s1 = spike_net(Rational(1), Rational(2), Rational(5));
    Net s2 = make_net(Q, {},
                      tail_spike(finite_list({3, 6}), scalar(Rational(-4)),
                                 tail_form(scalar(Rational(2)), scalar(Rational(1)), zero(Q),
                                           rat(1, 2))));
    for (CombineOp op : {CombineOp::Add, CombineOp::Sub, CombineOp::Sup, CombineOp::Inf}) {
        Net both = combine(s1, s2, op);
        CHECK(both.tail->kind != TailRule::Kind::Combined);
        for (std::uint64_t n = 1; n <= 200; ++n) {
            Element l = eval(s1, n), r = eval(s2, n);
            Element expect = op == CombineOp::Add   ? add(l, r)
                             : op == CombineOp::Sub ? sub(l, r)
                             : op == CombineOp::Sup ? sup(l, r)
                                                    : inf(l, r);
            CHECK(eval(both, n) == expect);
        }
    }
}

TEST_CASE("subnets compose and certify cofinality") {
    Net c0 = unit_interleave_net();

    SubnetResult on_evens = subnet(c0, SubnetSelector::inclusion(evens()));
    CHECK(on_evens.cofinality.accepted());
    for (std::uint64_t m = 1; m <= 50; ++m)
        CHECK(is_zero(eval(on_evens.net, m)));

    SubnetResult shifted = subnet(c0, SubnetSelector::affine_map(2, -1)); // t(m) = 2m - 1
    CHECK(shifted.cofinality.accepted());
    for (std::uint64_t m = 1; m <= 50; ++m)
        CHECK(eval(shifted.net, m) == unit_seq((std::uint32_t)m));

    Net h = harmonic_net(v3(0, 0, 0), v3(1, 1, 1));
    SubnetResult squares = subnet(h, SubnetSelector::power_map(2));
    CHECK(squares.cofinality.accepted());
    for (std::uint64_t m = 1; m <= 40; ++m)
        CHECK(eval(squares.net, m) == eval(h, m * m));

    CHECK(code_of([&] { subnet(c0, SubnetSelector::inclusion(finite_list({5, 9}))); }) ==
          ErrorCode::NotCofinal);
    CHECK(code_of([&] { subnet(h, SubnetSelector::affine_map(0, 3)); }) ==
          ErrorCode::InvalidArgument);

    // a predicate set not declared infinite: cofinality stays undetermined
    PredicateInfo mystery;
    mystery.name = "mystery";
    mystery.member = [](std::uint64_t n) { return n % 7 == 3; };
    SubnetResult maybe = subnet(h, SubnetSelector::inclusion(predicate(mystery)));
    CHECK(maybe.cofinality.status == Status::Undetermined);
}

TEST_CASE("relatively uniform convergence") {
    Element u = v3(2, 1, 1);
    Net net = make_net(V3, {}, tail_form(v3(1, 1, 1), u, zero(V3), rat(1, 2)));
    CHECK(ru_check(net, v3(1, 1, 1), u).accepted());
    CHECK(ru_check(net, v3(1, 1, 1), v3(9, 9, 9)).accepted());

    // a constant offset never gets below u/m
    Net off = constant_net(v3(1, 0, 0));
    Verdict v = ru_check(off, v3(0, 0, 0), u);
    CHECK(v.status == Status::Rejected);
    CHECK(v.index.has_value());

    CHECK(code_of([&] { ru_check(net, v3(1, 1, 1), v3(-1, 0, 0)); }) == ErrorCode::NotPositive);

    // no single regulator controls the interleaved unit spikes
    Net c0 = unit_interleave_net();
    Verdict vc = ru_check(c0, zero(RieszSpace::finsupp()), unit_seq(1));
    CHECK(vc.status == Status::Rejected);
}

TEST_CASE("witness search over the template family") {
    MeasurePtr pb = measure_by_name("prefix-bounds");
    Net net = spike_net(Rational(1), Rational(2), Rational(7));
    Element x = scalar(Rational(1));

    auto w = witness_search(net, x, *pb);
    REQUIRE(w.has_value());
    CHECK(to_string(*w->delta) == to_string(*set_complement(named_predicate("squares"))));
    // the found dominating net is the harmonic envelope
    CHECK(eval(w->p, 4) == scalar(rat(1, 2)));
    CHECK(check_st_order_conv(net, x, *w, *pb).accepted());

    // order-convergent nets get the full-set witness
    Net plain = make_net(Q, {}, tail_form(x, scalar(Rational(2)), zero(Q), rat(1, 2)));
    auto wp = witness_search(plain, x, *pb);
    REQUIRE(wp.has_value());
    CHECK(to_string(*wp->delta) == to_string(*full_set()));

    // templates exhausted under the periodic density for the interleaved net
    Net c0 = unit_interleave_net();
    Element z = zero(RieszSpace::finsupp());
    CHECK_FALSE(witness_search(c0, z, *measure_by_name("periodic-density")).has_value());

    // ... but the measure that gives the evens mass one finds one
    auto we = witness_search(c0, z, *measure_by_name("evens-relative"));
    REQUIRE(we.has_value());
    CHECK(is_zero(eval(we->p, 2)));
    CHECK(check_st_order_conv(c0, z, *we, *measure_by_name("evens-relative")).accepted());

    // turning every template off leaves nothing to try
    WitnessTemplates none;
    none.const_zero = none.harmonic = none.geometric = false;
    CHECK_FALSE(witness_search(plain, x, *pb, none).has_value());
}

TEST_CASE("verdicts explain themselves") {
    Net net = spike_net(Rational(1), Rational(2), Rational(7));
    Verdict v = check_st_order_conv(net, scalar(Rational(1)),
                                    Witness{constant_net(scalar(Rational(0))), full_set()},
                                    *measure_by_name("prefix-bounds"));
    CHECK(v.status == Status::Rejected);
    std::string s = to_string(v);
    CHECK(s.find("rejected") != std::string::npos);
    CHECK(s.find("index") != std::string::npos);
    CHECK(to_string(Verdict::accept("x", "y")).find("accepted") != std::string::npos);
}
