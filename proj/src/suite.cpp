#include "stnets/suite.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stnets {

// ---------------------------------------------------------------------------
// RNG
// ---------------------------------------------------------------------------

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) raise(ErrorCode::InvalidArgument, "below(0)");
    return (std::uint64_t)(((unsigned __int128)next() * bound) >> 64);
}

Rational SplitMix64::rational(std::uint64_t max_num, std::uint64_t max_den) {
    std::int64_t num = (std::int64_t)below(2 * max_num + 1) - (std::int64_t)max_num;
    std::uint64_t den = below(max_den) + 1;
    return rat((long)num, (long)den);
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& label, std::uint64_t trial) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ull;
    }
    SplitMix64 a(seed ^ h);
    SplitMix64 b(a.next() ^ (trial * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull));
    return b.next();
}

// ---------------------------------------------------------------------------
// Element generators
// ---------------------------------------------------------------------------

Element gen_element(SplitMix64& rng, const RieszSpace& space) {
    switch (space.kind) {
        case RieszSpace::Kind::Rationals: return scalar(rng.rational(8, 6));
        case RieszSpace::Kind::RationalVector: {
            std::vector<Rational> coords;
            for (std::uint32_t i = 0; i < space.dim; ++i) coords.push_back(rng.rational(8, 6));
            return vector_of(std::move(coords));
        }
        case RieszSpace::Kind::FinSuppSeq: {
            std::vector<std::pair<std::uint32_t, Rational>> entries;
            std::uint64_t k = rng.below(4);
            for (std::uint64_t i = 0; i < k; ++i) {
                std::uint32_t idx = (std::uint32_t)(1 + rng.below(12));
                bool dup = false;
                for (const auto& e : entries) dup = dup || e.first == idx;
                if (!dup) entries.push_back({idx, rng.rational(8, 6)});
            }
            return finsupp_of(std::move(entries));
        }
    }
    raise(ErrorCode::InvalidArgument, "bad space");
}

Element gen_positive_element(SplitMix64& rng, const RieszSpace& space) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        Element e = abs(gen_element(rng, space));
        if (!is_zero(e)) return e;
    }
    switch (space.kind) {
        case RieszSpace::Kind::Rationals: return scalar(Rational(1));
        case RieszSpace::Kind::RationalVector: {
            std::vector<Rational> coords(space.dim, Rational(0));
            coords[0] = 1;
            return vector_of(std::move(coords));
        }
        case RieszSpace::Kind::FinSuppSeq: return unit_seq(1);
    }
    raise(ErrorCode::InvalidArgument, "bad space");
}

// ---------------------------------------------------------------------------
// Net generators
// ---------------------------------------------------------------------------

namespace {

const std::vector<Rational>& ratio_pool() {
    static const std::vector<Rational> pool = {rat(1, 2), rat(1, 3), rat(2, 3), rat(3, 4)};
    return pool;
}

struct CoreOpts {
    bool allow_spikes = true;
    bool monotone = false;   // nonnegative decreasing perturbation parts
    bool null_limit = false; // limit pinned to 0
    bool nonneg_net = false; // every value of the net is >= 0
    std::optional<Rational> force_ratio;
};

struct CoreSample {
    Net net;
    Element limit;
    Net p; // envelope candidate, 0-centered, nonnegative parts
    SetExprPtr delta;
    SetExprPtr spikes; // null when there are none
    Element h, g;
    Rational ratio;
};

/// Spike sets the measure prices at 0 (so the complement gets measure 1).
SetExprPtr pick_spike_set(SplitMix64& rng, const DirectedSetMeasure& mu) {
    std::vector<SetExprPtr> pool;
    {
        std::vector<std::uint64_t> elems;
        std::uint64_t k = 1 + rng.below(4);
        for (std::uint64_t i = 0; i < k; ++i) elems.push_back(1 + rng.below(64));
        pool.push_back(finite_list(std::move(elems)));
    }
    for (const char* name : {"squares", "cubes", "pow4", "pow5"})
        pool.push_back(named_predicate(name));
    std::uint64_t start = rng.below(pool.size());
    for (std::uint64_t i = 0; i < pool.size(); ++i) {
        const auto& s = pool[(start + i) % pool.size()];
        auto comp = set_complement(s);
        if (!mu.in_field(comp)) continue;
        MeasureValue v = mu.eval(comp);
        if (v.is_exact() && v.lo == 1) return s;
    }
    return nullptr;
}

CoreSample gen_core(SplitMix64& rng, const RieszSpace& space, const DirectedSetMeasure* mu,
                    const CoreOpts& o) {
    Rational ratio = o.force_ratio ? *o.force_ratio : ratio_pool()[rng.below(ratio_pool().size())];
    Element h = zero(space), g = zero(space);
    auto draw_part = [&] {
        return o.monotone || o.nonneg_net ? gen_positive_element(rng, space)
                                          : gen_element(rng, space);
    };
    switch (rng.below(4)) {
        case 0: h = draw_part(); break;
        case 1: g = draw_part(); break;
        case 2:
            h = draw_part();
            g = draw_part();
            break;
        default: break; // constant core
    }
    Element x = o.null_limit ? zero(space) : gen_element(rng, space);
    if (o.nonneg_net && !o.null_limit)
        x = add(gen_positive_element(rng, space), add(abs(h), abs(g)));

    TailPtr base = tail_form(x, h, g, ratio);
    SetExprPtr spikes;
    if (o.allow_spikes && mu && rng.below(4) != 0) {
        spikes = pick_spike_set(rng, *mu);
        if (spikes) {
            Element v = draw_part();
            base = tail_spike(spikes, std::move(v), base);
        }
    }
    Net net = make_net(space, {}, base);
    Net p = make_net(space, {}, tail_form(zero(space), abs(h), abs(g), ratio));
    SetExprPtr delta = spikes ? set_complement(spikes) : full_set();
    return {std::move(net), std::move(x), std::move(p), std::move(delta), std::move(spikes),
            std::move(h),   std::move(g), std::move(ratio)};
}

std::string describe_net(const Net& n) {
    std::string s = "tail=" + to_string(*n.tail);
    if (!n.prefix.empty()) s += " (prefix of " + std::to_string(n.prefix.size()) + ")";
    return s;
}

std::string describe_core(const CoreSample& s) {
    return "net{" + describe_net(s.net) + "}, limit=" + to_string(s.limit) +
           ", delta=" + to_string(*s.delta) + ", p{" + describe_net(s.p) + "}";
}

} // namespace

OrderConvergentSample gen_order_convergent_net(std::uint64_t seed, const RieszSpace& space) {
    SplitMix64 rng(seed);
    CoreOpts o;
    o.allow_spikes = false;
    CoreSample s = gen_core(rng, space, nullptr, o);
    return {std::move(s.net), std::move(s.limit), std::move(s.p)};
}

StConvergentSample gen_st_convergent_net(std::uint64_t seed, const RieszSpace& space,
                                         const DirectedSetMeasure& mu) {
    SplitMix64 rng(seed);
    CoreSample s = gen_core(rng, space, &mu, {});
    return {std::move(s.net), std::move(s.limit), Witness{std::move(s.p), std::move(s.delta)}};
}

StConvergentSample gen_monotone_st_net(std::uint64_t seed, const RieszSpace& space,
                                       const DirectedSetMeasure& mu) {
    SplitMix64 rng(seed);
    CoreOpts o;
    o.allow_spikes = false;
    o.monotone = true;
    CoreSample s = gen_core(rng, space, &mu, o);
    return {std::move(s.net), std::move(s.limit), Witness{std::move(s.p), std::move(s.delta)}};
}

// ---------------------------------------------------------------------------
// Property trials
// ---------------------------------------------------------------------------

const std::vector<std::string>& property_names() {
    static const std::vector<std::string> names = {
        "basic_props",    "dec_implies_conv", "dedekind_monotone", "ideal_bounded_null",
        "lattice_derived", "lattice_sup",      "mask_characteristic", "monotone_order",
        "order_dec_null", "order_implies_st", "riesz_closure",     "ru_implies_st",
        "squeeze",        "subnet_implies"};
    return names;
}

namespace {

struct TrialCtx {
    const SuiteConfig& cfg;
    std::string name;
    std::uint64_t trial;
    RieszSpace space;
    MeasurePtr mu;

    std::uint64_t seed(const std::string& tag = "") const {
        return mix_seed(cfg.seed, name + (tag.empty() ? "" : "/" + tag), trial);
    }
    std::uint64_t horizon() const { return cfg.horizon; }
};

[[noreturn]] void trial_fail(const TrialCtx& ctx, const std::string& input,
                             const std::string& evidence) {
    // thrown to the per-trial harness, which records it
    throw PropertyFailure{ctx.trial, input, evidence};
}

void need(const TrialCtx& ctx, const Verdict& v, const std::string& what,
          const std::string& input) {
    if (!v.accepted()) trial_fail(ctx, input, what + ": " + to_string(v));
}

void need_true(const TrialCtx& ctx, bool ok, const std::string& what, const std::string& input) {
    if (!ok) trial_fail(ctx, input, what);
}

void need_measure_one(const TrialCtx& ctx, const SetExprPtr& s, const std::string& input) {
    MeasureValue v = measure_eval(*ctx.mu, s);
    need_true(ctx, v.is_exact() && v.lo == 1,
              "expected measure 1 on " + to_string(*s) + ", got " + to_string(v), input);
}

/// Delta shrunk by finitely many indices: still measure one, still inside.
SetExprPtr shrink_delta(SplitMix64& rng, const SetExprPtr& delta) {
    std::vector<std::uint64_t> drop;
    std::uint64_t k = 1 + rng.below(3);
    for (std::uint64_t i = 0; i < k; ++i) drop.push_back(1 + rng.below(32));
    return set_intersection(delta, set_complement(finite_list(std::move(drop))));
}

CoreSample core_for(const TrialCtx& ctx, const std::string& tag, const CoreOpts& o) {
    SplitMix64 rng(ctx.seed(tag));
    return gen_core(rng, ctx.space, ctx.mu.get(), o);
}

/// Second draw forced onto the first sample's ratio so pointwise combinations
/// stay inside the closed tail families.
CoreSample paired_core(const TrialCtx& ctx, const std::string& tag, const CoreSample& first,
                       CoreOpts o) {
    o.force_ratio = first.ratio;
    return core_for(ctx, tag, o);
}

void verify_sample(const TrialCtx& ctx, const CoreSample& s, const std::string& input) {
    need(ctx, check_st_order_conv(s.net, s.limit, Witness{s.p, s.delta}, *ctx.mu, ctx.horizon()),
         "generated sample rejected by the checker", input);
}

// --- the fourteen runners ---------------------------------------------------

void trial_squeeze(const TrialCtx& ctx) {
    SplitMix64 rng(ctx.seed());
    CoreOpts o;
    o.monotone = true;
    o.null_limit = true;
    CoreSample env = gen_core(rng, ctx.space, ctx.mu.get(), o); // envelope >= 0
    Element L = gen_element(rng, ctx.space);
    static const Rational mids[] = {rat(-1, 1), rat(-1, 2), Rational(0), rat(1, 2), Rational(1)};
    Rational c = mids[rng.below(5)];

    Net lower = combine(constant_net(L), env.net, CombineOp::Sub);
    Net upper = combine(constant_net(L), env.net, CombineOp::Add);
    Net middle = combine(constant_net(L), combine_scale(c, env.net), CombineOp::Add);
    std::string input = "L=" + to_string(L) + ", c=" + to_string(c) + ", envelope " +
                        describe_core(env);

    for (std::uint64_t n = 1; n <= 64; ++n) {
        Element lo = eval(lower, n), mi = eval(middle, n), hi = eval(upper, n);
        need_true(ctx, leq(lo, mi) && leq(mi, hi),
                  "pointwise order broken at index " + std::to_string(n), input);
    }
    Witness w{env.p, env.delta};
    need(ctx, check_st_order_conv(lower, L, w, *ctx.mu, ctx.horizon()), "lower premise", input);
    need(ctx, check_st_order_conv(upper, L, w, *ctx.mu, ctx.horizon()), "upper premise", input);
    need(ctx, check_st_order_conv(middle, L, w, *ctx.mu, ctx.horizon()), "middle conclusion",
         input);
}

void trial_order_implies_st(const TrialCtx& ctx) {
    OrderConvergentSample s = gen_order_convergent_net(ctx.seed(), ctx.space);
    std::string input = "net{" + describe_net(s.net) + "}, limit=" + to_string(s.limit);
    need(ctx, check_order_conv(s.net, s.limit, s.dominating, ctx.horizon()), "order premise",
         input);
    need(ctx, check_st_order_conv(s.net, s.limit, Witness{s.dominating, full_set()}, *ctx.mu,
                                  ctx.horizon()),
         "st conclusion with the order witness", input);
}

void trial_dedekind_monotone(const TrialCtx& ctx) {
    // Dedekind-complete instance only: the finitely supported sequences lack
    // the suprema this corollary needs.
    StConvergentSample s = gen_monotone_st_net(ctx.seed(), ctx.space, *ctx.mu);
    std::string input = "net{" + describe_net(s.net) + "}, limit=" + to_string(s.limit);
    need(ctx, is_decreasing_on(s.net, full_set(), ctx.horizon()), "monotone premise", input);
    Element top = eval(s.net, 1);
    for (std::uint64_t n = 1; n <= 64; ++n)
        need_true(ctx, leq(s.limit, eval(s.net, n)) && leq(eval(s.net, n), top),
                  "order bounds broken at index " + std::to_string(n), input);
    need(ctx, check_st_order_conv(s.net, s.limit, s.witness, *ctx.mu, ctx.horizon()),
         "st conclusion", input);
}

void trial_subnet_implies(const TrialCtx& ctx) {
    CoreSample s = core_for(ctx, "", {});
    std::string input = describe_core(s);
    verify_sample(ctx, s, input);

    SplitMix64 rng(ctx.seed("sigma"));
    SetExprPtr sigma = shrink_delta(rng, s.delta);
    need_true(ctx, symbolic_subset(sigma, s.delta) == Tri::Yes, "sigma not inside delta", input);
    need_measure_one(ctx, sigma, input);

    SubnetResult sub = subnet(s.net, SubnetSelector::inclusion(sigma), ctx.horizon());
    need(ctx, sub.cofinality, "cofinality of the inclusion selector", input);
    for (std::uint64_t m = 1; m <= 16; ++m) {
        Element via = eval(sub.net, m);
        // the m-th member of sigma, by scan
        std::uint64_t n = 0, seen = 0;
        while (seen < m) {
            ++n;
            if (contains(*sigma, n)) ++seen;
        }
        need_true(ctx, via == eval(s.net, n),
                  "subnet evaluation disagrees at position " + std::to_string(m), input);
    }
    need(ctx, check_st_order_conv(s.net, s.limit, Witness{s.p, sigma}, *ctx.mu, ctx.horizon()),
         "whole-net conclusion from the subnet witness", input);
}

void trial_lattice_sup(const TrialCtx& ctx) {
    CoreSample a = core_for(ctx, "a", {});
    CoreSample b = paired_core(ctx, "b", a, {});
    std::string input = "a: " + describe_core(a) + "; b: " + describe_core(b);
    verify_sample(ctx, a, input);
    verify_sample(ctx, b, input);

    SetExprPtr gamma = set_intersection(a.delta, b.delta);
    need_measure_one(ctx, gamma, input);

    Net v = combine(a.net, b.net, CombineOp::Sup);
    Net psum = combine(a.p, b.p, CombineOp::Add);
    need(ctx, check_st_order_conv(v, sup(a.limit, b.limit), Witness{psum, gamma}, *ctx.mu,
                                  ctx.horizon()),
         "sup conclusion", input);
}

void trial_lattice_derived(const TrialCtx& ctx) {
    CoreSample a = core_for(ctx, "a", {});
    CoreSample b = paired_core(ctx, "b", a, {});
    std::string input = "a: " + describe_core(a) + "; b: " + describe_core(b);
    verify_sample(ctx, a, input);
    verify_sample(ctx, b, input);
    SetExprPtr gamma = set_intersection(a.delta, b.delta);
    Net psum = combine(a.p, b.p, CombineOp::Add);

    need(ctx, check_st_order_conv(combine(a.net, b.net, CombineOp::Inf), inf(a.limit, b.limit),
                                  Witness{psum, gamma}, *ctx.mu, ctx.horizon()),
         "inf conclusion", input);
    need(ctx, check_st_order_conv(combine_abs(a.net), abs(a.limit), Witness{a.p, a.delta},
                                  *ctx.mu, ctx.horizon()),
         "abs conclusion", input);
    Net zero_net = constant_net(zero(ctx.space));
    need(ctx, check_st_order_conv(combine(a.net, zero_net, CombineOp::Sup),
                                  sup(a.limit, zero(ctx.space)), Witness{a.p, a.delta}, *ctx.mu,
                                  ctx.horizon()),
         "positive-part conclusion", input);
    need(ctx, check_st_order_conv(combine(combine_neg(a.net), zero_net, CombineOp::Sup),
                                  sup(neg(a.limit), zero(ctx.space)), Witness{a.p, a.delta},
                                  *ctx.mu, ctx.horizon()),
         "negative-part conclusion", input);
}

void trial_basic_props(const TrialCtx& ctx) {
    CoreSample a = core_for(ctx, "a", {});
    std::string input = describe_core(a);
    verify_sample(ctx, a, input);

    // (i) x_n -> x iff x_n - x -> 0 iff |x_n - x| -> 0
    Net shifted = combine(a.net, constant_net(a.limit), CombineOp::Sub);
    need(ctx, check_st_order_conv(shifted, zero(ctx.space), Witness{a.p, a.delta}, *ctx.mu,
                                  ctx.horizon()),
         "shift to zero", input);
    need(ctx, check_st_order_conv(combine_abs(shifted), zero(ctx.space), Witness{a.p, a.delta},
                                  *ctx.mu, ctx.horizon()),
         "absolute shift to zero", input);

    // (ii) linearity
    CoreSample b = paired_core(ctx, "b", a, {});
    verify_sample(ctx, b, input + "; b: " + describe_core(b));
    SplitMix64 rng(ctx.seed("scalars"));
    Rational ca = rng.rational(4, 3), cb = rng.rational(4, 3);
    Net lin = combine(combine_scale(ca, a.net), combine_scale(cb, b.net), CombineOp::Add);
    Net plin = combine(combine_scale(ca < 0 ? Rational(-ca) : ca, a.p),
                       combine_scale(cb < 0 ? Rational(-cb) : cb, b.p), CombineOp::Add);
    Element lim = add(scale(ca, a.limit), scale(cb, b.limit));
    SetExprPtr gamma = set_intersection(a.delta, b.delta);
    need_measure_one(ctx, gamma, input);
    need(ctx, check_st_order_conv(lin, lim, Witness{plin, gamma}, *ctx.mu, ctx.horizon()),
         "linearity (" + to_string(ca) + ", " + to_string(cb) + ")", input);

    // (iii) uniqueness: the template search accepts the true limit and turns
    // away a shifted one.
    WitnessTemplates tpl;
    tpl.extra_p = {a.p};
    need_true(ctx, witness_search(a.net, a.limit, *ctx.mu, tpl, ctx.horizon()).has_value(),
              "search failed on the true limit", input);
    Element off = gen_positive_element(rng, ctx.space);
    need_true(ctx, !witness_search(a.net, add(a.limit, off), *ctx.mu, tpl, ctx.horizon())
                        .has_value(),
              "search accepted the shifted limit " + to_string(add(a.limit, off)), input);

    // (iv) positive cone, through the positive part
    Net pos = combine(a.net, constant_net(zero(ctx.space)), CombineOp::Sup);
    Element pos_lim = sup(a.limit, zero(ctx.space));
    need(ctx, check_st_order_conv(pos, pos_lim, Witness{a.p, a.delta}, *ctx.mu, ctx.horizon()),
         "positive part", input);
    need_true(ctx, leq(zero(ctx.space), pos_lim), "limit of a nonnegative net left the cone",
              input);

    // (v) restriction to any further measure-one set
    SetExprPtr sigma = shrink_delta(rng, a.delta);
    need_measure_one(ctx, sigma, input);
    need(ctx, check_st_order_conv(a.net, a.limit, Witness{a.p, sigma}, *ctx.mu, ctx.horizon()),
         "restriction to a smaller measure-one set", input);
}

void trial_monotone_order(const TrialCtx& ctx) {
    // precondition filter: regenerate on a non-monotone draw
    StConvergentSample s = gen_monotone_st_net(ctx.seed(), ctx.space, *ctx.mu);
    for (int attempt = 1; attempt <= 3; ++attempt) {
        if (is_decreasing_on(s.net, full_set(), ctx.horizon()).accepted()) break;
        s = gen_monotone_st_net(ctx.seed("regen" + std::to_string(attempt)), ctx.space, *ctx.mu);
    }
    std::string input = "net{" + describe_net(s.net) + "}, limit=" + to_string(s.limit);
    need(ctx, is_decreasing_on(s.net, full_set(), ctx.horizon()), "monotone premise", input);
    need(ctx, check_st_order_conv(s.net, s.limit, s.witness, *ctx.mu, ctx.horizon()),
         "st premise", input);

    auto inf_full = infimum_on(s.net, full_set(), ctx.horizon());
    need_true(ctx, inf_full.has_value(), "no closed-form infimum", input);
    need_true(ctx, *inf_full == s.limit,
              "infimum " + to_string(*inf_full) + " differs from the st-limit", input);
    Net dominating = combine(s.net, constant_net(s.limit), CombineOp::Sub);
    need(ctx, check_order_conv(s.net, s.limit, dominating, ctx.horizon()),
         "order conclusion", input);
}

void trial_mask_characteristic(const TrialCtx& ctx) {
    SplitMix64 rng(ctx.seed());
    CoreOpts o;
    o.null_limit = true;
    CoreSample s = gen_core(rng, ctx.space, ctx.mu.get(), o);
    std::string input = describe_core(s);
    need_measure_one(ctx, s.delta, input);

    Net masked = mask(s.net, s.delta);
    need(ctx, check_st_order_conv(masked, zero(ctx.space), Witness{s.p, full_set()}, *ctx.mu,
                                  ctx.horizon()),
         "masked premise", input);
    need(ctx, check_st_order_conv(s.net, zero(ctx.space), Witness{s.p, s.delta}, *ctx.mu,
                                  ctx.horizon()),
         "unmasked conclusion", input);
}

void trial_riesz_closure(const TrialCtx& ctx) {
    CoreSample a = core_for(ctx, "a", {});
    CoreSample b = paired_core(ctx, "b", a, {});
    std::string input = "a: " + describe_core(a) + "; b: " + describe_core(b);
    verify_sample(ctx, a, input);
    verify_sample(ctx, b, input);
    SplitMix64 rng(ctx.seed("scalars"));
    Rational ca = rng.rational(4, 3), cb = rng.rational(4, 3);

    Net lin = combine(combine_scale(ca, a.net), combine_scale(cb, b.net), CombineOp::Add);
    Element lim = add(scale(ca, a.limit), scale(cb, b.limit));
    Net plin = combine(combine_scale(ca < 0 ? Rational(-ca) : ca, a.p),
                       combine_scale(cb < 0 ? Rational(-cb) : cb, b.p), CombineOp::Add);
    SetExprPtr gamma = set_intersection(a.delta, b.delta);

    need(ctx, check_st_order_conv(combine_abs(lin), abs(lim), Witness{plin, gamma}, *ctx.mu,
                                  ctx.horizon()),
         "closure under |a*x + b*w|", input);
    need(ctx, check_st_order_conv(combine(lin, a.net, CombineOp::Sup), sup(lim, a.limit),
                                  Witness{combine(plin, a.p, CombineOp::Add), gamma}, *ctx.mu,
                                  ctx.horizon()),
         "closure under sup with a member", input);
}

void trial_ideal_bounded_null(const TrialCtx& ctx) {
    SplitMix64 rng(ctx.seed());
    CoreOpts o;
    o.null_limit = true;
    CoreSample s = gen_core(rng, ctx.space, ctx.mu.get(), o);
    std::string input = describe_core(s);
    verify_sample(ctx, s, input);

    static const Rational thetas[] = {Rational(1), rat(-1, 1), rat(1, 2), rat(-1, 2), rat(1, 3)};
    Rational c_even = thetas[rng.below(5)], c_odd = thetas[rng.below(5)];
    Net y = combine(mask(combine_scale(c_even, s.net), evens()),
                    mask(combine_scale(c_odd, s.net), odds()), CombineOp::Add);
    input += "; y via (" + to_string(c_even) + " on evens, " + to_string(c_odd) + " on odds)";

    for (std::uint64_t n = 1; n <= 64; ++n)
        need_true(ctx, leq(abs(eval(y, n)), abs(eval(s.net, n))),
                  "|y| <= |x| broken at index " + std::to_string(n), input);
    need(ctx, check_st_order_conv(y, zero(ctx.space), Witness{s.p, s.delta}, *ctx.mu,
                                  ctx.horizon()),
         "ideal conclusion with the transported witness", input);
}

void trial_dec_implies_conv(const TrialCtx& ctx) {
    SplitMix64 rng(ctx.seed());
    CoreOpts o;
    o.monotone = true;
    CoreSample s = gen_core(rng, ctx.space, ctx.mu.get(), o);
    std::string input = describe_core(s);
    need(ctx, check_st_decreasing(s.net, s.limit, s.delta, *ctx.mu, ctx.horizon()),
         "st-decreasing premise", input);
    Net pw = combine(s.net, constant_net(s.limit), CombineOp::Sub);
    need(ctx, check_st_order_conv(s.net, s.limit, Witness{pw, s.delta}, *ctx.mu, ctx.horizon()),
         "st-order conclusion with p = x - limit", input);
}

void trial_order_dec_null(const TrialCtx& ctx) {
    SplitMix64 rng(ctx.seed());
    CoreOpts o;
    o.monotone = true;
    o.null_limit = true;
    o.allow_spikes = false;
    CoreSample s = gen_core(rng, ctx.space, ctx.mu.get(), o);
    std::string input = describe_core(s);
    need(ctx, is_decreasing_on(s.net, full_set(), ctx.horizon()), "decreasing premise", input);
    auto inf_full = infimum_on(s.net, full_set(), ctx.horizon());
    need_true(ctx, inf_full && is_zero(*inf_full), "net does not decrease to 0", input);
    need(ctx, check_st_decreasing(s.net, zero(ctx.space), full_set(), *ctx.mu, ctx.horizon()),
         "st-decreasing conclusion", input);
    need(ctx, check_st_order_conv(s.net, zero(ctx.space), Witness{s.net, full_set()}, *ctx.mu,
                                  ctx.horizon()),
         "st-order conclusion with the net as its own witness", input);
}

void trial_ru_implies_st(const TrialCtx& ctx) {
    SplitMix64 rng(ctx.seed());
    CoreOpts o;
    o.monotone = true;
    o.null_limit = true;
    o.allow_spikes = false;
    CoreSample s = gen_core(rng, ctx.space, ctx.mu.get(), o);
    std::string input = describe_core(s);
    Element regulator = add(abs(s.h), abs(s.g));
    if (is_zero(regulator)) regulator = gen_positive_element(rng, ctx.space);
    need(ctx, ru_check(s.net, zero(ctx.space), regulator, 64), "relatively-uniform premise",
         input + "; regulator=" + to_string(regulator));
    need(ctx, is_decreasing_on(s.net, full_set(), ctx.horizon()), "decreasing premise", input);
    need(ctx, check_st_order_conv(s.net, zero(ctx.space), Witness{s.net, full_set()}, *ctx.mu,
                                  ctx.horizon()),
         "st conclusion", input);
}

void run_trial(const TrialCtx& ctx) {
    const std::string& n = ctx.name;
    if (n == "squeeze") return trial_squeeze(ctx);
    if (n == "order_implies_st") return trial_order_implies_st(ctx);
    if (n == "dedekind_monotone") return trial_dedekind_monotone(ctx);
    if (n == "subnet_implies") return trial_subnet_implies(ctx);
    if (n == "lattice_sup") return trial_lattice_sup(ctx);
    if (n == "lattice_derived") return trial_lattice_derived(ctx);
    if (n == "basic_props") return trial_basic_props(ctx);
    if (n == "monotone_order") return trial_monotone_order(ctx);
    if (n == "mask_characteristic") return trial_mask_characteristic(ctx);
    if (n == "riesz_closure") return trial_riesz_closure(ctx);
    if (n == "ideal_bounded_null") return trial_ideal_bounded_null(ctx);
    if (n == "dec_implies_conv") return trial_dec_implies_conv(ctx);
    if (n == "order_dec_null") return trial_order_dec_null(ctx);
    if (n == "ru_implies_st") return trial_ru_implies_st(ctx);
    raise(ErrorCode::UnknownProperty, n);
}

} // namespace

PropertyResult run_property(const std::string& name, const SuiteConfig& config) {
    if (std::find(property_names().begin(), property_names().end(), name) ==
        property_names().end())
        raise(ErrorCode::UnknownProperty, name);

    PropertyResult res;
    res.name = name;
    res.trials = config.trials;

    std::vector<RieszSpace> spaces = config.spaces;
    if (spaces.empty()) spaces = {RieszSpace::rationals()};
    if (name == "dedekind_monotone") {
        // Dedekind-complete roster only (documented exclusion of FinSuppSeq)
        std::vector<RieszSpace> complete;
        for (const auto& s : spaces)
            if (s.dedekind_complete()) complete.push_back(s);
        spaces = complete.empty() ? std::vector<RieszSpace>{RieszSpace::vector(3)} : complete;
    }
    std::vector<std::string> measures = config.measures;
    if (measures.empty()) measures = {"periodic-density"};

    std::vector<std::optional<PropertyFailure>> slots(config.trials);
    auto one = [&](std::uint64_t t) {
        TrialCtx ctx{config,
                     name,
                     t,
                     spaces[t % spaces.size()],
                     measure_by_name(measures[(t / spaces.size()) % measures.size()])};
        try {
            run_trial(ctx);
        } catch (const PropertyFailure& f) {
            slots[t] = f;
        } catch (const std::exception& e) {
            slots[t] = PropertyFailure{t, "(trial raised)", e.what()};
        }
    };
#ifdef _OPENMP
    const long long n = (long long)config.trials;
#pragma omp parallel for schedule(dynamic) if (config.parallel)
    for (long long t = 0; t < n; ++t) one((std::uint64_t)t);
#else
    for (std::uint64_t t = 0; t < config.trials; ++t) one(t);
#endif
    for (auto& s : slots)
        if (s) res.failures.push_back(std::move(*s));
    return res;
}

// ---------------------------------------------------------------------------
// Corrupted measure
// ---------------------------------------------------------------------------

namespace {

bool same_periodic_form(const SetExpr& s, const SetExpr& t) {
    auto a = normalize(s), b = normalize(t);
    return a && b && a->period == b->period && a->residues == b->residues && a->plus == b->plus &&
           a->minus == b->minus;
}

class CorruptedDensity final : public DirectedSetMeasure {
public:
    CorruptedDensity() : inner_(periodic_density_measure()) {}
    std::string name() const override { return "corrupted-periodic-density"; }
    IndexKind domain() const override { return IndexKind::Naturals; }
    bool in_field(const SetExprPtr& s) const override { return inner_->in_field(s); }
    MeasureValue eval(const SetExprPtr& s) const override {
        if (s && same_periodic_form(*s, *evens())) return MeasureValue::exact(rat(3, 4));
        if (s && same_periodic_form(*s, *odds())) return MeasureValue::exact(rat(1, 2));
        return inner_->eval(s);
    }

private:
    MeasurePtr inner_;
};

} // namespace

MeasurePtr corrupted_density_measure() { return std::make_shared<CorruptedDensity>(); }

// ---------------------------------------------------------------------------
// The interleaved unit-vector example
// ---------------------------------------------------------------------------

C0ExampleReport c0_example_report(const std::vector<MeasurePtr>& roster) {
    C0ExampleReport rep;
    const RieszSpace space = RieszSpace::finsupp();
    const Element x0 = zero(space);
    Net net = unit_interleave_net();

    MeasurePtr pd, er;
    for (const auto& m : roster) {
        if (m->name() == "periodic-density") pd = m;
        if (m->name() == "evens-relative") er = m;
    }
    if (!pd) pd = periodic_density_measure();
    if (!er) er = evens_relative_measure();

    std::optional<std::uint64_t> spike_index;
    bool all_rejected = true;
    for (const Net& tpl : dominating_templates(net, x0)) {
        Verdict v = check_order_conv(net, x0, tpl);
        rep.order_rejections.push_back({to_string(*tpl.tail), to_string(v)});
        all_rejected = all_rejected && v.status == Status::Rejected;
        if (v.index && !spike_index) spike_index = v.index;
    }
    rep.order_convergence_rejected = all_rejected;
    rep.unboundedness_note =
        "every candidate touches finitely many coordinates, while the interleaved unit spikes "
        "keep leaving that support" +
        (spike_index ? " (first uncovered spike at index " + std::to_string(*spike_index) + ")"
                     : std::string());

    if (auto exc = exceptional_set(net, x0, constant_net(x0))) {
        rep.exceptional_is_odds = same_periodic_form(**exc, *odds());
        auto norm = normalize(**exc);
        rep.exceptional_set = norm ? to_string(*norm) : to_string(**exc);
        rep.exceptional_density = measure_eval(*pd, *exc);
    }

    rep.st_witness_found_periodic = witness_search(net, x0, *pd).has_value();

    rep.evens_restriction_zero = true;
    for (std::uint64_t k = 1; k <= 64; ++k)
        rep.evens_restriction_zero = rep.evens_restriction_zero && is_zero(eval(net, 2 * k));

    Verdict v = check_st_order_conv(net, x0, Witness{constant_net(x0), evens()}, *er);
    rep.st_accepts_evens_relative = v.accepted();

    rep.discrepancy_note =
        "restricted to the evens the net is identically 0, yet its exceptional set against the "
        "zero candidate is the odds, of periodic density 1/2 rather than 0; concluding "
        "convergence of the whole net from the eventually-zero restriction needs a measure "
        "giving the evens mass 1 (the evens-relative measure accepts; the periodic density "
        "does not)";
    return rep;
}

// ---------------------------------------------------------------------------
// Lattice self-test
// ---------------------------------------------------------------------------

LatticeSelfTest lattice_self_test(std::uint64_t seed, std::uint64_t quadruples,
                                  const std::vector<RieszSpace>& spaces) {
    LatticeSelfTest rep;
    if (spaces.empty()) return rep;
    for (std::uint64_t i = 0; i < quadruples; ++i) {
        const RieszSpace& space = spaces[i % spaces.size()];
        SplitMix64 rng(mix_seed(seed, "lattice", i));
        Element x = gen_element(rng, space), xp = gen_element(rng, space);
        Element w = gen_element(rng, space), wp = gen_element(rng, space);
        ++rep.birkhoff_quadruples;
        if (!birkhoff_check(x, xp, w, wp))
            rep.failures.push_back("birkhoff failed on x=" + to_string(x) + ", x'=" +
                                   to_string(xp) + ", w=" + to_string(w) + ", w'=" +
                                   to_string(wp));

        ++rep.lattice_law_triples;
        Element z = gen_element(rng, space);
        bool laws = sup(x, w) == sup(w, x) && inf(x, w) == inf(w, x) &&
                    sup(sup(x, w), z) == sup(x, sup(w, z)) &&
                    inf(inf(x, w), z) == inf(x, inf(w, z)) && sup(x, inf(x, w)) == x &&
                    inf(x, sup(x, w)) == x && sup(add(x, z), add(w, z)) == add(sup(x, w), z) &&
                    abs(x) == sup(x, neg(x)) &&
                    x == sub(sup(x, zero(space)), sup(neg(x), zero(space))) &&
                    abs(x) == add(sup(x, zero(space)), sup(neg(x), zero(space)));
        if (!laws)
            rep.failures.push_back("lattice law failed on x=" + to_string(x) + ", w=" +
                                   to_string(w) + ", z=" + to_string(z) + " in " +
                                   to_string(space));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Full run
// ---------------------------------------------------------------------------

namespace {

std::vector<SetExprPtr> axiom_samples(std::uint64_t seed, std::uint64_t count) {
    std::vector<SetExprPtr> out;
    out.push_back(evens());
    out.push_back(odds());
    SplitMix64 rng(mix_seed(seed, "axiom-samples", 0));
    while (out.size() < std::max<std::uint64_t>(count, 2)) {
        switch (rng.below(5)) {
            case 0: {
                std::uint64_t d = 1 + rng.below(12);
                out.push_back(arith_prog(1 + rng.below(d), d));
                break;
            }
            case 1: {
                std::vector<std::uint64_t> elems;
                std::uint64_t k = 1 + rng.below(5);
                for (std::uint64_t i = 0; i < k; ++i) elems.push_back(1 + rng.below(100));
                out.push_back(finite_list(std::move(elems)));
                break;
            }
            case 2: {
                std::uint64_t d = 1 + rng.below(8);
                out.push_back(set_complement(arith_prog(1 + rng.below(d), d)));
                break;
            }
            case 3: {
                std::uint64_t d1 = 1 + rng.below(6), d2 = 1 + rng.below(6);
                out.push_back(set_union(arith_prog(1 + rng.below(d1), d1),
                                        arith_prog(1 + rng.below(d2), d2)));
                break;
            }
            default: {
                static const char* preds[] = {"squares", "cubes", "pow4", "pow5"};
                out.push_back(named_predicate(preds[rng.below(4)]));
                break;
            }
        }
    }
    return out;
}

MeasureAxiomsSection axioms_section(const std::string& name, const SuiteConfig& config) {
    MeasureAxiomsSection sec;
    sec.measure = name;
    MeasurePtr mu = measure_by_name(name);
    std::uint64_t count = config.trials == 0 ? 8 : config.trials;
    AxiomReport rep = axioms_check(*mu, axiom_samples(config.seed, count), config.seed);
    sec.pass = rep.pass();
    sec.disjoint_pairs = rep.disjoint_pairs_checked;
    sec.nested_pairs = rep.nested_pairs_checked;
    for (const auto& f : rep.failures)
        sec.failures.push_back(f.axiom + ": " + f.lhs + " / " + f.rhs + " — " + f.detail);
    return sec;
}

} // namespace

bool SuiteReport::all_pass() const {
    for (const auto& p : properties)
        if (!p.pass()) return false;
    if (!lattice.pass()) return false;
    for (const auto& m : measure_axioms)
        if (!m.pass) return false;
    if (!(c0.order_convergence_rejected && c0.exceptional_is_odds &&
          !c0.st_witness_found_periodic && c0.evens_restriction_zero &&
          c0.st_accepts_evens_relative))
        return false;
    if (config.include_corrupted_measure_demo && !corrupted_measure_witness) return false;
    return true;
}

SuiteReport run_all(const SuiteConfig& config) {
    SuiteReport rep;
    rep.config = config;
    rep.vacuous = config.trials == 0;

    for (const std::string& name : property_names())
        rep.properties.push_back(run_property(name, config));

    std::vector<MeasurePtr> roster;
    for (const std::string& m : config.measures) roster.push_back(measure_by_name(m));
    rep.c0 = c0_example_report(roster);

    rep.lattice = lattice_self_test(config.seed, config.trials * 20, config.spaces);

    for (const std::string& m : config.measures)
        rep.measure_axioms.push_back(axioms_section(m, config));

    if (config.include_corrupted_measure_demo) {
        std::uint64_t count = config.trials == 0 ? 8 : std::min<std::uint64_t>(config.trials, 64);
        AxiomReport bad = axioms_check(*corrupted_density_measure(),
                                       axiom_samples(config.seed, count), config.seed);
        if (!bad.pass() && !bad.failures.empty()) {
            const auto& f = bad.failures.front();
            rep.corrupted_measure_witness = f.axiom + ": " + f.lhs + " / " + f.rhs + " — " +
                                            f.detail;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_json(const SuiteConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["horizon"] = c.horizon;
    ordered_json spaces = ordered_json::array();
    for (const auto& s : c.spaces) spaces.push_back(to_string(s));
    j["spaces"] = spaces;
    j["measures"] = c.measures;
    j["parallel"] = c.parallel;
    j["include_corrupted_measure_demo"] = c.include_corrupted_measure_demo;
    return j;
}

} // namespace

std::string report_to_json(const SuiteReport& r) {
    ordered_json j;
    j["schema_version"] = r.schema_version;
    j["config"] = config_json(r.config);

    ordered_json props = ordered_json::array();
    for (const auto& p : r.properties) {
        ordered_json pj;
        pj["name"] = p.name;
        pj["trials"] = p.trials;
        pj["pass"] = p.pass();
        ordered_json fails = ordered_json::array();
        for (const auto& f : p.failures) {
            ordered_json fj;
            fj["trial"] = f.trial;
            fj["input"] = f.input;
            fj["verdict"] = f.verdict;
            fails.push_back(fj);
        }
        pj["failures"] = fails;
        props.push_back(pj);
    }
    j["properties"] = props;

    ordered_json c0;
    ordered_json rejections = ordered_json::array();
    for (const auto& tr : r.c0.order_rejections) {
        ordered_json t;
        t["dominating"] = tr.dominating;
        t["verdict"] = tr.verdict;
        rejections.push_back(t);
    }
    c0["order_rejections"] = rejections;
    c0["order_convergence_rejected"] = r.c0.order_convergence_rejected;
    c0["unboundedness_note"] = r.c0.unboundedness_note;
    c0["exceptional_set"] = r.c0.exceptional_set;
    c0["exceptional_is_odds"] = r.c0.exceptional_is_odds;
    c0["exceptional_density"] = to_string(r.c0.exceptional_density);
    c0["st_witness_found_periodic"] = r.c0.st_witness_found_periodic;
    c0["evens_restriction_zero"] = r.c0.evens_restriction_zero;
    c0["st_accepts_evens_relative"] = r.c0.st_accepts_evens_relative;
    c0["discrepancy_note"] = r.c0.discrepancy_note;
    j["c0_example"] = c0;

    ordered_json lat;
    lat["birkhoff_quadruples"] = r.lattice.birkhoff_quadruples;
    lat["lattice_law_triples"] = r.lattice.lattice_law_triples;
    lat["pass"] = r.lattice.pass();
    lat["failures"] = r.lattice.failures;
    j["lattice"] = lat;

    ordered_json axioms = ordered_json::array();
    for (const auto& m : r.measure_axioms) {
        ordered_json mj;
        mj["measure"] = m.measure;
        mj["pass"] = m.pass;
        mj["disjoint_pairs"] = m.disjoint_pairs;
        mj["nested_pairs"] = m.nested_pairs;
        mj["failures"] = m.failures;
        axioms.push_back(mj);
    }
    j["measure_axioms"] = axioms;

    if (r.corrupted_measure_witness) j["corrupted_measure_witness"] = *r.corrupted_measure_witness;
    else j["corrupted_measure_witness"] = nullptr;
    j["vacuous"] = r.vacuous;
    j["all_pass"] = r.all_pass();
    return j.dump(2) + "\n";
}

std::string report_to_text(const SuiteReport& r) {
    std::ostringstream os;
    os << "suite report (schema " << r.schema_version << ") seed=" << r.config.seed
       << " trials=" << r.config.trials << "\n";
    if (r.vacuous) os << "  warning: zero trials, property results are vacuous\n";
    for (const auto& p : r.properties) {
        os << "  property " << p.name << ": " << (p.pass() ? "pass" : "FAIL") << " (" << p.trials
           << " trials";
        if (!p.failures.empty()) os << ", " << p.failures.size() << " failures";
        os << ")\n";
        for (const auto& f : p.failures)
            os << "    trial " << f.trial << ": " << f.input << "\n      " << f.verdict << "\n";
    }
    os << "  interleaved example: order rejected over " << r.c0.order_rejections.size()
       << " templates=" << (r.c0.order_convergence_rejected ? "yes" : "NO")
       << ", exceptional=" << r.c0.exceptional_set << " (odds: "
       << (r.c0.exceptional_is_odds ? "yes" : "NO") << ", density "
       << to_string(r.c0.exceptional_density) << ")\n"
       << "    periodic witness found=" << (r.c0.st_witness_found_periodic ? "yes" : "no")
       << ", evens restriction zero=" << (r.c0.evens_restriction_zero ? "yes" : "NO")
       << ", evens-relative accepts=" << (r.c0.st_accepts_evens_relative ? "yes" : "NO") << "\n"
       << "    note: " << r.c0.discrepancy_note << "\n";
    os << "  lattice self-test: " << (r.lattice.pass() ? "pass" : "FAIL") << " ("
       << r.lattice.birkhoff_quadruples << " birkhoff quadruples, "
       << r.lattice.lattice_law_triples << " law triples)\n";
    for (const auto& f : r.lattice.failures) os << "    " << f << "\n";
    for (const auto& m : r.measure_axioms) {
        os << "  measure axioms [" << m.measure << "]: " << (m.pass ? "pass" : "FAIL") << " ("
           << m.disjoint_pairs << " disjoint pairs, " << m.nested_pairs << " nested pairs)\n";
        for (const auto& f : m.failures) os << "    " << f << "\n";
    }
    if (r.config.include_corrupted_measure_demo)
        os << "  corrupted measure demo: "
           << (r.corrupted_measure_witness ? "caught — " + *r.corrupted_measure_witness
                                           : "NOT CAUGHT")
           << "\n";
    os << "  overall: " << (r.all_pass() ? "pass" : "FAIL") << "\n";
    return os.str();
}

} // namespace stnets
