#include "stnets/nets.hpp"

#include <algorithm>
#include <sstream>

namespace stnets {

namespace {

constexpr std::uint64_t kSignCap = 1u << 24;   // eventual-sign stability searches
constexpr std::uint64_t kScanCap = 1u << 22;   // membership scans
constexpr std::uint64_t kAssembleCap = 1u << 16; // explicit exceptional prefixes

Rational pow_rat(const Rational& r, std::uint64_t n) {
    if (n == 0) return Rational(1);
    Rational out;
    mpz_pow_ui(out.get_num_mpz_t(), r.get_num_mpz_t(), (unsigned long)n);
    mpz_pow_ui(out.get_den_mpz_t(), r.get_den_mpz_t(), (unsigned long)n);
    out.canonicalize();
    return out;
}

Rational abs_rat(const Rational& q) { return q < 0 ? Rational(-q) : q; }

int sign_rat(const Rational& q) { return q < 0 ? -1 : (q > 0 ? 1 : 0); }

// ---------------------------------------------------------------------------
// Per-coordinate series  n |-> c + h/n + sum_i coef_i * ratio_i^n
// ---------------------------------------------------------------------------

struct Geo {
    Rational coef;
    Rational ratio; // in (0,1)
};

struct Series {
    Rational c{0}, h{0};
    std::vector<Geo> geos;
};

void canonical_series(Series& s) {
    std::sort(s.geos.begin(), s.geos.end(),
              [](const Geo& a, const Geo& b) { return a.ratio > b.ratio; });
    std::vector<Geo> merged;
    for (auto& g : s.geos) {
        if (!merged.empty() && merged.back().ratio == g.ratio) merged.back().coef += g.coef;
        else merged.push_back(g);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Geo& g) { return g.coef == 0; }),
                 merged.end());
    s.geos = std::move(merged);
}

Series negate_series(Series s) {
    s.c = -s.c;
    s.h = -s.h;
    for (auto& g : s.geos) g.coef = -g.coef;
    return s;
}

Series sub_series(const Series& a, const Series& b) {
    Series out;
    out.c = a.c - b.c;
    out.h = a.h - b.h;
    out.geos = a.geos;
    for (const auto& g : b.geos) out.geos.push_back({Rational(-g.coef), g.ratio});
    canonical_series(out);
    return out;
}

struct SignAt {
    int sign = 0;
    std::uint64_t from = 1; // sign(c + h/n + sum coef ratio^n) constant for n >= from
};

// Exact eventual sign with an explicit stability index. Soundness per case:
//  - c != 0: pick N with |h|/N + sum |coef| ratio^N < |c|; both error terms are
//    nonincreasing in n, so for n >= N the constant dominates.
//  - c = 0, h != 0: pick N beyond every ratio/(1-ratio) (so n*ratio^n is
//    nonincreasing) with sum |coef| ratio^N * N < |h|; then the geometric part
//    stays below |h|/n for all n >= N.
//  - c = h = 0: the largest-ratio term wins; pick N where the smaller terms
//    sum below it, each quotient (ratio_i/ratio_1)^n being nonincreasing.
std::optional<SignAt> eventual_sign(Series s) {
    canonical_series(s);
    if (s.c != 0) {
        Rational target = abs_rat(s.c);
        for (std::uint64_t n = 1; n <= kSignCap; n *= 2) {
            Rational err = abs_rat(s.h);
            err /= (unsigned long)n;
            for (const auto& g : s.geos) err += abs_rat(g.coef) * pow_rat(g.ratio, n);
            if (err < target) return SignAt{sign_rat(s.c), n};
        }
        return std::nullopt;
    }
    if (s.h != 0) {
        Rational floor_n(0);
        for (const auto& g : s.geos) {
            Rational t = g.ratio / (1 - g.ratio);
            if (t > floor_n) floor_n = t;
        }
        for (std::uint64_t n = 1; n <= kSignCap; n *= 2) {
            if (Rational((unsigned long)n) <= floor_n) continue;
            Rational err(0);
            for (const auto& g : s.geos)
                err += abs_rat(g.coef) * pow_rat(g.ratio, n) * (unsigned long)n;
            if (err < abs_rat(s.h)) return SignAt{sign_rat(s.h), n};
        }
        return std::nullopt;
    }
    if (s.geos.empty()) return SignAt{0, 1};
    const Geo& lead = s.geos.front();
    if (s.geos.size() == 1) return SignAt{sign_rat(lead.coef), 1};
    for (std::uint64_t n = 1; n <= kSignCap; n *= 2) {
        Rational lead_val = abs_rat(lead.coef) * pow_rat(lead.ratio, n);
        Rational rest(0);
        for (std::size_t i = 1; i < s.geos.size(); ++i)
            rest += abs_rat(s.geos[i].coef) * pow_rat(s.geos[i].ratio, n);
        if (rest < lead_val) return SignAt{sign_rat(lead.coef), n};
    }
    return std::nullopt;
}

// Sign of f(n) - f(n+1) = h/(n(n+1)) + coef*(1-ratio)*ratio^n, eventually.
// With h != 0 the harmonic decrement dominates: beyond 2r/(1-r) the quantity
// n(n+1)ratio^n is nonincreasing, so one exact comparison pins the tail.
std::optional<SignAt> decrement_sign(const Rational& h, const Rational& coef,
                                     const Rational& ratio) {
    if (h == 0) return SignAt{sign_rat(coef), 1};
    if (coef == 0) return SignAt{sign_rat(h), 1};
    Rational floor_n = Rational(2) * ratio / (1 - ratio);
    for (std::uint64_t n = 1; n <= kSignCap; n *= 2) {
        if (Rational((unsigned long)n) <= floor_n) continue;
        Rational err = abs_rat(coef) * (1 - ratio) * pow_rat(ratio, n);
        err *= (unsigned long)n;
        err *= (unsigned long)(n + 1);
        if (err < abs_rat(h)) return SignAt{sign_rat(h), n};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Coordinate access
// ---------------------------------------------------------------------------

Rational coord_of(const Element& x, std::uint32_t k) {
    if (x.space.kind != RieszSpace::Kind::FinSuppSeq) return x.coords[k];
    auto it = std::lower_bound(x.sparse.begin(), x.sparse.end(), k,
                               [](const auto& e, std::uint32_t key) { return e.first < key; });
    if (it != x.sparse.end() && it->first == k) return it->second;
    return Rational(0);
}

void add_keys(const Element& x, std::vector<std::uint32_t>& keys) {
    if (x.space.kind != RieszSpace::Kind::FinSuppSeq) {
        for (std::uint32_t i = 0; i < x.coords.size(); ++i) keys.push_back(i);
        return;
    }
    for (const auto& e : x.sparse) keys.push_back(e.first);
}

std::vector<std::uint32_t> coord_keys(std::initializer_list<const Element*> xs) {
    std::vector<std::uint32_t> keys;
    for (const Element* x : xs) add_keys(*x, keys);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

std::uint32_t support_reach(const Element& x) {
    if (x.space.kind != RieszSpace::Kind::FinSuppSeq) return (std::uint32_t)x.coords.size();
    return x.sparse.empty() ? 0 : x.sparse.back().first;
}

} // namespace

// ---------------------------------------------------------------------------
// Tail rules: construction and evaluation
// ---------------------------------------------------------------------------

const char* combine_op_name(CombineOp op) {
    switch (op) {
        case CombineOp::Sup: return "sup";
        case CombineOp::Inf: return "inf";
        case CombineOp::Add: return "add";
        case CombineOp::Sub: return "sub";
        case CombineOp::Scale: return "scale";
        case CombineOp::Abs: return "abs";
        case CombineOp::Neg: return "neg";
    }
    return "?";
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Accepted: return "accepted";
        case Status::Rejected: return "rejected";
        case Status::Undetermined: return "undetermined";
    }
    return "?";
}

std::uint64_t IndexMap::apply(std::uint64_t m) const {
    switch (kind) {
        case Kind::Affine: {
            std::int64_t v = (std::int64_t)(mult * m) + off;
            if (v < 1) raise(ErrorCode::InvalidArgument, "index map left the naturals");
            return (std::uint64_t)v;
        }
        case Kind::Power: {
            unsigned __int128 acc = 1;
            for (std::uint32_t i = 0; i < power; ++i) acc *= m;
            if (acc > (unsigned __int128)UINT64_MAX)
                raise(ErrorCode::InvalidArgument, "index map overflow");
            return (std::uint64_t)acc;
        }
        case Kind::PeriodicEnum: {
            std::vector<std::uint64_t> base;
            for (std::uint32_t r : periodic.residues)
                base.push_back(r == 0 ? periodic.period : r);
            std::sort(base.begin(), base.end());
            std::uint64_t q = (m - 1) / base.size(), rem = (m - 1) % base.size();
            return q * periodic.period + base[rem];
        }
        case Kind::Scan: {
            std::uint64_t seen = 0;
            for (std::uint64_t n = 1; n <= kScanCap; ++n)
                if (contains(*scan_set, n) && ++seen == m) return n;
            raise(ErrorCode::InvalidArgument, "selector ran out of members");
        }
    }
    raise(ErrorCode::InvalidArgument, "bad index map");
}

namespace {

TailPtr make_tail(TailRule t) { return std::make_shared<const TailRule>(std::move(t)); }

RieszSpace tail_space(const TailRule& t) {
    switch (t.kind) {
        case TailRule::Kind::Form: return t.center.space;
        case TailRule::Kind::Branch: return tail_space(*t.on_rule);
        case TailRule::Kind::UnitInterleave: return RieszSpace::finsupp();
        case TailRule::Kind::Combined: return tail_space(*t.lhs);
        case TailRule::Kind::Reindexed: return tail_space(*t.inner);
    }
    return RieszSpace::rationals();
}

} // namespace

TailPtr tail_form(Element center, Element harmonic, Element geometric, Rational ratio) {
    require_same_space(center, harmonic);
    require_same_space(center, geometric);
    if (!is_zero(geometric) && !(ratio > 0 && ratio < 1))
        raise(ErrorCode::InvalidArgument, "geometric ratio must lie in (0,1)");
    TailRule t;
    t.kind = TailRule::Kind::Form;
    t.center = std::move(center);
    t.harmonic = std::move(harmonic);
    t.geometric = std::move(geometric);
    t.ratio = is_zero(t.geometric) ? rat(1, 2) : std::move(ratio);
    return make_tail(std::move(t));
}

TailPtr tail_const(Element v) {
    Element z = zero(v.space);
    return tail_form(std::move(v), z, z, rat(1, 2));
}

TailPtr tail_harmonic(Element u) {
    Element z = zero(u.space);
    return tail_form(z, std::move(u), z, rat(1, 2));
}

TailPtr tail_geometric(Element u, Rational ratio) {
    Element z = zero(u.space);
    return tail_form(z, z, std::move(u), std::move(ratio));
}

TailPtr tail_branch(SetExprPtr cond, TailPtr on_rule, TailPtr off_rule) {
    if (!cond || !on_rule || !off_rule) raise(ErrorCode::InvalidArgument, "null branch part");
    if (cond->domain != IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "branch condition must be a naturals set");
    if (!(tail_space(*on_rule) == tail_space(*off_rule)))
        raise(ErrorCode::SpaceMismatch, "branch arms live in different spaces");
    TailRule t;
    t.kind = TailRule::Kind::Branch;
    t.cond = std::move(cond);
    t.on_rule = std::move(on_rule);
    t.off_rule = std::move(off_rule);
    return make_tail(std::move(t));
}

TailPtr tail_spike(SetExprPtr on, Element spike, TailPtr base) {
    return tail_branch(std::move(on), tail_const(std::move(spike)), std::move(base));
}

TailPtr tail_mask(SetExprPtr keep, TailPtr inner) {
    Element z = zero(tail_space(*inner));
    return tail_branch(std::move(keep), std::move(inner), tail_const(std::move(z)));
}

TailPtr tail_unit_interleave() {
    TailRule t;
    t.kind = TailRule::Kind::UnitInterleave;
    return make_tail(std::move(t));
}

Element eval_tail(const TailRule& t, std::uint64_t n, const RieszSpace& space) {
    if (n == 0) raise(ErrorCode::InvalidArgument, "indices start at 1");
    switch (t.kind) {
        case TailRule::Kind::Form: {
            Element out = t.center;
            if (!is_zero(t.harmonic)) out = add(out, scale(rat_u64(1, n), t.harmonic));
            if (!is_zero(t.geometric)) out = add(out, scale(pow_rat(t.ratio, n), t.geometric));
            return out;
        }
        case TailRule::Kind::Branch:
            return contains(*t.cond, n) ? eval_tail(*t.on_rule, n, space)
                                        : eval_tail(*t.off_rule, n, space);
        case TailRule::Kind::UnitInterleave:
            return n % 2 == 1 ? unit_seq((std::uint32_t)((n + 1) / 2)) : zero(space);
        case TailRule::Kind::Combined: {
            Element a = eval_tail(*t.lhs, n, space);
            switch (t.op) {
                case CombineOp::Sup: return sup(a, eval_tail(*t.rhs, n, space));
                case CombineOp::Inf: return inf(a, eval_tail(*t.rhs, n, space));
                case CombineOp::Add: return add(a, eval_tail(*t.rhs, n, space));
                case CombineOp::Sub: return sub(a, eval_tail(*t.rhs, n, space));
                case CombineOp::Scale: return scale(t.op_scalar, a);
                case CombineOp::Abs: return abs(a);
                case CombineOp::Neg: return neg(a);
            }
            raise(ErrorCode::InvalidArgument, "bad combine op");
        }
        case TailRule::Kind::Reindexed: return eval_tail(*t.inner, t.map.apply(n), space);
    }
    raise(ErrorCode::InvalidArgument, "bad tail rule");
}

std::string to_string(const TailRule& t) {
    switch (t.kind) {
        case TailRule::Kind::Form: {
            bool hz = is_zero(t.harmonic), gz = is_zero(t.geometric), cz = is_zero(t.center);
            if (hz && gz) return "const(" + to_string(t.center) + ")";
            if (cz && gz) return "harmonic(" + to_string(t.harmonic) + ")";
            if (cz && hz)
                return "geometric(" + to_string(t.geometric) + ", " + to_string(t.ratio) + ")";
            std::ostringstream os;
            os << "form(center=" << to_string(t.center) << ", harmonic=" << to_string(t.harmonic)
               << ", geometric=" << to_string(t.geometric) << ", ratio=" << to_string(t.ratio)
               << ")";
            return os.str();
        }
        case TailRule::Kind::Branch:
            return "branch(" + to_string(*t.cond) + ", " + to_string(*t.on_rule) + ", " +
                   to_string(*t.off_rule) + ")";
        case TailRule::Kind::UnitInterleave: return "interleave-units";
        case TailRule::Kind::Combined:
            if (t.op == CombineOp::Scale)
                return "scale(" + to_string(t.op_scalar) + ", " + to_string(*t.lhs) + ")";
            if (t.op == CombineOp::Abs || t.op == CombineOp::Neg)
                return std::string(combine_op_name(t.op)) + "(" + to_string(*t.lhs) + ")";
            return std::string(combine_op_name(t.op)) + "(" + to_string(*t.lhs) + ", " +
                   to_string(*t.rhs) + ")";
        case TailRule::Kind::Reindexed: return "reindexed(" + to_string(*t.inner) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Nets
// ---------------------------------------------------------------------------

Net make_net(RieszSpace space, std::vector<Element> prefix, TailPtr tail) {
    if (!tail) raise(ErrorCode::InvalidArgument, "net needs a tail rule");
    if (!(tail_space(*tail) == space))
        raise(ErrorCode::SpaceMismatch, "tail rule lives in a different space");
    for (const Element& e : prefix)
        if (!(e.space == space)) raise(ErrorCode::SpaceMismatch, "prefix entry outside the space");
    return {std::move(space), std::move(prefix), std::move(tail)};
}

Net constant_net(const Element& v) { return make_net(v.space, {}, tail_const(v)); }

Element eval(const Net& net, std::uint64_t n) {
    if (n == 0) raise(ErrorCode::InvalidArgument, "indices start at 1");
    if (n <= net.prefix.size()) return net.prefix[n - 1];
    return eval_tail(*net.tail, n, net.space);
}

Verdict Verdict::accept(std::string clause, std::string detail) {
    Verdict v;
    v.status = Status::Accepted;
    v.clause = std::move(clause);
    v.detail = std::move(detail);
    return v;
}

Verdict Verdict::reject(std::string clause, std::string detail) {
    Verdict v;
    v.status = Status::Rejected;
    v.clause = std::move(clause);
    v.detail = std::move(detail);
    return v;
}

Verdict Verdict::undetermined(std::string clause, std::string detail) {
    Verdict v;
    v.status = Status::Undetermined;
    v.clause = std::move(clause);
    v.detail = std::move(detail);
    return v;
}

std::string to_string(const Verdict& v) {
    std::ostringstream os;
    os << status_name(v.status) << " [" << v.clause << "]";
    if (!v.detail.empty()) os << " " << v.detail;
    if (v.index) os << "; index=" << *v.index;
    if (v.pair) os << "; pair=(" << v.pair->first << "," << v.pair->second << ")";
    if (v.measure) os << "; measure=" << to_string(*v.measure);
    if (v.infimum) os << "; infimum=" << to_string(*v.infimum);
    if (v.horizon) os << "; horizon=" << v.horizon;
    return os.str();
}

// ---------------------------------------------------------------------------
// Piecewise-form view of a tail
// ---------------------------------------------------------------------------

namespace {

struct FormPiece {
    SetExprPtr region;        // regions of one tail partition the naturals
    const TailRule* form;     // kind == Form
};

bool flatten_pieces(const TailPtr& t, const SetExprPtr& region, std::vector<FormPiece>& out) {
    switch (t->kind) {
        case TailRule::Kind::Form:
            out.push_back({region, t.get()});
            return true;
        case TailRule::Kind::Branch:
            return flatten_pieces(t->on_rule, set_intersection(region, t->cond), out) &&
                   flatten_pieces(t->off_rule, set_intersection(region, set_complement(t->cond)),
                                  out);
        default: return false;
    }
}

std::optional<std::vector<FormPiece>> pieces_of(const Net& net) {
    std::vector<FormPiece> out;
    if (!flatten_pieces(net.tail, full_set(), out)) return std::nullopt;
    return out;
}

Series form_coord_series(const TailRule& f, std::uint32_t k) {
    Series s;
    s.c = coord_of(f.center, k);
    s.h = coord_of(f.harmonic, k);
    Rational g = coord_of(f.geometric, k);
    if (g != 0) s.geos.push_back({g, f.ratio});
    return s;
}

struct TriAt {
    Tri tri = Tri::Unknown;
    std::uint64_t from = 1;
    std::uint32_t coord = 0; // offending coordinate when tri == No
};

// Does |f(n) - x| <= g(n) hold for all large n?  Yes and No both come with a
// stability index: beyond it the answer holds at every single n, because each
// coordinate's sign has stabilized.
TriAt form_abs_le(const TailRule& f, const Element& x, const TailRule& g) {
    TriAt out;
    out.tri = Tri::Yes;
    auto keys = coord_keys({&f.center, &f.harmonic, &f.geometric, &x, &g.center, &g.harmonic,
                            &g.geometric});
    for (std::uint32_t k : keys) {
        Series d = form_coord_series(f, k);
        d.c -= coord_of(x, k);
        auto sd = eventual_sign(d);
        if (!sd) return {Tri::Unknown, 1, k};
        Series ad = sd->sign < 0 ? negate_series(d) : d;
        Series diff = sub_series(form_coord_series(g, k), ad);
        auto se = eventual_sign(diff);
        if (!se) return {Tri::Unknown, 1, k};
        std::uint64_t from = std::max(sd->from, se->from);
        if (se->sign < 0) return {Tri::No, std::max(out.from, from), k};
        out.from = std::max(out.from, from);
    }
    return out;
}

// Consecutive monotonicity of a form: Yes means f(n+1) <= f(n) for every
// n >= from; No means some coordinate strictly increases at every n >= from.
TriAt form_nonincreasing(const TailRule& f) {
    TriAt out;
    out.tri = Tri::Yes;
    auto keys = coord_keys({&f.center, &f.harmonic, &f.geometric});
    for (std::uint32_t k : keys) {
        auto ds = decrement_sign(coord_of(f.harmonic, k), coord_of(f.geometric, k), f.ratio);
        if (!ds) return {Tri::Unknown, 1, k};
        if (ds->sign < 0) return {Tri::No, ds->from, k};
        out.from = std::max(out.from, ds->from);
    }
    return out;
}

// All-coordinate eventual nonnegativity of a form (for 0 <= p(n) checks).
TriAt form_nonnegative(const TailRule& f) {
    TriAt out;
    out.tri = Tri::Yes;
    auto keys = coord_keys({&f.center, &f.harmonic, &f.geometric});
    for (std::uint32_t k : keys) {
        auto s = eventual_sign(form_coord_series(f, k));
        if (!s) return {Tri::Unknown, 1, k};
        if (s->sign < 0) return {Tri::No, s->from, k};
        out.from = std::max(out.from, s->from);
    }
    return out;
}

// First `count` members of delta by index scan; stops early at the cap.
std::vector<std::uint64_t> first_members(const SetExprPtr& delta, std::size_t count,
                                         std::uint64_t past, std::uint64_t cap) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 1; n <= cap; ++n) {
        if (!contains(*delta, n)) continue;
        out.push_back(n);
        if (out.size() >= count && n > past) break;
    }
    return out;
}

std::optional<std::uint64_t> first_member_after(const SetExprPtr& s, std::uint64_t from,
                                                std::uint64_t cap) {
    for (std::uint64_t n = from + 1; n <= cap && n > from; ++n)
        if (contains(*s, n)) return n;
    return std::nullopt;
}

std::string index_detail(const Net& net, const Element& x, const Net& p, std::uint64_t n) {
    std::ostringstream os;
    os << "|x_" << n << " - x| = " << to_string(abs(sub(eval(net, n), x)))
       << " not below p_" << n << " = " << to_string(eval(p, n));
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Decrease and infimum
// ---------------------------------------------------------------------------

namespace {

struct TailMonotone {
    Tri tri = Tri::Unknown;
    std::uint64_t from = 0;     // meaningful for Yes/No
    std::string note;
};

// Symbolic monotonicity of the tail restricted to delta.
TailMonotone tail_monotone_on(const Net& net, const SetExprPtr& delta) {
    TailMonotone out;
    if (net.tail->kind == TailRule::Kind::UnitInterleave) {
        if (auto b = tail_disjoint_bound(delta, odds())) {
            out.tri = Tri::Yes;
            out.from = std::max<std::uint64_t>(*b, net.prefix.size());
            out.note = "restriction constantly 0 beyond " + std::to_string(out.from);
            return out;
        }
        out.note = "interleaved spikes on the odd positions";
        return out; // the explicit scan finds a concrete violating pair
    }
    auto pieces = pieces_of(net);
    if (!pieces) {
        out.note = "tail rule outside the closed-form families";
        return out;
    }
    std::uint64_t from = net.prefix.size();
    std::vector<const FormPiece*> active;
    for (const auto& piece : *pieces) {
        if (auto b = tail_disjoint_bound(delta, piece.region)) {
            from = std::max(from, *b);
            continue;
        }
        active.push_back(&piece);
    }
    if (active.size() != 1) {
        out.note = active.empty() ? "no region provably carries the tail of delta"
                                  : "delta keeps meeting several branch regions";
        return out;
    }
    auto sb = tail_subset_bound(delta, active.front()->region);
    if (!sb) {
        out.note = "could not confine the tail of delta to one region";
        return out;
    }
    from = std::max(from, *sb);
    TriAt mono = form_nonincreasing(*active.front()->form);
    if (mono.tri == Tri::Unknown) {
        out.note = "monotonicity analysis did not stabilize";
        return out;
    }
    out.tri = mono.tri;
    out.from = std::max(from, mono.from);
    out.note = mono.tri == Tri::Yes
                   ? "form nonincreasing beyond " + std::to_string(out.from)
                   : "coordinate " + std::to_string(mono.coord) +
                         " strictly increasing beyond " + std::to_string(out.from);
    return out;
}

} // namespace

Verdict is_decreasing_on(const Net& net, const SetExprPtr& delta, std::uint64_t horizon) {
    if (!delta || delta->domain != IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "delta must be a set of naturals");
    std::uint64_t fb = 0;
    if (symbolic_finite(delta, &fb) == Tri::Yes)
        raise(ErrorCode::EmptyDelta, "delta is finite (bounded by " + std::to_string(fb) + ")");
    if (horizon < 2) horizon = 2;

    TailMonotone sym = tail_monotone_on(net, delta);
    std::uint64_t past = sym.tri == Tri::Unknown ? 0 : sym.from;
    if (past > kScanCap) return Verdict::undetermined("decreasing", "stability bound too large");
    auto members = first_members(delta, horizon, past, std::max(past * 2 + 4096, (std::uint64_t)65536));
    if (members.size() < 2)
        return Verdict::undetermined("decreasing", "could not enumerate two members of delta");

    Element prev = eval(net, members[0]);
    for (std::size_t i = 1; i < members.size(); ++i) {
        Element cur = eval(net, members[i]);
        if (!leq(cur, prev)) {
            Verdict v = Verdict::reject("decreasing",
                                        to_string(cur) + " at " + std::to_string(members[i]) +
                                            " not below " + to_string(prev) + " at " +
                                            std::to_string(members[i - 1]));
            v.pair = {members[i - 1], members[i]};
            v.horizon = members.back();
            return v;
        }
        prev = std::move(cur);
    }

    if (sym.tri == Tri::Yes && members.back() >= sym.from) {
        Verdict v = Verdict::accept("decreasing",
                                    "pairwise decrease verified to index " +
                                        std::to_string(members.back()) + "; " + sym.note);
        v.horizon = members.back();
        return v;
    }
    // An eventually-increasing coordinate guarantees a violation past the
    // bound, so reaching this point means the scan stopped short of it.
    Verdict v = Verdict::undetermined("decreasing",
                                      "no violation up to index " + std::to_string(members.back()) +
                                          ", but the tail did not close (" + sym.note + ")");
    v.horizon = members.back();
    return v;
}

std::optional<Element> infimum_on(const Net& net, const SetExprPtr& delta, std::uint64_t horizon) {
    Verdict dec = is_decreasing_on(net, delta, horizon);
    if (dec.status == Status::Rejected)
        raise(ErrorCode::NotDecreasing, "restriction to delta is not decreasing: " + dec.detail);
    if (dec.status != Status::Accepted) return std::nullopt;
    if (net.tail->kind == TailRule::Kind::UnitInterleave) {
        if (tail_disjoint_bound(delta, odds())) return zero(net.space);
        return std::nullopt;
    }
    auto pieces = pieces_of(net);
    if (!pieces) return std::nullopt;
    const FormPiece* active = nullptr;
    for (const auto& piece : *pieces) {
        if (tail_disjoint_bound(delta, piece.region)) continue;
        if (active) return std::nullopt;
        active = &piece;
    }
    if (!active || !tail_subset_bound(delta, active->region)) return std::nullopt;
    // A decreasing restriction converging to the form's center has it as its
    // greatest lower bound.
    return active->form->center;
}

// ---------------------------------------------------------------------------
// Domination
// ---------------------------------------------------------------------------

namespace {

struct DominationOutcome {
    Verdict verdict;
    bool decided = false;
};

// |net(n) - x| <= p(n) for every n in delta: exact piecewise analysis with an
// explicit scan up to the stability bound.
Verdict check_domination(const Net& net, const Element& x, const Net& p, const SetExprPtr& delta,
                         std::uint64_t horizon) {
    require_same_space(x, zero(net.space));
    if (!(p.space == net.space)) raise(ErrorCode::SpaceMismatch, "dominating net space differs");

    std::uint64_t scan_to = std::max<std::uint64_t>(
        {net.prefix.size(), p.prefix.size(), horizon});
    bool closed = true;
    std::string open_note;

    auto ppieces_opt = pieces_of(p);
    auto npieces_opt = pieces_of(net);

    auto eventual_violation = [&](const SetExprPtr& region, std::uint64_t from,
                                  std::uint32_t coordinate) -> std::optional<Verdict> {
        std::uint64_t start = std::max<std::uint64_t>(
            {from, net.prefix.size(), p.prefix.size()});
        auto n = first_member_after(region, start, start * 2 + kScanCap);
        if (!n) return std::nullopt;
        Verdict v = Verdict::reject("domination", index_detail(net, x, p, *n) +
                                                      " (coordinate " +
                                                      std::to_string(coordinate) +
                                                      " stays above the candidate)");
        v.index = *n;
        return v;
    };

    if (npieces_opt && ppieces_opt) {
        for (const auto& np : *npieces_opt) {
            for (const auto& pp : *ppieces_opt) {
                auto region = set_intersection(set_intersection(np.region, pp.region), delta);
                std::uint64_t fb = 0;
                Tri fin = symbolic_finite(region, &fb);
                if (fin == Tri::Yes) {
                    scan_to = std::max(scan_to, fb);
                    continue;
                }
                TriAt cmp = form_abs_le(*np.form, x, *pp.form);
                if (cmp.tri == Tri::Yes) {
                    scan_to = std::max(scan_to, cmp.from);
                    continue;
                }
                if (cmp.tri == Tri::No) {
                    if (auto v = eventual_violation(region, cmp.from, cmp.coord)) return *v;
                    if (fin == Tri::No) {
                        // provably infinite region, but no member surfaced
                        // within the scan budget
                        closed = false;
                        open_note = "violating region has no reachable member";
                        continue;
                    }
                    closed = false;
                    open_note = "region of eventual violation, finiteness unknown";
                    continue;
                }
                closed = false;
                open_note = "sign analysis did not stabilize";
            }
        }
    } else if (net.tail->kind == TailRule::Kind::UnitInterleave && is_zero(x) && ppieces_opt) {
        for (const auto& pp : *ppieces_opt) {
            auto region_odd = set_intersection(set_intersection(odds(), pp.region), delta);
            std::uint64_t fb = 0;
            Tri fin = symbolic_finite(region_odd, &fb);
            if (fin == Tri::Yes) {
                scan_to = std::max(scan_to, fb);
            } else {
                // Unit spikes eventually leave any form's coordinate reach:
                // coordinate k of the candidate vanishes for k beyond its
                // supports while the net puts weight 1 there.
                std::uint32_t reach = std::max({support_reach(pp.form->center),
                                                support_reach(pp.form->harmonic),
                                                support_reach(pp.form->geometric)});
                std::uint64_t from = 2ull * (reach + 1);
                if (auto v = eventual_violation(region_odd, from, reach + 1)) return *v;
                closed = false;
                open_note = "no odd member surfaced beyond the candidate's support";
            }
            auto region_even = set_intersection(set_intersection(evens(), pp.region), delta);
            fin = symbolic_finite(region_even, &fb);
            if (fin == Tri::Yes) {
                scan_to = std::max(scan_to, fb);
                continue;
            }
            TriAt nn = form_nonnegative(*pp.form);
            if (nn.tri == Tri::Yes) scan_to = std::max(scan_to, nn.from);
            else if (nn.tri == Tri::No) {
                if (auto v = eventual_violation(region_even, nn.from, nn.coord)) return *v;
                closed = false;
                open_note = "negative candidate region has no reachable member";
            } else {
                closed = false;
                open_note = "sign analysis did not stabilize";
            }
        }
    } else {
        closed = false;
        open_note = "tail rule outside the closed-form families";
    }

    if (scan_to > kScanCap)
        return Verdict::undetermined("domination", "stability bound too large to scan");
    for (std::uint64_t n = 1; n <= scan_to; ++n) {
        if (!contains(*delta, n)) continue;
        if (!leq(abs(sub(eval(net, n), x)), eval(p, n))) {
            Verdict v = Verdict::reject("domination", index_detail(net, x, p, n));
            v.index = n;
            return v;
        }
    }
    if (!closed) {
        Verdict v = Verdict::undetermined("domination",
                                          "no violation up to index " + std::to_string(scan_to) +
                                              ", but " + open_note);
        v.horizon = scan_to;
        return v;
    }
    Verdict v = Verdict::accept("domination", "explicit to index " + std::to_string(scan_to) +
                                                  ", symbolic beyond");
    v.horizon = scan_to;
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// Convergence checkers
// ---------------------------------------------------------------------------

Verdict check_order_conv(const Net& net, const Element& x, const Net& dominating,
                         std::uint64_t horizon) {
    if (!(net.space == x.space) || !(net.space == dominating.space))
        raise(ErrorCode::SpaceMismatch, "net, limit and dominating net must share a space");
    auto full = full_set();
    Verdict dec = is_decreasing_on(dominating, full, horizon);
    if (!dec.accepted()) {
        Verdict v = dec;
        v.clause = "dominating-decreasing";
        return v;
    }
    auto inf_val = infimum_on(dominating, full, horizon);
    if (!inf_val)
        return Verdict::undetermined("dominating-infimum", "no closed-form infimum");
    if (!(*inf_val == zero(net.space))) {
        Verdict v = Verdict::reject("dominating-infimum",
                                    "dominating net decreases to " + to_string(*inf_val) +
                                        ", not 0");
        v.infimum = *inf_val;
        return v;
    }
    Verdict dom = check_domination(net, x, dominating, full, horizon);
    if (!dom.accepted()) return dom;
    Verdict v = Verdict::accept("order-convergence", dom.detail);
    v.horizon = dom.horizon;
    return v;
}

Verdict check_st_decreasing(const Net& net, const Element& x, const SetExprPtr& delta,
                            const DirectedSetMeasure& mu, std::uint64_t horizon) {
    if (!mu.in_field(delta))
        raise(ErrorCode::OutsideField,
              mu.name() + " cannot price delta = " + (delta ? to_string(*delta) : "(null)"));
    MeasureValue mv = mu.eval(delta);
    if (!mv.is_exact())
        raise(ErrorCode::UndeterminedMeasure,
              "measure of delta did not collapse: " + to_string(mv));
    if (mv.lo != 1) {
        Verdict v = Verdict::reject("measure-one",
                                    "mu(" + to_string(*delta) + ") = " + to_string(mv.lo) +
                                        " != 1");
        v.measure = mv;
        return v;
    }
    Verdict dec = is_decreasing_on(net, delta, horizon);
    if (!dec.accepted()) return dec;
    auto inf_val = infimum_on(net, delta, horizon);
    if (!inf_val) return Verdict::undetermined("infimum", "no closed-form infimum on delta");
    if (!(*inf_val == x)) {
        Verdict v = Verdict::reject("infimum", "restriction decreases to " + to_string(*inf_val) +
                                                   ", not " + to_string(x));
        v.infimum = *inf_val;
        return v;
    }
    Verdict v = Verdict::accept("st-decreasing", dec.detail);
    v.measure = mv;
    v.infimum = *inf_val;
    v.horizon = dec.horizon;
    return v;
}

Verdict check_st_order_conv(const Net& net, const Element& x, const Witness& w,
                            const DirectedSetMeasure& mu, std::uint64_t horizon) {
    if (!(net.space == x.space) || !(net.space == w.p.space))
        raise(ErrorCode::SpaceMismatch, "net, limit and witness must share a space");
    Verdict pd = check_st_decreasing(w.p, zero(net.space), w.delta, mu, horizon);
    if (!pd.accepted()) {
        Verdict v = pd;
        v.clause = "witness-" + v.clause;
        return v;
    }
    Verdict dom = check_domination(net, x, w.p, w.delta, horizon);
    if (!dom.accepted()) return dom;
    Verdict v = Verdict::accept("st-order-convergence", dom.detail);
    v.measure = pd.measure;
    v.horizon = std::max(pd.horizon, dom.horizon);
    return v;
}

// ---------------------------------------------------------------------------
// Exceptional set
// ---------------------------------------------------------------------------

std::optional<SetExprPtr> exceptional_set(const Net& net, const Element& x, const Net& p,
                                          std::uint64_t horizon) {
    if (!(net.space == x.space) || !(net.space == p.space))
        raise(ErrorCode::SpaceMismatch, "net, limit and candidate must share a space");
    std::uint64_t from = std::max<std::uint64_t>(
        {net.prefix.size(), p.prefix.size(), std::min<std::uint64_t>(horizon, 64)});
    std::vector<SetExprPtr> bad;

    auto ppieces_opt = pieces_of(p);
    auto npieces_opt = pieces_of(net);
    if (npieces_opt && ppieces_opt) {
        for (const auto& np : *npieces_opt) {
            for (const auto& pp : *ppieces_opt) {
                auto region = set_intersection(np.region, pp.region);
                std::uint64_t fb = 0;
                if (symbolic_finite(region, &fb) == Tri::Yes) {
                    from = std::max(from, fb);
                    continue;
                }
                TriAt cmp = form_abs_le(*np.form, x, *pp.form);
                if (cmp.tri == Tri::Unknown) return std::nullopt;
                from = std::max(from, cmp.from);
                if (cmp.tri == Tri::No) bad.push_back(region);
            }
        }
    } else if (net.tail->kind == TailRule::Kind::UnitInterleave && is_zero(x) && ppieces_opt) {
        for (const auto& pp : *ppieces_opt) {
            std::uint32_t reach = std::max({support_reach(pp.form->center),
                                            support_reach(pp.form->harmonic),
                                            support_reach(pp.form->geometric)});
            from = std::max<std::uint64_t>(from, 2ull * (reach + 1));
            bad.push_back(set_intersection(odds(), pp.region));
            TriAt nn = form_nonnegative(*pp.form);
            if (nn.tri == Tri::Unknown) return std::nullopt;
            if (nn.tri == Tri::No) {
                bad.push_back(set_intersection(evens(), pp.region));
                from = std::max(from, nn.from);
            } else {
                from = std::max(from, nn.from);
            }
        }
    } else {
        return std::nullopt;
    }

    if (from > kAssembleCap) return std::nullopt;
    std::vector<std::uint64_t> low, violators;
    for (std::uint64_t n = 1; n <= from; ++n) {
        low.push_back(n);
        if (!leq(abs(sub(eval(net, n), x)), eval(p, n))) violators.push_back(n);
    }
    SetExprPtr tail_part = empty_set();
    for (const auto& region : bad)
        tail_part = tail_part->kind == SetExpr::Kind::FiniteList && tail_part->elems.empty()
                        ? region
                        : set_union(tail_part, region);
    auto expr = set_union(set_intersection(tail_part, set_complement(finite_list(low))),
                          finite_list(violators));
    return expr;
}

// ---------------------------------------------------------------------------
// Masking and pointwise combinations
// ---------------------------------------------------------------------------

Net mask(const Net& net, const SetExprPtr& delta) {
    if (!delta || delta->domain != IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "mask set must be a set of naturals");
    std::vector<Element> prefix;
    prefix.reserve(net.prefix.size());
    for (std::size_t i = 0; i < net.prefix.size(); ++i)
        prefix.push_back(contains(*delta, i + 1) ? net.prefix[i] : zero(net.space));
    return make_net(net.space, std::move(prefix),
                    tail_branch(delta, net.tail, tail_const(zero(net.space))));
}

namespace {

Element apply_op(CombineOp op, const Element& a, const Element& b, const Rational& q) {
    switch (op) {
        case CombineOp::Sup: return sup(a, b);
        case CombineOp::Inf: return inf(a, b);
        case CombineOp::Add: return add(a, b);
        case CombineOp::Sub: return sub(a, b);
        case CombineOp::Scale: return scale(q, a);
        case CombineOp::Abs: return abs(a);
        case CombineOp::Neg: return neg(a);
    }
    raise(ErrorCode::InvalidArgument, "bad combine op");
}

struct TailCombine {
    TailPtr tail;
    std::uint64_t materialize = 0; // combined form valid beyond this index
};

TailPtr combined_fallback(CombineOp op, TailPtr a, TailPtr b, Rational q = Rational(0)) {
    TailRule t;
    t.kind = TailRule::Kind::Combined;
    t.op = op;
    t.lhs = std::move(a);
    t.rhs = std::move(b);
    t.op_scalar = std::move(q);
    return make_tail(std::move(t));
}

TailCombine combine_tails(const TailPtr& a, const TailPtr& b, CombineOp op);

TailCombine distribute_branch(const TailPtr& br, const TailPtr& other, CombineOp op,
                              bool branch_left) {
    TailCombine on = branch_left ? combine_tails(br->on_rule, other, op)
                                 : combine_tails(other, br->on_rule, op);
    TailCombine off = branch_left ? combine_tails(br->off_rule, other, op)
                                  : combine_tails(other, br->off_rule, op);
    return {tail_branch(br->cond, on.tail, off.tail), std::max(on.materialize, off.materialize)};
}

TailCombine combine_tails(const TailPtr& a, const TailPtr& b, CombineOp op) {
    if (a->kind == TailRule::Kind::Branch) return distribute_branch(a, b, op, true);
    if (b->kind == TailRule::Kind::Branch) return distribute_branch(b, a, op, false);
    if (a->kind != TailRule::Kind::Form || b->kind != TailRule::Kind::Form)
        return {combined_fallback(op, a, b), 0};

    bool ga = !is_zero(a->geometric), gb = !is_zero(b->geometric);
    if (op == CombineOp::Add || op == CombineOp::Sub) {
        if (ga && gb && a->ratio != b->ratio) return {combined_fallback(op, a, b), 0};
        Rational ratio = ga ? a->ratio : b->ratio;
        bool minus = op == CombineOp::Sub;
        Element c = minus ? sub(a->center, b->center) : add(a->center, b->center);
        Element h = minus ? sub(a->harmonic, b->harmonic) : add(a->harmonic, b->harmonic);
        Element g = minus ? sub(a->geometric, b->geometric) : add(a->geometric, b->geometric);
        return {tail_form(std::move(c), std::move(h), std::move(g), ratio), 0};
    }

    // sup/inf: settle the winner per coordinate from the eventual sign of the
    // difference, then materialize everything before the stability bound.
    if (ga && gb && a->ratio != b->ratio) return {combined_fallback(op, a, b), 0};
    Rational ratio = ga ? a->ratio : b->ratio;
    auto keys = coord_keys({&a->center, &a->harmonic, &a->geometric, &b->center, &b->harmonic,
                            &b->geometric});
    std::uint64_t from = 1;
    bool sup_op = op == CombineOp::Sup;
    RieszSpace space = a->center.space;
    std::vector<std::pair<std::uint32_t, std::array<Rational, 3>>> picked;
    for (std::uint32_t k : keys) {
        Series d = sub_series(form_coord_series(*a, k), form_coord_series(*b, k));
        auto s = eventual_sign(d);
        if (!s) return {combined_fallback(op, a, b), 0};
        from = std::max(from, s->from);
        bool take_a = sup_op ? s->sign >= 0 : s->sign <= 0;
        const TailRule& src = take_a ? *a : *b;
        picked.push_back({k, {coord_of(src.center, k), coord_of(src.harmonic, k),
                              coord_of(src.geometric, k)}});
    }
    auto build = [&](std::size_t part) {
        if (space.kind != RieszSpace::Kind::FinSuppSeq) {
            std::vector<Rational> coords(space.kind == RieszSpace::Kind::Rationals ? 1
                                                                                   : space.dim,
                                         Rational(0));
            for (const auto& pk : picked) coords[pk.first] = pk.second[part];
            return space.kind == RieszSpace::Kind::Rationals ? scalar(coords[0])
                                                             : vector_of(std::move(coords));
        }
        std::vector<std::pair<std::uint32_t, Rational>> entries;
        for (const auto& pk : picked)
            if (pk.second[part] != 0) entries.push_back({pk.first, pk.second[part]});
        return finsupp_of(std::move(entries));
    };
    return {tail_form(build(0), build(1), build(2), ratio), from};
}

TailCombine map_tail(const TailPtr& t, CombineOp op, const Rational& q) {
    if (t->kind == TailRule::Kind::Branch) {
        TailCombine on = map_tail(t->on_rule, op, q);
        TailCombine off = map_tail(t->off_rule, op, q);
        return {tail_branch(t->cond, on.tail, off.tail),
                std::max(on.materialize, off.materialize)};
    }
    if (t->kind != TailRule::Kind::Form) return {combined_fallback(op, t, nullptr, q), 0};
    if (op == CombineOp::Scale || op == CombineOp::Neg) {
        Rational factor = op == CombineOp::Neg ? Rational(-1) : q;
        return {tail_form(scale(factor, t->center), scale(factor, t->harmonic),
                          scale(factor, t->geometric), t->ratio),
                0};
    }
    // abs: flip the eventually negative coordinates, materialize the rest.
    auto keys = coord_keys({&t->center, &t->harmonic, &t->geometric});
    std::uint64_t from = 1;
    std::vector<std::pair<std::uint32_t, int>> signs;
    for (std::uint32_t k : keys) {
        auto s = eventual_sign(form_coord_series(*t, k));
        if (!s) return {combined_fallback(op, t, nullptr, q), 0};
        from = std::max(from, s->from);
        signs.push_back({k, s->sign});
    }
    RieszSpace space = t->center.space;
    auto flip = [&](const Element& e) {
        Element out = e;
        if (space.kind != RieszSpace::Kind::FinSuppSeq) {
            for (const auto& sk : signs)
                if (sk.second < 0) {
                    Rational v = -out.coords[sk.first];
                    out.coords[sk.first] = v;
                }
            return out;
        }
        std::vector<std::pair<std::uint32_t, Rational>> entries;
        for (const auto& e2 : out.sparse) {
            bool negd = false;
            for (const auto& sk : signs)
                if (sk.first == e2.first && sk.second < 0) negd = true;
            entries.push_back({e2.first, negd ? Rational(-e2.second) : e2.second});
        }
        return finsupp_of(std::move(entries));
    };
    return {tail_form(flip(t->center), flip(t->harmonic), flip(t->geometric), t->ratio), from};
}

Net assemble(const Net& a, const Net* b, CombineOp op, const Rational& q, TailCombine tc) {
    std::uint64_t plen = std::max<std::uint64_t>(
        {a.prefix.size(), b ? b->prefix.size() : 0, tc.materialize});
    std::vector<Element> prefix;
    prefix.reserve(plen);
    Element dummy = zero(a.space);
    for (std::uint64_t n = 1; n <= plen; ++n)
        prefix.push_back(apply_op(op, eval(a, n), b ? eval(*b, n) : dummy, q));
    return make_net(a.space, std::move(prefix), std::move(tc.tail));
}

} // namespace

Net combine(const Net& a, const Net& b, CombineOp op) {
    if (op == CombineOp::Scale || op == CombineOp::Abs || op == CombineOp::Neg)
        raise(ErrorCode::InvalidArgument, "unary op passed to the binary combine");
    if (!(a.space == b.space)) raise(ErrorCode::SpaceMismatch, "combine across spaces");
    return assemble(a, &b, op, Rational(0), combine_tails(a.tail, b.tail, op));
}

Net combine_scale(const Rational& q, const Net& a) {
    return assemble(a, nullptr, CombineOp::Scale, q, map_tail(a.tail, CombineOp::Scale, q));
}

Net combine_abs(const Net& a) {
    return assemble(a, nullptr, CombineOp::Abs, Rational(0),
                    map_tail(a.tail, CombineOp::Abs, Rational(0)));
}

Net combine_neg(const Net& a) {
    return assemble(a, nullptr, CombineOp::Neg, Rational(0),
                    map_tail(a.tail, CombineOp::Neg, Rational(0)));
}

// ---------------------------------------------------------------------------
// Subnets
// ---------------------------------------------------------------------------

SubnetSelector SubnetSelector::inclusion(SetExprPtr d) {
    SubnetSelector s;
    s.delta = std::move(d);
    return s;
}

SubnetSelector SubnetSelector::affine_map(std::uint64_t mult, std::int64_t off) {
    SubnetSelector s;
    s.affine = {mult, off};
    return s;
}

SubnetSelector SubnetSelector::power_map(std::uint32_t k) {
    SubnetSelector s;
    s.power = k;
    return s;
}

SubnetResult subnet(const Net& net, const SubnetSelector& selector, std::uint64_t horizon) {
    IndexMap map;
    Verdict cof = Verdict::undetermined("cofinality", "");
    if (selector.delta) {
        if (selector.delta->domain != IndexKind::Naturals)
            raise(ErrorCode::DomainMismatch, "inclusion selector must be a set of naturals");
        std::uint64_t fb = 0;
        Tri fin = symbolic_finite(selector.delta, &fb);
        if (fin == Tri::Yes)
            raise(ErrorCode::NotCofinal,
                  "no member above " + std::to_string(fb) + "; first uncovered index is " +
                      std::to_string(fb + 1));
        cof = fin == Tri::No
                  ? Verdict::accept("cofinality", "infinite subset of the naturals is unbounded")
                  : Verdict::undetermined("cofinality", "could not decide infiniteness");
        if (auto p = normalize(*selector.delta);
            p && p->plus.empty() && p->minus.empty() && !p->residues.empty()) {
            map.kind = IndexMap::Kind::PeriodicEnum;
            map.periodic = *p;
        } else {
            map.kind = IndexMap::Kind::Scan;
            map.scan_set = selector.delta;
        }
    } else if (selector.affine) {
        auto [mult, off] = *selector.affine;
        if (mult == 0) raise(ErrorCode::InvalidArgument, "affine selector must increase");
        if ((std::int64_t)mult + off < 1)
            raise(ErrorCode::InvalidArgument, "affine selector leaves the naturals at m=1");
        map.kind = IndexMap::Kind::Affine;
        map.mult = mult;
        map.off = off;
        cof = Verdict::accept("cofinality", "strictly increasing affine map");
    } else if (selector.power) {
        if (*selector.power == 0) raise(ErrorCode::InvalidArgument, "power selector needs k >= 1");
        map.kind = IndexMap::Kind::Power;
        map.power = *selector.power;
        cof = Verdict::accept("cofinality", "strictly increasing power map");
    } else {
        raise(ErrorCode::InvalidArgument, "empty subnet selector");
    }
    (void)horizon;

    std::vector<Element> prefix;
    std::uint64_t m = 1;
    while (map.apply(m) <= net.prefix.size()) {
        prefix.push_back(eval(net, map.apply(m)));
        ++m;
    }
    TailRule t;
    t.kind = TailRule::Kind::Reindexed;
    t.inner = net.tail;
    t.map = map;
    return {make_net(net.space, std::move(prefix), make_tail(std::move(t))), cof};
}

// ---------------------------------------------------------------------------
// Relatively uniform convergence
// ---------------------------------------------------------------------------

Verdict ru_check(const Net& net, const Element& x, const Element& u, std::uint64_t horizon) {
    if (!(net.space == x.space) || !(net.space == u.space))
        raise(ErrorCode::SpaceMismatch, "regulator must share the net's space");
    if (!leq(zero(net.space), u)) raise(ErrorCode::NotPositive, "regulator must be >= 0");
    if (horizon == 0) horizon = 1;

    auto pieces = pieces_of(net);
    bool interleave = net.tail->kind == TailRule::Kind::UnitInterleave;
    if (!pieces && !interleave)
        return Verdict::undetermined("relatively-uniform", "tail rule outside the closed forms");

    std::uint64_t worst_alpha = 1;
    for (std::uint64_t m = 1; m <= horizon; ++m) {
        Element bound = scale(rat_u64(1, m), u);
        if (interleave) {
            if (!is_zero(x))
                return Verdict::undetermined("relatively-uniform",
                                             "interleaved net against a nonzero limit");
            // spikes at odd positions leave the regulator's support
            std::uint64_t from = 2ull * (support_reach(bound) + 1);
            auto n = first_member_after(odds(), from, from + 16);
            Verdict v = Verdict::reject("relatively-uniform",
                                        "no tail index works for m = " + std::to_string(m) +
                                            ": spike at " + std::to_string(*n) +
                                            " exceeds the scaled regulator");
            v.index = *n;
            return v;
        }
        const TailRule bound_form = *tail_const(bound);
        std::uint64_t alpha = net.prefix.size() + 1;
        for (const auto& piece : *pieces) {
            std::uint64_t fb = 0;
            Tri fin = symbolic_finite(piece.region, &fb);
            if (fin == Tri::Yes) {
                alpha = std::max(alpha, fb + 1);
                continue;
            }
            TriAt cmp = form_abs_le(*piece.form, x, bound_form);
            if (cmp.tri == Tri::Yes) {
                alpha = std::max(alpha, cmp.from);
                continue;
            }
            if (cmp.tri == Tri::No) {
                auto n = first_member_after(piece.region, cmp.from, cmp.from * 2 + kScanCap);
                Verdict v = Verdict::reject(
                    "relatively-uniform",
                    "no tail index works for m = " + std::to_string(m) +
                        (n ? ": |x_" + std::to_string(*n) + " - x| exceeds u/" + std::to_string(m)
                           : ""));
                if (n) v.index = *n;
                return v;
            }
            return Verdict::undetermined("relatively-uniform", "sign analysis did not stabilize");
        }
        worst_alpha = std::max(worst_alpha, alpha);
    }
    Verdict v = Verdict::accept("relatively-uniform",
                                "tail indices found for every m up to " + std::to_string(horizon));
    v.horizon = worst_alpha;
    return v;
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

namespace {

void collect_branch_conds(const TailPtr& t, std::vector<SetExprPtr>& out) {
    switch (t->kind) {
        case TailRule::Kind::Branch:
            out.push_back(t->cond);
            collect_branch_conds(t->on_rule, out);
            collect_branch_conds(t->off_rule, out);
            return;
        case TailRule::Kind::UnitInterleave: out.push_back(odds()); return;
        case TailRule::Kind::Combined:
            collect_branch_conds(t->lhs, out);
            if (t->rhs) collect_branch_conds(t->rhs, out);
            return;
        case TailRule::Kind::Reindexed: collect_branch_conds(t->inner, out); return;
        default: return;
    }
}

} // namespace

std::vector<Net> dominating_templates(const Net& net, const Element& x) {
    std::vector<Net> out;
    out.push_back(constant_net(zero(net.space)));
    Element h_env = zero(net.space), g_env = zero(net.space);
    Rational ratio = rat(1, 2);
    if (auto pieces = pieces_of(net)) {
        for (const auto& piece : *pieces) {
            h_env = sup(h_env, abs(piece.form->harmonic));
            g_env = sup(g_env, abs(piece.form->geometric));
            if (!is_zero(piece.form->geometric)) ratio = piece.form->ratio;
        }
    }
    if (!is_zero(h_env) || !is_zero(g_env)) {
        auto env = make_net(net.space, {}, tail_form(zero(net.space), h_env, g_env, ratio));
        out.push_back(env);
        out.push_back(combine_scale(Rational(2), env));
    }
    Element probe = zero(net.space);
    for (std::uint64_t n = 1; n <= 32; ++n) probe = sup(probe, abs(sub(eval(net, n), x)));
    if (!is_zero(probe)) {
        Element twice = scale(Rational(2), probe);
        out.push_back(make_net(net.space, {}, tail_harmonic(twice)));
        out.push_back(make_net(net.space, {}, tail_geometric(twice, rat(1, 2))));
    }
    return out;
}

std::optional<Witness> witness_search(const Net& net, const Element& x,
                                      const DirectedSetMeasure& mu,
                                      const WitnessTemplates& templates, std::uint64_t horizon) {
    std::vector<SetExprPtr> deltas{full_set()};
    std::vector<SetExprPtr> conds;
    collect_branch_conds(net.tail, conds);
    for (const auto& cond : conds) deltas.push_back(set_complement(cond));
    if (!net.prefix.empty()) {
        std::vector<std::uint64_t> head;
        for (std::uint64_t n = 1; n <= net.prefix.size(); ++n) head.push_back(n);
        deltas.push_back(set_complement(finite_list(std::move(head))));
    }
    std::vector<std::string> seen;
    std::vector<SetExprPtr> unique_deltas;
    for (const auto& d : deltas) {
        std::string key = to_string(*d);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        unique_deltas.push_back(d);
    }

    std::vector<Net> candidates;
    for (const Net& t : dominating_templates(net, x)) {
        bool pure_zero = t.prefix.empty() && t.tail->kind == TailRule::Kind::Form &&
                         is_zero(t.tail->center) && is_zero(t.tail->harmonic) &&
                         is_zero(t.tail->geometric);
        bool pure_harm = t.tail->kind == TailRule::Kind::Form && is_zero(t.tail->geometric);
        bool pure_geo = t.tail->kind == TailRule::Kind::Form && is_zero(t.tail->harmonic) &&
                        !is_zero(t.tail->geometric);
        if (pure_zero && !templates.const_zero) continue;
        if (!pure_zero && pure_geo && !templates.geometric) continue;
        if (!pure_zero && !pure_geo && pure_harm && !templates.harmonic) continue;
        candidates.push_back(t);
    }
    for (const Net& t : templates.extra_p) candidates.push_back(t);

    for (const auto& delta : unique_deltas) {
        for (const Net& p : candidates) {
            try {
                Verdict v = check_st_order_conv(net, x, Witness{p, delta}, mu, horizon);
                if (v.accepted()) return Witness{p, delta};
            } catch (const Error&) {
                // candidate outside the measure's field or undecidable; move on
            }
        }
    }
    return std::nullopt;
}

Net unit_interleave_net() {
    return make_net(RieszSpace::finsupp(), {}, tail_unit_interleave());
}

} // namespace stnets
