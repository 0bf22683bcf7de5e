#include "stnets/index_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace stnets {

namespace {

// Resource guards: beyond these a normal form is reported as NotPeriodic
// rather than materialized. Generous for desk scale.
constexpr std::uint64_t kPeriodCap = 1u << 20;
constexpr std::uint64_t kExceptionCap = 1u << 20;
constexpr std::uint64_t kSampleHorizon = 4096;
constexpr std::size_t kLeafCap = 16;
constexpr std::uint64_t kIntervalCap = 1u << 22;

std::string join_u64(const std::vector<std::uint64_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Directed index sets
// ---------------------------------------------------------------------------

const char* index_kind_name(IndexKind k) {
    switch (k) {
        case IndexKind::Naturals: return "naturals";
        case IndexKind::PairNaturals: return "pair-naturals";
        case IndexKind::SymbolicUncountable: return "symbolic";
    }
    return "?";
}

std::string to_string(const Index& ix) {
    switch (ix.kind) {
        case IndexKind::Naturals: return std::to_string(ix.n);
        case IndexKind::PairNaturals:
            return "(" + std::to_string(ix.ij.first) + "," + std::to_string(ix.ij.second) + ")";
        case IndexKind::SymbolicUncountable: return ix.atom;
    }
    return "?";
}

bool index_leq(const Index& a, const Index& b) {
    if (a.kind != b.kind) raise(ErrorCode::DomainMismatch, "indices from different directed sets");
    switch (a.kind) {
        case IndexKind::Naturals: return a.n <= b.n;
        case IndexKind::PairNaturals:
            return a.ij.first <= b.ij.first && a.ij.second <= b.ij.second;
        case IndexKind::SymbolicUncountable: return a.atom <= b.atom;
    }
    return false;
}

Index join(IndexKind kind, const Index& a, const Index& b) {
    if (a.kind != kind || b.kind != kind)
        raise(ErrorCode::DomainMismatch, "join arguments must live in the given index set");
    switch (kind) {
        case IndexKind::Naturals: return Index::nat(std::max(a.n, b.n));
        case IndexKind::PairNaturals:
            return Index::pair(std::max(a.ij.first, b.ij.first),
                               std::max(a.ij.second, b.ij.second));
        case IndexKind::SymbolicUncountable: return a.atom <= b.atom ? b : a;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Set expressions
// ---------------------------------------------------------------------------

std::string to_string(const Atom& a) {
    if (a.pair) return "(" + std::to_string(a.pair->first) + "," + std::to_string(a.pair->second) + ")";
    return a.name;
}

namespace {

SetExprPtr make_expr(SetExpr e) { return std::make_shared<const SetExpr>(std::move(e)); }

void check_atoms(const std::vector<Atom>& atoms, IndexKind domain) {
    for (const Atom& a : atoms) {
        if (domain == IndexKind::PairNaturals && !a.pair)
            raise(ErrorCode::DomainMismatch, "pair index set needs pair atoms");
        if (domain == IndexKind::SymbolicUncountable && a.pair)
            raise(ErrorCode::DomainMismatch, "symbolic index set needs named atoms");
    }
}

} // namespace

SetExprPtr finite_list(std::vector<std::uint64_t> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    if (!elems.empty() && elems.front() == 0)
        raise(ErrorCode::InvalidArgument, "index sets start at 1");
    SetExpr e;
    e.kind = SetExpr::Kind::FiniteList;
    e.domain = IndexKind::Naturals;
    e.elems = std::move(elems);
    return make_expr(std::move(e));
}

SetExprPtr arith_prog(std::uint64_t first, std::uint64_t step) {
    if (first == 0 || step == 0)
        raise(ErrorCode::InvalidArgument, "arithmetic progression needs first >= 1 and step >= 1");
    SetExpr e;
    e.kind = SetExpr::Kind::ArithProg;
    e.domain = IndexKind::Naturals;
    e.first = first;
    e.step = step;
    return make_expr(std::move(e));
}

SetExprPtr set_union(SetExprPtr a, SetExprPtr b) {
    if (!a || !b) raise(ErrorCode::InvalidArgument, "null set expression");
    if (a->domain != b->domain)
        raise(ErrorCode::DomainMismatch, "union across different index sets");
    SetExpr e;
    e.kind = SetExpr::Kind::Union;
    e.domain = a->domain;
    e.lhs = std::move(a);
    e.rhs = std::move(b);
    return make_expr(std::move(e));
}

SetExprPtr set_intersection(SetExprPtr a, SetExprPtr b) {
    if (!a || !b) raise(ErrorCode::InvalidArgument, "null set expression");
    if (a->domain != b->domain)
        raise(ErrorCode::DomainMismatch, "intersection across different index sets");
    SetExpr e;
    e.kind = SetExpr::Kind::Intersection;
    e.domain = a->domain;
    e.lhs = std::move(a);
    e.rhs = std::move(b);
    return make_expr(std::move(e));
}

SetExprPtr set_complement(SetExprPtr inner) {
    if (!inner) raise(ErrorCode::InvalidArgument, "null set expression");
    SetExpr e;
    e.kind = SetExpr::Kind::Complement;
    e.domain = inner->domain;
    e.lhs = std::move(inner);
    return make_expr(std::move(e));
}

SetExprPtr listed(std::vector<Atom> atoms, IndexKind domain) {
    if (domain == IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "use fin{...} for natural numbers");
    check_atoms(atoms, domain);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    SetExpr e;
    e.kind = SetExpr::Kind::Listed;
    e.domain = domain;
    e.atoms = std::move(atoms);
    return make_expr(std::move(e));
}

SetExprPtr colisted(std::vector<Atom> atoms, IndexKind domain) {
    auto base = listed(std::move(atoms), domain);
    SetExpr e;
    e.kind = SetExpr::Kind::CoListed;
    e.domain = base->domain;
    e.atoms = base->atoms;
    return make_expr(std::move(e));
}

SetExprPtr predicate(PredicateInfo info) {
    if (!info.member) raise(ErrorCode::InvalidArgument, "predicate needs a membership oracle");
    if (info.declared_density && (*info.declared_density < 0 || *info.declared_density > 1))
        raise(ErrorCode::InvalidArgument, "declared density must lie in [0,1]");
    SetExpr e;
    e.kind = SetExpr::Kind::Predicate;
    e.domain = IndexKind::Naturals;
    e.pred = std::move(info);
    return make_expr(std::move(e));
}

namespace {

std::uint64_t pow_capped(std::uint64_t base, unsigned exp) {
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < exp; ++i) {
        acc *= base;
        if (acc > (unsigned __int128)UINT64_MAX) return UINT64_MAX;
    }
    return (std::uint64_t)acc;
}

bool is_kth_power(std::uint64_t n, unsigned k) {
    if (n == 0) return false;
    auto r = (std::uint64_t)std::llround(std::pow((double)n, 1.0 / k));
    for (std::uint64_t c = r > 2 ? r - 2 : 1; c <= r + 2; ++c)
        if (pow_capped(c, k) == n) return true;
    return false;
}

PredicateInfo builtin_predicate(const std::string& name, unsigned k) {
    PredicateInfo info;
    info.name = name;
    info.member = [k](std::uint64_t n) { return is_kth_power(n, k); };
    info.declared_density = Rational(0); // k >= 2: at most n^(1/k) members below n
    info.infinite = true;
    return info;
}

} // namespace

bool is_known_predicate(const std::string& name) {
    return name == "squares" || name == "cubes" || name == "pow4" || name == "pow5";
}

std::vector<std::string> known_predicate_names() { return {"cubes", "pow4", "pow5", "squares"}; }

SetExprPtr named_predicate(const std::string& name) {
    if (name == "squares") return predicate(builtin_predicate(name, 2));
    if (name == "cubes") return predicate(builtin_predicate(name, 3));
    if (name == "pow4") return predicate(builtin_predicate(name, 4));
    if (name == "pow5") return predicate(builtin_predicate(name, 5));
    raise(ErrorCode::InvalidArgument, "unknown predicate '" + name + "'");
}

SetExprPtr empty_set(IndexKind domain) {
    if (domain == IndexKind::Naturals) return finite_list({});
    return listed({}, domain);
}

SetExprPtr full_set(IndexKind domain) {
    if (domain == IndexKind::Naturals) return arith_prog(1, 1);
    return colisted({}, domain);
}

SetExprPtr evens() { return arith_prog(2, 2); }
SetExprPtr odds() { return arith_prog(1, 2); }

bool contains(const SetExpr& s, std::uint64_t n) {
    if (s.domain != IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "natural-number membership on a non-natural set");
    switch (s.kind) {
        case SetExpr::Kind::FiniteList:
            return std::binary_search(s.elems.begin(), s.elems.end(), n);
        case SetExpr::Kind::ArithProg:
            return n >= s.first && (n - s.first) % s.step == 0;
        case SetExpr::Kind::Union: return contains(*s.lhs, n) || contains(*s.rhs, n);
        case SetExpr::Kind::Intersection: return contains(*s.lhs, n) && contains(*s.rhs, n);
        case SetExpr::Kind::Complement: return !contains(*s.lhs, n);
        case SetExpr::Kind::Predicate: return s.pred.member(n);
        default: raise(ErrorCode::DomainMismatch, "atom set over the naturals");
    }
}

bool contains_atom(const SetExpr& s, const Atom& a) {
    if (s.domain == IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "atom membership on a naturals set");
    switch (s.kind) {
        case SetExpr::Kind::Listed:
            return std::binary_search(s.atoms.begin(), s.atoms.end(), a);
        case SetExpr::Kind::CoListed:
            return !std::binary_search(s.atoms.begin(), s.atoms.end(), a);
        case SetExpr::Kind::Union: return contains_atom(*s.lhs, a) || contains_atom(*s.rhs, a);
        case SetExpr::Kind::Intersection:
            return contains_atom(*s.lhs, a) && contains_atom(*s.rhs, a);
        case SetExpr::Kind::Complement: return !contains_atom(*s.lhs, a);
        default: raise(ErrorCode::DomainMismatch, "naturals leaf in an atom set");
    }
}

std::string to_string(const SetExpr& s) {
    switch (s.kind) {
        case SetExpr::Kind::FiniteList: return "fin{" + join_u64(s.elems) + "}";
        case SetExpr::Kind::ArithProg:
            return "ap(" + std::to_string(s.first) + "," + std::to_string(s.step) + ")";
        case SetExpr::Kind::Union: return "u(" + to_string(*s.lhs) + "," + to_string(*s.rhs) + ")";
        case SetExpr::Kind::Intersection:
            return "i(" + to_string(*s.lhs) + "," + to_string(*s.rhs) + ")";
        case SetExpr::Kind::Complement: return "c(" + to_string(*s.lhs) + ")";
        case SetExpr::Kind::Listed:
        case SetExpr::Kind::CoListed: {
            std::ostringstream os;
            os << (s.kind == SetExpr::Kind::Listed ? "listed{" : "colisted{");
            for (std::size_t i = 0; i < s.atoms.size(); ++i) {
                if (i) os << ",";
                os << to_string(s.atoms[i]);
            }
            os << "}";
            return os.str();
        }
        case SetExpr::Kind::Predicate: return "pred:" + s.pred.name;
    }
    return "?";
}

OrderInterval order_interval(IndexKind kind, const Index& a, const Index& b) {
    if (a.kind != kind || b.kind != kind)
        raise(ErrorCode::DomainMismatch, "interval endpoints outside the index set");
    if (!index_leq(a, b))
        raise(ErrorCode::NotComparable,
              "order interval needs a <= b, got [" + to_string(a) + ", " + to_string(b) + "]");
    switch (kind) {
        case IndexKind::Naturals: {
            if (b.n - a.n + 1 > kIntervalCap)
                raise(ErrorCode::InvalidArgument, "interval too large to materialize");
            std::vector<std::uint64_t> elems;
            for (std::uint64_t n = a.n; n <= b.n; ++n) elems.push_back(n);
            return {finite_list(std::move(elems)), true};
        }
        case IndexKind::PairNaturals: {
            std::uint64_t w = b.ij.first - a.ij.first + 1, h = b.ij.second - a.ij.second + 1;
            if (w > kIntervalCap / std::max<std::uint64_t>(h, 1))
                raise(ErrorCode::InvalidArgument, "interval too large to materialize");
            std::vector<Atom> atoms;
            for (std::uint64_t i = a.ij.first; i <= b.ij.first; ++i)
                for (std::uint64_t j = a.ij.second; j <= b.ij.second; ++j)
                    atoms.push_back(Atom{"", std::make_pair(i, j)});
            return {listed(std::move(atoms), IndexKind::PairNaturals), true};
        }
        case IndexKind::SymbolicUncountable: {
            if (a == b) return {listed({Atom{a.atom, std::nullopt}}), true};
            // The symbolic model is a dense chain: [a,b] with a < b is
            // uncountable, so it has no finite description here.
            raise(ErrorCode::NotRepresentable,
                  "symbolic interval with distinct endpoints is not finitely representable");
        }
    }
    raise(ErrorCode::InvalidArgument, "bad index kind");
}

// ---------------------------------------------------------------------------
// Eventually periodic normal form
// ---------------------------------------------------------------------------

bool Periodic::member(std::uint64_t n) const {
    if (std::binary_search(plus.begin(), plus.end(), n)) return true;
    if (std::binary_search(minus.begin(), minus.end(), n)) return false;
    return std::binary_search(residues.begin(), residues.end(),
                              (std::uint32_t)(n % period));
}

std::uint64_t Periodic::exception_bound() const {
    std::uint64_t b = 0;
    if (!plus.empty()) b = std::max(b, plus.back());
    if (!minus.empty()) b = std::max(b, minus.back());
    return b;
}

std::string to_string(const Periodic& p) {
    std::ostringstream os;
    os << "period " << p.period << ", residues {";
    for (std::size_t i = 0; i < p.residues.size(); ++i) {
        if (i) os << ",";
        os << p.residues[i];
    }
    os << "}";
    if (!p.plus.empty()) os << ", +{" << join_u64(p.plus) << "}";
    if (!p.minus.empty()) os << ", -{" << join_u64(p.minus) << "}";
    return os.str();
}

namespace {

// Shrink to the minimal period: the smallest divisor dd of period under which
// the residue set is shift-invariant describes the same rule.
Periodic canonical_minimize(Periodic p) {
    std::sort(p.plus.begin(), p.plus.end());
    p.plus.erase(std::unique(p.plus.begin(), p.plus.end()), p.plus.end());
    std::sort(p.minus.begin(), p.minus.end());
    p.minus.erase(std::unique(p.minus.begin(), p.minus.end()), p.minus.end());
    for (std::uint64_t dd = 1; dd < p.period; ++dd) {
        if (p.period % dd != 0) continue;
        bool invariant = true;
        for (std::uint64_t r = 0; r < dd && invariant; ++r) {
            bool first_in = std::binary_search(p.residues.begin(), p.residues.end(),
                                               (std::uint32_t)r);
            for (std::uint64_t q = r + dd; q < p.period; q += dd)
                if (std::binary_search(p.residues.begin(), p.residues.end(),
                                       (std::uint32_t)q) != first_in) {
                    invariant = false;
                    break;
                }
        }
        if (invariant) {
            std::vector<std::uint32_t> shrunk;
            for (std::uint64_t r = 0; r < dd; ++r)
                if (std::binary_search(p.residues.begin(), p.residues.end(), (std::uint32_t)r))
                    shrunk.push_back((std::uint32_t)r);
            p.period = dd;
            p.residues = std::move(shrunk);
            break;
        }
    }
    return p;
}

} // namespace

std::optional<Periodic> normalize(const SetExpr& s) {
    if (s.domain != IndexKind::Naturals) return std::nullopt;
    switch (s.kind) {
        case SetExpr::Kind::FiniteList: {
            Periodic p;
            p.plus = s.elems;
            return p;
        }
        case SetExpr::Kind::ArithProg: {
            if (s.step > kPeriodCap || s.first > kExceptionCap) return std::nullopt;
            Periodic p;
            p.period = s.step;
            p.residues = {(std::uint32_t)(s.first % s.step)};
            std::uint64_t r = s.first % s.step;
            for (std::uint64_t m = r == 0 ? s.step : r; m < s.first; m += s.step)
                p.minus.push_back(m);
            return canonical_minimize(std::move(p));
        }
        case SetExpr::Kind::Complement: {
            auto in = normalize(*s.lhs);
            if (!in) return std::nullopt;
            Periodic p;
            p.period = in->period;
            for (std::uint64_t r = 0; r < in->period; ++r)
                if (!std::binary_search(in->residues.begin(), in->residues.end(),
                                        (std::uint32_t)r))
                    p.residues.push_back((std::uint32_t)r);
            p.plus = in->minus;
            p.minus = in->plus;
            return canonical_minimize(std::move(p));
        }
        case SetExpr::Kind::Union:
        case SetExpr::Kind::Intersection: {
            auto l = normalize(*s.lhs), r = normalize(*s.rhs);
            if (!l || !r) return std::nullopt;
            std::uint64_t period = std::lcm(l->period, r->period);
            if (period > kPeriodCap) return std::nullopt;
            bool is_union = s.kind == SetExpr::Kind::Union;
            Periodic p;
            p.period = period;
            for (std::uint64_t rr = 0; rr < period; ++rr) {
                bool a = std::binary_search(l->residues.begin(), l->residues.end(),
                                            (std::uint32_t)(rr % l->period));
                bool b = std::binary_search(r->residues.begin(), r->residues.end(),
                                            (std::uint32_t)(rr % r->period));
                if (is_union ? (a || b) : (a && b)) p.residues.push_back((std::uint32_t)rr);
            }
            // Beyond both children's exception bounds the pure residue rule is
            // exact, so only a finite prefix needs rescanning.
            std::uint64_t scan = std::max(l->exception_bound(), r->exception_bound());
            if (scan > kExceptionCap) return std::nullopt;
            for (std::uint64_t n = 1; n <= scan; ++n) {
                bool actual = is_union ? (l->member(n) || r->member(n))
                                       : (l->member(n) && r->member(n));
                bool rule = std::binary_search(p.residues.begin(), p.residues.end(),
                                               (std::uint32_t)(n % period));
                if (actual && !rule) p.plus.push_back(n);
                if (!actual && rule) p.minus.push_back(n);
            }
            return canonical_minimize(std::move(p));
        }
        default: return std::nullopt; // Predicate; Listed/CoListed are non-natural
    }
}

// ---------------------------------------------------------------------------
// Symbolic reasoning
// ---------------------------------------------------------------------------

namespace {

bool set_expr_equal(const SetExpr& a, const SetExpr& b) {
    if (a.kind != b.kind || a.domain != b.domain) return false;
    switch (a.kind) {
        case SetExpr::Kind::FiniteList: return a.elems == b.elems;
        case SetExpr::Kind::ArithProg: return a.first == b.first && a.step == b.step;
        case SetExpr::Kind::Union:
        case SetExpr::Kind::Intersection:
            return set_expr_equal(*a.lhs, *b.lhs) && set_expr_equal(*a.rhs, *b.rhs);
        case SetExpr::Kind::Complement: return set_expr_equal(*a.lhs, *b.lhs);
        case SetExpr::Kind::Listed:
        case SetExpr::Kind::CoListed: return a.atoms == b.atoms;
        case SetExpr::Kind::Predicate: return a.pred.name == b.pred.name;
    }
    return false;
}

void collect_leaves(const SetExprPtr& s, std::vector<SetExprPtr>& leaves) {
    switch (s->kind) {
        case SetExpr::Kind::Union:
        case SetExpr::Kind::Intersection:
            collect_leaves(s->lhs, leaves);
            collect_leaves(s->rhs, leaves);
            return;
        case SetExpr::Kind::Complement: collect_leaves(s->lhs, leaves); return;
        default:
            for (const auto& known : leaves)
                if (set_expr_equal(*known, *s)) return;
            leaves.push_back(s);
    }
}

bool eval_assignment(const SetExpr& s, const std::vector<SetExprPtr>& leaves,
                     std::uint32_t bits) {
    switch (s.kind) {
        case SetExpr::Kind::Union:
            return eval_assignment(*s.lhs, leaves, bits) || eval_assignment(*s.rhs, leaves, bits);
        case SetExpr::Kind::Intersection:
            return eval_assignment(*s.lhs, leaves, bits) && eval_assignment(*s.rhs, leaves, bits);
        case SetExpr::Kind::Complement: return !eval_assignment(*s.lhs, leaves, bits);
        default:
            for (std::size_t i = 0; i < leaves.size(); ++i)
                if (set_expr_equal(*leaves[i], s)) return (bits >> i) & 1;
            return false; // unreachable: every leaf was collected
    }
}

std::vector<std::optional<Periodic>> leaf_norms(const std::vector<SetExprPtr>& leaves) {
    std::vector<std::optional<Periodic>> norms;
    norms.reserve(leaves.size());
    for (const auto& l : leaves) norms.push_back(normalize(*l));
    return norms;
}

struct ConstraintInfo {
    bool empty = false;
    bool finite = false;
    std::uint64_t bound = 0; // members sit at or below this when finite
};

// The conjunction of periodic constraints a truth assignment imposes on the
// normalizable leaves, resolved by direct residue arithmetic. nullopt when
// nothing is constrained or the combined period is out of reach.
std::optional<ConstraintInfo> constraint_info(const std::vector<std::optional<Periodic>>& norms,
                                              std::uint32_t bits) {
    std::uint64_t lcm = 1, except = 0;
    bool any = false;
    for (const auto& p : norms) {
        if (!p) continue;
        any = true;
        lcm = std::lcm(lcm, p->period);
        if (lcm > kPeriodCap) return std::nullopt;
        except = std::max(except, p->exception_bound());
    }
    if (!any || except > kExceptionCap) return std::nullopt;

    auto matches_residue = [&](std::uint64_t r) {
        for (std::size_t i = 0; i < norms.size(); ++i) {
            if (!norms[i]) continue;
            bool in = std::binary_search(norms[i]->residues.begin(), norms[i]->residues.end(),
                                         (std::uint32_t)(r % norms[i]->period));
            if (in != (((bits >> i) & 1) != 0)) return false;
        }
        return true;
    };
    // Beyond the exception bound, membership is the pure residue rule.
    for (std::uint64_t r = 0; r < lcm; ++r)
        if (matches_residue(r)) return ConstraintInfo{false, false, 0};

    ConstraintInfo info{true, true, 0};
    for (std::uint64_t n = 1; n <= except; ++n) {
        bool all = true;
        for (std::size_t i = 0; i < norms.size() && all; ++i) {
            if (!norms[i]) continue;
            if (norms[i]->member(n) != (((bits >> i) & 1) != 0)) all = false;
        }
        if (all) {
            info.empty = false;
            info.bound = n;
        }
    }
    return info;
}

// Treats distinct leaves as independent sets, except that assignments whose
// periodic constraints are unsatisfiable are discarded; sound for emptiness,
// still incomplete (predicate leaves stay free).
bool propositionally_empty(const SetExprPtr& s) {
    std::vector<SetExprPtr> leaves;
    collect_leaves(s, leaves);
    if (leaves.size() > kLeafCap) return false;
    auto norms = leaf_norms(leaves);
    for (std::uint32_t bits = 0; bits < (1u << leaves.size()); ++bits) {
        if (!eval_assignment(*s, leaves, bits)) continue;
        auto constraint = constraint_info(norms, bits);
        if (constraint && constraint->empty) continue;
        return false;
    }
    return true;
}

// s is covered by the satisfying assignments' periodic constraints; when each
// of those is finite, so is s, with the largest exception bound.
std::optional<std::uint64_t> propositional_finite_bound(const SetExprPtr& s) {
    std::vector<SetExprPtr> leaves;
    collect_leaves(s, leaves);
    if (leaves.size() > kLeafCap) return std::nullopt;
    auto norms = leaf_norms(leaves);
    std::uint64_t bound = 0;
    for (std::uint32_t bits = 0; bits < (1u << leaves.size()); ++bits) {
        if (!eval_assignment(*s, leaves, bits)) continue;
        auto constraint = constraint_info(norms, bits);
        if (!constraint || !constraint->finite) return std::nullopt;
        bound = std::max(bound, constraint->bound);
    }
    return bound;
}

// leaf => s as a tautology over the other leaves; then s contains the leaf.
bool propositionally_contains_leaf(const SetExprPtr& s, const SetExprPtr& leaf) {
    std::vector<SetExprPtr> leaves;
    collect_leaves(s, leaves);
    if (leaves.size() > kLeafCap) return false;
    std::size_t pos = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i)
        if (set_expr_equal(*leaves[i], *leaf)) pos = i;
    if (pos == leaves.size()) return false;
    auto norms = leaf_norms(leaves);
    for (std::uint32_t bits = 0; bits < (1u << leaves.size()); ++bits) {
        if (!((bits >> pos) & 1)) continue;
        if (eval_assignment(*s, leaves, bits)) continue;
        auto constraint = constraint_info(norms, bits);
        if (constraint && constraint->empty) continue;
        return false;
    }
    return true;
}

bool leaf_infinite(const SetExpr& s) {
    switch (s.kind) {
        case SetExpr::Kind::ArithProg: return true;
        case SetExpr::Kind::CoListed: return true;
        case SetExpr::Kind::Predicate: return s.pred.infinite;
        default: return false;
    }
}

struct AtomSet {
    bool co = false;
    std::vector<Atom> atoms;
};

std::vector<Atom> atoms_union(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    std::vector<Atom> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Atom> atoms_intersection(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    std::vector<Atom> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Atom> atoms_difference(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    std::vector<Atom> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Every boolean combination of finite and co-finite atom sets is again finite
// or co-finite; this is the exact calculus on those domains.
std::optional<AtomSet> reduce_atoms(const SetExpr& s) {
    switch (s.kind) {
        case SetExpr::Kind::Listed: return AtomSet{false, s.atoms};
        case SetExpr::Kind::CoListed: return AtomSet{true, s.atoms};
        case SetExpr::Kind::Complement: {
            auto in = reduce_atoms(*s.lhs);
            if (!in) return std::nullopt;
            in->co = !in->co;
            return in;
        }
        case SetExpr::Kind::Union: {
            auto a = reduce_atoms(*s.lhs), b = reduce_atoms(*s.rhs);
            if (!a || !b) return std::nullopt;
            if (!a->co && !b->co) return AtomSet{false, atoms_union(a->atoms, b->atoms)};
            if (a->co && b->co) return AtomSet{true, atoms_intersection(a->atoms, b->atoms)};
            const AtomSet& co = a->co ? *a : *b;
            const AtomSet& plain = a->co ? *b : *a;
            return AtomSet{true, atoms_difference(co.atoms, plain.atoms)};
        }
        case SetExpr::Kind::Intersection: {
            auto a = reduce_atoms(*s.lhs), b = reduce_atoms(*s.rhs);
            if (!a || !b) return std::nullopt;
            if (!a->co && !b->co) return AtomSet{false, atoms_intersection(a->atoms, b->atoms)};
            if (a->co && b->co) return AtomSet{true, atoms_union(a->atoms, b->atoms)};
            const AtomSet& co = a->co ? *a : *b;
            const AtomSet& plain = a->co ? *b : *a;
            return AtomSet{false, atoms_difference(plain.atoms, co.atoms)};
        }
        default: return std::nullopt;
    }
}

} // namespace

namespace {

// Both symbolic_* functions are pure in the expression, and convergence
// checks fire the same handful of queries over and over; memoize per thread
// on the canonical printed form.
struct SymbolicMemo {
    std::unordered_map<std::string, Tri> empty;
    std::unordered_map<std::string, std::pair<Tri, std::uint64_t>> finite;
};

SymbolicMemo& symbolic_memo() {
    thread_local SymbolicMemo memo;
    return memo;
}

} // namespace

Tri symbolic_empty(const SetExprPtr& s) {
    if (!s) raise(ErrorCode::InvalidArgument, "null set expression");
    if (s->domain != IndexKind::Naturals) {
        auto r = reduce_atoms(*s);
        if (!r) return Tri::Unknown;
        if (r->co) return Tri::No; // co-finite in an infinite ambient set
        return r->atoms.empty() ? Tri::Yes : Tri::No;
    }
    auto& memo = symbolic_memo().empty;
    std::string key = to_string(*s);
    if (auto hit = memo.find(key); hit != memo.end()) return hit->second;
    auto answer = [&]() -> Tri {
        if (auto p = normalize(*s)) return p->is_empty() ? Tri::Yes : Tri::No;
        if (propositionally_empty(s)) return Tri::Yes;
        for (std::uint64_t n = 1; n <= kSampleHorizon; ++n)
            if (contains(*s, n)) return Tri::No;
        return Tri::Unknown;
    }();
    memo.emplace(std::move(key), answer);
    return answer;
}

Tri symbolic_disjoint(const SetExprPtr& a, const SetExprPtr& b) {
    return symbolic_empty(set_intersection(a, b));
}

Tri symbolic_subset(const SetExprPtr& a, const SetExprPtr& b) {
    return symbolic_empty(set_intersection(a, set_complement(b)));
}

Tri symbolic_finite(const SetExprPtr& s, std::uint64_t* bound) {
    std::uint64_t scratch = 0;
    if (!bound) bound = &scratch;
    *bound = 0;
    if (!s) raise(ErrorCode::InvalidArgument, "null set expression");
    if (s->domain != IndexKind::Naturals) {
        auto r = reduce_atoms(*s);
        if (!r) return Tri::Unknown;
        return r->co ? Tri::No : Tri::Yes;
    }
    auto& memo = symbolic_memo().finite;
    std::string key = to_string(*s);
    if (auto hit = memo.find(key); hit != memo.end()) {
        *bound = hit->second.second;
        return hit->second.first;
    }
    auto answer = [&]() -> Tri {
        if (auto p = normalize(*s)) {
            if (!p->is_finite()) return Tri::No;
            *bound = p->exception_bound();
            return Tri::Yes;
        }
        if (auto d = exact_density(s); d && *d > 0) return Tri::No;
        if (auto fb = propositional_finite_bound(s)) {
            *bound = *fb;
            return Tri::Yes;
        }
        std::vector<SetExprPtr> leaves;
        collect_leaves(s, leaves);
        for (const auto& leaf : leaves)
            if (leaf_infinite(*leaf) && propositionally_contains_leaf(s, leaf)) return Tri::No;
        return Tri::Unknown;
    }();
    memo.emplace(std::move(key), std::make_pair(answer, *bound));
    return answer;
}

std::optional<std::uint64_t> tail_disjoint_bound(const SetExprPtr& a, const SetExprPtr& b) {
    auto inter = set_intersection(a, b);
    std::uint64_t bound = 0;
    if (symbolic_finite(inter, &bound) == Tri::Yes) return bound;
    if (symbolic_empty(inter) == Tri::Yes) return 0;
    return std::nullopt;
}

std::optional<std::uint64_t> tail_subset_bound(const SetExprPtr& a, const SetExprPtr& b) {
    return tail_disjoint_bound(a, set_complement(b));
}

// ---------------------------------------------------------------------------
// Density
// ---------------------------------------------------------------------------

std::uint64_t prefix_count_serial(const SetExpr& s, std::uint64_t k) {
    std::uint64_t count = 0;
    for (std::uint64_t n = 1; n <= k; ++n)
        if (contains(s, n)) ++count;
    return count;
}

std::uint64_t prefix_count_parallel(const SetExpr& s, std::uint64_t k) {
#ifdef _OPENMP
    std::uint64_t count = 0;
    const long long top = (long long)k;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (long long n = 1; n <= top; ++n)
        if (contains(s, (std::uint64_t)n)) ++count;
    return count;
#else
    return prefix_count_serial(s, k);
#endif
}

std::uint64_t prefix_count(const SetExpr& s, std::uint64_t k) {
    if (s.domain != IndexKind::Naturals)
        raise(ErrorCode::DomainMismatch, "prefix counting needs a naturals set");
    if (auto p = normalize(s)) {
        std::uint64_t total = 0;
        for (std::uint32_t r : p->residues) {
            if (r == 0) total += k / p->period;
            else if (k >= r) total += (k - r) / p->period + 1;
        }
        for (std::uint64_t e : p->plus)
            if (e <= k) ++total;
        for (std::uint64_t e : p->minus)
            if (e <= k) --total;
        return total;
    }
    return k >= (1u << 15) ? prefix_count_parallel(s, k) : prefix_count_serial(s, k);
}

Rational prefix_density(const SetExpr& s, std::uint64_t k) {
    if (k == 0) raise(ErrorCode::InvalidArgument, "prefix horizon must be >= 1");
    return rat_u64(prefix_count(s, k), k);
}

std::string to_string(const MeasureValue& v) {
    switch (v.kind) {
        case MeasureValue::Kind::Exact: return to_string(v.lo) + " (exact)";
        case MeasureValue::Kind::Bounds:
            return "[" + to_string(v.lo) + ", " + to_string(v.hi) + "] (bounds, horizon " +
                   std::to_string(v.horizon) + ")";
        case MeasureValue::Kind::Undetermined: return "undetermined";
    }
    return "?";
}

HorizonSchedule default_schedule() {
    return {1u << 10, 1u << 12, 1u << 14, 1u << 16, 1u << 18, 1u << 20};
}

BoundsRefinement density_refinement(const SetExpr& s, const HorizonSchedule& schedule) {
    if (schedule.empty()) raise(ErrorCode::InvalidArgument, "empty horizon schedule");
    BoundsRefinement r;
    r.horizons = schedule;
    for (std::uint64_t k : schedule) r.values.push_back(prefix_density(s, k));
    r.lo_tail = r.values;
    r.hi_tail = r.values;
    for (std::size_t i = r.values.size() - 1; i-- > 0;) {
        if (r.lo_tail[i + 1] < r.lo_tail[i]) r.lo_tail[i] = r.lo_tail[i + 1];
        if (r.hi_tail[i + 1] > r.hi_tail[i]) r.hi_tail[i] = r.hi_tail[i + 1];
    }
    return r;
}

MeasureValue density(const SetExpr& s, const HorizonSchedule& schedule) {
    if (auto p = normalize(s))
        return MeasureValue::exact(rat_u64(p->residues.size(), p->period));
    auto r = density_refinement(s, schedule);
    return MeasureValue::bounds(r.lo_tail.front(), r.hi_tail.front(), schedule.back());
}

std::optional<Rational> exact_density(const SetExprPtr& s) {
    if (!s || s->domain != IndexKind::Naturals) return std::nullopt;
    if (auto p = normalize(*s)) return rat_u64(p->residues.size(), p->period);
    // The rewrites below hold for the limit density whenever the pieces have
    // one: null and full sets absorb, provably disjoint pieces add, subsets
    // simplify. Each returned value is the true asymptotic density.
    switch (s->kind) {
        case SetExpr::Kind::Predicate: return s->pred.declared_density;
        case SetExpr::Kind::Complement: {
            if (auto d = exact_density(s->lhs)) return Rational(1) - *d;
            return std::nullopt;
        }
        case SetExpr::Kind::Union: {
            auto da = exact_density(s->lhs), db = exact_density(s->rhs);
            if (da && *da == 0 && db) return db;
            if (db && *db == 0 && da) return da;
            if ((da && *da == 1) || (db && *db == 1)) return Rational(1);
            if (da && db && symbolic_disjoint(s->lhs, s->rhs) == Tri::Yes) return *da + *db;
            if (db && symbolic_subset(s->lhs, s->rhs) == Tri::Yes) return db;
            if (da && symbolic_subset(s->rhs, s->lhs) == Tri::Yes) return da;
            return std::nullopt;
        }
        case SetExpr::Kind::Intersection: {
            auto da = exact_density(s->lhs), db = exact_density(s->rhs);
            if ((da && *da == 0) || (db && *db == 0)) return Rational(0);
            if (da && *da == 1 && db) return db;
            if (db && *db == 1 && da) return da;
            if (symbolic_disjoint(s->lhs, s->rhs) == Tri::Yes) return Rational(0);
            if (da && symbolic_subset(s->lhs, s->rhs) == Tri::Yes) return da;
            if (db && symbolic_subset(s->rhs, s->lhs) == Tri::Yes) return db;
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

namespace {

class PeriodicDensityMeasure final : public DirectedSetMeasure {
public:
    std::string name() const override { return "periodic-density"; }
    IndexKind domain() const override { return IndexKind::Naturals; }
    bool in_field(const SetExprPtr& s) const override {
        return s && s->domain == IndexKind::Naturals && normalize(*s).has_value();
    }
    MeasureValue eval(const SetExprPtr& s) const override {
        auto p = s && s->domain == IndexKind::Naturals ? normalize(*s) : std::nullopt;
        if (!p)
            raise(ErrorCode::OutsideField,
                  "periodic-density is only defined on eventually periodic sets");
        return MeasureValue::exact(rat_u64(p->residues.size(), p->period));
    }
};

class PrefixBoundsMeasure final : public DirectedSetMeasure {
public:
    explicit PrefixBoundsMeasure(HorizonSchedule schedule) : schedule_(std::move(schedule)) {
        if (schedule_.empty()) raise(ErrorCode::InvalidArgument, "empty horizon schedule");
    }
    std::string name() const override { return "prefix-bounds"; }
    IndexKind domain() const override { return IndexKind::Naturals; }
    bool in_field(const SetExprPtr& s) const override {
        return s && s->domain == IndexKind::Naturals;
    }
    MeasureValue eval(const SetExprPtr& s) const override {
        if (!in_field(s))
            raise(ErrorCode::OutsideField, "prefix-bounds is a measure on subsets of the naturals");
        if (auto d = exact_density(s)) return MeasureValue::exact(*d);
        auto r = density_refinement(*s, schedule_);
        Rational lo = r.lo_tail.front(), hi = r.hi_tail.front();
        if (lo == hi) return MeasureValue::exact(lo); // bounds collapsed over the schedule
        return MeasureValue::bounds(std::move(lo), std::move(hi), schedule_.back());
    }

private:
    HorizonSchedule schedule_;
};

class CoCountableMeasure final : public DirectedSetMeasure {
public:
    std::string name() const override { return "cocountable"; }
    IndexKind domain() const override { return IndexKind::SymbolicUncountable; }
    bool in_field(const SetExprPtr& s) const override {
        return s && s->domain == IndexKind::SymbolicUncountable && reduce_atoms(*s).has_value();
    }
    MeasureValue eval(const SetExprPtr& s) const override {
        auto r = s && s->domain == IndexKind::SymbolicUncountable ? reduce_atoms(*s)
                                                                  : std::nullopt;
        if (!r) raise(ErrorCode::OutsideField, "cocountable needs a listed/colisted combination");
        return MeasureValue::exact(Rational(r->co ? 1 : 0));
    }
};

// mu(S) = 2 * density(S ∩ evens): all mass sits on the even indices. Finitely
// additive with null finite intervals; the odds are a null set here.
class EvensRelativeMeasure final : public DirectedSetMeasure {
public:
    std::string name() const override { return "evens-relative"; }
    IndexKind domain() const override { return IndexKind::Naturals; }
    bool in_field(const SetExprPtr& s) const override {
        return s && s->domain == IndexKind::Naturals &&
               normalize(*set_intersection(s, evens())).has_value();
    }
    MeasureValue eval(const SetExprPtr& s) const override {
        if (!in_field(s))
            raise(ErrorCode::OutsideField,
                  "evens-relative needs the intersection with the evens to be periodic");
        auto p = normalize(*set_intersection(s, evens()));
        return MeasureValue::exact(Rational(2) * rat_u64(p->residues.size(), p->period));
    }
};

} // namespace

MeasurePtr periodic_density_measure() { return std::make_shared<PeriodicDensityMeasure>(); }

MeasurePtr prefix_bounds_measure(HorizonSchedule schedule) {
    return std::make_shared<PrefixBoundsMeasure>(std::move(schedule));
}

MeasurePtr cocountable_measure() { return std::make_shared<CoCountableMeasure>(); }

MeasurePtr evens_relative_measure() { return std::make_shared<EvensRelativeMeasure>(); }

MeasurePtr measure_by_name(const std::string& name) {
    if (name == "periodic-density") return periodic_density_measure();
    if (name == "prefix-bounds") return prefix_bounds_measure();
    if (name == "cocountable") return cocountable_measure();
    if (name == "evens-relative") return evens_relative_measure();
    raise(ErrorCode::InvalidArgument, "unknown measure '" + name + "'");
}

std::vector<std::string> measure_names() {
    return {"cocountable", "evens-relative", "periodic-density", "prefix-bounds"};
}

MeasureValue measure_eval(const DirectedSetMeasure& mu, const SetExprPtr& s) {
    if (!mu.in_field(s))
        raise(ErrorCode::OutsideField,
              mu.name() + " cannot evaluate " + (s ? to_string(*s) : "(null)"));
    return mu.eval(s);
}

// ---------------------------------------------------------------------------
// Axioms
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix_step(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool has_predicate_leaf(const SetExpr& s) {
    switch (s.kind) {
        case SetExpr::Kind::Predicate: return true;
        case SetExpr::Kind::Union:
        case SetExpr::Kind::Intersection:
            return has_predicate_leaf(*s.lhs) || has_predicate_leaf(*s.rhs);
        case SetExpr::Kind::Complement: return has_predicate_leaf(*s.lhs);
        default: return false;
    }
}

std::optional<Rational> exact_of(const DirectedSetMeasure& mu, const SetExprPtr& s) {
    if (!mu.in_field(s)) return std::nullopt;
    MeasureValue v = mu.eval(s);
    if (!v.is_exact()) return std::nullopt;
    return v.lo;
}

} // namespace

AxiomReport axioms_check(const DirectedSetMeasure& mu, const std::vector<SetExprPtr>& samples,
                         std::uint64_t seed) {
    AxiomReport rep;
    auto fail = [&rep](const std::string& axiom, std::string lhs, std::string rhs,
                       std::string detail) {
        rep.failures.push_back({axiom, std::move(lhs), std::move(rhs), std::move(detail)});
    };

    const IndexKind dom = mu.domain();
    auto empt = empty_set(dom);
    auto full = full_set(dom);

    auto ve = exact_of(mu, empt);
    rep.empty_null = ve && *ve == 0;
    if (!rep.empty_null) fail("empty_null", to_string(*empt), "", "mu(empty) != 0");

    auto vf = exact_of(mu, full);
    rep.total_mass = vf && *vf == 1;
    if (!rep.total_mass) fail("total_mass", to_string(*full), "", "mu(A) != 1");

    rep.intervals_null = true;
    std::uint64_t state = seed ^ 0xa5a5a5a5a5a5a5a5ULL;
    for (int t = 0; t < 16; ++t) {
        OrderInterval interval{nullptr, false};
        if (dom == IndexKind::Naturals) {
            std::uint64_t a = 1 + splitmix_step(state) % 1000;
            std::uint64_t len = splitmix_step(state) % 40;
            interval = order_interval(dom, Index::nat(a), Index::nat(a + len));
        } else if (dom == IndexKind::SymbolicUncountable) {
            std::string atom = "atom" + std::to_string(splitmix_step(state) % 26);
            interval = order_interval(dom, Index::sym(atom), Index::sym(atom));
        } else {
            std::uint64_t i = 1 + splitmix_step(state) % 50, j = 1 + splitmix_step(state) % 50;
            interval = order_interval(dom, Index::pair(i, j), Index::pair(i + 2, j + 3));
        }
        auto vi = exact_of(mu, interval.set);
        if (!interval.finite || !vi || *vi != 0) {
            rep.intervals_null = false;
            fail("intervals_null", to_string(*interval.set), "", "finite interval not null");
            break;
        }
    }

    // Additivity. Adjacent sample pairs catch deliberately planted witnesses;
    // seeded draws cover the rest. Disjointness must be established
    // symbolically, and pairs it cannot settle are skipped, as are pairs with
    // predicate leaves (their measures need not be exact).
    bool additive_ok = true;
    auto check_additive = [&](const SetExprPtr& s, const SetExprPtr& t) {
        if (!s || !t || !mu.in_field(s) || !mu.in_field(t)) return;
        if (dom == IndexKind::Naturals && (has_predicate_leaf(*s) || has_predicate_leaf(*t)))
            return;
        if (symbolic_disjoint(s, t) != Tri::Yes) return;
        auto un = set_union(s, t);
        auto vs = exact_of(mu, s), vt = exact_of(mu, t), vu = exact_of(mu, un);
        if (!vs || !vt || !vu) return;
        ++rep.disjoint_pairs_checked;
        if (*vu != *vs + *vt) {
            additive_ok = false;
            fail("additive", to_string(*s), to_string(*t),
                 "mu(union) = " + to_string(*vu) + " but mu(S) + mu(T) = " +
                     to_string(*vs + *vt));
        }
    };
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        check_additive(samples[i], samples[i + 1]);
    for (std::size_t t = 0; t < samples.size(); ++t) {
        const auto& s = samples[splitmix_step(state) % samples.size()];
        const auto& raw = samples[splitmix_step(state) % samples.size()];
        if (!s || !raw) continue;
        // carve raw \ s so the pair is disjoint by construction
        check_additive(s, set_intersection(raw, set_complement(s)));
    }
    rep.additive = additive_ok && rep.disjoint_pairs_checked > 0;
    if (rep.disjoint_pairs_checked == 0)
        fail("additive", "", "", "no decidably disjoint pair among the samples");

    bool monotone_ok = true;
    for (std::size_t t = 0; t < samples.size(); ++t) {
        const auto& big = samples[splitmix_step(state) % samples.size()];
        const auto& raw = samples[splitmix_step(state) % samples.size()];
        if (!big || !raw || !mu.in_field(big)) continue;
        auto vb = exact_of(mu, big);
        if (!vb || *vb != 0) continue;
        auto small = set_intersection(raw, big); // subset by construction
        if (!mu.in_field(small)) continue;
        auto vc = exact_of(mu, small);
        ++rep.nested_pairs_checked;
        if (!vc || *vc != 0) {
            monotone_ok = false;
            fail("null_monotone", to_string(*small), to_string(*big),
                 "subset of a null set is not null");
        }
    }
    rep.null_monotone = monotone_ok;
    return rep;
}

} // namespace stnets
