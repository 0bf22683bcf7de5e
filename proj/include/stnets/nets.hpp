#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stnets/index_measure.hpp"
#include "stnets/lattice.hpp"

namespace stnets {

// ---------------------------------------------------------------------------
// Tail rules
// ---------------------------------------------------------------------------

struct TailRule;
using TailPtr = std::shared_ptr<const TailRule>;

enum class CombineOp { Sup, Inf, Add, Sub, Scale, Abs, Neg };
const char* combine_op_name(CombineOp op);

/// Strictly increasing index map used by subnets.
struct IndexMap {
    enum class Kind { Affine, Power, PeriodicEnum, Scan };
    Kind kind = Kind::Affine;
    std::uint64_t mult = 1;   // Affine: mult*m + off
    std::int64_t off = 0;
    std::uint32_t power = 2;  // Power: m^power
    Periodic periodic;        // PeriodicEnum: m-th member of the set
    SetExprPtr scan_set;      // Scan: m-th member by membership scan

    std::uint64_t apply(std::uint64_t m) const;
};

/// Closed description of a net beyond its explicit prefix.
///
/// The workhorse is Form: n |-> center + (1/n) harmonic + ratio^n geometric,
/// which is closed under addition, subtraction, scaling, and (with prefix
/// materialization up to the last crossing) under sup, inf and abs. Branch
/// splits the index set along a SetExpr. UnitInterleave is the interleaved
/// unit-vector sequence (e1, 0, e2, 0, ...) in FinSuppSeq. Combined is the
/// lazy fallback when no closed combination exists: evaluation stays total,
/// symbolic analyses answer Undetermined.
struct TailRule {
    enum class Kind { Form, Branch, UnitInterleave, Combined, Reindexed };

    Kind kind = Kind::Form;

    // Form
    Element center, harmonic, geometric;
    Rational ratio; // in (0,1) whenever geometric != 0

    // Branch
    SetExprPtr cond;
    TailPtr on_rule, off_rule;

    // Combined
    CombineOp op = CombineOp::Add;
    TailPtr lhs, rhs;
    Rational op_scalar;

    // Reindexed
    TailPtr inner;
    IndexMap map;
};

TailPtr tail_const(Element v);
TailPtr tail_harmonic(Element u);
TailPtr tail_geometric(Element u, Rational ratio);
TailPtr tail_form(Element center, Element harmonic, Element geometric, Rational ratio);
TailPtr tail_spike(SetExprPtr on, Element spike, TailPtr base);
TailPtr tail_mask(SetExprPtr keep, TailPtr inner);
TailPtr tail_branch(SetExprPtr cond, TailPtr on_rule, TailPtr off_rule);
TailPtr tail_unit_interleave();

Element eval_tail(const TailRule& t, std::uint64_t n, const RieszSpace& space);
std::string to_string(const TailRule& t);

// ---------------------------------------------------------------------------
// Nets
// ---------------------------------------------------------------------------

/// Finitely described net over the naturals: an explicit prefix table for
/// positions 1..prefix.size(), a tail rule beyond. Evaluation is total.
struct Net {
    RieszSpace space;
    std::vector<Element> prefix;
    TailPtr tail;
};

Net make_net(RieszSpace space, std::vector<Element> prefix, TailPtr tail);
Net constant_net(const Element& v);

Element eval(const Net& net, std::uint64_t n);

/// The pair certifying a statistical convergence claim: a candidate
/// dominating net p and the measure-one set delta it works on.
struct Witness {
    Net p;
    SetExprPtr delta;
};

enum class Status { Accepted, Rejected, Undetermined };
const char* status_name(Status s);

/// Checker outcome. Rejections carry a concrete failing index or pair (or the
/// name of the clause that could not be established).
struct Verdict {
    Status status = Status::Undetermined;
    std::string clause;
    std::string detail;
    std::optional<std::uint64_t> index;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> pair;
    std::optional<MeasureValue> measure;
    std::optional<Element> infimum;
    std::uint64_t horizon = 0;

    bool accepted() const { return status == Status::Accepted; }

    static Verdict accept(std::string clause, std::string detail = {});
    static Verdict reject(std::string clause, std::string detail = {});
    static Verdict undetermined(std::string clause, std::string detail = {});
};

std::string to_string(const Verdict& v);

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

/// Pairwise decrease along delta's enumeration up to the horizon, plus
/// symbolic monotonicity of the tail beyond it. Throws Error{EmptyDelta} when
/// delta is provably finite.
Verdict is_decreasing_on(const Net& net, const SetExprPtr& delta, std::uint64_t horizon = 512);

/// Symbolic infimum of the restriction to delta, by tail case analysis.
/// nullopt when no closed form applies. Throws Error{NotDecreasing} when the
/// restriction is not decreasing.
std::optional<Element> infimum_on(const Net& net, const SetExprPtr& delta,
                                  std::uint64_t horizon = 512);

/// Order convergence: dominating decreasing on the whole index set with
/// infimum 0, and |x_n - x| <= dominating_n everywhere.
Verdict check_order_conv(const Net& net, const Element& x, const Net& dominating,
                         std::uint64_t horizon = 512);

/// mu(delta) must evaluate to exactly 1, the restriction must decrease, and
/// its infimum must equal x. Throws OutsideField / UndeterminedMeasure.
Verdict check_st_decreasing(const Net& net, const Element& x, const SetExprPtr& delta,
                            const DirectedSetMeasure& mu, std::uint64_t horizon = 512);

/// Statistical order convergence with an explicit witness.
Verdict check_st_order_conv(const Net& net, const Element& x, const Witness& w,
                            const DirectedSetMeasure& mu, std::uint64_t horizon = 512);

/// {n : |x_n - x| not<= p_n} as a SetExpr, exact when both tails close;
/// nullopt when the case analysis cannot close.
std::optional<SetExprPtr> exceptional_set(const Net& net, const Element& x, const Net& p,
                                          std::uint64_t horizon = 512);

/// Net equal to `net` on delta and zero off it.
Net mask(const Net& net, const SetExprPtr& delta);

Net combine(const Net& a, const Net& b, CombineOp op);
Net combine_scale(const Rational& q, const Net& a);
Net combine_abs(const Net& a);
Net combine_neg(const Net& a);

// ---------------------------------------------------------------------------
// Subnets
// ---------------------------------------------------------------------------

struct SubnetSelector {
    SetExprPtr delta;                                          // inclusion
    std::optional<std::pair<std::uint64_t, std::int64_t>> affine; // t(m) = mult*m + off
    std::optional<std::uint32_t> power;                        // t(m) = m^power

    static SubnetSelector inclusion(SetExprPtr d);
    static SubnetSelector affine_map(std::uint64_t mult, std::int64_t off);
    static SubnetSelector power_map(std::uint32_t k);
};

struct SubnetResult {
    Net net;
    Verdict cofinality;
};

/// Composed net together with a cofinality verdict. Finite selectors throw
/// Error{NotCofinal} carrying the first index with no image above it.
SubnetResult subnet(const Net& net, const SubnetSelector& selector, std::uint64_t horizon = 512);

/// Relatively uniform convergence with regulator u >= 0: for every m up to
/// the horizon there is an index from which |x_n - x| <= (1/m) u.
Verdict ru_check(const Net& net, const Element& x, const Element& u, std::uint64_t horizon = 64);

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

struct WitnessTemplates {
    bool const_zero = true;
    bool harmonic = true;
    bool geometric = true;
    std::vector<Net> extra_p; // user-supplied candidate dominating nets
};

/// Best-effort search over template dominating nets and field sets built from
/// the net's own structure (full set, complements of spike/exceptional sets).
/// nullopt means the templates are exhausted, not that no witness exists.
std::optional<Witness> witness_search(const Net& net, const Element& x,
                                      const DirectedSetMeasure& mu,
                                      const WitnessTemplates& templates = {},
                                      std::uint64_t horizon = 512);

/// Dominating-net template family used by witness_search and the interleaved
/// example report (constant zero, harmonic and geometric scalings derived
/// from the net's structure).
std::vector<Net> dominating_templates(const Net& net, const Element& x);

/// The interleaved unit-vector net (e1, 0, e2, 0, ...) over FinSuppSeq.
Net unit_interleave_net();

} // namespace stnets
