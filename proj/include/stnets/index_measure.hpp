#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stnets/error.hpp"
#include "stnets/rational.hpp"

namespace stnets {

// ---------------------------------------------------------------------------
// Directed index sets
// ---------------------------------------------------------------------------

enum class IndexKind {
    Naturals,           // 1, 2, 3, ... with the usual order
    PairNaturals,       // (i, j) with componentwise order
    SymbolicUncountable // opaque named atoms, ordered by name (a dense chain model)
};

const char* index_kind_name(IndexKind k);

/// One index of some directed set. Which fields are meaningful depends on
/// the ambient IndexKind.
struct Index {
    IndexKind kind = IndexKind::Naturals;
    std::uint64_t n = 0;                    // Naturals
    std::pair<std::uint64_t, std::uint64_t> ij{0, 0}; // PairNaturals
    std::string atom;                       // SymbolicUncountable

    static Index nat(std::uint64_t v) { return {IndexKind::Naturals, v, {0, 0}, {}}; }
    static Index pair(std::uint64_t i, std::uint64_t j) {
        return {IndexKind::PairNaturals, 0, {i, j}, {}};
    }
    static Index sym(std::string name) {
        Index ix;
        ix.kind = IndexKind::SymbolicUncountable;
        ix.atom = std::move(name);
        return ix;
    }

    bool operator==(const Index&) const = default;
};

std::string to_string(const Index& ix);

/// Reflexive-transitive order of the ambient set; pairs may be incomparable.
bool index_leq(const Index& a, const Index& b);

/// Upper bound of two indices: max on chains, componentwise max on pairs.
Index join(IndexKind kind, const Index& a, const Index& b);

// ---------------------------------------------------------------------------
// Set expressions
// ---------------------------------------------------------------------------

/// Atom of a Listed/CoListed set: a symbolic name or a pair index.
struct Atom {
    std::string name;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> pair;

    bool operator==(const Atom&) const = default;
    bool operator<(const Atom& o) const {
        if (pair.has_value() != o.pair.has_value()) return o.pair.has_value();
        if (pair && o.pair) return *pair < *o.pair;
        return name < o.name;
    }
};

std::string to_string(const Atom& a);

struct SetExpr;
using SetExprPtr = std::shared_ptr<const SetExpr>;

/// Membership oracle plus what is declared about the set. A declared limit
/// density lets measures assign an exact value; without one the set only
/// ever gets prefix bounds.
struct PredicateInfo {
    std::string name;
    std::function<bool(std::uint64_t)> member;
    std::optional<Rational> declared_density;
    bool infinite = false;
};

/// Finitely described subset of a directed index set, closed under the
/// boolean operations. Over the naturals the leaves are finite lists,
/// arithmetic progressions and named predicates; over symbolic or pair
/// index sets the leaves are Listed/CoListed atom sets.
struct SetExpr {
    enum class Kind {
        FiniteList,   // sorted distinct naturals
        ArithProg,    // first, first+step, first+2*step, ...
        Union,
        Intersection,
        Complement,
        Listed,       // finite atom set
        CoListed,     // complement of a finite atom set
        Predicate     // membership oracle over the naturals
    };

    Kind kind;
    IndexKind domain = IndexKind::Naturals;

    std::vector<std::uint64_t> elems; // FiniteList
    std::uint64_t first = 0;          // ArithProg
    std::uint64_t step = 0;           // ArithProg
    SetExprPtr lhs, rhs;              // combinators (rhs null for Complement)
    std::vector<Atom> atoms;          // Listed / CoListed
    PredicateInfo pred;               // Predicate
};

SetExprPtr finite_list(std::vector<std::uint64_t> elems);
SetExprPtr arith_prog(std::uint64_t first, std::uint64_t step);
SetExprPtr set_union(SetExprPtr a, SetExprPtr b);
SetExprPtr set_intersection(SetExprPtr a, SetExprPtr b);
SetExprPtr set_complement(SetExprPtr e);
SetExprPtr listed(std::vector<Atom> atoms, IndexKind domain = IndexKind::SymbolicUncountable);
SetExprPtr colisted(std::vector<Atom> atoms, IndexKind domain = IndexKind::SymbolicUncountable);
SetExprPtr predicate(PredicateInfo info);

/// Built-in predicate registry: "squares", "cubes", "pow4", "pow5".
/// Throws Error{InvalidArgument} for unknown names.
SetExprPtr named_predicate(const std::string& name);
bool is_known_predicate(const std::string& name);
std::vector<std::string> known_predicate_names();

SetExprPtr empty_set(IndexKind domain = IndexKind::Naturals);
SetExprPtr full_set(IndexKind domain = IndexKind::Naturals);
SetExprPtr evens();
SetExprPtr odds();

bool contains(const SetExpr& s, std::uint64_t n);
bool contains_atom(const SetExpr& s, const Atom& a);

std::string to_string(const SetExpr& s);

/// [a,b] of the index set. The flag reports whether the interval is finite;
/// it is for naturals and pairs. Symbolic intervals with distinct endpoints
/// live in a dense chain and are not finitely representable.
struct OrderInterval {
    SetExprPtr set;
    bool finite;
};
OrderInterval order_interval(IndexKind kind, const Index& a, const Index& b);

// ---------------------------------------------------------------------------
// Eventually periodic normal form (naturals only)
// ---------------------------------------------------------------------------

/// S = {n >= 1 : n mod period in residues}, plus the `plus` elements and
/// minus the `minus` elements. Canonical: minimal period, plus disjoint from
/// the periodic part, minus contained in it.
struct Periodic {
    std::uint64_t period = 1;
    std::vector<std::uint32_t> residues; // sorted, in [0, period)
    std::vector<std::uint64_t> plus;     // sorted
    std::vector<std::uint64_t> minus;    // sorted

    bool member(std::uint64_t n) const;
    bool is_empty() const { return residues.empty() && plus.empty(); }
    bool is_finite() const { return residues.empty(); }
    /// Largest index at which membership can deviate from the pure residue rule.
    std::uint64_t exception_bound() const;
    bool operator==(const Periodic&) const = default;
};

std::string to_string(const Periodic& p);

/// Canonical eventually periodic form, or nullopt when the expression
/// contains a predicate leaf (or is not over the naturals).
std::optional<Periodic> normalize(const SetExpr& s);

/// Three-valued answers for symbolic set questions.
enum class Tri { Yes, No, Unknown };

/// Emptiness decided by normal form when available, otherwise by propositional
/// reasoning over the leaves (sound, incomplete), otherwise by bounded sampling
/// (which can only refute).
Tri symbolic_empty(const SetExprPtr& s);
Tri symbolic_disjoint(const SetExprPtr& a, const SetExprPtr& b);
Tri symbolic_subset(const SetExprPtr& a, const SetExprPtr& b);

/// Yes when s is finite with all members <= *bound (bound filled in);
/// No when provably infinite; Unknown otherwise.
Tri symbolic_finite(const SetExprPtr& s, std::uint64_t* bound);

/// Bound B such that beyond B the intersection of a and b is empty, when one
/// can be established.
std::optional<std::uint64_t> tail_disjoint_bound(const SetExprPtr& a, const SetExprPtr& b);
/// Bound B such that beyond B, a is contained in b.
std::optional<std::uint64_t> tail_subset_bound(const SetExprPtr& a, const SetExprPtr& b);

// ---------------------------------------------------------------------------
// Density
// ---------------------------------------------------------------------------

/// |s intersected with [1..k]|. The parallel kernel and the serial reference
/// must agree exactly; tests compare them.
std::uint64_t prefix_count_serial(const SetExpr& s, std::uint64_t k);
std::uint64_t prefix_count_parallel(const SetExpr& s, std::uint64_t k);
/// Fast path via the periodic normal form when available, else the parallel kernel.
std::uint64_t prefix_count(const SetExpr& s, std::uint64_t k);

/// (1/k) |s intersected with [1..k]| as an exact rational.
Rational prefix_density(const SetExpr& s, std::uint64_t k);

struct MeasureValue {
    enum class Kind { Exact, Bounds, Undetermined };
    Kind kind = Kind::Undetermined;
    Rational lo, hi;
    std::uint64_t horizon = 0;

    static MeasureValue exact(Rational q) { return {Kind::Exact, q, q, 0}; }
    static MeasureValue bounds(Rational lo, Rational hi, std::uint64_t horizon) {
        return {Kind::Bounds, std::move(lo), std::move(hi), horizon};
    }
    static MeasureValue undetermined() { return {}; }

    bool is_exact() const { return kind == Kind::Exact; }
    bool operator==(const MeasureValue&) const = default;
};

std::string to_string(const MeasureValue& v);

using HorizonSchedule = std::vector<std::uint64_t>;
/// k in {2^10, 2^12, ..., 2^20}; geometric, so slow oscillation shows up.
HorizonSchedule default_schedule();

/// Prefix densities at the schedule points together with running tail
/// extrema; lo_tail[j] (hi_tail[j]) is the min (max) over points j..end.
struct BoundsRefinement {
    HorizonSchedule horizons;
    std::vector<Rational> values;
    std::vector<Rational> lo_tail;
    std::vector<Rational> hi_tail;
};
BoundsRefinement density_refinement(const SetExpr& s, const HorizonSchedule& schedule);

/// Asymptotic density: exact |residues|/period for eventually periodic sets
/// (finite exceptions never move the limit); sampled prefix bounds otherwise.
MeasureValue density(const SetExpr& s, const HorizonSchedule& schedule = default_schedule());

/// Exact limit density derivable from structure: periodic normal forms,
/// declared predicate densities, and the null/full absorption rules.
std::optional<Rational> exact_density(const SetExprPtr& s);

// ---------------------------------------------------------------------------
// Directed set measures
// ---------------------------------------------------------------------------

class DirectedSetMeasure {
public:
    virtual ~DirectedSetMeasure() = default;
    virtual std::string name() const = 0;
    virtual IndexKind domain() const = 0;
    virtual bool in_field(const SetExprPtr& s) const = 0;
    /// Throws Error{OutsideField} when s is not representable in the field.
    virtual MeasureValue eval(const SetExprPtr& s) const = 0;
};

using MeasurePtr = std::shared_ptr<const DirectedSetMeasure>;

/// Exact density on the field generated by arithmetic progressions and
/// finite sets over the naturals.
MeasurePtr periodic_density_measure();

/// Defined on every naturals expression; exact where a limit density is
/// derivable, prefix bounds over the schedule otherwise.
MeasurePtr prefix_bounds_measure(HorizonSchedule schedule = default_schedule());

/// Countable sets get 0, co-countable sets get 1 (atoms stand in for
/// countable sets at desk scale).
MeasurePtr cocountable_measure();

/// Density relative to the even indices: mu(S) = 2 * density(S ∩ evens).
/// Gives the evens full mass; used to probe interleaved examples.
MeasurePtr evens_relative_measure();

/// By-name lookup: periodic-density | prefix-bounds | cocountable | evens-relative.
MeasurePtr measure_by_name(const std::string& name);
std::vector<std::string> measure_names();

/// Applies the measure, with field membership enforced.
MeasureValue measure_eval(const DirectedSetMeasure& mu, const SetExprPtr& s);

// ---------------------------------------------------------------------------
// Measure axioms
// ---------------------------------------------------------------------------

struct AxiomFailure {
    std::string axiom;
    std::string lhs, rhs; // offending sets, serialized
    std::string detail;
};

struct AxiomReport {
    bool empty_null = false;        // mu(empty) = 0
    bool total_mass = false;        // mu(A) = 1
    bool intervals_null = false;    // mu(I) = 0 for finite order intervals
    bool additive = false;          // mu(S u T) = mu(S) + mu(T), S, T disjoint
    bool null_monotone = false;     // C subset B, mu(B) = 0 -> mu(C) = 0
    std::uint64_t disjoint_pairs_checked = 0;
    std::uint64_t nested_pairs_checked = 0;
    std::vector<AxiomFailure> failures;

    bool pass() const {
        return empty_null && total_mass && intervals_null && additive && null_monotone;
    }
};

/// Checks the axioms on the given sample sets. Disjointness and nesting are
/// established symbolically; pairs whose relation cannot be decided (and any
/// predicate-sampled additivity pair) are skipped rather than guessed at.
AxiomReport axioms_check(const DirectedSetMeasure& mu, const std::vector<SetExprPtr>& samples,
                         std::uint64_t seed);

} // namespace stnets
