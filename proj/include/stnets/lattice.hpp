#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stnets/error.hpp"
#include "stnets/rational.hpp"

namespace stnets {

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

/// Ambient vector lattice. Rationals and RationalVector model the reals and
/// R^n at desk scale; FinSuppSeq (finitely supported rational sequences under
/// the pointwise order) models c0. Scalars are exact rationals throughout.
struct RieszSpace {
    enum class Kind { Rationals, RationalVector, FinSuppSeq };

    Kind kind = Kind::Rationals;
    std::uint32_t dim = 1; // RationalVector only

    static RieszSpace rationals() { return {Kind::Rationals, 1}; }
    static RieszSpace vector(std::uint32_t n) {
        if (n == 0) raise(ErrorCode::InvalidArgument, "vector space dimension must be >= 1");
        return {Kind::RationalVector, n};
    }
    static RieszSpace finsupp() { return {Kind::FinSuppSeq, 0}; }

    // FinSuppSeq has no supremum for e.g. {sum of first n unit vectors : n}.
    bool dedekind_complete() const { return kind != Kind::FinSuppSeq; }

    bool operator==(const RieszSpace&) const = default;
};

std::string to_string(const RieszSpace& s);

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// Element of a RieszSpace. Dense coordinates for scalars/vectors, a sparse
/// sorted (index, value) list with no zero entries for FinSuppSeq.
struct Element {
    RieszSpace space;
    std::vector<Rational> coords;                            // Rationals, RationalVector
    std::vector<std::pair<std::uint32_t, Rational>> sparse;  // FinSuppSeq

    bool operator==(const Element&) const = default;
};

Element zero(const RieszSpace& space);
Element scalar(const Rational& q);
Element vector_of(std::vector<Rational> coords);
/// Sparse element; zero entries are dropped, duplicate indices rejected.
Element finsupp_of(std::vector<std::pair<std::uint32_t, Rational>> entries);
/// q * e_k in FinSuppSeq.
Element unit_seq(std::uint32_t k, const Rational& q = Rational(1));

std::string to_string(const Element& x);

bool is_zero(const Element& x);
void require_same_space(const Element& x, const Element& y);

Element add(const Element& x, const Element& y);
Element sub(const Element& x, const Element& y);
Element neg(const Element& x);
Element scale(const Rational& q, const Element& x);

/// Pointwise max / min; these are the lattice supremum and infimum in all
/// three instances.
Element sup(const Element& x, const Element& y);
Element inf(const Element& x, const Element& y);

/// x <= y pointwise over the union of coordinates. Incomparable pairs simply
/// return false both ways; that is the normal situation in dimension >= 2.
bool leq(const Element& x, const Element& y);

struct AbsParts {
    Element abs;  // x v (-x)
    Element pos;  // x v 0
    Element negp; // (-x) v 0
};
AbsParts abs_parts(const Element& x);
Element abs(const Element& x);

/// |x v w  -  x' v w'|  <=  |x - x'| + |w - w'| evaluated exactly. This holds
/// in every vector lattice, so a false return is an implementation bug.
bool birkhoff_check(const Element& x, const Element& xp, const Element& w, const Element& wp);

struct ArchimedeanProbe {
    bool accepted;
    Element infimum;
    std::string detail;
};

/// Confirms (1/n)x is decreasing for n <= probe_horizon and that the
/// coordinatewise infimum of the whole family is 0. Requires x >= 0.
ArchimedeanProbe archimedean_probe(const Element& x, std::uint64_t probe_horizon);

/// Least upper bound of a finite nonempty list, coordinatewise. Only offered
/// on spaces flagged Dedekind complete; FinSuppSeq is rejected.
Element dedekind_sup(const std::vector<Element>& elements, const RieszSpace& space);

} // namespace stnets
