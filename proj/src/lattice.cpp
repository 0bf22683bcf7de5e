#include "stnets/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace stnets {

std::string to_string(const RieszSpace& s) {
    switch (s.kind) {
        case RieszSpace::Kind::Rationals: return "rationals";
        case RieszSpace::Kind::RationalVector: return "vector(" + std::to_string(s.dim) + ")";
        case RieszSpace::Kind::FinSuppSeq: return "finsupp";
    }
    return "?";
}

Element zero(const RieszSpace& space) {
    Element x;
    x.space = space;
    if (space.kind != RieszSpace::Kind::FinSuppSeq)
        x.coords.assign(space.kind == RieszSpace::Kind::Rationals ? 1 : space.dim, Rational(0));
    return x;
}

Element scalar(const Rational& q) {
    Element x;
    x.space = RieszSpace::rationals();
    x.coords = {q};
    return x;
}

Element vector_of(std::vector<Rational> coords) {
    if (coords.empty()) raise(ErrorCode::InvalidArgument, "vector element needs >= 1 coordinate");
    Element x;
    x.space = RieszSpace::vector((std::uint32_t)coords.size());
    x.coords = std::move(coords);
    return x;
}

Element finsupp_of(std::vector<std::pair<std::uint32_t, Rational>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (!entries.empty() && entries.front().first == 0)
        raise(ErrorCode::InvalidArgument, "support indices start at 1");
    for (std::size_t i = 0; i + 1 < entries.size(); ++i)
        if (entries[i].first == entries[i + 1].first)
            raise(ErrorCode::InvalidArgument,
                  "duplicate support index " + std::to_string(entries[i].first));
    Element x;
    x.space = RieszSpace::finsupp();
    for (auto& e : entries)
        if (e.second != 0) x.sparse.push_back(std::move(e));
    return x;
}

Element unit_seq(std::uint32_t k, const Rational& q) {
    if (k == 0) raise(ErrorCode::InvalidArgument, "sequence positions start at 1");
    return finsupp_of({{k, q}});
}

std::string to_string(const Element& x) {
    switch (x.space.kind) {
        case RieszSpace::Kind::Rationals: return to_string(x.coords[0]);
        case RieszSpace::Kind::RationalVector: {
            std::ostringstream os;
            os << "(";
            for (std::size_t i = 0; i < x.coords.size(); ++i) {
                if (i) os << ", ";
                os << to_string(x.coords[i]);
            }
            os << ")";
            return os.str();
        }
        case RieszSpace::Kind::FinSuppSeq: {
            std::ostringstream os;
            os << "{";
            for (std::size_t i = 0; i < x.sparse.size(); ++i) {
                if (i) os << ", ";
                os << x.sparse[i].first << ": " << to_string(x.sparse[i].second);
            }
            os << "}";
            return os.str();
        }
    }
    return "?";
}

bool is_zero(const Element& x) {
    if (x.space.kind == RieszSpace::Kind::FinSuppSeq) return x.sparse.empty();
    return std::all_of(x.coords.begin(), x.coords.end(),
                       [](const Rational& q) { return q == 0; });
}

void require_same_space(const Element& x, const Element& y) {
    if (!(x.space == y.space))
        raise(ErrorCode::SpaceMismatch,
              to_string(x.space) + " vs " + to_string(y.space));
}

namespace {

template <typename F>
Element pointwise(const Element& x, const Element& y, F op) {
    require_same_space(x, y);
    Element out;
    out.space = x.space;
    if (x.space.kind != RieszSpace::Kind::FinSuppSeq) {
        out.coords.reserve(x.coords.size());
        for (std::size_t i = 0; i < x.coords.size(); ++i) {
            Rational v = op(x.coords[i], y.coords[i]);
            out.coords.push_back(std::move(v));
        }
        return out;
    }
    const Rational z(0);
    std::size_t i = 0, j = 0;
    while (i < x.sparse.size() || j < y.sparse.size()) {
        std::uint32_t ki = i < x.sparse.size() ? x.sparse[i].first : UINT32_MAX;
        std::uint32_t kj = j < y.sparse.size() ? y.sparse[j].first : UINT32_MAX;
        std::uint32_t k = std::min(ki, kj);
        const Rational& a = ki == k ? x.sparse[i].second : z;
        const Rational& b = kj == k ? y.sparse[j].second : z;
        Rational v = op(a, b);
        if (v != 0) out.sparse.emplace_back(k, std::move(v));
        if (ki == k) ++i;
        if (kj == k) ++j;
    }
    return out;
}

template <typename F>
Element map_coords(const Element& x, F f) {
    Element out;
    out.space = x.space;
    if (x.space.kind != RieszSpace::Kind::FinSuppSeq) {
        for (const Rational& q : x.coords) {
            Rational v = f(q);
            out.coords.push_back(std::move(v));
        }
        return out;
    }
    for (const auto& e : x.sparse) {
        Rational v = f(e.second);
        if (v != 0) out.sparse.emplace_back(e.first, std::move(v));
    }
    return out;
}

} // namespace

Element add(const Element& x, const Element& y) {
    return pointwise(x, y, [](const Rational& a, const Rational& b) { return Rational(a + b); });
}

Element sub(const Element& x, const Element& y) {
    return pointwise(x, y, [](const Rational& a, const Rational& b) { return Rational(a - b); });
}

Element neg(const Element& x) {
    return map_coords(x, [](const Rational& q) { return Rational(-q); });
}

Element scale(const Rational& q, const Element& x) {
    return map_coords(x, [&q](const Rational& v) { return Rational(q * v); });
}

Element sup(const Element& x, const Element& y) {
    return pointwise(x, y, [](const Rational& a, const Rational& b) { return a < b ? b : a; });
}

Element inf(const Element& x, const Element& y) {
    return pointwise(x, y, [](const Rational& a, const Rational& b) { return a < b ? a : b; });
}

bool leq(const Element& x, const Element& y) {
    require_same_space(x, y);
    if (x.space.kind != RieszSpace::Kind::FinSuppSeq) {
        for (std::size_t i = 0; i < x.coords.size(); ++i)
            if (x.coords[i] > y.coords[i]) return false;
        return true;
    }
    const Rational z(0);
    std::size_t i = 0, j = 0;
    while (i < x.sparse.size() || j < y.sparse.size()) {
        std::uint32_t ki = i < x.sparse.size() ? x.sparse[i].first : UINT32_MAX;
        std::uint32_t kj = j < y.sparse.size() ? y.sparse[j].first : UINT32_MAX;
        std::uint32_t k = std::min(ki, kj);
        const Rational& a = ki == k ? x.sparse[i].second : z;
        const Rational& b = kj == k ? y.sparse[j].second : z;
        if (a > b) return false;
        if (ki == k) ++i;
        if (kj == k) ++j;
    }
    return true;
}

AbsParts abs_parts(const Element& x) {
    Element zx = zero(x.space);
    Element nx = neg(x);
    return {sup(x, nx), sup(x, zx), sup(nx, zx)};
}

Element abs(const Element& x) { return sup(x, neg(x)); }

bool birkhoff_check(const Element& x, const Element& xp, const Element& w, const Element& wp) {
    require_same_space(x, xp);
    require_same_space(x, w);
    require_same_space(x, wp);
    Element lhs = abs(sub(sup(x, w), sup(xp, wp)));
    Element rhs = add(abs(sub(x, xp)), abs(sub(w, wp)));
    return leq(lhs, rhs);
}

ArchimedeanProbe archimedean_probe(const Element& x, std::uint64_t probe_horizon) {
    if (!leq(zero(x.space), x))
        raise(ErrorCode::NotPositive, "archimedean probe needs x >= 0");
    if (probe_horizon == 0) probe_horizon = 1;
    if (probe_horizon > (1u << 20)) probe_horizon = 1u << 20;
    Element prev = x;
    for (std::uint64_t n = 2; n <= probe_horizon; ++n) {
        Element cur = scale(rat(1, (long)n), x);
        if (!leq(cur, prev))
            return {false, zero(x.space),
                    "x/" + std::to_string(n) + " is not below x/" + std::to_string(n - 1)};
        prev = std::move(cur);
    }
    // Every coordinate is a fixed rational q >= 0, and inf_n q/n = 0 in the
    // rationals; so the family's pointwise infimum is the zero element.
    return {true, zero(x.space),
            "x/n decreasing up to n=" + std::to_string(probe_horizon) +
                "; coordinatewise infimum over all n is 0"};
}

Element dedekind_sup(const std::vector<Element>& elements, const RieszSpace& space) {
    if (!space.dedekind_complete())
        raise(ErrorCode::NotDedekindComplete,
              to_string(space) + " is not Dedekind complete");
    if (elements.empty())
        raise(ErrorCode::InvalidArgument, "supremum of an empty set is not defined");
    Element acc = elements.front();
    if (!(acc.space == space)) raise(ErrorCode::SpaceMismatch, "element outside the given space");
    for (std::size_t i = 1; i < elements.size(); ++i) {
        if (!(elements[i].space == space))
            raise(ErrorCode::SpaceMismatch, "element outside the given space");
        acc = sup(acc, elements[i]);
    }
    return acc;
}

} // namespace stnets
