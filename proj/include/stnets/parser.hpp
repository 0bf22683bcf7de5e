#pragma once

#include <optional>
#include <string>

#include "stnets/index_measure.hpp"
#include "stnets/lattice.hpp"
#include "stnets/nets.hpp"

namespace stnets {

// Set expression grammar:
//   fin{1,3,5} | ap(a,d) | u(e1,e2) | i(e1,e2) | c(e) | listed{a,b} |
//   colisted{a,b} | pred:<name> | empty | all
// Element literals: scalar `3/4`; vector `(1, -2/3, 0)`; sparse `{1: 1, 5: -2/3}`.
// Tail expressions:
//   const(E) | harmonic(E) | geometric(E, q) | shifted(E, T) |
//   spike(S, E, T) | mask(S, T) | interleave-units
// Parse errors throw Error{ParseError} with a character position.

SetExprPtr parse_set_expr(const std::string& text);

Element parse_element(const std::string& text, const RieszSpace& space);
RieszSpace parse_space(const std::string& text);

TailPtr parse_tail(const std::string& text, const RieszSpace& space);
std::string print_tail(const TailRule& t);

/// One net per document, line oriented: `key: value` with `#` comments.
/// Required keys: index, space, tail. Optional: prefix, the claim keys
/// (order_limit, order_dominating_tail/prefix, st_limit, st_delta, st_p_tail/
/// st_p_prefix, ru_limit, ru_regulator) and measure.
struct NetSpecDocument {
    Net net;
    std::optional<Element> order_limit;
    std::optional<Net> order_dominating;
    std::optional<Element> st_limit;
    std::optional<Witness> st_witness;
    std::optional<Element> ru_limit;
    std::optional<Element> ru_regulator;
    std::optional<std::string> measure_name;
};

NetSpecDocument parse_netspec(const std::string& text);
std::string print_netspec(const NetSpecDocument& doc);

} // namespace stnets
