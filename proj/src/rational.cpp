#include "stnets/rational.hpp"

#include <cctype>

#include "stnets/error.hpp"

namespace stnets {

std::string to_string(const Rational& q) {
    return q.get_str(); // canonical "p" or "p/q"
}

Rational parse_rational(const std::string& text) {
    std::size_t i = 0, n = text.size();
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < n && text[i] == '+') ++i; // mpq_set_str has no use for an explicit plus
    std::size_t start = i;
    if (i < n && text[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++digits;
    if (digits == 0) raise(ErrorCode::ParseError, "expected rational at '" + text + "'");
    if (i < n && text[i] == '/') {
        ++i;
        std::size_t den_digits = 0;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++den_digits;
        if (den_digits == 0) raise(ErrorCode::ParseError, "missing denominator in '" + text + "'");
    }
    std::size_t end = i;
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != n) raise(ErrorCode::ParseError, "trailing characters in rational '" + text + "'");

    Rational q;
    if (q.set_str(text.substr(start, end - start), 10) != 0)
        raise(ErrorCode::ParseError, "bad rational '" + text + "'");
    if (q.get_den() == 0) raise(ErrorCode::ParseError, "zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

} // namespace stnets
