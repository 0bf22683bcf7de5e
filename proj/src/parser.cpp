#include "stnets/parser.hpp"

#include <cctype>
#include <sstream>

namespace stnets {

namespace {

// Recursive-descent cursor over a single line of text. Error messages carry
// the zero-based character position.
struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorCode::ParseError, what + " at position " + std::to_string(pos) + " in \"" +
                                         text + "\"");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    }

    bool done() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }

    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum((unsigned char)text[pos]) || text[pos] == '_' || text[pos] == '-'))
            ++pos;
        if (pos == start) fail("expected a name");
        return text.substr(start, pos - start);
    }

    std::uint64_t natural() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
        if (pos == start) fail("expected a number");
        return std::stoull(text.substr(start, pos - start));
    }

    Rational rational() {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
        std::size_t digits = pos;
        while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
        if (pos == digits) fail("expected a rational");
        if (pos < text.size() && text[pos] == '/') {
            ++pos;
            std::size_t den = pos;
            while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
            if (pos == den) fail("expected a denominator");
        }
        return parse_rational(text.substr(start, pos - start));
    }

    void end() {
        skip_ws();
        if (pos < text.size()) fail("trailing input");
    }
};

SetExprPtr set_expr(Cursor& c);

Atom listed_atom(Cursor& c) {
    if (c.accept('(')) {
        std::uint64_t a = c.natural();
        c.expect(',');
        std::uint64_t b = c.natural();
        c.expect(')');
        return Atom{{}, std::make_pair(a, b)};
    }
    if (std::isdigit((unsigned char)c.peek())) c.fail("listed atoms are symbols or pairs");
    return Atom{c.ident(), std::nullopt};
}

SetExprPtr set_expr(Cursor& c) {
    if (c.peek() == '\0') c.fail("expected a set expression");
    std::string head = c.ident();
    if (head == "fin") {
        c.expect('{');
        std::vector<std::uint64_t> elems;
        if (!c.accept('}')) {
            do elems.push_back(c.natural());
            while (c.accept(','));
            c.expect('}');
        }
        return finite_list(std::move(elems));
    }
    if (head == "ap") {
        c.expect('(');
        std::uint64_t a = c.natural();
        c.expect(',');
        std::uint64_t d = c.natural();
        c.expect(')');
        return arith_prog(a, d);
    }
    if (head == "u" || head == "i") {
        c.expect('(');
        auto e1 = set_expr(c);
        c.expect(',');
        auto e2 = set_expr(c);
        c.expect(')');
        return head == "u" ? set_union(e1, e2) : set_intersection(e1, e2);
    }
    if (head == "c") {
        c.expect('(');
        auto e = set_expr(c);
        c.expect(')');
        return set_complement(e);
    }
    if (head == "listed" || head == "colisted") {
        c.expect('{');
        std::vector<Atom> atoms;
        if (!c.accept('}')) {
            do atoms.push_back(listed_atom(c));
            while (c.accept(','));
            c.expect('}');
        }
        IndexKind domain = atoms.empty() || !atoms.front().pair ? IndexKind::SymbolicUncountable
                                                                : IndexKind::PairNaturals;
        return head == "listed" ? listed(std::move(atoms), domain)
                                : colisted(std::move(atoms), domain);
    }
    if (head == "pred") {
        c.expect(':');
        std::string name = c.ident();
        if (!is_known_predicate(name)) c.fail("unknown predicate '" + name + "'");
        return named_predicate(name);
    }
    if (head == "empty") return empty_set();
    if (head == "all") return full_set();
    c.fail("unknown set constructor '" + head + "'");
}

Element element(Cursor& c, const RieszSpace& space) {
    switch (space.kind) {
        case RieszSpace::Kind::Rationals: {
            if (c.peek() == '(' || c.peek() == '{') c.fail("expected a scalar literal");
            return scalar(c.rational());
        }
        case RieszSpace::Kind::RationalVector: {
            c.expect('(');
            std::vector<Rational> coords;
            if (!c.accept(')')) {
                do coords.push_back(c.rational());
                while (c.accept(','));
                c.expect(')');
            }
            if (coords.size() != space.dim)
                c.fail("expected " + std::to_string(space.dim) + " coordinates, got " +
                       std::to_string(coords.size()));
            return vector_of(std::move(coords));
        }
        case RieszSpace::Kind::FinSuppSeq: {
            c.expect('{');
            std::vector<std::pair<std::uint32_t, Rational>> entries;
            if (!c.accept('}')) {
                do {
                    std::uint64_t k = c.natural();
                    if (k == 0 || k > UINT32_MAX) c.fail("sequence positions start at 1");
                    c.expect(':');
                    entries.push_back({(std::uint32_t)k, c.rational()});
                } while (c.accept(','));
                c.expect('}');
            }
            return finsupp_of(std::move(entries));
        }
    }
    c.fail("bad space");
}

TailPtr tail_expr(Cursor& c, const RieszSpace& space);

TailPtr shift_tail(const Element& off, const TailPtr& t) {
    switch (t->kind) {
        case TailRule::Kind::Form:
            return tail_form(add(t->center, off), t->harmonic, t->geometric, t->ratio);
        case TailRule::Kind::Branch:
            return tail_branch(t->cond, shift_tail(off, t->on_rule), shift_tail(off, t->off_rule));
        default:
            raise(ErrorCode::NotRepresentable, "cannot shift tail " + to_string(*t));
    }
}

TailPtr tail_expr(Cursor& c, const RieszSpace& space) {
    std::string head = c.ident();
    if (head == "const") {
        c.expect('(');
        Element v = element(c, space);
        c.expect(')');
        return tail_const(std::move(v));
    }
    if (head == "harmonic") {
        c.expect('(');
        Element v = element(c, space);
        c.expect(')');
        return tail_harmonic(std::move(v));
    }
    if (head == "geometric") {
        c.expect('(');
        Element v = element(c, space);
        c.expect(',');
        Rational q = c.rational();
        c.expect(')');
        return tail_geometric(std::move(v), std::move(q));
    }
    if (head == "shifted") {
        c.expect('(');
        Element v = element(c, space);
        c.expect(',');
        TailPtr inner = tail_expr(c, space);
        c.expect(')');
        return shift_tail(v, inner);
    }
    if (head == "spike") {
        c.expect('(');
        auto s = set_expr(c);
        c.expect(',');
        Element v = element(c, space);
        c.expect(',');
        TailPtr base = tail_expr(c, space);
        c.expect(')');
        return tail_spike(s, std::move(v), base);
    }
    if (head == "mask") {
        c.expect('(');
        auto s = set_expr(c);
        c.expect(',');
        TailPtr inner = tail_expr(c, space);
        c.expect(')');
        return tail_mask(s, inner);
    }
    if (head == "interleave-units") {
        if (!(space == RieszSpace::finsupp()))
            c.fail("interleave-units lives in the finitely supported sequences");
        return tail_unit_interleave();
    }
    c.fail("unknown tail constructor '" + head + "'");
}

} // namespace

SetExprPtr parse_set_expr(const std::string& text) {
    Cursor c{text};
    auto e = set_expr(c);
    c.end();
    return e;
}

Element parse_element(const std::string& text, const RieszSpace& space) {
    Cursor c{text};
    Element e = element(c, space);
    c.end();
    return e;
}

RieszSpace parse_space(const std::string& text) {
    Cursor c{text};
    std::string head = c.ident();
    if (head == "rationals") {
        c.end();
        return RieszSpace::rationals();
    }
    if (head == "vector") {
        c.expect('(');
        std::uint64_t dim = c.natural();
        c.expect(')');
        c.end();
        if (dim == 0) c.fail("vector dimension must be positive");
        return RieszSpace::vector((std::uint32_t)dim);
    }
    if (head == "finsupp") {
        c.end();
        return RieszSpace::finsupp();
    }
    c.fail("unknown space '" + head + "'");
}

TailPtr parse_tail(const std::string& text, const RieszSpace& space) {
    Cursor c{text};
    auto t = tail_expr(c, space);
    c.end();
    return t;
}

std::string print_tail(const TailRule& t) {
    switch (t.kind) {
        case TailRule::Kind::Form: {
            bool hz = is_zero(t.harmonic), gz = is_zero(t.geometric), cz = is_zero(t.center);
            if (hz && gz) return "const(" + to_string(t.center) + ")";
            if (!hz && !gz)
                raise(ErrorCode::NotRepresentable,
                      "mixed harmonic and geometric parts have no tail literal");
            std::string inner = hz ? "geometric(" + to_string(t.geometric) + ", " +
                                         to_string(t.ratio) + ")"
                                   : "harmonic(" + to_string(t.harmonic) + ")";
            return cz ? inner : "shifted(" + to_string(t.center) + ", " + inner + ")";
        }
        case TailRule::Kind::Branch: {
            const TailRule& on = *t.on_rule;
            if (on.kind == TailRule::Kind::Form && is_zero(on.harmonic) && is_zero(on.geometric))
                return "spike(" + to_string(*t.cond) + ", " + to_string(on.center) + ", " +
                       print_tail(*t.off_rule) + ")";
            const TailRule& off = *t.off_rule;
            if (off.kind == TailRule::Kind::Form && is_zero(off.center) &&
                is_zero(off.harmonic) && is_zero(off.geometric))
                return "mask(" + to_string(*t.cond) + ", " + print_tail(on) + ")";
            raise(ErrorCode::NotRepresentable, "branch tail has no literal form");
        }
        case TailRule::Kind::UnitInterleave: return "interleave-units";
        case TailRule::Kind::Combined:
        case TailRule::Kind::Reindexed:
            raise(ErrorCode::NotRepresentable, "combined tails have no literal form");
    }
    raise(ErrorCode::InvalidArgument, "bad tail rule");
}

namespace {

std::vector<Element> parse_prefix(const std::string& text, const RieszSpace& space,
                                  std::size_t line_no) {
    std::vector<Element> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t cut = text.find(';', start);
        std::string piece = text.substr(start, cut == std::string::npos ? cut : cut - start);
        bool blank = piece.find_first_not_of(" \t") == std::string::npos;
        if (!blank) {
            try {
                out.push_back(parse_element(piece, space));
            } catch (const Error& e) {
                raise(ErrorCode::ParseError,
                      "line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (cut == std::string::npos) break;
        start = cut + 1;
    }
    return out;
}

} // namespace

NetSpecDocument parse_netspec(const std::string& text) {
    std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            raise(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected `key: value`");
        std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
        };
        trim(key);
        trim(value);
        for (const auto& seen : kv)
            if (seen.first == key)
                raise(ErrorCode::ParseError,
                      "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        kv.push_back({key, {value, line_no}});
    }

    auto lookup = [&](const std::string& key) -> const std::pair<std::string, std::size_t>* {
        for (const auto& e : kv)
            if (e.first == key) return &e.second;
        return nullptr;
    };
    static const char* known[] = {"index",
                                  "space",
                                  "tail",
                                  "prefix",
                                  "order_limit",
                                  "order_dominating_tail",
                                  "order_dominating_prefix",
                                  "st_limit",
                                  "st_delta",
                                  "st_p_tail",
                                  "st_p_prefix",
                                  "ru_limit",
                                  "ru_regulator",
                                  "measure"};
    for (const auto& e : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || e.first == k;
        if (!ok)
            raise(ErrorCode::ParseError,
                  "line " + std::to_string(e.second.second) + ": unknown key '" + e.first + "'");
    }

    auto require = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
        if (auto* v = lookup(key)) return *v;
        raise(ErrorCode::ParseError, "missing required key '" + key + "'");
    };
    auto guarded = [&](std::size_t line, auto fn) {
        try {
            return fn();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError &&
                std::string(e.what()).find("line ") != std::string::npos)
                throw;
            raise(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
        }
    };

    const auto& index_v = require("index");
    if (index_v.first != "naturals")
        raise(ErrorCode::ParseError, "line " + std::to_string(index_v.second) +
                                         ": nets are indexed by the naturals");
    const auto& space_v = require("space");
    RieszSpace space = guarded(space_v.second, [&] { return parse_space(space_v.first); });
    const auto& tail_v = require("tail");
    TailPtr tail = guarded(tail_v.second, [&] { return parse_tail(tail_v.first, space); });
    std::vector<Element> prefix;
    if (auto* p = lookup("prefix")) prefix = parse_prefix(p->first, space, p->second);

    NetSpecDocument doc{make_net(space, std::move(prefix), std::move(tail))};

    auto opt_element = [&](const char* key) -> std::optional<Element> {
        if (auto* v = lookup(key))
            return guarded(v->second, [&] { return parse_element(v->first, space); });
        return std::nullopt;
    };
    doc.order_limit = opt_element("order_limit");
    doc.st_limit = opt_element("st_limit");
    doc.ru_limit = opt_element("ru_limit");
    doc.ru_regulator = opt_element("ru_regulator");

    if (auto* v = lookup("order_dominating_tail")) {
        TailPtr dt = guarded(v->second, [&] { return parse_tail(v->first, space); });
        std::vector<Element> dp;
        if (auto* p = lookup("order_dominating_prefix"))
            dp = parse_prefix(p->first, space, p->second);
        doc.order_dominating = make_net(space, std::move(dp), std::move(dt));
    } else if (lookup("order_dominating_prefix")) {
        raise(ErrorCode::ParseError, "order_dominating_prefix without order_dominating_tail");
    }

    auto* delta_v = lookup("st_delta");
    auto* p_tail_v = lookup("st_p_tail");
    if ((delta_v != nullptr) != (p_tail_v != nullptr))
        raise(ErrorCode::ParseError, "st_delta and st_p_tail must appear together");
    if (delta_v && p_tail_v) {
        SetExprPtr delta = guarded(delta_v->second, [&] { return parse_set_expr(delta_v->first); });
        TailPtr pt = guarded(p_tail_v->second, [&] { return parse_tail(p_tail_v->first, space); });
        std::vector<Element> pp;
        if (auto* p = lookup("st_p_prefix")) pp = parse_prefix(p->first, space, p->second);
        doc.st_witness = Witness{make_net(space, std::move(pp), std::move(pt)), std::move(delta)};
    } else if (lookup("st_p_prefix")) {
        raise(ErrorCode::ParseError, "st_p_prefix without st_p_tail");
    }

    if (auto* v = lookup("measure")) doc.measure_name = v->first;
    return doc;
}

std::string print_netspec(const NetSpecDocument& doc) {
    std::ostringstream os;
    auto prefix_line = [&](const char* key, const std::vector<Element>& prefix) {
        if (prefix.empty()) return;
        os << key << ": ";
        for (std::size_t i = 0; i < prefix.size(); ++i)
            os << (i ? "; " : "") << to_string(prefix[i]);
        os << "\n";
    };
    os << "index: naturals\n";
    os << "space: " << to_string(doc.net.space) << "\n";
    prefix_line("prefix", doc.net.prefix);
    os << "tail: " << print_tail(*doc.net.tail) << "\n";
    if (doc.order_limit) os << "order_limit: " << to_string(*doc.order_limit) << "\n";
    if (doc.order_dominating) {
        prefix_line("order_dominating_prefix", doc.order_dominating->prefix);
        os << "order_dominating_tail: " << print_tail(*doc.order_dominating->tail) << "\n";
    }
    if (doc.st_limit) os << "st_limit: " << to_string(*doc.st_limit) << "\n";
    if (doc.st_witness) {
        os << "st_delta: " << to_string(*doc.st_witness->delta) << "\n";
        prefix_line("st_p_prefix", doc.st_witness->p.prefix);
        os << "st_p_tail: " << print_tail(*doc.st_witness->p.tail) << "\n";
    }
    if (doc.ru_limit) os << "ru_limit: " << to_string(*doc.ru_limit) << "\n";
    if (doc.ru_regulator) os << "ru_regulator: " << to_string(*doc.ru_regulator) << "\n";
    if (doc.measure_name) os << "measure: " << *doc.measure_name << "\n";
    return os.str();
}

} // namespace stnets
