#include "pathtsp/rational.hpp"

#include <cctype>

#include "pathtsp/errors.hpp"

namespace pathtsp {

Rat rat(long num, long den) {
    if (den == 0) throw ParseError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

namespace {

bool is_integer_literal(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
    auto slash = text.find('/');
    std::string num = text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den))
        throw ParseError("bad rational literal: '" + text + "'");
    Rat r;
    if (mpq_set_str(r.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
        throw ParseError("bad rational literal: '" + text + "'");
    if (r.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& value) {
    if (value.get_den() == 1) return value.get_num().get_str();
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Int lcm_denominator(const std::vector<Rat>& values) {
    Int l = 1;
    for (const Rat& v : values) {
        Int g;
        mpz_lcm(g.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
        l = g;
    }
    return l;
}

Int scale_to_int(const Rat& value, const Int& scale) {
    Rat scaled = value * Rat(scale);
    if (scaled.get_den() != 1)
        throw InternalError("scale_to_int: " + rat_to_string(value) + " * " +
                            scale.get_str() + " is not integral");
    return scaled.get_num();
}

std::optional<int64_t> to_int64(const Int& value) {
    if (!value.fits_slong_p()) return std::nullopt;
    long v = value.get_si();
    return static_cast<int64_t>(v);
}

}  // namespace pathtsp
