#include "joinagg/semiring.hpp"

#include <charconv>

namespace joinagg::detail {

namespace {

std::string_view trim(std::string_view t) {
    while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.remove_suffix(1);
    return t;
}

bool all_digits(std::string_view t) {
    if (t.empty()) return false;
    for (char c : t)
        if (c < '0' || c > '9') return false;
    return true;
}

// cpp_int reads a leading zero as an octal prefix.
boost::multiprecision::cpp_int decimal(std::string_view digits) {
    const auto nz = digits.find_first_not_of('0');
    return boost::multiprecision::cpp_int{nz == std::string_view::npos ? std::string("0") : std::string(digits.substr(nz))};
}

}  // namespace

std::uint64_t parse_unsigned(std::string_view text) {
    const auto t = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("invalid counting annotation '" + std::string(text) + "'");
    return v;
}

Rational parse_rational(std::string_view text) {
    auto t = trim(text);
    const auto bad = [&] { return ParseError("invalid rational annotation '" + std::string(text) + "'"); };
    bool negative = false;
    if (!t.empty() && (t.front() == '-' || t.front() == '+')) {
        negative = t.front() == '-';
        t.remove_prefix(1);
    }
    using boost::multiprecision::cpp_int;
    Rational r;
    if (auto slash = t.find('/'); slash != std::string_view::npos) {
        auto num = t.substr(0, slash), den = t.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) throw bad();
        const cpp_int d = decimal(den);
        if (d == 0) throw bad();
        r = Rational(decimal(num), d);
    } else if (auto dot = t.find('.'); dot != std::string_view::npos) {
        auto whole = t.substr(0, dot), frac = t.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
            (!frac.empty() && !all_digits(frac)))
            throw bad();
        cpp_int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const cpp_int digits = decimal(std::string(whole) + std::string(frac));
        r = Rational(digits, scale);
    } else {
        if (!all_digits(t)) throw bad();
        r = Rational(decimal(t));
    }
    return negative ? Rational(-r) : r;
}

std::string format_rational(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace joinagg::detail
