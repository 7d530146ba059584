#pragma once

#include <atomic>
#include <concepts>
#include <cstdint>
#include <memory>
#include <ranges>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "joinagg/error.hpp"

namespace joinagg {

/*
 * Commutative semirings (D, plus, times, zero, one).
 *
 * Engine code only ever copies annotations or combines them through plus/times.
 * Nothing in the engine compares, subtracts or inspects an annotation; value
 * equality on the concrete types is available to tests only.
 *
 * Every semiring also provides parse/format for the `__w` column of relation files.
 */
template <class S>
concept Semiring = requires(const S& s, const typename S::value_type& a, std::string_view text) {
    typename S::value_type;
    { s.zero() } -> std::convertible_to<typename S::value_type>;
    { s.one() } -> std::convertible_to<typename S::value_type>;
    { s.plus(a, a) } -> std::convertible_to<typename S::value_type>;
    { s.times(a, a) } -> std::convertible_to<typename S::value_type>;
    { S::parse(text) } -> std::convertible_to<typename S::value_type>;
    { S::format(a) } -> std::convertible_to<std::string>;
};

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

std::uint64_t parse_unsigned(std::string_view text);
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

}  // namespace detail

/// Natural numbers under (+, ×), arithmetic modulo 2^64 (itself a commutative semiring).
struct Counting {
    using value_type = std::uint64_t;
    static constexpr const char* name = "counting";
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type plus(value_type a, value_type b) const { return a + b; }
    value_type times(value_type a, value_type b) const { return a * b; }
    static value_type parse(std::string_view t) { return detail::parse_unsigned(t); }
    static std::string format(value_type v) { return std::to_string(v); }
};

/// Boolean semiring (or, and). Encoded as "true"/"false" (also accepts 1/0).
struct Boolean {
    using value_type = bool;
    static constexpr const char* name = "boolean";
    value_type zero() const { return false; }
    value_type one() const { return true; }
    value_type plus(value_type a, value_type b) const { return a || b; }
    value_type times(value_type a, value_type b) const { return a && b; }
    static value_type parse(std::string_view t) {
        if (t == "true" || t == "1") return true;
        if (t == "false" || t == "0") return false;
        throw ParseError("invalid boolean annotation '" + std::string(t) + "'");
    }
    static std::string format(value_type v) { return v ? "true" : "false"; }
};

/// Tropical max-product over non-negative exact rationals (max, ×, 0, 1).
/// Text encoding: integer, decimal ("0.25") or fraction ("1/4").
struct MaxProduct {
    using value_type = Rational;
    static constexpr const char* name = "maxprod";
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type plus(const value_type& a, const value_type& b) const { return a < b ? b : a; }
    value_type times(const value_type& a, const value_type& b) const { return a * b; }
    static value_type parse(std::string_view t) {
        Rational r = detail::parse_rational(t);
        if (r < 0) throw ParseError("max-product annotations must be non-negative");
        return r;
    }
    static std::string format(const value_type& v) { return detail::format_rational(v); }
};

/// Sum-product over exact rationals (+, ×, 0, 1).
struct SumProduct {
    using value_type = Rational;
    static constexpr const char* name = "sumprod";
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type plus(const value_type& a, const value_type& b) const { return a + b; }
    value_type times(const value_type& a, const value_type& b) const { return a * b; }
    static value_type parse(std::string_view t) { return detail::parse_rational(t); }
    static std::string format(const value_type& v) { return detail::format_rational(v); }
};

/// Wraps a semiring and counts every plus/times invocation. Copies share the counter.
template <Semiring S>
class Instrumented {
public:
    using value_type = typename S::value_type;
    static constexpr const char* name = S::name;

    explicit Instrumented(S inner = {})
        : inner_(std::move(inner)), count_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

    value_type zero() const { return inner_.zero(); }
    value_type one() const { return inner_.one(); }
    value_type plus(const value_type& a, const value_type& b) const {
        count_->fetch_add(1, std::memory_order_relaxed);
        return inner_.plus(a, b);
    }
    value_type times(const value_type& a, const value_type& b) const {
        count_->fetch_add(1, std::memory_order_relaxed);
        return inner_.times(a, b);
    }
    static value_type parse(std::string_view t) { return S::parse(t); }
    static std::string format(const value_type& v) { return S::format(v); }

    std::uint64_t operations() const { return count_->load(std::memory_order_relaxed); }
    void reset() const { count_->store(0, std::memory_order_relaxed); }
    const S& inner() const { return inner_; }

private:
    S inner_;
    std::shared_ptr<std::atomic<std::uint64_t>> count_;
};

/// Left fold of plus starting at zero.
template <Semiring S, std::ranges::input_range R>
typename S::value_type fold_plus(const R& xs, const S& ops) {
    auto acc = ops.zero();
    for (const auto& x : xs) acc = ops.plus(acc, x);
    return acc;
}

/// Left fold of times starting at one.
template <Semiring S, std::ranges::input_range R>
typename S::value_type fold_times(const R& xs, const S& ops) {
    auto acc = ops.one();
    for (const auto& x : xs) acc = ops.times(acc, x);
    return acc;
}

}  // namespace joinagg
