#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace speedscale {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always normalized (gcd(num, den) == 1, den > 0). Arithmetic is carried out
/// in 128-bit intermediates and throws std::overflow_error when the reduced
/// result does not fit back into 64 bits, so a wrong answer is never silent.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }

    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] bool is_integer() const { return den_ == 1; }
    [[nodiscard]] std::string str() const;

    /// Parses "7", "-3/4" or a finite decimal such as "2.375".
    static Rational parse(std::string_view text);

    /// Recovers the rational closest to `value` with denominator at most
    /// `max_den`; throws std::domain_error when that approximation is not
    /// within `tol` (relative to max(1, |value|)).
    static Rational from_double(double value, std::int64_t max_den = 1'000'000'000, double tol = 1e-12);

    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

}  // namespace speedscale

template <>
struct std::hash<speedscale::Rational> {
    std::size_t operator()(const speedscale::Rational& r) const noexcept {
        return std::hash<std::int64_t>{}(r.num()) * 1000003u ^ std::hash<std::int64_t>{}(r.den());
    }
};
