#include "speedscale/rational.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace speedscale {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num < -kMax || den > kMax) throw std::overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(num == 0 ? 1 : den);
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    if (den_ == o.den_) return *this = from_wide(static_cast<__int128>(num_) + o.num_, den_);
    return *this = from_wide(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                             static_cast<__int128>(den_) * o.den_);
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    return *this = from_wide(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return *this = from_wide(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&] { throw std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) fail();
        std::size_t pos = 0;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            pos = 1;
        }
        if (pos == s.size()) fail();
        __int128 v = 0;
        for (; pos < s.size(); ++pos) {
            if (s[pos] < '0' || s[pos] > '9') fail();
            v = v * 10 + (s[pos] - '0');
            if (v > kMax) throw std::overflow_error("rational literal too large");
        }
        return static_cast<std::int64_t>(neg ? -v : v);
    };

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        const std::string_view frac = text.substr(dot + 1);
        if (frac.size() > 17) fail();
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        std::string digits(text.substr(0, dot));
        digits += frac;
        if (digits == "-" || digits == "+" || digits.empty()) fail();
        return Rational(parse_int(digits), scale);
    }
    return Rational(parse_int(text));
}

Rational Rational::from_double(double value, std::int64_t max_den, double tol) {
    if (!std::isfinite(value)) throw std::domain_error("cannot convert non-finite value to rational");
    // Continued-fraction convergents.
    const bool neg = value < 0;
    double x = std::fabs(value);
    __int128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double rem = x;
    Rational best;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(rem);
        if (a > 9.0e18) break;
        const auto ai = static_cast<__int128>(a);
        const __int128 p2 = ai * p1 + p0;
        const __int128 q2 = ai * q1 + q0;
        if (q2 > max_den || p2 > kMax) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        best = from_wide(p1, q1);
        const double err = std::fabs(best.to_double() - x);
        if (err <= 1e-300) break;
        const double frac = rem - a;
        if (frac < 1e-18) break;
        rem = 1.0 / frac;
    }
    if (std::fabs(best.to_double() - x) > tol * std::max(1.0, x)) {
        throw std::domain_error("value " + std::to_string(value) + " has no small rational representation");
    }
    return neg ? -best : best;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace speedscale
