#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace padyn {

/// Exact rational with 64-bit parts, always reduced with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT: integers embed
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        reduce();
    }

    [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend Rational operator*(const Rational& a, const Rational& b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
    friend Rational operator/(const Rational& a, const Rational& b) { return {a.num_ * b.den_, a.den_ * b.num_}; }
    Rational operator-() const { return {-num_, den_}; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        const auto l = static_cast<__int128>(a.num_) * b.den_;
        const auto r = static_cast<__int128>(b.num_) * a.den_;
        return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    [[nodiscard]] std::string to_string() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "a" or "a/b".
    static Rational parse(const std::string& s) {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return {std::stoll(s)};
        return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
    }

private:
    void reduce() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace padyn
