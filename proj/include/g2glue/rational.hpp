#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace g2glue {

// Exact order bookkeeping for radial exponents.  Homogeneity orders entering
// through input data are small rationals; every operation in the cone
// calculus only shifts them by integers, so exact arithmetic never overflows
// in practice.  Orders produced from floating-point scans degrade gracefully
// to an inexact double representation.
class Order {
  public:
    Order() : exact_(true), num_(0), den_(1), value_(0.0) {}

    // Exact rational constructor.
    Order(std::int64_t num, std::int64_t den) { set_rational(num, den); }

    // Implicit from integer: exact.
    Order(int n) : Order(static_cast<std::int64_t>(n), 1) {}  // NOLINT

    static Order from_double(double v) {
        // Recognize values that are exactly representable with a small
        // denominator so rationality survives round trips through doubles.
        for (std::int64_t den = 1; den <= 64; ++den) {
            const double scaled = v * static_cast<double>(den);
            const double rounded = std::nearbyint(scaled);
            if (scaled == rounded && std::fabs(rounded) < 1e15) {
                return Order(static_cast<std::int64_t>(rounded), den);
            }
        }
        Order o;
        o.exact_ = false;
        o.value_ = v;
        return o;
    }

    bool exact() const { return exact_; }
    double value() const { return value_; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Order operator+(int shift) const {
        Order r = *this;
        if (exact_) {
            r.set_rational(num_ + static_cast<std::int64_t>(shift) * den_, den_);
        } else {
            r.value_ = value_ + shift;
        }
        return r;
    }
    Order operator-(int shift) const { return *this + (-shift); }

    Order operator+(const Order& o) const {
        if (exact_ && o.exact_) {
            return Order(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
        }
        Order r;
        r.exact_ = false;
        r.value_ = value_ + o.value_;
        return r;
    }

    // Equality: exact when both sides are rational, tolerance 1e-12 otherwise,
    // so distinct rates are never conflated by round-off.
    bool operator==(const Order& o) const {
        if (exact_ && o.exact_) return num_ == o.num_ && den_ == o.den_;
        return std::fabs(value_ - o.value_) < 1e-12;
    }
    bool operator!=(const Order& o) const { return !(*this == o); }
    bool operator<(const Order& o) const {
        if (*this == o) return false;
        return value_ < o.value_;
    }

    std::string str() const {
        if (!exact_) return std::to_string(value_);
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    void set_rational(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::invalid_argument("Order: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        exact_ = true;
        num_ = g ? num / g : num;
        den_ = g ? den / g : den;
        value_ = static_cast<double>(num_) / static_cast<double>(den_);
    }

    bool exact_;
    std::int64_t num_, den_;
    double value_;
};

}  // namespace g2glue
