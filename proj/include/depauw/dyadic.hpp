#pragma once

#include <optional>
#include <string>

#include "depauw/bigint.hpp"

namespace depauw {

// Exact dyadic rational m / 2^e with arbitrary-precision mantissa.
// Canonical form: m odd or zero, and e == 0 when m == 0. Closed under
// +, -, * and under multiplication by powers of two; division is never
// needed anywhere in the library.
//
// Exponent growth bound: within one flow stage the exponent grows by at
// most (exponent of the time increment) + (stage index); full-stage maps
// are rigid and add at most one bit. A backward flow of a double-precision
// start point across K stages therefore stays below ~64 + K bits.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(int64_t n) : m_(n) {}
    Dyadic(const BigInt& m, uint32_t e) : m_(m), e_(e) { canonicalize(); }

    static Dyadic scaled(int64_t m, uint32_t e) { return Dyadic(BigInt(m), e); }
    static Dyadic pow2(int k);               // 2^k, k may be negative
    static Dyadic from_double(double d);     // exact
    // Accepts "m/2^e", plain integers, and terminating decimals ("-0.375").
    // Returns nullopt for anything that is not an exact dyadic rational.
    static std::optional<Dyadic> parse(const std::string& s);

    const BigInt& mantissa() const { return m_; }
    uint32_t exponent() const { return e_; }

    bool is_zero() const { return m_.is_zero(); }
    int sign() const { return m_.sign(); }
    Dyadic operator-() const;
    Dyadic abs() const { return sign() < 0 ? -*this : *this; }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    Dyadic& operator+=(const Dyadic& o) { *this = *this + o; return *this; }
    Dyadic& operator-=(const Dyadic& o) { *this = *this - o; return *this; }
    Dyadic& operator*=(const Dyadic& o) { *this = *this * o; return *this; }

    Dyadic mul_pow2(int k) const;            // exact scaling by 2^k
    Dyadic halved() const { return mul_pow2(-1); }
    Dyadic doubled() const { return mul_pow2(1); }

    static int compare(const Dyadic& a, const Dyadic& b);
    friend bool operator==(const Dyadic& a, const Dyadic& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return compare(a, b) != 0; }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return compare(a, b) < 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return compare(a, b) > 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return compare(a, b) >= 0; }

    BigInt floor() const { return m_.shifted_right_floor(e_); }
    int64_t floor_int64() const { return floor().to_int64(); }
    // Reduce into [0, period), period a positive integer power of two.
    Dyadic mod_pos(int64_t period) const;

    double to_double() const;
    std::string to_pow2_string() const;      // "m/2^e" (or plain integer)
    std::string to_decimal_string() const;   // exact terminating decimal

private:
    BigInt m_;
    uint32_t e_ = 0;
    void canonicalize();
};

}  // namespace depauw
