#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace depauw {

// Minimal signed arbitrary-precision integer: sign-magnitude over 64-bit
// words, little-endian. Supports exactly the operations dyadic arithmetic
// needs: add, sub, mul, shifts, compare, and divmod by a small unsigned
// (used only for decimal printing and dyadic parsing). No general division.
class BigInt {
public:
    BigInt() = default;
    BigInt(int64_t v);
    static BigInt from_u64(uint64_t v);

    bool is_zero() const { return words_.empty(); }
    bool is_negative() const { return neg_; }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }
    bool odd() const { return !words_.empty() && (words_[0] & 1u); }

    // Number of bits in the magnitude (0 for zero).
    size_t bit_length() const;
    // Largest k such that 2^k divides the magnitude (0 for zero).
    unsigned trailing_zero_bits() const;

    BigInt operator-() const;
    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }

    // Shift of the magnitude; right shift uses floor semantics on the value
    // (so that (x >> k) == floor(x / 2^k) also for negative x).
    BigInt shifted_left(unsigned bits) const;
    BigInt shifted_right_floor(unsigned bits) const;

    static int compare(const BigInt& a, const BigInt& b);          // -1, 0, 1
    static int compare_magnitude(const BigInt& a, const BigInt& b);

    friend bool operator==(const BigInt& a, const BigInt& b) { return compare(a, b) == 0; }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return compare(a, b) != 0; }
    friend bool operator<(const BigInt& a, const BigInt& b) { return compare(a, b) < 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return compare(a, b) <= 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return compare(a, b) > 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return compare(a, b) >= 0; }

    bool fits_int64() const;
    int64_t to_int64() const;     // requires fits_int64()
    double to_double() const;     // round to nearest

    // In-place divide magnitude by d (1 < d <= 2^32-1), returns remainder.
    uint32_t divmod_small(uint32_t d);
    void mul_small(uint64_t f);

    std::string to_string() const;  // decimal

private:
    bool neg_ = false;
    std::vector<uint64_t> words_;  // no leading zero words; empty == 0

    void trim();
    static std::vector<uint64_t> add_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    // requires |a| >= |b|
    static std::vector<uint64_t> sub_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
};

}  // namespace depauw
