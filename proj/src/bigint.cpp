#include "depauw/bigint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace depauw {

BigInt::BigInt(int64_t v)
{
    if (v == 0) return;
    neg_ = v < 0;
    uint64_t mag = neg_ ? (~static_cast<uint64_t>(v) + 1u) : static_cast<uint64_t>(v);
    words_.push_back(mag);
}

BigInt BigInt::from_u64(uint64_t v)
{
    BigInt r;
    if (v != 0) r.words_.push_back(v);
    return r;
}

void BigInt::trim()
{
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
    if (words_.empty()) neg_ = false;
}

size_t BigInt::bit_length() const
{
    if (words_.empty()) return 0;
    return 64 * (words_.size() - 1) + (64 - std::countl_zero(words_.back()));
}

unsigned BigInt::trailing_zero_bits() const
{
    if (words_.empty()) return 0;
    unsigned n = 0;
    for (uint64_t w : words_) {
        if (w == 0) { n += 64; continue; }
        return n + std::countr_zero(w);
    }
    return n;
}

BigInt BigInt::operator-() const
{
    BigInt r = *this;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
}

std::vector<uint64_t> BigInt::add_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b)
{
    const std::vector<uint64_t>& lo = a.size() >= b.size() ? b : a;
    const std::vector<uint64_t>& hi = a.size() >= b.size() ? a : b;
    std::vector<uint64_t> r(hi.size() + 1, 0);
    unsigned char carry = 0;
    for (size_t i = 0; i < hi.size(); ++i) {
        uint64_t x = hi[i];
        uint64_t y = i < lo.size() ? lo[i] : 0;
        uint64_t s = x + y;
        unsigned char c1 = s < x;
        uint64_t t = s + carry;
        unsigned char c2 = t < s;
        r[i] = t;
        carry = static_cast<unsigned char>(c1 | c2);
    }
    r[hi.size()] = carry;
    return r;
}

std::vector<uint64_t> BigInt::sub_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b)
{
    std::vector<uint64_t> r(a.size(), 0);
    unsigned char borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t x = a[i];
        uint64_t y = i < b.size() ? b[i] : 0;
        uint64_t d = x - y;
        unsigned char b1 = x < y;
        uint64_t t = d - borrow;
        unsigned char b2 = d < static_cast<uint64_t>(borrow);
        r[i] = t;
        borrow = static_cast<unsigned char>(b1 | b2);
    }
    return r;
}

int BigInt::compare_magnitude(const BigInt& a, const BigInt& b)
{
    if (a.words_.size() != b.words_.size())
        return a.words_.size() < b.words_.size() ? -1 : 1;
    for (size_t i = a.words_.size(); i-- > 0;) {
        if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i] ? -1 : 1;
    }
    return 0;
}

int BigInt::compare(const BigInt& a, const BigInt& b)
{
    if (a.sign() != b.sign()) return a.sign() < b.sign() ? -1 : 1;
    int c = compare_magnitude(a, b);
    return a.neg_ ? -c : c;
}

BigInt operator+(const BigInt& a, const BigInt& b)
{
    BigInt r;
    if (a.neg_ == b.neg_) {
        r.words_ = BigInt::add_mag(a.words_, b.words_);
        r.neg_ = a.neg_;
    } else {
        int c = BigInt::compare_magnitude(a, b);
        if (c == 0) return BigInt();
        const BigInt& big = c > 0 ? a : b;
        const BigInt& small = c > 0 ? b : a;
        r.words_ = BigInt::sub_mag(big.words_, small.words_);
        r.neg_ = big.neg_;
    }
    r.trim();
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b)
{
    if (a.is_zero() || b.is_zero()) return BigInt();
    BigInt r;
    r.words_.assign(a.words_.size() + b.words_.size(), 0);
    for (size_t i = 0; i < a.words_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.words_.size(); ++j) {
            unsigned __int128 cur = static_cast<unsigned __int128>(a.words_[i]) * b.words_[j]
                                    + r.words_[i + j] + carry;
            r.words_[i + j] = static_cast<uint64_t>(cur);
            carry = static_cast<uint64_t>(cur >> 64);
        }
        size_t k = i + b.words_.size();
        while (carry) {
            unsigned __int128 cur = static_cast<unsigned __int128>(r.words_[k]) + carry;
            r.words_[k] = static_cast<uint64_t>(cur);
            carry = static_cast<uint64_t>(cur >> 64);
            ++k;
        }
    }
    r.neg_ = a.neg_ != b.neg_;
    r.trim();
    return r;
}

BigInt BigInt::shifted_left(unsigned bits) const
{
    if (is_zero() || bits == 0) return *this;
    unsigned wshift = bits / 64, bshift = bits % 64;
    BigInt r;
    r.neg_ = neg_;
    r.words_.assign(words_.size() + wshift + 1, 0);
    for (size_t i = 0; i < words_.size(); ++i) {
        r.words_[i + wshift] |= words_[i] << bshift;
        if (bshift) r.words_[i + wshift + 1] |= words_[i] >> (64 - bshift);
    }
    r.trim();
    return r;
}

BigInt BigInt::shifted_right_floor(unsigned bits) const
{
    if (is_zero() || bits == 0) return *this;
    unsigned wshift = bits / 64, bshift = bits % 64;
    BigInt r;
    bool dropped = false;
    for (unsigned i = 0; i < std::min<size_t>(wshift, words_.size()); ++i)
        dropped |= words_[i] != 0;
    if (wshift < words_.size() && bshift)
        dropped |= (words_[wshift] & ((uint64_t(1) << bshift) - 1)) != 0;
    if (wshift >= words_.size()) {
        if (neg_ && (dropped || !is_zero())) return BigInt(-1);
        return BigInt();
    }
    r.words_.assign(words_.size() - wshift, 0);
    for (size_t i = 0; i < r.words_.size(); ++i) {
        uint64_t lo = words_[i + wshift] >> bshift;
        uint64_t hi = (bshift && i + wshift + 1 < words_.size())
                          ? words_[i + wshift + 1] << (64 - bshift)
                          : 0;
        r.words_[i] = lo | hi;
    }
    r.neg_ = neg_;
    r.trim();
    if (neg_ && dropped) r -= BigInt(1);  // round toward -inf
    return r;
}

bool BigInt::fits_int64() const
{
    if (words_.size() > 1) return false;
    if (words_.empty()) return true;
    if (!neg_) return words_[0] <= static_cast<uint64_t>(INT64_MAX);
    return words_[0] <= static_cast<uint64_t>(INT64_MAX) + 1;
}

int64_t BigInt::to_int64() const
{
    if (!fits_int64()) throw std::overflow_error("BigInt::to_int64: out of range");
    if (words_.empty()) return 0;
    return neg_ ? -static_cast<int64_t>(words_[0] - 1) - 1 : static_cast<int64_t>(words_[0]);
}

double BigInt::to_double() const
{
    if (words_.empty()) return 0.0;
    size_t nbits = bit_length();
    double v;
    if (nbits <= 64) {
        v = static_cast<double>(words_[0]);
    } else {
        // Keep the top 64 bits and scale; correctly rounds to 53 bits.
        unsigned drop = static_cast<unsigned>(nbits - 64);
        BigInt top = shifted_right_floor(drop);
        bool round_up = false;
        // round-to-nearest on the dropped part (ties away; last-bit ties only)
        BigInt back = top.shifted_left(drop);
        BigInt rem = *this - back;
        BigInt half = BigInt(1).shifted_left(drop - 1);
        if (compare_magnitude(rem, half) >= 0) round_up = true;
        uint64_t m = top.words_.empty() ? 0 : top.words_[0];
        if (round_up) ++m;
        v = std::ldexp(static_cast<double>(m), static_cast<int>(drop));
        return neg_ ? -v : v;
    }
    return neg_ ? -v : v;
}

uint32_t BigInt::divmod_small(uint32_t d)
{
    if (d == 0) throw std::invalid_argument("BigInt::divmod_small: divide by zero");
    uint64_t rem = 0;
    for (size_t i = words_.size(); i-- > 0;) {
        unsigned __int128 cur = (static_cast<unsigned __int128>(rem) << 64) | words_[i];
        words_[i] = static_cast<uint64_t>(cur / d);
        rem = static_cast<uint64_t>(cur % d);
    }
    trim();
    return static_cast<uint32_t>(rem);
}

void BigInt::mul_small(uint64_t f)
{
    if (f == 0 || is_zero()) { *this = BigInt(); return; }
    uint64_t carry = 0;
    for (auto& w : words_) {
        unsigned __int128 cur = static_cast<unsigned __int128>(w) * f + carry;
        w = static_cast<uint64_t>(cur);
        carry = static_cast<uint64_t>(cur >> 64);
    }
    if (carry) words_.push_back(carry);
}

std::string BigInt::to_string() const
{
    if (is_zero()) return "0";
    BigInt t = *this;
    std::string digits;
    while (!t.is_zero()) {
        uint32_t r = t.divmod_small(1000000000u);
        for (int i = 0; i < 9; ++i) {
            digits.push_back(static_cast<char>('0' + r % 10));
            r /= 10;
        }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (neg_) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

}  // namespace depauw
