#include "depauw/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace depauw {

void Dyadic::canonicalize()
{
    if (m_.is_zero()) { e_ = 0; return; }
    unsigned tz = m_.trailing_zero_bits();
    unsigned strip = tz < e_ ? tz : e_;
    if (strip > 0) {
        m_ = m_.shifted_right_floor(strip);
        e_ -= strip;
    }
}

Dyadic Dyadic::pow2(int k)
{
    if (k >= 0) return Dyadic(BigInt(1).shifted_left(static_cast<unsigned>(k)), 0);
    return Dyadic(BigInt(1), static_cast<uint32_t>(-k));
}

Dyadic Dyadic::from_double(double d)
{
    if (!std::isfinite(d)) throw std::invalid_argument("Dyadic::from_double: non-finite");
    if (d == 0.0) return Dyadic();
    int exp = 0;
    double fr = std::frexp(d, &exp);          // d = fr * 2^exp, |fr| in [0.5, 1)
    int64_t mant = static_cast<int64_t>(std::ldexp(fr, 53));  // exact: 53-bit integer
    int e = 53 - exp;
    if (e <= 0) return Dyadic(BigInt(mant).shifted_left(static_cast<unsigned>(-e)), 0);
    return Dyadic(BigInt(mant), static_cast<uint32_t>(e));
}

Dyadic Dyadic::operator-() const
{
    Dyadic r = *this;
    r.m_ = -r.m_;
    return r;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b)
{
    uint32_t e = std::max(a.e_, b.e_);
    BigInt ma = a.m_.shifted_left(e - a.e_);
    BigInt mb = b.m_.shifted_left(e - b.e_);
    return Dyadic(ma + mb, e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b)
{
    uint32_t e = std::max(a.e_, b.e_);
    BigInt ma = a.m_.shifted_left(e - a.e_);
    BigInt mb = b.m_.shifted_left(e - b.e_);
    return Dyadic(ma - mb, e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b)
{
    return Dyadic(a.m_ * b.m_, a.e_ + b.e_);
}

Dyadic Dyadic::mul_pow2(int k) const
{
    if (is_zero() || k == 0) return *this;
    Dyadic r = *this;
    if (k > 0) {
        unsigned up = static_cast<unsigned>(k);
        unsigned fromexp = std::min<unsigned>(up, r.e_);
        r.e_ -= fromexp;
        up -= fromexp;
        if (up) r.m_ = r.m_.shifted_left(up);
    } else {
        r.e_ += static_cast<uint32_t>(-k);
    }
    return r;
}

int Dyadic::compare(const Dyadic& a, const Dyadic& b)
{
    if (a.sign() != b.sign()) return a.sign() < b.sign() ? -1 : 1;
    uint32_t e = std::max(a.e_, b.e_);
    return BigInt::compare(a.m_.shifted_left(e - a.e_), b.m_.shifted_left(e - b.e_));
}

Dyadic Dyadic::mod_pos(int64_t period) const
{
    if (period <= 0 || (period & (period - 1)) != 0)
        throw std::invalid_argument("Dyadic::mod_pos: period must be a positive power of two");
    int log2p = 0;
    while ((int64_t(1) << log2p) != period) ++log2p;
    // x - period * floor(x / period)
    BigInt q = m_.shifted_right_floor(e_ + static_cast<unsigned>(log2p));
    Dyadic r = *this - Dyadic(q.shifted_left(static_cast<unsigned>(log2p)), 0);
    return r;
}

double Dyadic::to_double() const
{
    return std::ldexp(m_.to_double(), -static_cast<int>(e_));
}

std::string Dyadic::to_pow2_string() const
{
    if (e_ == 0) return m_.to_string();
    return m_.to_string() + "/2^" + std::to_string(e_);
}

std::string Dyadic::to_decimal_string() const
{
    if (is_zero()) return "0";
    // m / 2^e == (m * 5^e) / 10^e
    BigInt mag = m_.is_negative() ? -m_ : m_;
    for (uint32_t i = 0; i < e_; ++i) mag.mul_small(5);
    std::string digits = mag.to_string();
    std::string out = m_.is_negative() ? "-" : "";
    if (e_ == 0) return out + digits;
    if (digits.size() <= e_) digits.insert(0, e_ + 1 - digits.size(), '0');
    out += digits.substr(0, digits.size() - e_);
    std::string frac = digits.substr(digits.size() - e_);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) out += "." + frac;
    return out;
}

std::optional<Dyadic> Dyadic::parse(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    auto parse_int = [](const std::string& t) -> std::optional<BigInt> {
        if (t.empty()) return std::nullopt;
        size_t i = 0;
        bool neg = false;
        if (t[0] == '-' || t[0] == '+') { neg = t[0] == '-'; i = 1; }
        if (i == t.size()) return std::nullopt;
        BigInt v;
        for (; i < t.size(); ++i) {
            if (t[i] < '0' || t[i] > '9') return std::nullopt;
            v.mul_small(10);
            v += BigInt(t[i] - '0');
        }
        return neg ? -v : v;
    };

    size_t slash = s.find("/2^");
    if (slash != std::string::npos) {
        auto m = parse_int(s.substr(0, slash));
        auto e = parse_int(s.substr(slash + 3));
        if (!m || !e || e->is_negative() || !e->fits_int64()) return std::nullopt;
        int64_t ev = e->to_int64();
        if (ev > (1 << 24)) return std::nullopt;
        return Dyadic(*m, static_cast<uint32_t>(ev));
    }

    size_t dot = s.find('.');
    if (dot == std::string::npos) {
        auto m = parse_int(s);
        if (!m) return std::nullopt;
        return Dyadic(*m, 0);
    }
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    if (tail.empty()) return std::nullopt;
    bool neg = !head.empty() && head[0] == '-';
    auto digits = parse_int((head.empty() || head == "-" || head == "+" ? std::string("0") : head) + tail);
    if (!digits) return std::nullopt;
    // value = digits / 10^d; dyadic iff 5^d divides |digits|
    BigInt mag = digits->is_negative() ? -*digits : *digits;
    for (size_t i = 0; i < tail.size(); ++i) {
        if (mag.is_zero()) break;
        BigInt t = mag;
        if (t.divmod_small(5) != 0) return std::nullopt;
        mag = t;
    }
    Dyadic r(neg ? -mag : mag, static_cast<uint32_t>(tail.size()));
    return r;
}

}  // namespace depauw
