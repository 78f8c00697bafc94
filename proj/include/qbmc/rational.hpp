// ============================================================================
// qbmc/rational.hpp — arbitrary-precision integers and exact rationals
// ============================================================================
//
// Every numeric quantity in the model layer, the encoders and the oracle is
// an exact Rational: sign-magnitude big integers, fractions kept in lowest
// terms with a positive denominator. No floating point anywhere.
//
// ============================================================================

#ifndef QBMC_RATIONAL_HPP
#define QBMC_RATIONAL_HPP

#include <algorithm>
#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbmc {

class ArithmeticError : public std::runtime_error {
public:
    explicit ArithmeticError(const std::string& what) : std::runtime_error(what) {}
};

// ── BigInt ──────────────────────────────────────────────────────────────────
// Sign-magnitude, base 2^32 limbs, little-endian, no leading zero limbs.
// sign_ is 0 iff the value is zero.

class BigInt {
public:
    BigInt() : sign_(0) {}

    BigInt(long long v) : sign_(0) {  // intentionally implicit
        if (v == 0) return;
        sign_ = v < 0 ? -1 : 1;
        // avoid UB on LLONG_MIN
        unsigned long long m = v < 0 ? ~static_cast<unsigned long long>(v) + 1ULL
                                     : static_cast<unsigned long long>(v);
        mag_.push_back(static_cast<std::uint32_t>(m));
        if (m >> 32) mag_.push_back(static_cast<std::uint32_t>(m >> 32));
    }

    static BigInt from_string(std::string_view s) {
        bool neg = false;
        std::size_t i = 0;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) { neg = s[i] == '-'; ++i; }
        if (i == s.size()) throw ArithmeticError("empty integer literal");
        BigInt r;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw ArithmeticError("bad digit in integer literal");
            r.mul_small_inplace(10);
            r.add_small_inplace(static_cast<std::uint32_t>(s[i] - '0'));
        }
        if (!r.mag_.empty()) r.sign_ = neg ? -1 : 1;
        return r;
    }

    bool is_zero() const { return sign_ == 0; }
    bool is_negative() const { return sign_ < 0; }
    int sign() const { return sign_; }

    bool fits_int64() const {
        if (mag_.size() > 2) return false;
        unsigned long long m = mag_abs_u64();
        if (sign_ >= 0) return m <= 0x7fffffffffffffffULL;
        return m <= 0x8000000000000000ULL;
    }

    std::int64_t to_int64() const {
        if (!fits_int64()) throw ArithmeticError("BigInt does not fit int64");
        unsigned long long m = mag_abs_u64();
        if (sign_ < 0) return static_cast<std::int64_t>(~m + 1ULL);
        return static_cast<std::int64_t>(m);
    }

    friend BigInt operator-(const BigInt& a) {
        BigInt r = a;
        r.sign_ = -r.sign_;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        BigInt r;
        if (a.sign_ == b.sign_) {
            r.mag_ = add_mag(a.mag_, b.mag_);
            r.sign_ = a.sign_;
        } else {
            int c = cmp_mag(a.mag_, b.mag_);
            if (c == 0) return r;
            if (c > 0) { r.mag_ = sub_mag(a.mag_, b.mag_); r.sign_ = a.sign_; }
            else       { r.mag_ = sub_mag(b.mag_, a.mag_); r.sign_ = b.sign_; }
        }
        return r;
    }

    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
        BigInt r;
        r.sign_ = a.sign_ * b.sign_;
        if (a.mag_.size() == 1 && b.mag_.size() == 1) {
            unsigned long long p = static_cast<unsigned long long>(a.mag_[0]) * b.mag_[0];
            r.mag_.push_back(static_cast<std::uint32_t>(p));
            if (p >> 32) r.mag_.push_back(static_cast<std::uint32_t>(p >> 32));
            return r;
        }
        r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
        for (std::size_t i = 0; i < a.mag_.size(); ++i) {
            unsigned long long carry = 0;
            for (std::size_t j = 0; j < b.mag_.size(); ++j) {
                unsigned long long cur = r.mag_[i + j] +
                    static_cast<unsigned long long>(a.mag_[i]) * b.mag_[j] + carry;
                r.mag_[i + j] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
            }
            std::size_t j = i + b.mag_.size();
            while (carry) {
                unsigned long long cur = r.mag_[j] + carry;
                r.mag_[j] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
                ++j;
            }
        }
        r.trim();
        return r;
    }

    // Truncated division (quotient rounds toward zero, remainder keeps a's sign).
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.sign_ == 0) throw ArithmeticError("division by zero");
        int c = cmp_mag(a.mag_, b.mag_);
        if (c < 0) { q = BigInt(); r = a; return; }
        if (b.mag_.size() == 1) {
            q.mag_ = a.mag_;
            std::uint32_t rem = q.div_small_inplace(b.mag_[0]);
            q.sign_ = q.mag_.empty() ? 0 : a.sign_ * b.sign_;
            r = BigInt();
            if (rem) { r.mag_.push_back(rem); r.sign_ = a.sign_; }
            return;
        }
        // Knuth-style long division via bit shifting: simple and exact.
        BigInt rem;
        BigInt quot;
        quot.mag_.assign(a.mag_.size(), 0);
        for (std::size_t bit = a.mag_.size() * 32; bit-- > 0;) {
            rem.shl1_inplace();
            if (a.bit(bit)) rem.set_bit0();
            if (cmp_mag(rem.mag_, b.mag_) >= 0) {
                rem.mag_ = sub_mag(rem.mag_, b.mag_);
                rem.sign_ = rem.mag_.empty() ? 0 : 1;
                quot.mag_[bit / 32] |= (1u << (bit % 32));
            }
        }
        quot.trim();
        quot.sign_ = quot.mag_.empty() ? 0 : a.sign_ * b.sign_;
        rem.trim();
        rem.sign_ = rem.mag_.empty() ? 0 : a.sign_;
        q = std::move(quot);
        r = std::move(rem);
    }

    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a.sign_ = a.mag_.empty() ? 0 : 1;
        b.sign_ = b.mag_.empty() ? 0 : 1;
        while (!b.is_zero()) {
            BigInt q, r;
            divmod(a, b, q, r);
            a = std::move(b);
            b = std::move(r);
        }
        return a;
    }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.sign_ == b.sign_ && a.mag_ == b.mag_;
    }
    friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
        if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
        int c = cmp_mag(a.mag_, b.mag_) * (a.sign_ < 0 ? -1 : 1);
        return c <=> 0;
    }

    std::string to_string() const {
        if (sign_ == 0) return "0";
        BigInt t = *this;
        std::string digits;  // little-endian decimal, 9 digits per chunk
        while (!t.mag_.empty()) {
            std::uint32_t rem = t.div_small_inplace(1000000000u);
            for (int i = 0; i < 9; ++i) {
                digits.push_back(static_cast<char>('0' + rem % 10));
                rem /= 10;
            }
        }
        while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
        if (sign_ < 0) digits.push_back('-');
        std::reverse(digits.begin(), digits.end());
        return digits;
    }

private:
    int sign_;
    std::vector<std::uint32_t> mag_;

    unsigned long long mag_abs_u64() const {
        unsigned long long m = 0;
        if (!mag_.empty()) m = mag_[0];
        if (mag_.size() > 1) m |= static_cast<unsigned long long>(mag_[1]) << 32;
        return m;
    }

    bool bit(std::size_t i) const {
        std::size_t limb = i / 32;
        if (limb >= mag_.size()) return false;
        return (mag_[limb] >> (i % 32)) & 1u;
    }

    void set_bit0() {
        if (mag_.empty()) { mag_.push_back(1); sign_ = 1; }
        else mag_[0] |= 1u;
    }

    void shl1_inplace() {
        std::uint32_t carry = 0;
        for (auto& limb : mag_) {
            std::uint32_t nc = limb >> 31;
            limb = (limb << 1) | carry;
            carry = nc;
        }
        if (carry) mag_.push_back(carry);
        if (!mag_.empty()) sign_ = 1;
    }

    void trim() {
        while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
        if (mag_.empty()) sign_ = 0;
    }

    void mul_small_inplace(std::uint32_t m) {
        unsigned long long carry = 0;
        for (auto& limb : mag_) {
            unsigned long long cur = static_cast<unsigned long long>(limb) * m + carry;
            limb = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) mag_.push_back(static_cast<std::uint32_t>(carry));
        trim();
    }

    void add_small_inplace(std::uint32_t v) {
        unsigned long long carry = v;
        for (std::size_t i = 0; i < mag_.size() && carry; ++i) {
            unsigned long long cur = mag_[i] + carry;
            mag_[i] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) mag_.push_back(static_cast<std::uint32_t>(carry));
        if (!mag_.empty()) sign_ = sign_ == 0 ? 1 : sign_;
    }

    // divides magnitude in place, returns remainder
    std::uint32_t div_small_inplace(std::uint32_t d) {
        unsigned long long rem = 0;
        for (std::size_t i = mag_.size(); i-- > 0;) {
            unsigned long long cur = (rem << 32) | mag_[i];
            mag_[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        trim();
        return static_cast<std::uint32_t>(rem);
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<std::uint32_t> r(big.size());
        unsigned long long carry = 0;
        for (std::size_t i = 0; i < big.size(); ++i) {
            unsigned long long cur = static_cast<unsigned long long>(big[i]) + carry;
            if (i < small.size()) cur += small[i];
            r[i] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) r.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r(a.size());
        long long borrow = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            long long cur = static_cast<long long>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
            if (cur < 0) { cur += 1LL << 32; borrow = 1; } else borrow = 0;
            r[i] = static_cast<std::uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
};

// ── Rational ────────────────────────────────────────────────────────────────
// Invariants: den_ > 0, gcd(|num_|, den_) = 1, zero is 0/1.

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long v) : num_(v), den_(1) {}  // intentionally implicit
    Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static Rational from_int(long long n, long long d) { return Rational(BigInt(n), BigInt(d)); }

    // Accepts "p", "-p", "p/q" and exact decimals "a.b" (2.5 == 5/2).
    static Rational from_string(std::string_view s) {
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            return Rational(BigInt::from_string(s.substr(0, slash)),
                            BigInt::from_string(s.substr(slash + 1)));
        }
        auto dot = s.find('.');
        if (dot == std::string_view::npos) return Rational(BigInt::from_string(s), BigInt(1));
        std::string digits(s.substr(0, dot));
        std::string_view frac = s.substr(dot + 1);
        if (frac.empty()) throw ArithmeticError("bad decimal literal");
        digits.append(frac);
        BigInt den(1);
        for (std::size_t i = 0; i < frac.size(); ++i) den = den * BigInt(10);
        return Rational(BigInt::from_string(digits), std::move(den));
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_negative() const { return num_.is_negative(); }
    bool is_integer() const { return den_ == BigInt(1); }
    int sign() const { return num_.sign(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw ArithmeticError("rational division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }

    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        return (a.num_ * b.den_) <=> (b.num_ * a.den_);
    }

    // "p" for integers, "p/q" otherwise
    std::string to_string() const {
        if (is_integer()) return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }

private:
    BigInt num_, den_;

    void normalize() {
        if (den_.is_zero()) throw ArithmeticError("zero denominator");
        if (den_.is_negative()) { num_ = -num_; den_ = -den_; }
        if (num_.is_zero()) { den_ = BigInt(1); return; }
        BigInt g = BigInt::gcd(num_, den_);
        if (!(g == BigInt(1))) { num_ = num_ / g; den_ = den_ / g; }
    }
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace qbmc

#endif // QBMC_RATIONAL_HPP
