#pragma once

#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <string>
#include <vector>
#include <stdexcept>

namespace hms {

/**
 * BigInt: arbitrary-size signed integer, sign-magnitude over 32-bit limbs.
 *
 * Covers what exact field arithmetic needs here: +, -, *, comparison,
 * division by a machine word (printing, basis solves), binary gcd and
 * lossless-enough conversion to double. No general long division.
 */
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v) {
        if (v == 0) return;
        sgn_ = v < 0 ? -1 : 1;
        unsigned long long m = v < 0 ? -static_cast<unsigned long long>(v) : static_cast<unsigned long long>(v);
        while (m) { d_.push_back(static_cast<std::uint32_t>(m & 0xffffffffULL)); m >>= 32; }
    }
    BigInt(int v) : BigInt(static_cast<long long>(v)) {}

    bool is_zero() const { return sgn_ == 0; }
    int sign() const { return sgn_; }

    friend bool operator==(const BigInt& x, const BigInt& y) {
        return x.sgn_ == y.sgn_ && x.d_ == y.d_;
    }
    friend bool operator!=(const BigInt& x, const BigInt& y) { return !(x == y); }
    friend bool operator<(const BigInt& x, const BigInt& y) {
        if (x.sgn_ != y.sgn_) return x.sgn_ < y.sgn_;
        int c = cmp_mag(x.d_, y.d_);
        return x.sgn_ >= 0 ? c < 0 : c > 0;
    }
    friend bool operator>(const BigInt& x, const BigInt& y) { return y < x; }
    friend bool operator<=(const BigInt& x, const BigInt& y) { return !(y < x); }
    friend bool operator>=(const BigInt& x, const BigInt& y) { return !(x < y); }

    BigInt operator-() const {
        BigInt r = *this;
        r.sgn_ = -r.sgn_;
        return r;
    }

    friend BigInt operator+(const BigInt& x, const BigInt& y) {
        if (x.sgn_ == 0) return y;
        if (y.sgn_ == 0) return x;
        BigInt r;
        if (x.sgn_ == y.sgn_) {
            r.d_ = add_mag(x.d_, y.d_);
            r.sgn_ = x.sgn_;
        } else {
            int c = cmp_mag(x.d_, y.d_);
            if (c == 0) return BigInt();
            if (c > 0) { r.d_ = sub_mag(x.d_, y.d_); r.sgn_ = x.sgn_; }
            else       { r.d_ = sub_mag(y.d_, x.d_); r.sgn_ = y.sgn_; }
        }
        return r;
    }
    friend BigInt operator-(const BigInt& x, const BigInt& y) { return x + (-y); }

    friend BigInt operator*(const BigInt& x, const BigInt& y) {
        if (x.sgn_ == 0 || y.sgn_ == 0) return BigInt();
        BigInt r;
        r.sgn_ = x.sgn_ * y.sgn_;
        r.d_.assign(x.d_.size() + y.d_.size(), 0);
        for (std::size_t i = 0; i < x.d_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < y.d_.size(); ++j) {
                std::uint64_t cur = static_cast<std::uint64_t>(x.d_[i]) * y.d_[j] + r.d_[i + j] + carry;
                r.d_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
                carry = cur >> 32;
            }
            std::size_t k = i + y.d_.size();
            while (carry) {
                std::uint64_t cur = r.d_[k] + carry;
                r.d_[k] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    BigInt& operator+=(const BigInt& y) { *this = *this + y; return *this; }
    BigInt& operator-=(const BigInt& y) { *this = *this - y; return *this; }
    BigInt& operator*=(const BigInt& y) { *this = *this * y; return *this; }

    /// Quotient truncated toward zero; also reports |remainder|.
    BigInt div_u32(std::uint32_t div, std::uint32_t* rem_out = nullptr) const {
        if (div == 0) throw std::domain_error("BigInt: division by zero");
        BigInt q;
        q.d_.assign(d_.size(), 0);
        std::uint64_t rem = 0;
        for (std::size_t i = d_.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | d_[i];
            q.d_[i] = static_cast<std::uint32_t>(cur / div);
            rem = cur % div;
        }
        q.sgn_ = sgn_;
        q.trim();
        if (rem_out) *rem_out = static_cast<std::uint32_t>(rem);
        return q;
    }

    bool is_even() const { return d_.empty() || (d_[0] & 1u) == 0; }

    BigInt shifted_right1() const {
        BigInt r = *this;
        std::uint32_t carry = 0;
        for (std::size_t i = r.d_.size(); i-- > 0;) {
            std::uint32_t next = r.d_[i] & 1u;
            r.d_[i] = (r.d_[i] >> 1) | (carry << 31);
            carry = next;
        }
        r.trim();
        return r;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a.sgn_ = a.is_zero() ? 0 : 1;
        b.sgn_ = b.is_zero() ? 0 : 1;
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        int shift = 0;
        while (a.is_even() && b.is_even()) { a = a.shifted_right1(); b = b.shifted_right1(); ++shift; }
        while (a.is_even()) a = a.shifted_right1();
        while (!b.is_zero()) {
            while (b.is_even()) b = b.shifted_right1();
            if (cmp_mag(a.d_, b.d_) > 0) std::swap(a, b);
            b = b - a;
            b.sgn_ = b.is_zero() ? 0 : 1;
        }
        for (int i = 0; i < shift; ++i) a = a + a;
        return a;
    }

    double to_double() const {
        if (sgn_ == 0) return 0.0;
        double v = 0.0;
        std::size_t n = d_.size();
        std::size_t lo = n > 3 ? n - 3 : 0;   // 96 top bits, plenty for a double
        for (std::size_t i = n; i-- > lo;) v = v * 4294967296.0 + d_[i];
        v = std::ldexp(v, 32 * static_cast<int>(lo));
        return sgn_ < 0 ? -v : v;
    }

    bool fits_int64() const {
        if (d_.size() > 2) return false;
        unsigned long long m = 0;
        for (std::size_t i = d_.size(); i-- > 0;) m = (m << 32) | d_[i];
        if (sgn_ >= 0) return m <= 0x7fffffffffffffffULL;
        return m <= 0x8000000000000000ULL;
    }
    long long to_int64() const {
        unsigned long long m = 0;
        for (std::size_t i = d_.size(); i-- > 0;) m = (m << 32) | d_[i];
        return sgn_ < 0 ? -static_cast<long long>(m) : static_cast<long long>(m);
    }

    std::string to_string() const {
        if (sgn_ == 0) return "0";
        std::string out;
        BigInt cur = *this;
        cur.sgn_ = 1;
        while (!cur.is_zero()) {
            std::uint32_t rem;
            cur = cur.div_u32(1000000000u, &rem);
            std::string part = std::to_string(rem);
            if (!cur.is_zero()) part.insert(0, 9 - part.size(), '0');
            out.insert(0, part);
        }
        if (sgn_ < 0) out.insert(0, "-");
        return out;
    }

private:
    int sgn_ = 0;
    std::vector<std::uint32_t> d_;

    void trim() {
        while (!d_.empty() && d_.back() == 0) d_.pop_back();
        if (d_.empty()) sgn_ = 0;
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }
    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::uint64_t cur = carry;
            if (i < a.size()) cur += a[i];
            if (i < b.size()) cur += b[i];
            r[i] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
            carry = cur >> 32;
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r = a;
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
            borrow = 0;
            if (cur < 0) { cur += 0x100000000LL; borrow = 1; }
            r[i] = static_cast<std::uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
};

} // namespace hms
