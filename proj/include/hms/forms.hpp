#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hms/quadfield.hpp"

namespace hms {

using Complex = std::complex<double>;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/**
 * Finite exponential 2-forms f dz1^dz2 on H^2, the desk-scale stand-in for
 * cusp forms:  f = sum_j c_j e^{2 pi i (a_j1 z1 + a_j2 z2)}.  Every nonzero
 * exponent must be totally positive so the form decays toward the cusp at
 * i*inf; the zero exponent is the constant form omega_0 = dz1^dz2.
 */
class ExpForm2 {
public:
    struct Term {
        Complex coeff;
        QuadInt alpha;
        double a1, a2;   // embeddings of alpha
    };

    explicit ExpForm2(const FieldContext& F) : field_(&F) {}

    static ExpForm2 omega0(const FieldContext& F) {
        ExpForm2 f(F);
        f.add_term(Complex(1.0, 0.0), QuadInt(0, 0));
        return f;
    }
    static ExpForm2 single(const FieldContext& F, Complex c, const QuadInt& alpha) {
        ExpForm2 f(F);
        f.add_term(c, alpha);
        return f;
    }

    void add_term(Complex c, const QuadInt& alpha) {
        auto [a1, a2] = field_->embed(alpha);
        if (!alpha.is_zero() && !(a1 > 0 && a2 > 0))
            throw std::invalid_argument("ExpForm2: exponent " + alpha.to_string() +
                                        " is not totally positive");
        terms_.push_back({c, alpha, a1, a2});
    }

    const std::vector<Term>& terms() const { return terms_; }
    const FieldContext& field() const { return *field_; }
    bool is_constant_form() const {
        return terms_.size() == 1 && terms_[0].alpha.is_zero();
    }

    Complex eval(Complex z1, Complex z2) const {
        Complex s(0.0, 0.0);
        const Complex itp(0.0, kTwoPi);
        for (const auto& t : terms_)
            s += t.coeff * std::exp(itp * (t.a1 * z1 + t.a2 * z2));
        return s;
    }

private:
    const FieldContext* field_;
    std::vector<Term> terms_;
};

inline Complex eval2(const ExpForm2& f, Complex z1, Complex z2) { return f.eval(z1, z2); }

/**
 * Truncated unit-invariant form: sum_{k=-K}^{K} a0 e^{2 pi i eps^k alpha0 z}.
 * All exponents stay totally positive because eps is.
 */
inline ExpForm2 unit_orbit_form(const FieldContext& F, Complex a0, const QuadInt& alpha0,
                                int half_width) {
    if (!F.totally_positive(alpha0))
        throw std::invalid_argument("unit_orbit_form: base exponent must be totally positive");
    ExpForm2 f(F);
    for (int k = -half_width; k <= half_width; ++k)
        f.add_term(a0, F.mul(F.unit_power(k), alpha0));
    return f;
}

/// Finite exponential 1-forms (sum c_j e^{2 pi i n_j z}) dz on H^1.
class ExpForm1 {
public:
    struct Term {
        Complex coeff;
        int freq;   // nonnegative
    };

    ExpForm1() = default;
    ExpForm1(std::initializer_list<Term> ts) : terms_(ts) { check(); }
    explicit ExpForm1(std::vector<Term> ts) : terms_(std::move(ts)) { check(); }

    static ExpForm1 dz() { return ExpForm1({Term{Complex(1.0, 0.0), 0}}); }
    static ExpForm1 single(Complex c, int freq) { return ExpForm1({Term{c, freq}}); }

    const std::vector<Term>& terms() const { return terms_; }
    bool vanishes_at_cusp() const {
        for (const auto& t : terms_)
            if (t.freq == 0) return false;
        return true;
    }

    Complex eval(Complex z) const {
        Complex s(0.0, 0.0);
        const Complex itp(0.0, kTwoPi);
        for (const auto& t : terms_)
            s += t.coeff * std::exp(itp * static_cast<double>(t.freq) * z);
        return s;
    }

private:
    std::vector<Term> terms_;
    void check() const {
        for (const auto& t : terms_)
            if (t.freq < 0) throw std::invalid_argument("ExpForm1: negative frequency");
    }
};

} // namespace hms
