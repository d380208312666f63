#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hms {

/**
 * Exact antiderivative arithmetic for sums of c * u^p * e^{-r u}.
 *
 * This is the closed-form layer under iterated integrals whose pulled-back
 * integrand is exponential along one coordinate block: the ordered-simplex
 * integral of such products stays in the same term class, so nested
 * integration can be done symbolically and only the transverse block needs
 * quadrature. Fixed-capacity storage keeps the evaluation allocation-free.
 */
class ExpPoly {
public:
    struct Term {
        std::complex<double> c;
        int p;      // power of u
        double r;   // decay rate
    };
    static constexpr int kCapacity = 96;

    static ExpPoly one() {
        ExpPoly f;
        f.terms_[0] = {{1.0, 0.0}, 0, 0.0};
        f.size_ = 1;
        return f;
    }

    int size() const { return size_; }
    const Term& term(int i) const { return terms_[i]; }

    ExpPoly& multiply_exp(double rate) {
        for (int i = 0; i < size_; ++i) terms_[i].r += rate;
        return *this;
    }

    std::complex<double> eval(double u) const {
        std::complex<double> s(0.0, 0.0);
        for (int i = 0; i < size_; ++i) {
            const Term& t = terms_[i];
            double e = -t.r * u;
            if (e < -745.0) continue;
            double mag = std::exp(e);
            for (int q = 0; q < t.p; ++q) mag *= u;
            s += t.c * mag;
        }
        return s;
    }

    /// G(u) = integral of this from +infinity to u; every term must decay.
    ExpPoly integrate_from_infinity() const {
        ExpPoly g;
        for (int i = 0; i < size_; ++i) {
            const Term& t = terms_[i];
            if (!(t.r > 0.0))
                throw std::domain_error("ExpPoly: divergent integral from infinity (rate <= 0)");
            double coef = 1.0 / t.r;
            for (int q = t.p; q >= 0; --q) {
                g.push({-t.c * coef, q, t.r});
                coef *= q / t.r;
            }
        }
        g.merge();
        return g;
    }

    /// G(u) = integral of this from A to u; `scale` bounds |u| over the use range.
    ExpPoly integrate_from(double A, double scale) const {
        ExpPoly g;
        std::complex<double> const_acc(0.0, 0.0);
        for (int i = 0; i < size_; ++i) {
            const Term& t = terms_[i];
            if (std::abs(t.r) * scale < 1e-6) {
                // nearly-polynomial branch: expand e^{-ru} and integrate
                // exactly; the expansion's relative error after degree j is
                // (r scale)^{j+1}/(j+1)!, so two correction terms suffice here
                double rp = 1.0;   // (-r)^j / j!
                for (int j = 0; j <= 2; ++j) {
                    std::complex<double> c = t.c * rp;
                    int q = t.p + j;
                    g.push({c / static_cast<double>(q + 1), q + 1, 0.0});
                    const_acc -= c / static_cast<double>(q + 1) * std::pow(A, q + 1);
                    rp *= -t.r / (j + 1);
                    if (std::abs(rp) * std::pow(scale, j + 1) < 1e-20) break;
                }
            } else {
                // antiderivative -e^{-ru} sum_{q<=p} (p!/q!) u^q / r^{p-q+1}
                double coef = 1.0 / t.r;
                for (int q = t.p; q >= 0; --q) {
                    g.push({-t.c * coef, q, t.r});
                    coef *= q / t.r;
                }
                double eA = -t.r * A;
                if (eA >= -745.0) {
                    double cf = 1.0 / t.r;
                    std::complex<double> b(0.0, 0.0);
                    for (int q = t.p; q >= 0; --q) {
                        b += t.c * cf * std::pow(A, q);
                        cf *= q / t.r;
                    }
                    const_acc += b * std::exp(eA);
                }
            }
        }
        if (const_acc != std::complex<double>(0.0, 0.0)) g.push({const_acc, 0, 0.0});
        g.merge();
        return g;
    }

private:
    std::array<Term, kCapacity> terms_;
    int size_ = 0;

    void push(Term t) {
        if (t.c == std::complex<double>(0.0, 0.0)) return;
        if (size_ >= kCapacity) throw std::runtime_error("ExpPoly: term capacity exceeded");
        terms_[size_++] = t;
    }
    void merge() {
        int out = 0;
        for (int i = 0; i < size_; ++i) {
            bool found = false;
            for (int j = 0; j < out; ++j) {
                if (terms_[j].p == terms_[i].p && terms_[j].r == terms_[i].r) {
                    terms_[j].c += terms_[i].c;
                    found = true;
                    break;
                }
            }
            if (!found) terms_[out++] = terms_[i];
        }
        int k = 0;
        for (int i = 0; i < out; ++i)
            if (terms_[i].c != std::complex<double>(0.0, 0.0)) terms_[k++] = terms_[i];
        size_ = k;
    }
};

/**
 * Exact value of the ordered iterated integral
 *   int_{A <= w_1 <= ... <= w_m <= B} prod_k coef_k e^{-rate_k w_k} dw
 * (signed in the bounds: B < A is a reversed sweep).
 */
inline std::complex<double> simplex_exp_integral(const std::vector<double>& rates,
                                                 const std::vector<std::complex<double>>& coefs,
                                                 double A, double B) {
    const double scale = std::max(std::abs(A), std::abs(B));
    ExpPoly cur = ExpPoly::one();
    for (std::size_t k = 0; k < rates.size(); ++k) {
        cur.multiply_exp(rates[k]);
        cur = cur.integrate_from(A, scale);
    }
    std::complex<double> v = cur.eval(B);
    for (const auto& c : coefs) v *= c;
    return v;
}

} // namespace hms
