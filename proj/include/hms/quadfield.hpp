#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hms/bigint.hpp"

namespace hms {

/**
 * Exact arithmetic in the ring of integers of a real quadratic field
 * Q(sqrt(d)): elements a + b*omega, the two real embeddings, norms,
 * the fundamental unit, the totally positive unit generator, and
 * positive cones with their enumeration.
 */

struct QuadInt {
    BigInt a, b;   // a + b*omega

    QuadInt() = default;
    QuadInt(BigInt a_, BigInt b_) : a(std::move(a_)), b(std::move(b_)) {}
    QuadInt(long long a_, long long b_ = 0) : a(a_), b(b_) {}

    bool is_zero() const { return a.is_zero() && b.is_zero(); }

    friend bool operator==(const QuadInt& x, const QuadInt& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const QuadInt& x, const QuadInt& y) { return !(x == y); }
    friend QuadInt operator+(const QuadInt& x, const QuadInt& y) { return {x.a + y.a, x.b + y.b}; }
    friend QuadInt operator-(const QuadInt& x, const QuadInt& y) { return {x.a - y.a, x.b - y.b}; }
    QuadInt operator-() const { return {-a, -b}; }

    std::string to_string() const { return "(" + a.to_string() + "," + b.to_string() + ")"; }
};

enum class OmegaKind { sqrt_d, half_plus_sqrt_d };

enum class ConeVariant {
    strict,     // N = {1,2,...}: cone = N  u  {a + b*eps : a,b >= 1}
    inclusive,  // {a + b*eps : a,b >= 0} \ {0}
};

class invalid_field_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FieldContext;

struct Cone {
    const FieldContext* field = nullptr;
    long long unit_power = 0;                     // the cone eps^k * C
    ConeVariant variant = ConeVariant::strict;
};

class FieldContext {
public:
    /// Builds the field data for squarefree d > 1; throws invalid_field_error otherwise.
    static FieldContext make(long long d, long long unit_search_bound = 1000000) {
        if (d <= 1) throw invalid_field_error("field: d must exceed 1");
        if (!squarefree(d)) throw invalid_field_error("field: d must be squarefree");
        FieldContext F;
        F.d_ = d;
        F.kind_ = (d % 4 == 1) ? OmegaKind::half_plus_sqrt_d : OmegaKind::sqrt_d;
        double rt = std::sqrt(static_cast<double>(d));
        if (F.kind_ == OmegaKind::half_plus_sqrt_d) {
            F.w1_ = (1.0 + rt) / 2.0;
            F.w2_ = (1.0 - rt) / 2.0;
            F.tr_omega_ = 1;
            F.n_omega_ = (1 - d) / 4;
        } else {
            F.w1_ = rt;
            F.w2_ = -rt;
            F.tr_omega_ = 0;
            F.n_omega_ = -d;
        }
        F.fund_unit_ = F.find_fundamental_unit(unit_search_bound);
        F.eps_ = (F.norm(F.fund_unit_) == BigInt(1)) ? F.fund_unit_ : F.mul(F.fund_unit_, F.fund_unit_);
        auto [e1, e2] = F.embed(F.eps_);
        F.eps1_ = e1;
        F.eps2_ = 1.0 / e1;   // norm(eps) = 1 exactly
        (void)e2;
        return F;
    }

    long long d() const { return d_; }
    OmegaKind omega_kind() const { return kind_; }
    std::pair<double, double> omega_embeddings() const { return {w1_, w2_}; }
    const QuadInt& fundamental_unit() const { return fund_unit_; }
    const QuadInt& eps() const { return eps_; }
    double eps1() const { return eps1_; }
    double eps2() const { return eps2_; }
    long long trace_omega() const { return tr_omega_; }
    long long norm_omega() const { return n_omega_; }

    QuadInt mul(const QuadInt& x, const QuadInt& y) const {
        // (a + b w)(c + e w), with w^2 = tr(w) w - N(w)
        BigInt be = x.b * y.b;
        BigInt a = x.a * y.a - be * BigInt(n_omega_);
        BigInt b = x.a * y.b + x.b * y.a + be * BigInt(tr_omega_);
        return {a, b};
    }

    QuadInt conj(const QuadInt& x) const {
        // conj(w) = tr(w) - w
        return {x.a + x.b * BigInt(tr_omega_), -x.b};
    }

    BigInt norm(const QuadInt& x) const {
        // a^2 + ab tr(w) + b^2 N(w)
        return x.a * x.a + x.a * x.b * BigInt(tr_omega_) + x.b * x.b * BigInt(n_omega_);
    }

    BigInt trace(const QuadInt& x) const { return x.a + x.a + x.b * BigInt(tr_omega_); }

    /// The two real embeddings. Cancellation-prone small embeddings are
    /// recovered from the exact norm through the accurate one.
    std::pair<double, double> embed(const QuadInt& x) const {
        double ad = x.a.to_double(), bd = x.b.to_double();
        double x1 = ad + bd * w1_;
        double x2 = ad + bd * w2_;
        double scale = std::abs(ad) + std::abs(bd) * std::max(std::abs(w1_), std::abs(w2_));
        if (scale > 0 && !x.is_zero()) {
            double n = norm(x).to_double();
            if (std::abs(x1) < 1e-7 * scale && x2 != 0.0) x1 = n / x2;
            else if (std::abs(x2) < 1e-7 * scale && x1 != 0.0) x2 = n / x1;
        }
        return {x1, x2};
    }

    bool totally_positive(const QuadInt& x) const {
        auto [x1, x2] = embed(x);
        return x1 > 0 && x2 > 0;
    }

    QuadInt unit_power(long long k) const {
        QuadInt base = k >= 0 ? eps_ : conj(eps_);   // eps^{-1} = conj(eps), norm 1
        long long n = k >= 0 ? k : -k;
        QuadInt r(1, 0);
        while (n > 0) {
            if (n & 1) r = mul(r, base);
            base = mul(base, base);
            n >>= 1;
        }
        return r;
    }

    /// x = a + b*eps in the (1, eps) basis, if representable over Z.
    std::optional<std::pair<BigInt, BigInt>> in_unit_basis(const QuadInt& x) const {
        // eps = e_a + e_b*omega; need b_coeff = x.b / e_b exactly
        if (!eps_.b.fits_int64()) return std::nullopt;
        long long eb = eps_.b.to_int64();
        if (eb == 0) return std::nullopt;
        bool negdiv = eb < 0;
        std::uint32_t mag = static_cast<std::uint32_t>(negdiv ? -eb : eb);
        std::uint32_t rem = 0;
        BigInt q = x.b.div_u32(mag, &rem);
        if (rem != 0) return std::nullopt;
        if (negdiv) q = -q;
        BigInt a = x.a - q * eps_.a;
        return std::make_pair(a, q);
    }

private:
    long long d_ = 0;
    OmegaKind kind_ = OmegaKind::sqrt_d;
    double w1_ = 0, w2_ = 0;
    long long tr_omega_ = 0, n_omega_ = 0;
    QuadInt fund_unit_, eps_;
    double eps1_ = 0, eps2_ = 0;

    static bool squarefree(long long d) {
        for (long long p = 2; p * p <= d; ++p)
            if (d % (p * p) == 0) return false;
        return true;
    }

    static std::optional<long long> exact_sqrt(long long v) {
        if (v < 0) return std::nullopt;
        long long r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
        for (long long c = std::max(0LL, r - 2); c <= r + 2; ++c)
            if (c * c == v) return c;
        return std::nullopt;
    }

    // Smallest unit > 1, by Pell search over the omega-coefficient.
    QuadInt find_fundamental_unit(long long bound) const {
        for (long long b = 1; b <= bound; ++b) {
            if (kind_ == OmegaKind::sqrt_d) {
                // a^2 - d b^2 = +-1
                for (int s : {-1, 1}) {
                    auto a = exact_sqrt(d_ * b * b + s);
                    if (a) return QuadInt(*a, b);
                }
            } else {
                // N(a + b w) = a^2 + ab + b^2 (1-d)/4 = +-1  =>  disc = d b^2 +- 4
                for (int s : {-1, 1}) {
                    auto r = exact_sqrt(d_ * b * b + 4 * s);
                    if (r && (*r - b) % 2 == 0) {
                        long long a = (*r - b) / 2;
                        return QuadInt(a, b);
                    }
                }
            }
        }
        throw invalid_field_error("field: no unit found below coefficient bound " + std::to_string(bound));
    }
};

/// Embeddings of eps^k*(a + b*eps), computed multiplicatively (no cancellation).
inline std::pair<double, double> cone_element_embeddings(const FieldContext& F, long long k,
                                                         long long a, long long b) {
    double p1 = std::pow(F.eps1(), static_cast<double>(k));
    double p2 = std::pow(F.eps2(), static_cast<double>(k));
    return {p1 * (a + b * F.eps1()), p2 * (a + b * F.eps2())};
}

/**
 * All elements of the cone with larger embedding <= height_bound, in a
 * deterministic order: ascending larger embedding, ties by the a-coordinate
 * of the scaled element. Every element is totally positive.
 */
inline std::vector<QuadInt> cone_elements(const Cone& c, double height_bound) {
    if (!c.field) throw std::invalid_argument("cone_elements: cone has no field");
    const FieldContext& F = *c.field;
    std::vector<QuadInt> out;
    if (height_bound <= 0) return out;

    struct Item { double h; QuadInt v; };
    std::vector<Item> items;
    const QuadInt eps_pow = F.unit_power(c.unit_power);
    const long long blo = (c.variant == ConeVariant::strict) ? 1 : 0;

    auto maxemb = [&](long long a, long long b) {
        auto [x1, x2] = cone_element_embeddings(F, c.unit_power, a, b);
        return std::max(x1, x2);
    };
    auto push = [&](long long a, long long b) {
        QuadInt base = QuadInt(a, 0) + F.mul(QuadInt(b, 0), F.eps());
        items.push_back({maxemb(a, b), F.mul(eps_pow, base)});
    };

    // the N-ray (strict: b = 0, a >= 1; inclusive only via the generic loop)
    if (c.variant == ConeVariant::strict)
        for (long long a = 1; maxemb(a, 0) <= height_bound; ++a) push(a, 0);

    const long long alo = (c.variant == ConeVariant::strict) ? 1 : 0;
    for (long long b = blo;; ++b) {
        long long a0 = (b == 0) ? 1 : alo;   // (0,0) excluded
        if (maxemb(a0, b) > height_bound) {
            if (b >= 1) break;               // max embedding is monotone in b for fixed a0
            continue;
        }
        for (long long a = a0; maxemb(a, b) <= height_bound; ++a) push(a, b);
    }

    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
        if (x.h != y.h) return x.h < y.h;
        if (x.v.a != y.v.a) return x.v.a < y.v.a;
        return x.v.b < y.v.b;
    });
    out.reserve(items.size());
    for (auto& it : items) out.push_back(std::move(it.v));
    return out;
}

/// Membership test against the cone definition (no unit scaling applied here).
inline bool base_cone_contains(const FieldContext& F, ConeVariant variant, const QuadInt& x) {
    auto basis = F.in_unit_basis(x);
    if (!basis) return false;
    const auto& [a, b] = *basis;
    if (variant == ConeVariant::strict) {
        if (b.is_zero()) return a >= BigInt(1);
        return a >= BigInt(1) && b >= BigInt(1);
    }
    return a >= BigInt(0) && b >= BigInt(0) && !x.is_zero();
}

inline bool cone_contains(const Cone& c, const QuadInt& x) {
    const FieldContext& F = *c.field;
    return base_cone_contains(F, c.variant, F.mul(F.unit_power(-c.unit_power), x));
}

} // namespace hms
