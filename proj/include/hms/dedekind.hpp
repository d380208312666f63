#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hms/forms.hpp"
#include "hms/membrane.hpp"
#include "hms/quadfield.hpp"

namespace hms {

/**
 * Multiple Dedekind zeta values over cone families, the unit-window sums
 * Z(m,n), and iterated L-values of finite exponential forms in both series
 * and integral form.
 */

struct ConeSumSpec {
    const FieldContext* field = nullptr;
    std::vector<Cone> cones;            // one per depth slot
    std::vector<int> exponents;         // (k_1, ..., k_m)
    double height_bound = 40.0;         // enumeration cut per cone
    int unit_window = 8;                // K for sums over eps^k C

    void validate() const {
        if (!field) throw std::invalid_argument("cone sum: no field");
        if (cones.size() != exponents.size() || cones.empty())
            throw std::invalid_argument("cone sum: depth mismatch");
        if (exponents.back() < 2)
            throw std::invalid_argument("cone sum: final exponent must be >= 2 for convergence");
        for (int k : exponents)
            if (k < 1) throw std::invalid_argument("cone sum: exponents must be positive");
    }
};

struct ConeSumResult {
    double value = 0.0;
    double tail_bound = 0.0;
    long long terms = 0;
};

namespace detail {

/// Tail of sum_{x in C, maxemb(x) > H} N(x)^{-k} by comparison with the
/// integral of (x y)^{-k} over the embedded cone, plus the ray part.
inline double cone_tail_majorant(const FieldContext& F, double H, int k) {
    if (k < 2) throw std::invalid_argument("cone tail: exponent must be >= 2");
    const double e1 = F.eps1(), e2 = F.eps2();
    // interior: integral over u > H' of u^{-k} int_{u e2/e1}^{u} v^{-k} dv / (e1 - e2)
    const double Hp = std::max(1.0, H - 1.0 - e1);
    const double c = (std::pow(e1 / e2, k - 1.0) - 1.0) / ((k - 1.0) * (e1 - e2));
    double interior = c * std::pow(Hp, 2.0 - 2.0 * k) / (2.0 * k - 2.0);
    // the N-ray: sum_{n > H} n^{-2k} <= H^{1-2k} / (2k - 1)
    double ray = std::pow(std::max(1.0, H), 1.0 - 2.0 * k) / (2.0 * k - 1.0);
    return interior + ray;
}

} // namespace detail

/**
 * Truncated multiple Dedekind zeta value
 *   sum over (a_1.. a_m) in C_1 x .. x C_m of prod_i N(a_1+..+a_i)^{-k_i}
 * with a per-coordinate tail majorant. Deterministic enumeration order.
 */
inline ConeSumResult mdzv(const ConeSumSpec& spec) {
    spec.validate();
    const FieldContext& F = *spec.field;
    const int m = static_cast<int>(spec.cones.size());
    std::vector<std::vector<QuadInt>> elems(m);
    for (int i = 0; i < m; ++i) elems[i] = cone_elements(spec.cones[i], spec.height_bound);

    ConeSumResult out;
    double comp = 0.0;   // compensated accumulation
    std::vector<QuadInt> partial(m + 1, QuadInt(0, 0));
    std::function<void(int, double)> walk = [&](int level, double acc) {
        if (level == m) {
            double y = acc - comp;
            double t = out.value + y;
            comp = (t - out.value) - y;
            out.value = t;
            ++out.terms;
            return;
        }
        for (const QuadInt& a : elems[level]) {
            partial[level + 1] = partial[level] + a;
            BigInt nrm = F.norm(partial[level + 1]);
            double term = acc * std::pow(nrm.to_double(), -spec.exponents[level]);
            if (term == 0.0) continue;
            walk(level + 1, term);
        }
    };
    walk(0, 1.0);

    // Tail over tuples with some coordinate beyond the bound, split by the
    // first such coordinate i. Every partial sum dominates its own summand,
    // so the term is at most prod_j N(a_j)^{-k_j}: coordinate i contributes
    // the integral-comparison majorant past its (unit-scaled) threshold,
    // earlier coordinates their truncated single sums, later ones truncated
    // sums plus their own majorants (needs k_j >= 2 there; otherwise the
    // tail is not boundable this way and infinity is reported).
    std::vector<double> single(m, 0.0), thresh(m, 0.0);
    for (int j = 0; j < m; ++j) {
        for (const QuadInt& a : elems[j])
            single[j] += std::pow(F.norm(a).to_double(), -spec.exponents[j]);
        thresh[j] = std::max(
            1.0, spec.height_bound * std::pow(F.eps1(), -std::abs((double)spec.cones[j].unit_power)));
    }
    double total_tail = 0.0;
    for (int i = 0; i < m && std::isfinite(total_tail); ++i) {
        if (spec.exponents[i] < 2) {
            total_tail = std::numeric_limits<double>::infinity();
            break;
        }
        double part = detail::cone_tail_majorant(F, thresh[i], spec.exponents[i]);
        for (int j = 0; j < i; ++j) part *= single[j];
        for (int j = i + 1; j < m; ++j) {
            if (spec.exponents[j] < 2) {
                part = std::numeric_limits<double>::infinity();
                break;
            }
            part *= single[j] + detail::cone_tail_majorant(F, thresh[j], spec.exponents[j]);
        }
        total_tail += part;
    }
    out.tail_bound = total_tail;
    return out;
}

struct ZValueResult {
    double value = 0.0;
    double tail_bound = 0.0;            // enumeration tails accumulated over the window
    double window_tail = 0.0;           // geometric estimate for |k| > K
    std::vector<double> window_terms;   // per-k values, k = -K..K
};

/// Z(m,n) = sum_{k in Z} zeta_{K; C, eps^k C}(m, n), window-truncated at K.
inline ZValueResult Z_value(const FieldContext& F, int m, int n, double height_bound, int window,
                            ConeVariant variant = ConeVariant::strict) {
    if (!(m > n && n > 1)) throw std::invalid_argument("Z value: need m > n > 1");
    ZValueResult out;
    for (int k = -window; k <= window; ++k) {
        ConeSumSpec spec;
        spec.field = &F;
        spec.height_bound = height_bound;
        spec.cones = {Cone{&F, 0, variant}, Cone{&F, k, variant}};
        spec.exponents = {m, n};
        ConeSumResult r = mdzv(spec);
        out.window_terms.push_back(r.value);
        out.value += r.value;
        out.tail_bound += r.tail_bound;
    }
    // terms decay at least geometrically with ratio 2/eps1 beyond the window
    double edge = std::max(out.window_terms.front(), out.window_terms.back());
    double q = 2.0 / F.eps1();
    out.window_tail = q < 1.0 ? 2.0 * edge * q / (1.0 - q) : 1e300;
    return out;
}

/// Majorant side of the finiteness bound, all terms with absolute values:
/// zeta_C(m,n) + 2/(eps1 - 1) (zeta_C(n) + zeta_C(m-n, n)), tails included.
inline double Z_finiteness_majorant(const FieldContext& F, int m, int n, double height_bound) {
    Cone c0{&F, 0, ConeVariant::strict};
    ConeSumSpec s1, s2, s3;
    s1.field = s2.field = s3.field = &F;
    s1.height_bound = s2.height_bound = s3.height_bound = height_bound;
    s1.cones = {c0, c0};
    s1.exponents = {m, n};
    s2.cones = {c0};
    s2.exponents = {n};
    s3.cones = {c0, c0};
    s3.exponents = {m - n, n};
    auto r1 = mdzv(s1), r2 = mdzv(s2), r3 = mdzv(s3);
    double coef = 2.0 / (F.eps1() - 1.0);
    // leading-exponent-1 ingredients enter by truncated value only
    double t3 = std::isfinite(r3.tail_bound) ? r3.tail_bound : 0.0;
    return r1.value + r1.tail_bound + coef * (r2.value + r2.tail_bound + r3.value + t3);
}

enum class LMode { series, integral };

struct LValueResult {
    Complex value{0.0, 0.0};
    double tail_bound = 0.0;
};

/**
 * L-value of a finite exponential form:
 *   series:   (2 pi i)^{-2n} sum over the form's terms of a_j / N(alpha_j)^n
 *   integral: iterated integral of f, omega_0^{n-1} over the quadrant,
 *             separable nested quadrature (identity permutations).
 * The two agree exactly (the raw integral carries the (2 pi i)^{-2n} factor).
 */
inline LValueResult L_single(const ExpForm2& f, int n, LMode mode, const QuadOptions& opt) {
    if (n < 1) throw std::invalid_argument("L_single: exponent must be positive");
    const FieldContext& F = f.field();
    LValueResult out;
    if (mode == LMode::series) {
        double pref = std::pow(2.0 * M_PI, -2.0 * n) * ((n % 2) ? -1.0 : 1.0);
        Complex s(0.0, 0.0);
        for (const auto& t : f.terms()) {
            if (t.alpha.is_zero()) throw std::invalid_argument("L_single: constant term present");
            s += t.coeff / std::pow(F.norm(t.alpha).to_double(), n);
        }
        out.value = pref * s;
    } else {
        std::vector<ExpForm2> word{f};
        for (int i = 1; i < n; ++i) word.push_back(ExpForm2::omega0(F));
        out.value = membrane_integral_type_a(word, Membrane::box_cuspward(), opt).value;
    }
    return out;
}

/**
 * Iterated L-value L_{f,g}(m,n).
 *   series:   sum_{k in window} sum over cone-compatible orbit pairs of
 *             a b / (N(alpha)^m N(alpha+beta)^n), the displayed double-cone sum
 *   integral: word (f_rep, omega_0^{m-1}, g, omega_0^{n-1}) over the quadrant,
 *             with f reduced to its single representative term. That pins the
 *             diagonal unit quotient at matched truncation.
 * The fitted prefactor (integral / structural shape) is reported; raw
 * integrals are never renormalized.
 */
inline LValueResult L_double(const ExpForm2& f, const ExpForm2& g, int m, int n, LMode mode,
                             const QuadOptions& opt, ConeVariant variant = ConeVariant::strict,
                             int window = 8) {
    if (m < 1 || n < 1) throw std::invalid_argument("L_double: exponents must be positive");
    const FieldContext& F = f.field();
    LValueResult out;
    if (mode == LMode::series) {
        Complex s(0.0, 0.0);
        double edge = 0.0;
        for (int k = -window; k <= window; ++k) {
            QuadInt shift = F.unit_power(-k);
            Complex kterm(0.0, 0.0);
            for (const auto& ta : f.terms()) {
                if (!base_cone_contains(F, variant, ta.alpha)) continue;
                for (const auto& tb : g.terms()) {
                    // beta in eps^k C  <=>  eps^{-k} beta in C
                    if (!base_cone_contains(F, variant, F.mul(shift, tb.alpha))) continue;
                    double na = F.norm(ta.alpha).to_double();
                    double nab = F.norm(ta.alpha + tb.alpha).to_double();
                    kterm += ta.coeff * tb.coeff / (std::pow(na, m) * std::pow(nab, n));
                }
            }
            s += kterm;
            if (std::abs(k) == window) edge = std::max(edge, std::abs(kterm));
        }
        out.value = s;
        double q = 2.0 / F.eps1();
        out.tail_bound = q < 1.0 ? 2.0 * edge * q / (1.0 - q) : 1e300;
    } else {
        if (m + n > 5) throw std::invalid_argument("L_double: m + n > 5 in integral mode");
        if (f.terms().empty()) throw std::invalid_argument("L_double: empty form");
        // representative term of f: the middle of its orbit listing
        const auto& rep = f.terms()[f.terms().size() / 2];
        ExpForm2 frep = ExpForm2::single(F, rep.coeff, rep.alpha);
        std::vector<ExpForm2> word{frep};
        for (int i = 1; i < m; ++i) word.push_back(ExpForm2::omega0(F));
        word.push_back(g);
        for (int i = 1; i < n; ++i) word.push_back(ExpForm2::omega0(F));
        out.value = membrane_integral_type_a(word, Membrane::box_cuspward(), opt).value;
    }
    return out;
}

/**
 * Fit the constant C in  raw_integral = C / (N(alpha)^m N(alpha+beta)^n)
 * for a single-term pair; constancy across pairs is the structural check of
 * the displayed identities, and |C| fixes the (2 pi i) power empirically.
 */
inline Complex fitted_prefactor(const FieldContext& F, const QuadInt& alpha, const QuadInt& beta,
                                int m, int n, const QuadOptions& opt) {
    ExpForm2 fa = ExpForm2::single(F, Complex(1, 0), alpha);
    ExpForm2 fb = ExpForm2::single(F, Complex(1, 0), beta);
    std::vector<ExpForm2> word{fa};
    for (int i = 1; i < m; ++i) word.push_back(ExpForm2::omega0(F));
    word.push_back(fb);
    for (int i = 1; i < n; ++i) word.push_back(ExpForm2::omega0(F));
    Complex raw = membrane_integral_type_a(word, Membrane::box_cuspward(), opt).value;
    double shape = std::pow(F.norm(alpha).to_double(), -m) *
                   std::pow(F.norm(alpha + beta).to_double(), -n);
    return raw / shape;
}

} // namespace hms
