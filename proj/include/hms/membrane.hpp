#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hms/chen.hpp"      // Report
#include "hms/exppoly.hpp"
#include "hms/forms.hpp"
#include "hms/ncring.hpp"
#include "hms/quadrature.hpp"
#include "hms/shuffle.hpp"

namespace hms {

/// Monotone scalar profile with derivative.
struct Profile {
    std::function<double(double)> value, deriv;

    /// theta (1-t)/t : decreasing from +inf at t=0 to 0 at t=1.
    static Profile cuspward_rational(double theta) {
        return {[theta](double t) { return theta * (1.0 - t) / t; },
                [theta](double t) { return -theta / (t * t); }};
    }
    /// -log(t) / (2 pi lambda) : decreasing from +inf to 0.
    static Profile cuspward_log(double lambda) {
        const double c = 1.0 / (kTwoPi * lambda);
        return {[c](double t) { return -c * std::log(t); },
                [c](double t) { return -c / t; }};
    }
    static Profile affine(double a, double b) {
        return {[a, b](double t) { return a + (b - a) * t; },
                [a, b](double) { return b - a; }};
    }
    /// geometric sweep from a to b (both positive)
    static Profile geometric(double a, double b) {
        const double l = std::log(b / a);
        return {[a, l](double t) { return a * std::exp(l * t); },
                [a, l](double t) { return a * l * std::exp(l * t); }};
    }

};

struct MembranePoint {
    Complex z1, z2;
    Complex d1z1, d2z1;   // partials of z1 in t1, t2
    Complex d1z2, d2z2;
};

/**
 * Membrane: a piecewise differentiable map [0,1]^2 -> H^2 whose coordinate
 * foliation leaves land on holomorphic curves. Kinds with known structure
 * unlock faster integration routes; anything else evaluates through a
 * generic callback.
 *
 *   box      z1 = i h1(t1),      z2 = i h2(t2)      (leaves z1 = c, z2 = c)
 *   diangle  z1 = i r(t1) h(t2), z2 = i h(t2)       (leaves z1 = r z2, z2 = c)
 *   generic  arbitrary, with exact partials supplied by the factory
 */
class Membrane {
public:
    enum class Kind { box, diangle, generic };

    struct BoxData {
        Profile h1, h2;
        bool cuspward = false;   // profiles sweep (0, inf) so theta may be re-scaled
    };
    struct DiangleData {
        double slope_from, slope_to;
        double theta;            // height scale; geometry is the full ideal diangle
    };

    static Membrane box_finite(double a1, double b1, double a2, double b2) {
        Membrane m;
        m.kind_ = Kind::box;
        m.box_ = BoxData{Profile::affine(a1, b1), Profile::affine(a2, b2), false};
        m.bind_box();
        return m;
    }
    /// The quadrant Im(H^2), swept from the cusp at infinity (t=0) to 0 (t=1).
    /// The substitution selects the parametrization seen by the tensor route;
    /// the structured routes integrate in geometric coordinates either way.
    static Membrane box_cuspward(double theta1 = 1.0, double theta2 = 1.0,
                                 CuspSubstitution sub = CuspSubstitution::rational) {
        Membrane m;
        m.kind_ = Kind::box;
        m.box_ = BoxData{cusp_profile(theta1, sub), cusp_profile(theta2, sub), true};
        m.bind_box();
        return m;
    }
    /// Ideal diangle between the rays z1 = slope_from * z2 and z1 = slope_to * z2.
    static Membrane diangle(double slope_from, double slope_to, double theta = 1.0,
                            CuspSubstitution sub = CuspSubstitution::rational) {
        if (!(slope_from > 0) || !(slope_to > 0))
            throw std::invalid_argument("membrane: diangle slopes must be positive");
        Membrane m;
        m.kind_ = Kind::diangle;
        m.dia_ = DiangleData{slope_from, slope_to, theta};
        m.bind_diangle(sub);
        return m;
    }

    static Profile cusp_profile(double theta, CuspSubstitution sub) {
        return sub == CuspSubstitution::rational ? Profile::cuspward_rational(theta)
                                                 : Profile::cuspward_log(theta);
    }
    static Membrane generic(std::function<MembranePoint(double, double)> eval,
                            std::vector<double> breaks1 = {}, std::vector<double> breaks2 = {}) {
        Membrane m;
        m.kind_ = Kind::generic;
        m.eval_ = std::move(eval);
        m.breaks1_ = std::move(breaks1);
        m.breaks2_ = std::move(breaks2);
        return m;
    }

    /// Zero-area stand-in (a degenerate diangle collapses to a geodesic).
    static Membrane degenerate() {
        return generic([](double t1, double t2) {
            MembranePoint p;
            p.z1 = p.z2 = Complex(0.0, 1.0 + t1 + t2);
            p.d1z1 = p.d1z2 = Complex(0, 1);
            p.d2z1 = p.d2z2 = Complex(0, 1);
            return p;
        });
    }

    Kind kind() const { return kind_; }
    const std::optional<BoxData>& box_data() const { return box_; }
    const std::optional<DiangleData>& diangle_data() const { return dia_; }
    const std::vector<double>& breaks1() const { return breaks1_; }
    const std::vector<double>& breaks2() const { return breaks2_; }

    MembranePoint at(double t1, double t2) const { return eval_(t1, t2); }

    Membrane reparametrized(std::function<double(double)> psi1, std::function<double(double)> dpsi1,
                            std::function<double(double)> psi2, std::function<double(double)> dpsi2) const {
        auto inner = eval_;
        return generic(
            [inner, psi1, dpsi1, psi2, dpsi2](double t1, double t2) {
                MembranePoint p = inner(psi1(t1), psi2(t2));
                double a = dpsi1(t1), b = dpsi2(t2);
                p.d1z1 *= a;
                p.d1z2 *= a;
                p.d2z1 *= b;
                p.d2z2 *= b;
                return p;
            },
            breaks1_, breaks2_);
    }

    /// Pulled-back density of a single term (coefficient e^{2 pi i (a1 z1 + a2 z2)}).
    Complex term_density(double a1, double a2, Complex coeff, double t1, double t2) const {
        MembranePoint p = at(t1, t2);
        Complex jac = p.d1z1 * p.d2z2 - p.d2z1 * p.d1z2;
        const Complex itp(0.0, kTwoPi);
        return coeff * std::exp(itp * (a1 * p.z1 + a2 * p.z2)) * jac;
    }
    Complex form_density(const ExpForm2& f, double t1, double t2) const {
        MembranePoint p = at(t1, t2);
        Complex jac = p.d1z1 * p.d2z2 - p.d2z1 * p.d1z2;
        return f.eval(p.z1, p.z2) * jac;
    }

private:
    Kind kind_ = Kind::generic;
    std::optional<BoxData> box_;
    std::optional<DiangleData> dia_;
    std::function<MembranePoint(double, double)> eval_;
    std::vector<double> breaks1_, breaks2_;

    void bind_box() {
        auto h1 = box_->h1, h2 = box_->h2;
        eval_ = [h1, h2](double t1, double t2) {
            MembranePoint p;
            p.z1 = Complex(0.0, h1.value(t1));
            p.z2 = Complex(0.0, h2.value(t2));
            p.d1z1 = Complex(0.0, h1.deriv(t1));
            p.d2z2 = Complex(0.0, h2.deriv(t2));
            p.d2z1 = p.d1z2 = Complex(0.0, 0.0);
            return p;
        };
    }
    void bind_diangle(CuspSubstitution sub) {
        const double s0 = dia_->slope_from, s1 = dia_->slope_to, th = dia_->theta;
        Profile r = Profile::geometric(s0, s1);
        Profile h = cusp_profile(th, sub);
        eval_ = [r, h](double t1, double t2) {
            MembranePoint p;
            double rv = r.value(t1), hv = h.value(t2);
            p.z1 = Complex(0.0, rv * hv);
            p.z2 = Complex(0.0, hv);
            p.d1z1 = Complex(0.0, r.deriv(t1) * hv);
            p.d2z1 = Complex(0.0, rv * h.deriv(t2));
            p.d1z2 = Complex(0.0, 0.0);
            p.d2z2 = Complex(0.0, h.deriv(t2));
            return p;
        };
    }
};

struct QuadOptions {
    QuadratureConfig base;
    bool force_generic = false;   // bypass structured fast paths (cross checks)
};

/**
 * Restriction of the parameter square to two vertical strips A1 = [0,split]x[0,1]
 * and A2 = [split,1]x[0,1], with the domain tag of each form. An empty tag
 * vector means the unrestricted whole square. Matches the way diangle unions
 * decompose (the strip boundary maps to an interior leaf).
 */
struct DomainRestriction {
    double split_t1 = 0.5;
    std::vector<int> tags;   // one tag in {1,2} per form; empty = unrestricted

    static DomainRestriction whole() { return {}; }
    bool restricted() const { return !tags.empty(); }
};

namespace detail {

struct TermChoice {
    std::vector<const ExpForm2::Term*> term;
    Complex coeff{1.0, 0.0};
};

/// Cartesian product of the forms' term lists.
inline void for_each_term_combo(const std::vector<ExpForm2>& forms,
                                const std::function<void(const TermChoice&)>& fn) {
    const int m = static_cast<int>(forms.size());
    TermChoice tc;
    tc.term.resize(m);
    std::function<void(int)> rec = [&](int j) {
        if (j == m) {
            fn(tc);
            return;
        }
        for (const auto& t : forms[j].terms()) {
            tc.term[j] = &t;
            Complex saved = tc.coeff;
            tc.coeff *= t.coeff;
            rec(j + 1);
            tc.coeff = saved;
        }
    };
    rec(0);
}

/// rate per t1-slot k (ascending order): the form with rank k under rho.
inline std::vector<double> slot_rates(const std::vector<double>& per_form, const Permutation& rho) {
    Permutation inv = invert(rho);
    std::vector<double> r(per_form.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = per_form[inv(static_cast<int>(k))];
    return r;
}

/**
 * Nested quadrature over the descending chain y_1 >= ... >= y_m >= 0 toward
 * the cusp. Level k is resolved with the substitution y_k = -theta_k log(t_k)
 * against a safe (never overestimated) decay rate: the exponential boundary
 * layer maps to a t-power >= 0.  F receives the y vector; `safe_rate[k]` must
 * be a lower bound for the integrand's decay in y_k with inner levels done.
 * safe_rate[0] must be positive (convergence toward the cusp).
 */
inline Complex cusp_chain_integrate(const std::vector<double>& safe_rate,
                                    const std::function<Complex(const std::vector<double>&)>& f,
                                    int nodes) {
    const int m = static_cast<int>(safe_rate.size());
    if (!(safe_rate[0] > 0.0))
        throw std::runtime_error("membrane integral: no decay toward the cusp (divergent)");
    const GaussRule& rule = gauss_legendre(nodes);
    std::vector<double> y(m);
    Complex total(0.0, 0.0);
    std::function<void(int, Complex)> walk = [&](int k, Complex w) {
        if (k == m) {
            total += w * f(y);
            return;
        }
        const double upper = (k == 0) ? std::numeric_limits<double>::infinity() : y[k - 1];
        if (safe_rate[k] > 1e-12) {
            // two counter-graded panels: t = u^4 toward t=0 absorbs the
            // fractional powers left when the substitution rate is a strict
            // lower bound; t = 1-(1-s)^3 toward t=1 resolves the short-scale
            // layers of faster-decaying pieces
            const double theta = 1.0 / safe_rate[k];
            const double tlo = (k == 0) ? 0.0 : std::exp(-upper / theta);
            const double tm = tlo < 0.4 ? 0.4 : std::sqrt(tlo);
            {
                const double ulo = std::pow(tlo, 0.25), uhi = std::pow(tm, 0.25);
                const double mid = 0.5 * (ulo + uhi), half = 0.5 * (uhi - ulo);
                for (std::size_t i = 0; i < rule.node.size(); ++i) {
                    double u = mid + half * rule.node[i];
                    double t = u * u * u * u;
                    y[k] = -theta * std::log(t);
                    walk(k + 1, w * half * rule.weight[i] * theta * 4.0 * u * u * u / t);
                }
            }
            {
                const double shi = 1.0 - std::cbrt(1.0 - tm);   // t = 1-(1-s)^3
                const double mid = 0.5 * (shi + 1.0), half = 0.5 * (1.0 - shi);
                for (std::size_t i = 0; i < rule.node.size(); ++i) {
                    double s = mid + half * rule.node[i];
                    double q = 1.0 - s;
                    double t = 1.0 - q * q * q;
                    y[k] = -theta * std::log(t);
                    walk(k + 1, w * half * rule.weight[i] * theta * 3.0 * q * q / t);
                }
            }
        } else {
            // no decay of its own: finite range [0, upper], cubically graded
            // toward 0 where the inner levels' saturation layers live
            const double mid = 0.5, half = 0.5;
            for (std::size_t i = 0; i < rule.node.size(); ++i) {
                double u = mid + half * rule.node[i];
                y[k] = upper * u * u * u;
                walk(k + 1, w * half * rule.weight[i] * upper * 3.0 * u * u);
            }
        }
    };
    walk(0, Complex(1.0, 0.0));
    return total;
}

/// Ordered-simplex block integral of prod_k e^{-c_k y_k} i dy_k over the
/// descending chain (the quadrature workhorse for box membranes).
inline Complex box_block_quadrature(const std::vector<double>& rates, int nodes) {
    const int m = static_cast<int>(rates.size());
    double prefix = 0.0;
    for (int k = 0; k < m; ++k) {
        prefix += rates[k];
        if (!(prefix > 0.0))
            throw std::runtime_error("membrane integral: divergent box word (rate prefix <= 0)");
    }
    auto f = [&](const std::vector<double>& y) {
        double e = 0.0;
        for (int k = 0; k < m; ++k) e -= rates[k] * y[k];
        return Complex(e < -745.0 ? 0.0 : std::exp(e), 0.0);
    };
    // one i per slot from dz = i dy and one sign per level from the downward sweep
    return std::pow(Complex(0.0, -1.0), m) * cusp_chain_integrate(rates, f, nodes);
}

} // namespace detail

/**
 * Iterated integral on a membrane of type b: forms[j] is evaluated at
 * (t_{1,rho1(j)}, t_{2,rho2(j)}) with the full pulled-back density at the
 * mixed arguments, integrated over the product of ordered simplices.
 * Identity permutations give type a.
 */
inline IntegralResult membrane_integral_type_b(const std::vector<ExpForm2>& forms,
                                               const Permutation& rho1, const Permutation& rho2,
                                               const Membrane& g, const QuadOptions& opt,
                                               const DomainRestriction& restrict_ = {});

inline IntegralResult membrane_integral_type_a(const std::vector<ExpForm2>& forms, const Membrane& g,
                                               const QuadOptions& opt) {
    const int m = static_cast<int>(forms.size());
    return membrane_integral_type_b(forms, Permutation::identity(m), Permutation::identity(m), g, opt);
}

inline IntegralResult membrane_integral_restricted(const std::vector<ExpForm2>& forms,
                                                   const Permutation& rho1, const Permutation& rho2,
                                                   const Membrane& g,
                                                   const DomainRestriction& restrict_,
                                                   const QuadOptions& opt) {
    return membrane_integral_type_b(forms, rho1, rho2, g, opt, restrict_);
}

namespace detail {

/**
 * Semi-analytic diangle route: the slope block is integrated exactly (it is
 * exponential in w = slope after pullback), the height block by the cusp
 * chain in y = Im z2. In these coordinates the full prefactor is +1:
 *
 *   I = int_{y_1 >= ... >= y_m >= 0} prod_k y_k e^{-c_k y_k} W(y) dy,
 *
 * with c_k the vertical rate of the form ranked k and W the exact w-simplex
 * integral with rates 2 pi a_{j,1} y_{rho2(j)} swept from slope_from to slope_to.
 */
inline IntegralResult integrate_diangle(const std::vector<ExpForm2>& forms, const Permutation& rho1,
                                        const Permutation& rho2, const Membrane& g,
                                        const QuadOptions& opt, const DomainRestriction& rst,
                                        int nodes) {
    const int m = static_cast<int>(forms.size());
    const auto& dd = *g.diangle_data();
    const double wA = dd.slope_from, wB = dd.slope_to;
    const double wlow = std::min(wA, wB);
    const Permutation inv1 = invert(rho1);
    const Permutation inv2 = invert(rho2);

    // strip pattern per t1 slot; non-monotone = empty region
    int split_slot = 0;   // slots [0, split_slot) in strip 1
    double wsplit = 0.0;
    if (rst.restricted()) {
        std::vector<int> pattern(m);
        for (int k = 0; k < m; ++k) pattern[k] = rst.tags[inv1(k)];
        for (int k = 0; k + 1 < m; ++k)
            if (pattern[k] == 2 && pattern[k + 1] == 1) return {};
        while (split_slot < m && pattern[split_slot] == 1) ++split_slot;
        wsplit = wA * std::pow(wB / wA, rst.split_t1);
    }

    Complex total(0.0, 0.0);
    detail::for_each_term_combo(forms, [&](const detail::TermChoice& tc) {
        std::vector<double> c(m), safe(m);
        for (int k = 0; k < m; ++k) {
            int j2 = inv2(k);
            c[k] = kTwoPi * tc.term[j2]->a2;
            safe[k] = c[k] + kTwoPi * tc.term[j2]->a1 * wlow;
        }
        auto f = [&](const std::vector<double>& y) -> Complex {
            double logmag = 0.0;
            for (int k = 0; k < m; ++k) logmag += std::log(y[k]) - c[k] * y[k];
            if (logmag < -700.0) return Complex(0.0, 0.0);
            std::vector<double> rates(m);
            for (int k = 0; k < m; ++k) {
                int j = inv1(k);
                rates[k] = kTwoPi * tc.term[j]->a1 * y[rho2(j)];
            }
            Complex w;
            if (!rst.restricted()) {
                w = simplex_exp_integral(rates, {}, wA, wB);
            } else {
                std::vector<double> ra(rates.begin(), rates.begin() + split_slot);
                std::vector<double> rb(rates.begin() + split_slot, rates.end());
                w = simplex_exp_integral(ra, {}, wA, wsplit) *
                    simplex_exp_integral(rb, {}, wsplit, wB);
            }
            return std::exp(logmag) * w;
        };
        total += tc.coeff * detail::cusp_chain_integrate(safe, f, nodes);
    });
    IntegralResult r;
    r.value = total;
    (void)opt;
    return r;
}

inline IntegralResult integrate_box(const std::vector<ExpForm2>& forms, const Permutation& rho1,
                                    const Permutation& rho2, const Membrane& g,
                                    const QuadOptions& opt, const DomainRestriction& rst, int nodes) {
    const int m = static_cast<int>(forms.size());
    const auto& bd = *g.box_data();
    Complex total(0.0, 0.0);
    std::vector<std::pair<double, double>> clamps1(m, {0.0, 1.0});
    const std::vector<std::pair<double, double>>* clamps = nullptr;
    if (rst.restricted()) {
        Permutation inv1 = invert(rho1);
        for (int k = 0; k < m; ++k)
            clamps1[k] = rst.tags[inv1(k)] == 1 ? std::make_pair(0.0, rst.split_t1)
                                                : std::make_pair(rst.split_t1, 1.0);
        clamps = &clamps1;
    }
    detail::for_each_term_combo(forms, [&](const detail::TermChoice& tc) {
        std::vector<double> rates1_form(m), rates2_form(m);
        for (int j = 0; j < m; ++j) {
            rates1_form[j] = kTwoPi * tc.term[j]->a1;
            rates2_form[j] = kTwoPi * tc.term[j]->a2;
        }
        auto r1 = detail::slot_rates(rates1_form, rho1);
        auto r2 = detail::slot_rates(rates2_form, rho2);
        Complex b1, b2;
        if (!rst.restricted() && bd.cuspward) {
            b1 = detail::box_block_quadrature(r1, nodes);
            b2 = detail::box_block_quadrature(r2, nodes);
        } else {
            // finite profiles or clamped strips: direct nested quadrature
            auto block = [&](const Profile& h, const std::vector<double>& rates,
                             const std::vector<std::pair<double, double>>* cl) {
                Complex iw = std::pow(Complex(0.0, 1.0), m);
                auto f = [&](const std::vector<double>& t) {
                    Complex v(1.0, 0.0);
                    for (int k = 0; k < m; ++k)
                        v *= std::exp(-rates[k] * h.value(t[k])) * h.deriv(t[k]);
                    return v;
                };
                return iw * simplex_integrate(m, f, nodes, 0.0, 1.0, cl);
            };
            b1 = block(bd.h1, r1, clamps);
            b2 = block(bd.h2, r2, nullptr);
        }
        total += tc.coeff * b1 * b2;
    });
    IntegralResult r;
    r.value = total;
    (void)opt;
    return r;
}

inline IntegralResult integrate_generic(const std::vector<ExpForm2>& forms, const Permutation& rho1,
                                        const Permutation& rho2, const Membrane& g,
                                        const QuadOptions& opt, const DomainRestriction& rst,
                                        int nodes) {
    const int m = static_cast<int>(forms.size());
    IntegralResult res;
    std::vector<std::pair<double, double>> clamps1(m, {0.0, 1.0});
    const std::vector<std::pair<double, double>>* clamps = nullptr;
    std::vector<double> breaks1 = g.breaks1();
    if (rst.restricted()) {
        Permutation inv1 = invert(rho1);
        for (int k = 0; k < m; ++k)
            clamps1[k] = rst.tags[inv1(k)] == 1 ? std::make_pair(0.0, rst.split_t1)
                                                : std::make_pair(rst.split_t1, 1.0);
        clamps = &clamps1;
        breaks1.push_back(rst.split_t1);
    }
    auto f = [&](const std::vector<double>& t1, const std::vector<double>& t2) {
        Complex v(1.0, 0.0);
        for (int j = 0; j < m; ++j) v *= g.form_density(forms[j], t1[rho1(j)], t2[rho2(j)]);
        return v;
    };
    if (2 * m <= 6) {
        res.value = product_simplex_integrate(m, m, f, nodes, clamps, nullptr, breaks1, g.breaks2());
    } else {
        if (rst.restricted())
            throw std::invalid_argument("membrane integral: restriction unsupported in Monte Carlo");
        res = mc_product_simplex(m, f, opt.base.monte_carlo_samples, opt.base.monte_carlo_seed);
    }
    return res;
}

} // namespace detail

inline IntegralResult membrane_integral_type_b(const std::vector<ExpForm2>& forms,
                                               const Permutation& rho1, const Permutation& rho2,
                                               const Membrane& g, const QuadOptions& opt,
                                               const DomainRestriction& rst) {
    opt.base.validate();
    const int m = static_cast<int>(forms.size());
    if (m == 0) throw std::invalid_argument("membrane integral: empty word");
    if (rho1.size() != m || rho2.size() != m)
        throw std::invalid_argument("membrane integral: permutation size mismatch");
    if (rst.restricted() && static_cast<int>(rst.tags.size()) != m)
        throw std::invalid_argument("membrane integral: restriction tag count mismatch");

    auto run = [&](int nodes) -> IntegralResult {
        if (!opt.force_generic && g.kind() == Membrane::Kind::diangle)
            return detail::integrate_diangle(forms, rho1, rho2, g, opt, rst, nodes);
        if (!opt.force_generic && g.kind() == Membrane::Kind::box)
            return detail::integrate_box(forms, rho1, rho2, g, opt, rst, nodes);
        return detail::integrate_generic(forms, rho1, rho2, g, opt, rst, nodes);
    };
    IntegralResult r = run(opt.base.nodes_per_dim);
    if (opt.base.estimate_error && !(g.kind() == Membrane::Kind::generic && 2 * m > 6)) {
        IntegralResult fine = run(opt.base.nodes_per_dim + opt.base.nodes_per_dim / 2);
        r.error_estimate = std::abs(fine.value - r.value);
        r.value = fine.value;
        if (r.error_estimate > 1e3 * opt.base.tolerance * std::max(1.0, std::abs(fine.value)))
            throw std::runtime_error("membrane integral: quadrature did not converge");
    }
    return r;
}

/// Cross-pair restricted integral (type a): every argument pair (t1_i, t2_j)
/// must land in the union of regions; used for corner-stacked compositions.
inline IntegralResult membrane_integral_cross_restricted(
    const std::vector<ExpForm2>& forms, const Membrane& g, const QuadOptions& opt,
    const std::function<bool(double, double)>& in_union,
    const std::vector<double>& breaks1, const std::vector<double>& breaks2) {
    const int m = static_cast<int>(forms.size());
    auto f = [&](const std::vector<double>& t1, const std::vector<double>& t2) -> Complex {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (!in_union(t1[i], t2[j])) return Complex(0.0, 0.0);
        Complex v(1.0, 0.0);
        for (int j = 0; j < m; ++j) v *= g.form_density(forms[j], t1[j], t2[j]);
        return v;
    };
    IntegralResult r;
    auto b1 = breaks1, b2 = breaks2;
    for (double x : g.breaks1()) b1.push_back(x);
    for (double x : g.breaks2()) b2.push_back(x);
    r.value = product_simplex_integrate(m, m, f, opt.base.nodes_per_dim, nullptr, nullptr, b1, b2);
    return r;
}

/// J^a: series over words with type-a integrals as coefficients.
inline WordSeries generating_series_Ja(const std::vector<ExpForm2>& forms, const Membrane& g,
                                       int depth, const QuadOptions& opt) {
    if (depth > 3) throw std::invalid_argument("generating_series_Ja: depth > 3");
    WordSeries s = WordSeries::one(std::max(depth, 1));
    const int nforms = static_cast<int>(forms.size());
    std::vector<int> word;
    std::function<void()> rec = [&]() {
        if (!word.empty()) {
            std::vector<ExpForm2> w;
            for (int idx : word) w.push_back(forms[idx]);
            s.add_term(word, membrane_integral_type_a(w, g, opt).value);
        }
        if (static_cast<int>(word.size()) == depth) return;
        for (int i = 0; i < nforms; ++i) {
            word.push_back(i);
            rec();
            word.pop_back();
        }
    };
    if (nforms > 0 && depth > 0) rec();
    return s;
}

/**
 * J^b: for every word w of length k <= depth and every sigma in S_k, the class
 * (w, id, sigma) contributes its type-b integral to the monomial
 * (X_w, Y_{w o sigma^{-1}}).  Letters are 1-based in the monomials.
 */
inline NCSeries generating_series_Jb(const std::vector<ExpForm2>& forms, const Membrane& g,
                                     int depth, const QuadOptions& opt) {
    if (depth > 3) throw std::invalid_argument("generating_series_Jb: depth > 3");
    NCSeries s(std::max(depth, 1));
    s.add_term(NCMonomial{}, Complex(1.0, 0.0));
    const int nforms = static_cast<int>(forms.size());
    std::vector<int> word;
    std::function<void()> rec = [&]() {
        const int k = static_cast<int>(word.size());
        if (k > 0) {
            std::vector<ExpForm2> w;
            for (int idx : word) w.push_back(forms[idx]);
            for (const Permutation& sigma : all_permutations(k)) {
                Complex v = membrane_integral_type_b(w, Permutation::identity(k), sigma, g, opt).value;
                NCMonomial mono;
                mono.x.resize(k);
                mono.y.resize(k);
                Permutation inv = invert(sigma);
                for (int l = 0; l < k; ++l) {
                    mono.x[l] = word[l] + 1;
                    mono.y[l] = word[inv(l)] + 1;
                }
                s.add_term(mono, v);
            }
        }
        if (k == depth) return;
        for (int i = 0; i < nforms; ++i) {
            word.push_back(i);
            rec();
            word.pop_back();
        }
    };
    if (nforms > 0 && depth > 0) rec();
    return s;
}

namespace detail {

struct TypeBCache {
    std::map<std::pair<std::vector<int>, std::vector<int>>, Complex> vals;

    Complex get(const std::vector<ExpForm2>& forms, const Permutation& r1, const Permutation& r2,
                const Membrane& g, const QuadOptions& opt) {
        std::vector<int> key1 = r1.images(), key2 = r2.images();
        auto it = vals.find({key1, key2});
        if (it != vals.end()) return it->second;
        Complex v = membrane_integral_type_b(forms, r1, r2, g, opt).value;
        vals.emplace(std::make_pair(key1, key2), v);
        return v;
    }
};

} // namespace detail

/**
 * The shuffle product of the generating series of two sub-membranes of a
 * diangle split at an interior leaf: outputs land in R' with the two-domain
 * restricted integrals as coefficients. Checks both halves of the theorem:
 *   - recombination: each shuffle group of restricted integrals sums to the
 *     product of the factors' class integrals (computed on the standalone
 *     sub-diangle membranes, so reparametrization invariance is exercised);
 *   - collapse: phi of the glued series equals J^b of the whole diangle.
 */
inline Report verify_shuffle_glue_split(const std::vector<ExpForm2>& forms, const Membrane& g,
                                        double split_t1, const Membrane& u1, const Membrane& u2,
                                        int depth, const QuadOptions& opt, double tolerance) {
    Report rep;
    const int nforms = static_cast<int>(forms.size());

    NCSeriesPrime tagged(depth);
    tagged.add_term(NCMonomialPrime{}, Complex(1.0, 0.0));
    double recomb_residual = 0.0;

    // enumerate class pairs (w', sigma') x (w'', sigma'') up to total degree
    std::vector<int> w1, w2;
    auto process_pair = [&]() {
        const int k1 = static_cast<int>(w1.size()), k2 = static_cast<int>(w2.size());
        const int k = k1 + k2;
        if (k == 0 || k > depth) return;
        std::vector<ExpForm2> word;
        std::vector<int> tags;
        for (int idx : w1) { word.push_back(forms[idx]); tags.push_back(1); }
        for (int idx : w2) { word.push_back(forms[idx]); tags.push_back(2); }
        for (const auto& s1 : all_permutations(k1)) {
            std::vector<ExpForm2> head;
            for (int idx : w1) head.push_back(forms[idx]);
            Complex c1 = k1 == 0 ? Complex(1, 0)
                                 : membrane_integral_type_b(head, Permutation::identity(k1), s1,
                                                            u1, opt).value;
            for (const auto& s2 : all_permutations(k2)) {
                std::vector<ExpForm2> tail;
                for (int idx : w2) tail.push_back(forms[idx]);
                Complex c2 = k2 == 0 ? Complex(1, 0)
                                     : membrane_integral_type_b(tail, Permutation::identity(k2),
                                                                s2, u2, opt).value;
                Complex group_sum(0.0, 0.0);
                DomainRestriction rst;
                rst.split_t1 = split_t1;
                rst.tags = tags;
                for (const auto& rho1 :
                     shuffle_of_permutations(Permutation::identity(k1), Permutation::identity(k2))) {
                    for (const auto& rho2 : shuffle_of_permutations(s1, s2)) {
                        Complex v =
                            membrane_integral_restricted(word, rho1, rho2, g, rst, opt).value;
                        group_sum += v;
                        NCMonomialPrime mono;
                        mono.x.resize(k);
                        mono.y.resize(k);
                        mono.xt.resize(k);
                        mono.yt.resize(k);
                        Permutation i1 = invert(rho1), i2 = invert(rho2);
                        for (int l = 0; l < k; ++l) {
                            mono.x[l] = (i1(l) < k1 ? w1[i1(l)] : w2[i1(l) - k1]) + 1;
                            mono.xt[l] = tags[i1(l)];
                            mono.y[l] = (i2(l) < k1 ? w1[i2(l)] : w2[i2(l) - k1]) + 1;
                            mono.yt[l] = tags[i2(l)];
                        }
                        tagged.add_term(mono, v);
                    }
                }
                double scale = std::max(std::abs(c1 * c2), 1e-30);
                recomb_residual = std::max(recomb_residual, std::abs(group_sum - c1 * c2) / scale);
            }
        }
    };
    std::function<void(bool)> enumerate = [&](bool second) {
        std::vector<int>& w = second ? w2 : w1;
        if (second) process_pair();
        else enumerate(true);
        if (static_cast<int>(w1.size() + w2.size()) == depth) return;
        for (int i = 0; i < nforms; ++i) {
            w.push_back(i);
            enumerate(second);
            w.pop_back();
        }
    };
    enumerate(false);

    rep.add("glue_recombination", recomb_residual, tolerance);
    NCSeries ju = generating_series_Jb(forms, g, depth, opt);
    NCSeries diff = subtract(phi(tagged), ju);
    rep.add("glue_phi_collapse", diff.max_abs_coefficient() / std::max(ju.max_abs_coefficient(), 1e-30),
            tolerance);
    return rep;
}

inline Report verify_shuffle_glue(const std::vector<ExpForm2>& forms, const Membrane& g,
                                  double split_t1, int depth, const QuadOptions& opt,
                                  double tolerance) {
    const auto& dd = *g.diangle_data();
    const double smid = dd.slope_from * std::pow(dd.slope_to / dd.slope_from, split_t1);
    Membrane u1 = Membrane::diangle(dd.slope_from, smid, dd.theta);
    Membrane u2 = Membrane::diangle(smid, dd.slope_to, dd.theta);
    return verify_shuffle_glue_split(forms, g, split_t1, u1, u2, depth, opt, tolerance);
}

/**
 * Theorem-level checks for the membrane shuffle laws on one membrane:
 *  (i)  product of split type-b integrals = sum over shuffled permutation pairs;
 *  (iii) phi(J^b(U') x_Sh J^b(U'')) = J^b(U' u U'') for a diangle split at an
 *        interior leaf (only when g is a diangle), with the product's
 *        coefficients given by the two-domain integrals.
 */
inline Report verify_membrane_shuffle(const std::vector<ExpForm2>& forms, int split,
                                      const Membrane& g, const QuadOptions& opt,
                                      double tol_parts = 1e-8, double tol_collapse = 1e-6,
                                      int collapse_depth = 2) {
    Report rep;
    const int m = static_cast<int>(forms.size());
    if (split < 0 || split > m) throw std::invalid_argument("verify_membrane_shuffle: bad split");

    // part (i) over all permutation pairs of both factors
    const int j = split, jj = m - split;
    std::vector<ExpForm2> head(forms.begin(), forms.begin() + j);
    std::vector<ExpForm2> tail(forms.begin() + j, forms.end());
    detail::TypeBCache cache;
    for (const auto& r1p : all_permutations(j)) {
        for (const auto& r2p : all_permutations(j)) {
            Complex lhs_head = j == 0 ? Complex(1, 0)
                                      : membrane_integral_type_b(head, r1p, r2p, g, opt).value;
            for (const auto& r1pp : all_permutations(jj)) {
                for (const auto& r2pp : all_permutations(jj)) {
                    Complex lhs_tail =
                        jj == 0 ? Complex(1, 0)
                                : membrane_integral_type_b(tail, r1pp, r2pp, g, opt).value;
                    Complex lhs = lhs_head * lhs_tail;
                    Complex rhs(0, 0);
                    for (const auto& rho1 : shuffle_of_permutations(r1p, r1pp))
                        for (const auto& rho2 : shuffle_of_permutations(r2p, r2pp))
                            rhs += cache.get(forms, rho1, rho2, g, opt);
                    double scale = std::max(std::abs(lhs), 1e-30);
                    rep.add("shuffle_i_" + r1p.to_string() + r2p.to_string() + "x" +
                                r1pp.to_string() + r2pp.to_string(),
                            std::abs(lhs - rhs) / scale, tol_parts);
                }
            }
        }
    }

    // part (iii): split the diangle at the geometric mid-leaf
    if (g.kind() == Membrane::Kind::diangle && collapse_depth > 0)
        for (const auto& row : verify_shuffle_glue(forms, g, 0.5, collapse_depth, opt, tol_collapse).rows)
            rep.rows.push_back(row);
    return rep;
}

/// Type-a integral clamped to a sub-rectangle of the parameter square.
inline Complex type_a_clamped(const std::vector<ExpForm2>& forms, const Membrane& g,
                              const QuadOptions& opt, std::pair<double, double> range1,
                              std::pair<double, double> range2) {
    const int m = static_cast<int>(forms.size());
    std::vector<std::pair<double, double>> c1(m, range1), c2(m, range2);
    auto f = [&](const std::vector<double>& t1, const std::vector<double>& t2) {
        Complex v(1.0, 0.0);
        for (int j = 0; j < m; ++j) v *= g.form_density(forms[j], t1[j], t2[j]);
        return v;
    };
    return product_simplex_integrate(m, m, f, opt.base.nodes_per_dim, &c1, &c2, g.breaks1(),
                                     g.breaks2());
}

/**
 * Corner-stacked composition of type-a series: with A = [0,x]x[0,y] and
 * B = [x,1]x[y,1], the cross-pair-restricted integral over A u B splits as
 * J^a(A u B) = J^a(A) J^a(B).
 */
inline Report verify_type_a_composition(const std::vector<ExpForm2>& forms, const Membrane& g,
                                        double x, double y, int depth, const QuadOptions& opt,
                                        double tolerance = 1e-8) {
    Report rep;
    auto in_union = [x, y](double t1, double t2) {
        return (t1 <= x && t2 <= y) || (t1 >= x && t2 >= y);
    };
    const int nforms = static_cast<int>(forms.size());
    WordSeries sa = WordSeries::one(depth), sb = WordSeries::one(depth), sun = WordSeries::one(depth);
    std::vector<int> word;
    std::function<void()> rec = [&]() {
        if (!word.empty()) {
            std::vector<ExpForm2> w;
            for (int idx : word) w.push_back(forms[idx]);
            sa.add_term(word, type_a_clamped(w, g, opt, {0.0, x}, {0.0, y}));
            sb.add_term(word, type_a_clamped(w, g, opt, {x, 1.0}, {y, 1.0}));
            sun.add_term(word,
                         membrane_integral_cross_restricted(w, g, opt, in_union, {x}, {y}).value);
        }
        if (static_cast<int>(word.size()) == depth) return;
        for (int i = 0; i < nforms; ++i) {
            word.push_back(i);
            rec();
            word.pop_back();
        }
    };
    rec();
    WordSeries diff = sun - (sa * sb);
    double scale = std::max(sun.max_abs_coefficient(), 1e-30);
    rep.add("type_a_corner_composition", diff.max_abs_coefficient() / scale, tolerance);
    return rep;
}

/**
 * Sampled check of the membrane condition: every coordinate leaf must land on
 * a holomorphic curve. On such a curve one coordinate is a Mobius function of
 * the other (or constant), so cross-ratios of the two coordinate tuples agree
 * along the leaf (conjugated cross-ratios on anti-holomorphic curves).
 */
inline Report check_foliation(const Membrane& g, double tolerance = 1e-9, int leaves = 5,
                              int samples = 100) {
    Report rep;
    auto cross_ratio = [](Complex a, Complex b, Complex c, Complex d) {
        return ((a - c) * (b - d)) / ((a - d) * (b - c));
    };
    auto leaf_residual = [&](const std::function<MembranePoint(double)>& leaf) {
        std::vector<Complex> z1(samples), z2(samples);
        double spread1 = 0, spread2 = 0, mag1 = 0, mag2 = 0;
        for (int i = 0; i < samples; ++i) {
            double s = 0.06 + 0.88 * (i + 0.5) / samples;
            MembranePoint p = leaf(s);
            z1[i] = p.z1;
            z2[i] = p.z2;
            if (i) {
                spread1 = std::max(spread1, std::abs(z1[i] - z1[0]));
                spread2 = std::max(spread2, std::abs(z2[i] - z2[0]));
            }
            mag1 = std::max(mag1, std::abs(p.z1));
            mag2 = std::max(mag2, std::abs(p.z2));
        }
        if (spread1 <= tolerance * (1.0 + mag1)) return 0.0;   // z1 constant leaf
        if (spread2 <= tolerance * (1.0 + mag2)) return 0.0;   // z2 constant leaf
        double worst = 0.0;
        for (int i = 0; i + 3 < samples; i += 3) {
            Complex c1 = cross_ratio(z1[i], z1[i + 1], z1[i + 2], z1[i + 3]);
            Complex c2 = cross_ratio(z2[i], z2[i + 1], z2[i + 2], z2[i + 3]);
            double r = std::min(std::abs(c1 - c2), std::abs(c1 - std::conj(c2)));
            worst = std::max(worst, r / (1.0 + std::abs(c1)));
        }
        return worst;
    };
    for (int l = 0; l < leaves; ++l) {
        double a = (l + 0.5) / leaves;
        double r1 = leaf_residual([&](double t2) { return g.at(a, t2); });
        double r2 = leaf_residual([&](double t1) { return g.at(t1, a); });
        rep.add("foliation_t1_leaf_" + std::to_string(l), r1, tolerance);
        rep.add("foliation_t2_leaf_" + std::to_string(l), r2, tolerance);
    }
    return rep;
}

/**
 * Compare type-b integrals on two membranes related by a homotopy that either
 * fixes the boundary (reparametrization) or slides it along its holomorphic
 * curves; residuals are reported per word and permutation pair.
 */
inline Report verify_homotopy_invariance(const std::vector<ExpForm2>& forms, const Membrane& g0,
                                         const Membrane& g1, const QuadOptions& opt,
                                         int max_len = 2, double tolerance = 1e-8) {
    Report rep;
    const int nforms = static_cast<int>(forms.size());
    std::vector<int> word;
    std::function<void()> rec = [&]() {
        const int k = static_cast<int>(word.size());
        if (k > 0) {
            std::vector<ExpForm2> w;
            for (int idx : word) w.push_back(forms[idx]);
            for (const auto& r1 : all_permutations(k)) {
                for (const auto& r2 : all_permutations(k)) {
                    Complex a = membrane_integral_type_b(w, r1, r2, g0, opt).value;
                    Complex b = membrane_integral_type_b(w, r1, r2, g1, opt).value;
                    double scale = std::max({std::abs(a), std::abs(b), 1e-30});
                    std::string name = "homotopy_w";
                    for (int idx : word) name += std::to_string(idx + 1);
                    name += "_" + r1.to_string() + r2.to_string();
                    rep.add(name, std::abs(a - b) / scale, tolerance);
                }
            }
        }
        if (k == max_len) return;
        for (int i = 0; i < nforms; ++i) {
            word.push_back(i);
            rec();
            word.pop_back();
        }
    };
    rec();
    return rep;
}

} // namespace hms
