#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hms/forms.hpp"
#include "hms/ncring.hpp"
#include "hms/quadrature.hpp"
#include "hms/report.hpp"

namespace hms {

/**
 * Piecewise smooth paths in the completed upper half plane and iterated
 * path integrals along them. Pieces are straight segments or vertical
 * geodesics x + i e^s (the cusp-directed reparametrization); concatenation
 * splits [0,1] evenly over the pieces.
 */
class Path {
public:
    static Path segment(Complex z0, Complex z1) {
        Path p;
        p.pieces_.push_back({z0, z1, false});
        return p;
    }
    /// z(t) = x + i exp(s0 + (s1-s0) t)
    static Path vertical_geodesic(double x, double s0, double s1) {
        Path p;
        p.pieces_.push_back({Complex(x, s0), Complex(x, s1), true});
        return p;
    }
    static Path concatenation(const std::vector<Path>& parts) {
        if (parts.empty()) throw std::invalid_argument("path: empty concatenation");
        Path p;
        for (const auto& q : parts) {
            if (!p.pieces_.empty() &&
                std::abs(p.end() - q.start()) > 1e-12 * (1.0 + std::abs(q.start())))
                throw std::invalid_argument("path: concatenation endpoints do not match");
            p.pieces_.insert(p.pieces_.end(), q.pieces_.begin(), q.pieces_.end());
        }
        return p;
    }

    Complex start() const { return point_of(pieces_.front(), 0.0); }
    Complex end() const { return point_of(pieces_.back(), 1.0); }

    /// Position and velocity at global parameter t in [0,1].
    std::pair<Complex, Complex> at(double t) const {
        const double n = static_cast<double>(pieces_.size());
        double u = t * n;
        std::size_t idx = std::min(pieces_.size() - 1, static_cast<std::size_t>(u));
        double local = u - static_cast<double>(idx);
        const Piece& p = pieces_[idx];
        return {point_of(p, local), velocity_of(p, local) * n};
    }

    /// Interior parameter values where the derivative may jump.
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (std::size_t i = 1; i < pieces_.size(); ++i)
            b.push_back(static_cast<double>(i) / pieces_.size());
        return b;
    }

    bool unbounded() const {
        for (const auto& p : pieces_)
            if (p.vertical && std::max(p.a.imag(), p.b.imag()) > 700.0) return true;
        return false;
    }

private:
    struct Piece {
        Complex a, b;    // segment endpoints, or (x, s0)/(x, s1) for verticals
        bool vertical;
    };
    std::vector<Piece> pieces_;

    static Complex point_of(const Piece& p, double t) {
        if (!p.vertical) return p.a + (p.b - p.a) * t;
        double s = p.a.imag() + (p.b.imag() - p.a.imag()) * t;
        return Complex(p.a.real(), std::exp(s));
    }
    static Complex velocity_of(const Piece& p, double t) {
        if (!p.vertical) return p.b - p.a;
        double s0 = p.a.imag(), s1 = p.b.imag();
        double s = s0 + (s1 - s0) * t;
        return Complex(0.0, (s1 - s0) * std::exp(s));
    }
};

/**
 * Iterated path integral of the word (forms[0], ..., forms[m-1]) along g:
 * the ordered-simplex integral of the product of pullbacks. Returns the
 * value and a refinement-based error estimate.
 */
inline IntegralResult iterated_path_integral(const std::vector<ExpForm1>& forms, const Path& g,
                                             const QuadratureConfig& quad) {
    quad.validate();
    if (forms.empty()) throw std::invalid_argument("iterated_path_integral: empty word");
    if (forms.size() > 5) throw std::invalid_argument("iterated_path_integral: word length > 5");
    if (g.unbounded())
        for (const auto& f : forms)
            if (!f.vanishes_at_cusp())
                throw std::invalid_argument("iterated_path_integral: form does not vanish at the cusp");

    const int m = static_cast<int>(forms.size());
    const auto breaks = g.breakpoints();
    auto integrand = [&](const std::vector<double>& t) {
        Complex v(1.0, 0.0);
        for (int j = 0; j < m; ++j) {
            auto [z, dz] = g.at(t[j]);
            v *= forms[j].eval(z) * dz;
        }
        return v;
    };
    Complex coarse = simplex_integrate(m, integrand, quad.nodes_per_dim, 0.0, 1.0, nullptr, breaks);
    IntegralResult r;
    r.value = coarse;
    if (quad.estimate_error) {
        Complex fine = simplex_integrate(m, integrand, 2 * quad.nodes_per_dim, 0.0, 1.0, nullptr, breaks);
        r.value = fine;
        r.error_estimate = std::abs(fine - coarse);
        if (r.error_estimate > quad.tolerance * std::max(1.0, std::abs(fine)) * 100.0)
            throw std::runtime_error("iterated_path_integral: quadrature did not converge");
    }
    return r;
}

/// Generating series 1 + sum_w X_w * integral(word w) over all words up to `depth`.
inline WordSeries generating_series_F(const std::vector<ExpForm1>& forms, const Path& g,
                                      int depth, const QuadratureConfig& quad) {
    if (depth > 4) throw std::invalid_argument("generating_series_F: depth > 4");
    WordSeries s = WordSeries::one(depth);
    const int m = static_cast<int>(forms.size());
    std::vector<int> word;
    std::function<void()> rec = [&]() {
        if (!word.empty()) {
            std::vector<ExpForm1> w;
            for (int idx : word) w.push_back(forms[idx]);
            s.add_term(word, iterated_path_integral(w, g, quad).value);
        }
        if (static_cast<int>(word.size()) == depth) return;
        for (int i = 0; i < m; ++i) {
            word.push_back(i);
            rec();
            word.pop_back();
        }
    };
    if (m > 0 && depth > 0) rec();
    return s;
}

/**
 * Product formula along a concatenation: integral over g1 g2 of a word equals
 * the convolution of split integrals; and the generating series multiply.
 */
inline Report verify_composition(const std::vector<ExpForm1>& forms, const Path& g1, const Path& g2,
                                 const QuadratureConfig& quad, double tolerance = 1e-10,
                                 int series_depth = 3) {
    if (std::abs(g1.end() - g2.start()) > 1e-12 * (1.0 + std::abs(g2.start())))
        throw std::invalid_argument("verify_composition: endpoint mismatch");
    Report rep;
    Path g12 = Path::concatenation({g1, g2});

    const int m = static_cast<int>(forms.size());
    Complex whole = iterated_path_integral(forms, g12, quad).value;
    Complex sum(0.0, 0.0);
    for (int i = 0; i <= m; ++i) {
        std::vector<ExpForm1> head(forms.begin(), forms.begin() + i);
        std::vector<ExpForm1> tail(forms.begin() + i, forms.end());
        Complex a = head.empty() ? Complex(1, 0) : iterated_path_integral(head, g1, quad).value;
        Complex b = tail.empty() ? Complex(1, 0) : iterated_path_integral(tail, g2, quad).value;
        sum += a * b;
    }
    double scale = std::max(1.0, std::abs(whole));
    rep.add("product_formula_word", std::abs(whole - sum) / scale, tolerance);

    WordSeries f1 = generating_series_F(forms, g1, series_depth, quad);
    WordSeries f2 = generating_series_F(forms, g2, series_depth, quad);
    WordSeries f12 = generating_series_F(forms, g12, series_depth, quad);
    WordSeries diff = f12 - (f1 * f2);
    rep.add("series_composition", diff.max_abs_coefficient(), tolerance);
    return rep;
}

/// Shuffle relation: product of split integrals = sum over sh(i, m-i) of permuted words.
inline Report verify_path_shuffle(const std::vector<ExpForm1>& forms, const Path& g, int i,
                                  const QuadratureConfig& quad, double tolerance = 1e-9) {
    const int m = static_cast<int>(forms.size());
    if (i < 0 || i > m) throw std::invalid_argument("verify_path_shuffle: bad split");
    Report rep;
    std::vector<ExpForm1> head(forms.begin(), forms.begin() + i);
    std::vector<ExpForm1> tail(forms.begin() + i, forms.end());
    Complex lhs = (head.empty() ? Complex(1, 0) : iterated_path_integral(head, g, quad).value) *
                  (tail.empty() ? Complex(1, 0) : iterated_path_integral(tail, g, quad).value);
    Complex rhs(0.0, 0.0);
    for (const Permutation& sigma : shuffles(i, m - i)) {
        Permutation inv = invert(sigma);
        std::vector<ExpForm1> word;
        for (int k = 0; k < m; ++k) word.push_back(forms[inv(k)]);
        rhs += iterated_path_integral(word, g, quad).value;
    }
    double scale = std::max(1.0, std::abs(lhs));
    rep.add("shuffle_split_" + std::to_string(i), std::abs(lhs - rhs) / scale, tolerance);
    return rep;
}

} // namespace hms
