#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hms/membrane.hpp"
#include "hms/quadfield.hpp"

namespace hms {

/**
 * Cusp points of H^2, the GL_2(K) action on points and cusps, geodesic
 * diangles and ideal triangles, the commutative pairings, and the
 * diangle-based non-commutative symbol.
 */

/// Projective cusp [p : q]; infinity is [1 : 0].
struct Cusp {
    QuadInt p, q;

    Cusp() : p(0, 0), q(1, 0) {}
    Cusp(QuadInt p_, QuadInt q_) : p(std::move(p_)), q(std::move(q_)) {
        if (p.is_zero() && q.is_zero()) throw std::invalid_argument("cusp: [0:0]");
    }
    static Cusp infinity() { return Cusp(QuadInt(1, 0), QuadInt(0, 0)); }
    static Cusp from_int(long long v) { return Cusp(QuadInt(v, 0), QuadInt(1, 0)); }
    static Cusp from_quadint(const QuadInt& v) { return Cusp(v, QuadInt(1, 0)); }

    bool is_infinity() const { return q.is_zero(); }

    std::string to_string() const { return p.to_string() + "/" + q.to_string(); }
};

inline bool cusp_equal(const FieldContext& F, const Cusp& a, const Cusp& b) {
    return F.mul(a.p, b.q) == F.mul(b.p, a.q);
}

enum class DetClass { totally_positive, totally_negative, mixed };

/**
 * 2x2 matrix over K: integral entries with a common denominator. Acts on H^2
 * through the two embeddings; slots where the determinant embeds negatively
 * act through the conjugated variable (the orientation-reversing case).
 */
class MatrixK {
public:
    QuadInt a, b, c, d, den;

    MatrixK() : a(1, 0), b(0, 0), c(0, 0), d(1, 0), den(1, 0) {}
    MatrixK(QuadInt a_, QuadInt b_, QuadInt c_, QuadInt d_, QuadInt den_ = QuadInt(1, 0))
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)), den(std::move(den_)) {
        if (den.is_zero()) throw std::invalid_argument("matrix: zero denominator");
    }
    static MatrixK identity() { return MatrixK(); }
    static MatrixK diagonal(const QuadInt& x, const QuadInt& y) {
        return MatrixK(x, QuadInt(0, 0), QuadInt(0, 0), y);
    }

    QuadInt det_numerator(const FieldContext& F) const {
        return F.mul(a, d) - F.mul(b, c);
    }

    DetClass det_class(const FieldContext& F) const {
        auto [d1, d2] = F.embed(det_numerator(F));
        if (d1 == 0 || d2 == 0) throw std::domain_error("matrix: singular");
        if (d1 > 0 && d2 > 0) return DetClass::totally_positive;
        if (d1 < 0 && d2 < 0) return DetClass::totally_negative;
        return DetClass::mixed;
    }

    MatrixK multiply(const FieldContext& F, const MatrixK& o) const {
        return MatrixK(F.mul(a, o.a) + F.mul(b, o.c), F.mul(a, o.b) + F.mul(b, o.d),
                       F.mul(c, o.a) + F.mul(d, o.c), F.mul(c, o.b) + F.mul(d, o.d),
                       F.mul(den, o.den));
    }

    MatrixK inverse(const FieldContext& F) const {
        QuadInt dt = det_numerator(F);
        if (dt.is_zero()) throw std::domain_error("matrix: not invertible");
        // (M/den)^{-1} = den * adj(M) / det(M)
        return MatrixK(F.mul(d, den), F.mul(-b, den), F.mul(-c, den), F.mul(a, den), dt);
    }

    Cusp act_cusp(const FieldContext& F, const Cusp& z) const {
        return Cusp(F.mul(a, z.p) + F.mul(b, z.q), F.mul(c, z.p) + F.mul(d, z.q));
    }

    /// Per-embedding real slot data for the action on points.
    struct Slot {
        double a, b, c, d;
        bool conjugate;   // negative determinant in this embedding
        Complex map(Complex z) const {
            if (conjugate) z = std::conj(z);
            return (a * z + b) / (c * z + d);
        }
        Complex derivative_factor(Complex z) const {
            if (conjugate) z = std::conj(z);
            Complex q = c * z + d;
            return (a * d - b * c) / (q * q);
        }
        /// partial of map(z(t)) given partial of z(t)
        Complex chain(Complex z, Complex dz) const {
            return derivative_factor(z) * (conjugate ? std::conj(dz) : dz);
        }
    };

    std::pair<Slot, Slot> slots(const FieldContext& F) const {
        auto [a1, a2] = F.embed(a);
        auto [b1, b2] = F.embed(b);
        auto [c1, c2] = F.embed(c);
        auto [d1, d2] = F.embed(d);
        auto [dt1, dt2] = F.embed(det_numerator(F));
        // final denominators cancel in the fractional linear map
        return {{a1, b1, c1, d1, dt1 < 0}, {a2, b2, c2, d2, dt2 < 0}};
    }
};

/// Three-case action on a point of H^2; throws if the image leaves H^2.
inline std::pair<Complex, Complex> act(const FieldContext& F, const MatrixK& m,
                                       std::pair<Complex, Complex> z) {
    if (!(z.first.imag() > 0) || !(z.second.imag() > 0))
        throw std::domain_error("act: point not in H^2");
    auto [s1, s2] = m.slots(F);
    Complex w1 = s1.map(z.first), w2 = s2.map(z.second);
    if (!(w1.imag() > 0) || !(w2.imag() > 0))
        throw std::domain_error("act: image touches the boundary");
    return {w1, w2};
}

/// The unique gamma in PGL_2(K) with gamma p1 = 0, gamma p2 = inf, gamma p3 = 1.
inline MatrixK mobius_to_standard(const FieldContext& F, const Cusp& p1, const Cusp& p2,
                                  const Cusp& p3) {
    auto cross = [&](const Cusp& u, const Cusp& v) { return F.mul(u.p, v.q) - F.mul(v.p, u.q); };
    if (cross(p1, p2).is_zero() || cross(p1, p3).is_zero() || cross(p2, p3).is_zero())
        throw std::invalid_argument("mobius_to_standard: cusps must be pairwise distinct");
    QuadInt mu = cross(p3, p2);   // y2 x3 - x2 y3 up to sign convention below
    QuadInt nu = cross(p3, p1);
    // rows (a,b) = mu (q1, -p1), (c,d) = nu (q2, -p2)
    return MatrixK(F.mul(mu, p1.q), -F.mul(mu, p1.p), F.mul(nu, p2.q), -F.mul(nu, p2.p));
}

struct GeodesicTriangleSymbol {
    Cusp p1, p2, p3;
    DetClass curve_class;   // holomorphic if det is definite, anti-holomorphic if mixed
    bool holomorphic() const { return curve_class != DetClass::mixed; }
};

struct DiangleSymbol {
    Cusp p1, p2, p3, p4;
    double slope3 = 1.0, slope4 = 1.0;   // normalized-picture ray slopes
    int orientation = 0;                 // +1 if slope4 > slope3
    bool degenerate = false;
};

constexpr double kDegenerateSlopeTolerance = 1e-12;

/**
 * Geodesic diangle {p1, p2; p3, p4}: after sending (p1,p2,p3) to (0,inf,1),
 * the sides are the rays of slope 1 and slope |delta_1/delta_2| with
 * delta = gamma p4, and the membrane sweeps from the p3-side to the p4-side.
 */
struct Diangle {
    DiangleSymbol symbol;
    MatrixK normalizer;   // gamma
    Membrane membrane;    // translated back by gamma^{-1}; degenerate if flat
};

namespace detail {

/// Membrane for the normalized diangle translated by `back` (= gamma^{-1}).
inline Membrane translated_diangle_membrane(const FieldContext& F, const MatrixK& back,
                                            double slope_from, double slope_to) {
    auto [s1, s2] = back.slots(F);
    Profile r = Profile::geometric(slope_from, slope_to);
    Profile h = Profile::cuspward_rational(1.0);
    return Membrane::generic([s1, s2, r, h](double t1, double t2) {
        double rv = r.value(t1), rd = r.deriv(t1);
        double hv = h.value(t2), hd = h.deriv(t2);
        Complex z1(0.0, rv * hv), z2(0.0, hv);
        Complex d1z1(0.0, rd * hv), d2z1(0.0, rv * hd);
        Complex d1z2(0.0, 0.0), d2z2(0.0, hd);
        MembranePoint p;
        p.z1 = s1.map(z1);
        p.z2 = s2.map(z2);
        p.d1z1 = s1.chain(z1, d1z1);
        p.d2z1 = s1.chain(z1, d2z1);
        p.d1z2 = s2.chain(z2, d1z2);
        p.d2z2 = s2.chain(z2, d2z2);
        return p;
    });
}

} // namespace detail

inline Diangle build_diangle(const FieldContext& F, const Cusp& p1, const Cusp& p2, const Cusp& p3,
                             const Cusp& p4) {
    if (cusp_equal(F, p1, p2)) throw std::invalid_argument("diangle: p1 = p2");
    if (cusp_equal(F, p4, p1) || cusp_equal(F, p4, p2))
        throw std::invalid_argument("diangle: p4 coincides with a vertex");
    MatrixK gamma = mobius_to_standard(F, p1, p2, p3);
    Cusp delta = gamma.act_cusp(F, p4);
    auto [n1, n2] = F.embed(delta.p);
    auto [d1, d2] = F.embed(delta.q);
    double e1 = n1 / d1, e2 = n2 / d2;

    Diangle out;
    out.symbol = {p1, p2, p3, p4, 1.0, std::abs(e1 / e2), 0, false};
    out.normalizer = gamma;
    double logratio = std::log(out.symbol.slope4);
    if (std::abs(logratio) < kDegenerateSlopeTolerance) {
        out.symbol.degenerate = true;
        out.membrane = Membrane::degenerate();
        return out;
    }
    out.symbol.orientation = logratio > 0 ? 1 : -1;
    MatrixK back = gamma.inverse(F);
    if (back.b.is_zero() && back.c.is_zero()) {
        // diagonal translate: every slot maps the imaginary rays to imaginary
        // rays, so the image is again a structured diangle with scaled slopes
        auto [a1, a2] = F.embed(back.a);
        auto [dd1, dd2] = F.embed(back.d);
        double l1 = std::abs(a1 / dd1), l2 = std::abs(a2 / dd2);
        out.membrane = Membrane::diangle(out.symbol.slope3 * l1 / l2,
                                         out.symbol.slope4 * l1 / l2, l2);
    } else {
        out.membrane = detail::translated_diangle_membrane(F, back, out.symbol.slope3,
                                                           out.symbol.slope4);
    }
    return out;
}

inline GeodesicTriangleSymbol build_triangle(const FieldContext& F, const Cusp& p1, const Cusp& p2,
                                             const Cusp& p3) {
    MatrixK gamma = mobius_to_standard(F, p1, p2, p3);
    return {p1, p2, p3, gamma.det_class(F)};
}

/// <{p1,p2;p3,p4}, f dz1^dz2>: plain integral of f over the diangle region.
inline IntegralResult pair_commutative(const FieldContext&, const Diangle& dia, const ExpForm2& f,
                                       const QuadOptions& opt) {
    if (dia.symbol.degenerate) return {};
    return membrane_integral_type_a({f}, dia.membrane, opt);
}

/**
 * <{p1,p2,p3}, f dz1^dz2>: zero for triangles on holomorphic curves; on an
 * anti-holomorphic curve the ideal triangle T(0,1,inf) is pulled back through
 * the normalizing map along the (conjugated) diagonal.
 */
inline IntegralResult pair_commutative(const FieldContext& F, const GeodesicTriangleSymbol& tri,
                                       const ExpForm2& f, const QuadOptions& opt) {
    MatrixK gamma = mobius_to_standard(F, tri.p1, tri.p2, tri.p3);
    MatrixK back = gamma.inverse(F);
    auto [s1, s2] = back.slots(F);
    const int n = opt.base.nodes_per_dim;
    const GaussRule& rule = gauss_legendre(n);

    // w = x + i y over the ideal triangle: x in [0,1], y >= sqrt(x - x^2);
    // x = sin^2(pi u / 2) makes the circular boundary analytic in u
    Complex total(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        double u = 0.5 + 0.5 * rule.node[i];
        double su = std::sin(0.5 * M_PI * u), cu = std::cos(0.5 * M_PI * u);
        double x = su * su;
        double wx = 0.5 * rule.weight[i] * M_PI * su * cu;
        double ylow = su * cu;
        for (int j = 0; j < n; ++j) {
            double v = 0.5 + 0.5 * rule.node[j];
            double wv = 0.5 * rule.weight[j];
            double y = ylow + v / (1.0 - v);
            double jac_y = 1.0 / ((1.0 - v) * (1.0 - v));
            Complex w(x, y);
            Complex z1 = s1.map(w), z2 = s2.map(w);
            // partials of (z1, z2) in (x, y)
            Complex dxz1 = s1.chain(w, Complex(1, 0)), dyz1 = s1.chain(w, Complex(0, 1));
            Complex dxz2 = s2.chain(w, Complex(1, 0)), dyz2 = s2.chain(w, Complex(0, 1));
            Complex det = dxz1 * dyz2 - dyz1 * dxz2;
            total += wx * wv * jac_y * f.eval(z1, z2) * det;
        }
    }
    IntegralResult r;
    r.value = total;
    return r;
}

/**
 * Sampled bound on the oscillation phase 2 pi (a1 |Re z1| + a2 |Re z2|) of a
 * single-term form over a membrane; quadrature effort grows with this number,
 * so callers can warn or reject wildly oscillatory configurations.
 */
inline double membrane_phase_bound(const Membrane& g, double a1, double a2, int grid = 7) {
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            double t1 = (i + 0.5) / grid, t2 = (j + 0.5) / grid;
            MembranePoint p = g.at(t1, t2);
            worst = std::max(worst, kTwoPi * (a1 * std::abs(p.z1.real()) +
                                              a2 * std::abs(p.z2.real())));
        }
    }
    return worst;
}

/**
 * Relations of the commutative symbols for one cusp configuration:
 *   3. vanishing of diangles with all four points on one curve,
 *   4. orientation sign flips under swapping p3,p4 or p1,p2,
 *   5. additivity  <{p1,p2;p3,p4}> + <{p1,p2;p4,p5}> = <{p1,p2;p3,p5}>,
 *   2. triangulation additivity for four points on one anti-holomorphic curve.
 */
inline Report verify_commutative_relations(const FieldContext& F,
                                           const std::vector<Cusp>& five_points,
                                           const std::vector<Cusp>& curve_points,
                                           const MatrixK& curve_map, const ExpForm2& f,
                                           const QuadOptions& opt, double tol_vanish = 1e-8,
                                           double tol_flip = 1e-8, double tol_add = 1e-7) {
    Report rep;
    const Cusp &q1 = five_points[0], &q2 = five_points[1], &q3 = five_points[2],
               &q4 = five_points[3], &q5 = five_points[4];

    // property 3: points on the curve curve_map^* Delta give a degenerate diangle
    {
        Cusp a = curve_map.act_cusp(F, curve_points[0]);
        Cusp b = curve_map.act_cusp(F, curve_points[1]);
        Cusp c = curve_map.act_cusp(F, curve_points[2]);
        Cusp d = curve_map.act_cusp(F, curve_points[3]);
        Diangle dia = build_diangle(F, a, b, c, d);
        double val = std::abs(pair_commutative(F, dia, f, opt).value);
        rep.add("prop3_one_curve_vanishes", val, tol_vanish);
        rep.add("prop3_degenerate_flag", dia.symbol.degenerate ? 0.0 : 1.0, 0.5);
    }

    // property 4: orientation
    {
        Complex base = pair_commutative(F, build_diangle(F, q1, q2, q3, q4), f, opt).value;
        Complex swap34 = pair_commutative(F, build_diangle(F, q1, q2, q4, q3), f, opt).value;
        Complex swap12 = pair_commutative(F, build_diangle(F, q2, q1, q3, q4), f, opt).value;
        double scale = std::max(std::abs(base), 1e-30);
        rep.add("prop4_swap_p3p4", std::abs(base + swap34) / scale, tol_flip);
        rep.add("prop4_swap_p1p2", std::abs(base + swap12) / scale, tol_flip);
    }

    // property 5: additivity in the last slot pair
    {
        Complex d34 = pair_commutative(F, build_diangle(F, q1, q2, q3, q4), f, opt).value;
        Complex d45 = pair_commutative(F, build_diangle(F, q1, q2, q4, q5), f, opt).value;
        Complex d35 = pair_commutative(F, build_diangle(F, q1, q2, q3, q5), f, opt).value;
        double scale = std::max({std::abs(d34), std::abs(d45), std::abs(d35), 1e-30});
        rep.add("prop5_additivity", std::abs(d34 + d45 - d35) / scale, tol_add);
        // p5 = p4 reduces to property 3
        Complex zero = pair_commutative(F, build_diangle(F, q1, q2, q4, q4), f, opt).value;
        rep.add("prop5_reduces_to_prop3", std::abs(zero), tol_vanish);
    }

    // property 2 on an anti-holomorphic curve (holomorphic curves pair to
    // zero): the two triangulations of the 4-gon coincide, equivalently the
    // alternating boundary chain of the 4 points integrates to zero. With the
    // simplicial signs of property 1 this is the orientation-consistent form.
    {
        Cusp a = curve_map.act_cusp(F, curve_points[0]);
        Cusp b = curve_map.act_cusp(F, curve_points[1]);
        Cusp c = curve_map.act_cusp(F, curve_points[2]);
        Cusp d = curve_map.act_cusp(F, curve_points[3]);
        auto t = [&](const Cusp& x, const Cusp& y, const Cusp& z) {
            return pair_commutative(F, build_triangle(F, x, y, z), f, opt).value;
        };
        Complex lhs = t(a, b, c) + t(a, c, d);
        Complex rhs = t(a, b, d) + t(b, c, d);
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        rep.add("prop2_triangulation", std::abs(lhs - rhs) / scale, tol_add);
    }
    return rep;
}

/**
 * Non-commutative symbol c^1: the generating series J(p1, p2; p3, gamma p3)
 * of type-b integrals over the diangle, truncated at `depth`. A degenerate
 * diangle yields the constant series 1.
 */
inline NCSeries nc_symbol_c1(const FieldContext& F, const Cusp& p1, const Cusp& p2, const Cusp& p3,
                             const MatrixK& gamma, const std::vector<ExpForm2>& forms, int depth,
                             const QuadOptions& opt) {
    Cusp gp3 = gamma.act_cusp(F, p3);
    if (cusp_equal(F, gp3, p3)) return NCSeries::one(std::max(depth, 1));
    Diangle dia = build_diangle(F, p1, p2, p3, gp3);
    if (dia.symbol.degenerate) return NCSeries::one(std::max(depth, 1));
    return generating_series_Jb(forms, dia.membrane, depth, opt);
}

/**
 * Composition of c^1 along the p4-chain through the shuffle glue: the three
 * diangles D(p3,p4), D(p4,p5), D(p3,p5) share (p1,p2), so in the common
 * normalized picture D(p3,p5) splits at the p4 leaf.
 */
inline Report verify_c1_composition(const FieldContext& F, const Cusp& p1, const Cusp& p2,
                                    const Cusp& p3, const Cusp& p4, const Cusp& p5,
                                    const std::vector<ExpForm2>& forms, int depth,
                                    const QuadOptions& opt, double tolerance = 1e-6) {
    Diangle d34 = build_diangle(F, p1, p2, p3, p4);
    Diangle d45 = build_diangle(F, p1, p2, p4, p5);
    Diangle d35 = build_diangle(F, p1, p2, p3, p5);
    // the p4 leaf sits at slope s4 inside the [s3, s5] sweep of D(p3,p5)
    MatrixK gamma = d35.normalizer;
    Cusp delta4 = gamma.act_cusp(F, p4);
    auto [n1, n2] = F.embed(delta4.p);
    auto [d1, d2] = F.embed(delta4.q);
    double s4 = std::abs((n1 / d1) / (n2 / d2));
    double split = std::log(s4 / d35.symbol.slope3) /
                   std::log(d35.symbol.slope4 / d35.symbol.slope3);
    if (!(split > 0.0 && split < 1.0))
        throw std::invalid_argument("verify_c1_composition: p4 leaf not interior");
    Report rep = verify_shuffle_glue_split(forms, d35.membrane, split, d34.membrane, d45.membrane,
                                           depth, opt, tolerance);
    // the other conceivable depth >= 2 composition, plain multiplication in
    // the ring R, is reported for comparison (informational, no tolerance)
    NCSeries j34 = generating_series_Jb(forms, d34.membrane, depth, opt);
    NCSeries j45 = generating_series_Jb(forms, d45.membrane, depth, opt);
    NCSeries j35 = generating_series_Jb(forms, d35.membrane, depth, opt);
    NCSeries gap = subtract(ring_product(j34, j45).truncated(depth), j35);
    rep.add("c1_ring_multiplication_reading_gap",
            gap.max_abs_coefficient() / std::max(j35.max_abs_coefficient(), 1e-30), 1e300);
    return rep;
}

} // namespace hms
