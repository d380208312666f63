#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hms/shuffle.hpp"

namespace hms {

using Complex = std::complex<double>;

/**
 * Truncated non-commutative series in X_1..X_m, Y_1..Y_m with [X_i, Y_j] = 0.
 *
 * Ring R: monomials (X-word, Y-word) of equal length with equal letter
 * multisets. Ring R': every letter additionally carries a domain tag in
 * {1,2}; balance holds per (letter, tag). The collapse phi : R' -> R drops
 * the tags and adds colliding coefficients.
 */

struct NCMonomial {
    std::vector<int> x, y;   // letters in 1..m

    int degree() const { return static_cast<int>(x.size()); }
    bool balanced() const {
        if (x.size() != y.size()) return false;
        auto xs = x, ys = y;
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        return xs == ys;
    }
    friend bool operator<(const NCMonomial& a, const NCMonomial& b) {
        if (a.x.size() != b.x.size()) return a.x.size() < b.x.size();
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    }
    friend bool operator==(const NCMonomial& a, const NCMonomial& b) {
        return a.x == b.x && a.y == b.y;
    }
    std::string to_string() const {
        std::string s;
        for (int v : x) s += "X" + std::to_string(v);
        for (int v : y) s += "Y" + std::to_string(v);
        return s.empty() ? "1" : s;
    }
};

struct NCMonomialPrime {
    std::vector<int> x, y;     // letters
    std::vector<int> xt, yt;   // domain tags, 1 or 2, parallel to x / y

    int degree() const { return static_cast<int>(x.size()); }
    bool balanced() const {
        if (x.size() != y.size() || xt.size() != x.size() || yt.size() != y.size()) return false;
        auto key = [](const std::vector<int>& w, const std::vector<int>& t) {
            std::vector<std::pair<int, int>> k(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) k[i] = {w[i], t[i]};
            std::sort(k.begin(), k.end());
            return k;
        };
        return key(x, xt) == key(y, yt);
    }
    friend bool operator<(const NCMonomialPrime& a, const NCMonomialPrime& b) {
        if (a.x.size() != b.x.size()) return a.x.size() < b.x.size();
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        if (a.xt != b.xt) return a.xt < b.xt;
        return a.yt < b.yt;
    }
    friend bool operator==(const NCMonomialPrime& a, const NCMonomialPrime& b) {
        return a.x == b.x && a.y == b.y && a.xt == b.xt && a.yt == b.yt;
    }
    NCMonomial collapse() const { return {x, y}; }
};

constexpr double kCoefficientPrune = 1e-15;

template <class Mono>
class SeriesT {
public:
    explicit SeriesT(int truncation_degree = 4) : degree_(truncation_degree) {}

    static SeriesT one(int truncation_degree) {
        SeriesT s(truncation_degree);
        s.terms_[Mono{}] = Complex(1.0, 0.0);
        return s;
    }

    int truncation_degree() const { return degree_; }
    const std::map<Mono, Complex>& terms() const { return terms_; }

    Complex coefficient(const Mono& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
    }
    Complex constant_term() const { return coefficient(Mono{}); }

    void add_term(const Mono& m, Complex c) {
        if (m.degree() > degree_) return;
        if (!m.balanced() && m.degree() > 0)
            throw std::invalid_argument("series: monomial violates the ring balance invariant");
        Complex& slot = terms_[m];
        slot += c;
        if (std::abs(slot) < kCoefficientPrune) terms_.erase(m);
    }

    friend SeriesT add(const SeriesT& a, const SeriesT& b) {
        require_same_degree(a, b);
        SeriesT r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }
    friend SeriesT scalar_multiply(Complex s, const SeriesT& a) {
        SeriesT r(a.degree_);
        for (const auto& [m, c] : a.terms_) r.add_term(m, s * c);
        return r;
    }
    friend SeriesT subtract(const SeriesT& a, const SeriesT& b) {
        return add(a, scalar_multiply(Complex(-1.0, 0.0), b));
    }

    SeriesT truncated(int new_degree) const {
        SeriesT r(new_degree);
        for (const auto& [m, c] : terms_)
            if (m.degree() <= new_degree) r.terms_[m] = c;
        return r;
    }

    double max_abs_coefficient() const {
        double r = 0;
        for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
        return r;
    }

    static void require_same_degree(const SeriesT& a, const SeriesT& b) {
        if (a.degree_ != b.degree_)
            throw std::invalid_argument("series: truncation degree mismatch");
    }

private:
    int degree_;
    std::map<Mono, Complex> terms_;
};

using NCSeries = SeriesT<NCMonomial>;
using NCSeriesPrime = SeriesT<NCMonomialPrime>;

/// phi : R' -> R, X_{i,1}, X_{i,2} -> X_i and likewise for Y; coefficients add.
inline NCSeries phi(const NCSeriesPrime& s) {
    NCSeries r(s.truncation_degree());
    for (const auto& [m, c] : s.terms()) r.add_term(m.collapse(), c);
    return r;
}

/// Multiplication in the ring R itself: X-words and Y-words concatenate.
/// This is NOT the composition law of the generating series (that one is the
/// shuffle recombination); it exists so the two readings can be compared.
inline NCSeries ring_product(const NCSeries& a, const NCSeries& b) {
    NCSeries::require_same_degree(a, b);
    NCSeries r(a.truncation_degree());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            if (ma.degree() + mb.degree() > r.truncation_degree()) continue;
            NCMonomial m = ma;
            m.x.insert(m.x.end(), mb.x.begin(), mb.x.end());
            m.y.insert(m.y.end(), mb.y.begin(), mb.y.end());
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

namespace detail {
/// Interleave two tagged words by the set-shuffle tau: output position tau(k)
/// receives the k-th letter of the concatenated blocks.
inline void interleave(const std::vector<int>& a, int tag_a,
                       const std::vector<int>& b, int tag_b,
                       const Permutation& tau,
                       std::vector<int>& word, std::vector<int>& tags) {
    const int i = static_cast<int>(a.size()), j = static_cast<int>(b.size());
    word.assign(i + j, 0);
    tags.assign(i + j, 0);
    for (int k = 0; k < i; ++k) { word[tau(k)] = a[k]; tags[tau(k)] = tag_a; }
    for (int k = 0; k < j; ++k) { word[tau(i + k)] = b[k]; tags[tau(i + k)] = tag_b; }
}
} // namespace detail

/**
 * Formal shuffle product of untagged series, landing in R': X-words are
 * interleaved over sh(i,j), Y-words independently, first-factor letters
 * tagged 1 and second-factor letters tagged 2. Coefficients multiply; the
 * integral recombination this encodes is validated in the membrane module.
 */
inline NCSeriesPrime shuffle_product(const NCSeries& a, const NCSeries& b) {
    NCSeries::require_same_degree(a, b);
    NCSeriesPrime r(a.truncation_degree());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            const int i = ma.degree(), j = mb.degree();
            if (i + j > r.truncation_degree()) continue;
            const auto taus = shuffles(i, j);
            for (const Permutation& tx : taus) {
                for (const Permutation& ty : taus) {
                    NCMonomialPrime m;
                    detail::interleave(ma.x, 1, mb.x, 2, tx, m.x, m.xt);
                    detail::interleave(ma.y, 1, mb.y, 2, ty, m.y, m.yt);
                    r.add_term(m, ca * cb);
                }
            }
        }
    }
    return r;
}

/// Word series in the free algebra on X_1..X_m (iterated path integrals, J^a).
class WordSeries {
public:
    explicit WordSeries(int truncation_degree = 4) : degree_(truncation_degree) {}
    static WordSeries one(int truncation_degree) {
        WordSeries s(truncation_degree);
        s.terms_[{}] = Complex(1.0, 0.0);
        return s;
    }

    int truncation_degree() const { return degree_; }
    const std::map<std::vector<int>, Complex>& terms() const { return terms_; }
    Complex coefficient(const std::vector<int>& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
    }

    void add_term(const std::vector<int>& w, Complex c) {
        if (static_cast<int>(w.size()) > degree_) return;
        Complex& slot = terms_[w];
        slot += c;
        if (std::abs(slot) < kCoefficientPrune) terms_.erase(w);
    }

    /// Concatenation product, truncated.
    friend WordSeries operator*(const WordSeries& a, const WordSeries& b) {
        if (a.degree_ != b.degree_) throw std::invalid_argument("word series: degree mismatch");
        WordSeries r(a.degree_);
        for (const auto& [wa, ca] : a.terms_) {
            for (const auto& [wb, cb] : b.terms_) {
                if (wa.size() + wb.size() > static_cast<std::size_t>(r.degree_)) continue;
                std::vector<int> w = wa;
                w.insert(w.end(), wb.begin(), wb.end());
                r.add_term(w, ca * cb);
            }
        }
        return r;
    }
    friend WordSeries operator+(const WordSeries& a, const WordSeries& b) {
        WordSeries r = a;
        for (const auto& [w, c] : b.terms_) r.add_term(w, c);
        return r;
    }
    friend WordSeries operator-(const WordSeries& a, const WordSeries& b) {
        WordSeries r = a;
        for (const auto& [w, c] : b.terms_) r.add_term(w, -c);
        return r;
    }

    /// Inverse of a series with constant term 1 (truncated Neumann sum).
    WordSeries inverse() const {
        if (std::abs(coefficient({}) - Complex(1.0, 0.0)) > 1e-12)
            throw std::domain_error("word series: inverse needs constant term 1");
        WordSeries n = WordSeries::one(degree_) - *this;   // nilpotent part, negated
        WordSeries acc = WordSeries::one(degree_);
        WordSeries pw = WordSeries::one(degree_);
        for (int k = 1; k <= degree_; ++k) {
            pw = pw * n;
            acc = acc + pw;
        }
        return acc;
    }

    double max_abs_coefficient() const {
        double r = 0;
        for (const auto& [w, c] : terms_) r = std::max(r, std::abs(c));
        return r;
    }

private:
    int degree_;
    std::map<std::vector<int>, Complex> terms_;
};

} // namespace hms
