#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hms {

/// One-line permutation of {1,...,m}; stored 0-indexed, displayed 1-indexed.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> images) : m_(std::move(images)) {
        std::vector<char> seen(m_.size(), 0);
        for (int v : m_) {
            if (v < 0 || v >= static_cast<int>(m_.size()) || seen[v])
                throw std::invalid_argument("Permutation: not a bijection");
            seen[v] = 1;
        }
    }
    static Permutation identity(int n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return Permutation(std::move(v));
    }
    /// From 1-indexed one-line notation.
    static Permutation from_one_line(const std::vector<int>& images1) {
        std::vector<int> v(images1.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = images1[i] - 1;
        return Permutation(std::move(v));
    }

    int size() const { return static_cast<int>(m_.size()); }
    int operator()(int i) const { return m_[i]; }
    const std::vector<int>& images() const { return m_; }

    std::vector<int> one_line() const {
        std::vector<int> v(m_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = m_[i] + 1;
        return v;
    }
    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < m_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(m_[i] + 1);
        }
        return s + ")";
    }

    friend bool operator==(const Permutation& p, const Permutation& q) { return p.m_ == q.m_; }
    friend bool operator!=(const Permutation& p, const Permutation& q) { return !(p == q); }
    friend bool operator<(const Permutation& p, const Permutation& q) { return p.m_ < q.m_; }

    bool is_identity() const {
        for (std::size_t i = 0; i < m_.size(); ++i)
            if (m_[i] != static_cast<int>(i)) return false;
        return true;
    }

private:
    std::vector<int> m_;
};

/// (p o q)(i) = p(q(i))
inline Permutation compose(const Permutation& p, const Permutation& q) {
    if (p.size() != q.size()) throw std::invalid_argument("compose: size mismatch");
    std::vector<int> v(p.size());
    for (int i = 0; i < p.size(); ++i) v[i] = p(q(i));
    return Permutation(std::move(v));
}

inline Permutation invert(const Permutation& p) {
    std::vector<int> v(p.size());
    for (int i = 0; i < p.size(); ++i) v[p(i)] = i;
    return Permutation(std::move(v));
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/**
 * sh(i,j): permutations rho of {1,...,i+j} increasing on the first i and on
 * the last j positions. Lexicographic in the image set of the first block,
 * hence deterministic. |sh(i,j)| = C(i+j, i).
 */
inline std::vector<Permutation> shuffles(int i, int j) {
    if (i < 0 || j < 0) throw std::invalid_argument("shuffles: negative block size");
    const int m = i + j;
    std::vector<Permutation> out;
    std::vector<int> pick(i);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
        std::vector<int> img(m);
        std::vector<char> used(m, 0);
        for (int k = 0; k < i; ++k) { img[k] = pick[k]; used[pick[k]] = 1; }
        int pos = i;
        for (int v = 0; v < m; ++v)
            if (!used[v]) img[pos++] = v;
        out.emplace_back(std::move(img));
        // next i-combination of {0..m-1}
        int t = i - 1;
        while (t >= 0 && pick[t] == m - i + t) --t;
        if (t < 0) break;
        ++pick[t];
        for (int k = t + 1; k < i; ++k) pick[k] = pick[k - 1] + 1;
    }
    return out;
}

/// rho' on {1..i} and rho'' on {i+1..i+j} joined to one permutation of {1..i+j}.
inline Permutation block_union(const Permutation& rho1, const Permutation& rho2) {
    const int i = rho1.size(), j = rho2.size();
    std::vector<int> v(i + j);
    for (int k = 0; k < i; ++k) v[k] = rho1(k);
    for (int k = 0; k < j; ++k) v[i + k] = i + rho2(k);
    return Permutation(std::move(v));
}

/**
 * sh(rho', rho''): the permutations obtained by merging the two blocks with a
 * set-shuffle while keeping each block's internal order, rho = tau o (rho' u rho'').
 * rho'' is given as a permutation of size j acting on the shifted block
 * {i+1,...,i+j}. Size = C(i+j, i).
 */
inline std::vector<Permutation> shuffle_of_permutations(const Permutation& rho1,
                                                        const Permutation& rho2) {
    const Permutation u = block_union(rho1, rho2);
    std::vector<Permutation> out;
    for (const Permutation& tau : shuffles(rho1.size(), rho2.size()))
        out.push_back(compose(tau, u));
    return out;
}

/// All m! permutations, lexicographic. Small m only.
inline std::vector<Permutation> all_permutations(int m) {
    std::vector<int> v(m);
    std::iota(v.begin(), v.end(), 0);
    std::vector<Permutation> out;
    do out.emplace_back(v);
    while (std::next_permutation(v.begin(), v.end()));
    return out;
}

} // namespace hms
