#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"

namespace rough_taylor {

// A word over the alphabet {1,...,m}. Indexes both an iterated integral x^alpha
// and an iterated vector field applied to the identity.
using MultiIndex = std::vector<int>;

inline std::string to_string(const MultiIndex& alpha) {
    std::string s;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(alpha[i]);
    }
    return s;
}

inline void validate_word(const MultiIndex& alpha, int m) {
    if (alpha.empty()) throw std::invalid_argument("multi-index must be nonempty");
    for (int a : alpha)
        if (a < 1 || a > m) throw std::invalid_argument("multi-index letter outside [1,m]");
}

// A bijection on {1,...,r}, stored as images[i-1] = value of i.
struct Permutation {
    std::vector<int> images;

    int size() const { return static_cast<int>(images.size()); }
    int operator()(int i) const { return images[static_cast<std::size_t>(i - 1)]; }

    Permutation inverse() const {
        Permutation inv;
        inv.images.assign(images.size(), 0);
        for (int i = 1; i <= size(); ++i) inv.images[static_cast<std::size_t>((*this)(i)-1)] = i;
        return inv;
    }

    static Permutation identity(int r) {
        Permutation p;
        p.images.resize(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) p.images[static_cast<std::size_t>(i)] = i + 1;
        return p;
    }

    bool is_valid() const {
        std::vector<char> seen(images.size(), 0);
        for (int v : images) {
            if (v < 1 || v > size() || seen[static_cast<std::size_t>(v - 1)]) return false;
            seen[static_cast<std::size_t>(v - 1)] = 1;
        }
        return true;
    }

    auto operator<=>(const Permutation&) const = default;
};

// alpha o rho = (alpha_{rho(1)}, ..., alpha_{rho(r)}).
inline MultiIndex compose(const MultiIndex& alpha, const Permutation& rho) {
    MultiIndex out(alpha.size());
    for (int i = 1; i <= rho.size(); ++i) out[static_cast<std::size_t>(i - 1)] = alpha[static_cast<std::size_t>(rho(i) - 1)];
    return out;
}

// All m^r words of length r in lexicographic order.
inline std::vector<MultiIndex> enumerate_gamma(int r, int m) {
    if (r < 1 || m < 1) throw std::invalid_argument("enumerate_gamma: r,m must be >= 1");
    if (r * std::log(static_cast<double>(m)) > std::log(static_cast<double>(kEnumerationBudget)))
        throw config_error("enumeration too large");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(std::pow(m, r)));
    MultiIndex word(static_cast<std::size_t>(r), 1);
    while (true) {
        out.push_back(word);
        int i = r - 1;
        while (i >= 0 && word[static_cast<std::size_t>(i)] == m) {
            word[static_cast<std::size_t>(i)] = 1;
            --i;
        }
        if (i < 0) break;
        ++word[static_cast<std::size_t>(i)];
    }
    return out;
}

namespace detail {

// Emits every permutation of {1..r} whose images are assigned position by position,
// pruning with `admissible(position, image, partial)`.
template <typename Admissible, typename Emit>
void backtrack_permutations(int r, Admissible&& admissible, Emit&& emit) {
    std::vector<int> images(static_cast<std::size_t>(r), 0);
    std::vector<char> used(static_cast<std::size_t>(r + 1), 0);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos > r) {
            Permutation p;
            p.images = images;
            emit(p);
            return;
        }
        for (int v = 1; v <= r; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            if (!admissible(pos, v, images)) continue;
            used[static_cast<std::size_t>(v)] = 1;
            images[static_cast<std::size_t>(pos - 1)] = v;
            self(self, pos + 1);
            images[static_cast<std::size_t>(pos - 1)] = 0;
            used[static_cast<std::size_t>(v)] = 0;
        }
    };
    rec(rec, 1);
}

inline void validate_breakpoints(const std::vector<int>& seq, int r, const char* name) {
    if (seq.empty()) throw std::invalid_argument(std::string(name) + " must be nonempty");
    if (seq.back() != r) throw std::invalid_argument(std::string(name) + " must end at r");
    int prev = 0;
    for (int v : seq) {
        if (v <= prev) throw std::invalid_argument(std::string(name) + " must be strictly increasing, >= 1");
        prev = v;
    }
}

}  // namespace detail

// Sh(gamma', gamma''): permutations rho on {1..r'+r''} preserving the internal order of
// positions {1..r'} and of {r'+1..r'+r''}. Built by choosing the image positions of the
// first block; cardinality binomial(r'+r'', r').
inline std::vector<Permutation> shuffles(const MultiIndex& gamma1, const MultiIndex& gamma2) {
    const int r1 = static_cast<int>(gamma1.size());
    const int r2 = static_cast<int>(gamma2.size());
    const int r = r1 + r2;
    if (r1 < 1 || r2 < 1) throw std::invalid_argument("shuffles: words must be nonempty");
    if (binomial(r, r1) > kEnumerationBudget) throw config_error("enumeration too large");
    std::vector<Permutation> out;
    std::vector<char> mask(static_cast<std::size_t>(r), 0);
    std::fill(mask.begin(), mask.begin() + r1, 1);
    std::sort(mask.begin(), mask.end(), std::greater<char>());
    // mask selects which target slots receive the first block, in order
    do {
        Permutation p;
        p.images.assign(static_cast<std::size_t>(r), 0);
        int i1 = 1, i2 = r1 + 1;
        for (int pos = 1; pos <= r; ++pos) {
            if (mask[static_cast<std::size_t>(pos - 1)])
                p.images[static_cast<std::size_t>(i1++ - 1)] = pos;
            else
                p.images[static_cast<std::size_t>(i2++ - 1)] = pos;
        }
        out.push_back(std::move(p));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    std::sort(out.begin(), out.end());
    return out;
}

// Xi_r(tau): permutations keeping the order of tau_1 < ... < tau_p (Rule 4) and the order
// inside each block I_i = {tau_{i-1}+1, ..., tau_i} (Rule 5). Every member fixes r.
// With `ls` nonempty this is the constrained family Xi_r(l; tau): rho(tau_i) = l_i.
inline std::vector<Permutation> xi_set(const std::vector<int>& taus, int r,
                                       const std::vector<int>& ls = {}) {
    detail::validate_breakpoints(taus, r, "taus");
    if (!ls.empty()) {
        detail::validate_breakpoints(ls, r, "ls");
        if (ls.size() != taus.size()) throw std::invalid_argument("ls and taus must have equal length");
    }
    if (factorial(r) > static_cast<double>(kEnumerationBudget)) throw config_error("enumeration too large");

    const int p = static_cast<int>(taus.size());
    std::vector<int> block_of(static_cast<std::size_t>(r + 1), 0);
    std::vector<int> pinned(static_cast<std::size_t>(r + 1), 0);  // pinned[tau_i] = l_i when constrained
    {
        int b = 0;
        for (int pos = 1; pos <= r; ++pos) {
            block_of[static_cast<std::size_t>(pos)] = b;
            if (pos == taus[static_cast<std::size_t>(b)]) ++b;
        }
        if (!ls.empty())
            for (int i = 0; i < p; ++i) pinned[static_cast<std::size_t>(taus[static_cast<std::size_t>(i)])] = ls[static_cast<std::size_t>(i)];
    }

    std::vector<Permutation> out;
    detail::backtrack_permutations(
        r,
        [&](int pos, int v, const std::vector<int>& images) {
            if (pinned[static_cast<std::size_t>(pos)] && v != pinned[static_cast<std::size_t>(pos)]) return false;
            // Rule 5: order within the block of pos
            const int b = block_of[static_cast<std::size_t>(pos)];
            const int block_start = (b == 0) ? 1 : taus[static_cast<std::size_t>(b - 1)] + 1;
            for (int y = block_start; y < pos; ++y)
                if (images[static_cast<std::size_t>(y - 1)] >= v) return false;
            // Rule 4: order of the block ends
            if (pos == taus[static_cast<std::size_t>(b)]) {
                for (int i = 0; i < b; ++i)
                    if (images[static_cast<std::size_t>(taus[static_cast<std::size_t>(i)] - 1)] >= v) return false;
            }
            return true;
        },
        [&](const Permutation& p2) { out.push_back(p2); });
    std::sort(out.begin(), out.end());
    return out;
}

// Theta_r(l): permutations satisfying Rule 1 (mu(l_i) increasing, mu(l_p) = r so the induced
// partition covers {1..r}) and Rule 2 (order preservation within the mu-dependent partition
// I_1 = {1..mu(l_1)}, I_i = {mu(l_{i-1})+1..mu(l_i)}). With `taus` nonempty this is the
// constrained family Theta_r(l; tau): mu(l_i) = tau_i.
inline std::vector<Permutation> theta_set(const std::vector<int>& ls, int r,
                                          const std::vector<int>& taus = {}) {
    detail::validate_breakpoints(ls, r, "ls");
    if (!taus.empty()) {
        detail::validate_breakpoints(taus, r, "taus");
        if (ls.size() != taus.size()) throw std::invalid_argument("ls and taus must have equal length");
    }
    if (factorial(r) > static_cast<double>(kEnumerationBudget)) throw config_error("enumeration too large");

    const int p = static_cast<int>(ls.size());
    std::vector<char> is_breakpoint(static_cast<std::size_t>(r + 1), 0);
    std::vector<int> break_rank(static_cast<std::size_t>(r + 1), -1);
    for (int i = 0; i < p; ++i) {
        is_breakpoint[static_cast<std::size_t>(ls[static_cast<std::size_t>(i)])] = 1;
        break_rank[static_cast<std::size_t>(ls[static_cast<std::size_t>(i)])] = i;
    }

    std::vector<Permutation> out;
    detail::backtrack_permutations(
        r,
        [&](int pos, int v, const std::vector<int>& images) {
            if (is_breakpoint[static_cast<std::size_t>(pos)]) {
                const int i = break_rank[static_cast<std::size_t>(pos)];
                if (!taus.empty() && v != taus[static_cast<std::size_t>(i)]) return false;
                // Rule 1, plus mu(l_p) = r so that (e.3.3) partitions {1..r}
                if (i > 0 && images[static_cast<std::size_t>(ls[static_cast<std::size_t>(i - 1)] - 1)] >= v) return false;
                if (i == p - 1 && v != r) return false;
            }
            return true;
        },
        [&](const Permutation& mu) {
            // Rule 2 needs all images of the breakpoints, so it is checked on complete candidates.
            std::vector<int> bounds;  // partition upper bounds mu(l_1) < ... < mu(l_p) = r
            bounds.reserve(static_cast<std::size_t>(p));
            for (int i = 0; i < p; ++i) bounds.push_back(mu(ls[static_cast<std::size_t>(i)]));
            auto block_index = [&](int value) {
                int b = 0;
                while (bounds[static_cast<std::size_t>(b)] < value) ++b;
                return b;
            };
            for (int y = 1; y <= mu.size(); ++y)
                for (int y2 = y + 1; y2 <= mu.size(); ++y2)
                    if (block_index(mu(y)) == block_index(mu(y2)) && mu(y) > mu(y2)) return;
            out.push_back(mu);
        });
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Permutation> xi_with_constraints(const std::vector<int>& ls,
                                                    const std::vector<int>& taus) {
    return xi_set(taus, taus.back(), ls);
}

inline std::vector<Permutation> theta_with_constraints(const std::vector<int>& ls,
                                                       const std::vector<int>& taus) {
    return theta_set(ls, ls.back(), taus);
}

// Inverse duality between the constrained families: Xi_r(l;tau) = {rho : rho^{-1} in Theta_r(l;tau)}.
inline bool check_duality(const std::vector<int>& ls, const std::vector<int>& taus) {
    auto xi = xi_with_constraints(ls, taus);
    auto theta = theta_with_constraints(ls, taus);
    if (xi.size() != theta.size()) return false;
    std::vector<Permutation> inv;
    inv.reserve(xi.size());
    for (const auto& rho : xi) inv.push_back(rho.inverse());
    std::sort(inv.begin(), inv.end());
    return inv == theta;
}

// alpha is contained in alpha_prime when deleting one letter of alpha_prime yields alpha.
inline bool contains(const MultiIndex& alpha, const MultiIndex& alpha_prime) {
    if (alpha_prime.size() != alpha.size() + 1) throw std::invalid_argument("contains: |alpha'| must equal |alpha|+1");
    for (std::size_t skip = 0; skip < alpha_prime.size(); ++skip) {
        bool match = true;
        for (std::size_t i = 0, j = 0; i < alpha_prime.size(); ++i) {
            if (i == skip) continue;
            if (alpha_prime[i] != alpha[j++]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

// A finite set of multi-indices defining an incomplete Taylor scheme.
struct IndexSet {
    std::set<MultiIndex> members;
    int alphabet_size = 0;

    IndexSet() = default;
    IndexSet(std::set<MultiIndex> words, int m) : members(std::move(words)), alphabet_size(m) {
        if (members.empty()) throw std::invalid_argument("IndexSet must be nonempty");
        for (const auto& w : members) validate_word(w, m);
    }

    // Possibly-empty set, used by the rate-set constructors; schemes reject empty sets.
    static IndexSet make_unchecked(std::set<MultiIndex> words, int m) {
        IndexSet s;
        s.members = std::move(words);
        s.alphabet_size = m;
        return s;
    }

    bool empty() const { return members.empty(); }

    int max_length() const {
        std::size_t n = 0;
        for (const auto& w : members) n = std::max(n, w.size());
        return static_cast<int>(n);
    }

    bool contains_word(const MultiIndex& w) const { return members.count(w) > 0; }

    bool operator==(const IndexSet& other) const = default;

    static IndexSet all_words_up_to(int max_len, int m) {
        std::set<MultiIndex> words;
        for (int r = 1; r <= max_len; ++r)
            for (auto& w : enumerate_gamma(r, m)) words.insert(std::move(w));
        return IndexSet(std::move(words), m);
    }

    static IndexSet letters(int m) { return all_words_up_to(1, m); }
};

// Checks the hierarchical structure on the finite set via the contrapositive:
// deleting one letter from any member of length >= 2 must land back in the set.
// probe_depth >= N+1 additionally scans absent words up to probe_depth-1 and verifies
// every one-letter insertion of an absent word stays absent.
inline bool is_hierarchical(const IndexSet& set, int probe_depth = 0) {
    const int N = set.max_length();
    if (probe_depth < N + 1) probe_depth = N + 1;
    for (const auto& w : set.members) {
        if (w.size() < 2) continue;
        for (std::size_t skip = 0; skip < w.size(); ++skip) {
            MultiIndex sub;
            sub.reserve(w.size() - 1);
            for (std::size_t i = 0; i < w.size(); ++i)
                if (i != skip) sub.push_back(w[i]);
            if (!set.contains_word(sub)) return false;
        }
    }
    // Absent words of length <= probe_depth-1: every word containing them must be absent.
    // Insertions of an absent word of length >= N+1 cannot be members (length > N), so the
    // scan stops at length N.
    for (int r = 1; r < std::min(probe_depth, N + 1); ++r) {
        for (const auto& w : enumerate_gamma(r, set.alphabet_size)) {
            if (set.contains_word(w)) continue;
            for (std::size_t pos = 0; pos <= w.size(); ++pos) {
                for (int letter = 1; letter <= set.alphabet_size; ++letter) {
                    MultiIndex up(w);
                    up.insert(up.begin() + static_cast<std::ptrdiff_t>(pos), letter);
                    if (set.contains_word(up)) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace rough_taylor
