#ifndef VOLCUT_ENTROPY_APPROX_HPP
#define VOLCUT_ENTROPY_APPROX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/energy.hpp"

namespace volcut {

/// One min-of-two-affine piece of the polygonal entropy approximation:
///   t(c) = min(a_lower * c, a_upper * c + b_upper)
/// Concavity requires a_lower >= a_upper.
struct TriangleTerm {
    double a_lower = 0.0;
    double a_upper = 0.0;
    double b_upper = 0.0;
    double c_lo = 0.0;
    double c_hi = 0.0;

    double value(double c) const { return std::min(a_lower * c, a_upper * c + b_upper); }

    TriangleTerm scaled(double f) const {
        return {f * a_lower, f * a_upper, f * b_upper, c_lo, c_hi};
    }
};

/// Sum-of-triangle-terms approximation of g(c) = -c * ln(c / N), the
/// contribution of one segment of cardinality c to |Omega| * H(S).
struct PolygonalApprox {
    std::vector<TriangleTerm> terms;
    std::vector<long long> breakpoints;  // cardinalities where the approximation is exact
    long long domain_size = 0;           // N
    double sup_error = 0.0;              // max |approx(c) - g(c)| over integer c in [0, N]

    double value(long long c) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.value(double(c));
        return s;
    }
};

inline double entropy_g(long long c, long long n) {
    if (c <= 0 || c >= n) return 0.0;
    return -double(c) * std::log(double(c) / double(n));
}

/// Builds the polygonal approximation of g(c) = -c ln(c/N) on [0, N].
///
/// Breakpoints sit at 0, N and num_breakpoints - 2 interior cardinalities
/// geometrically spaced from 1 (dense near 0, where g has unbounded slope).
/// The sum of terms equals the piecewise-linear interpolant of g through the
/// breakpoints, decomposed into saturating ramps plus one shared linear term.
inline PolygonalApprox build_entropy_approx(long long n, int num_breakpoints) {
    if (n < 1) throw Error(Errc::BadInput, "domain size must be >= 1");
    if (num_breakpoints < 3) throw Error(Errc::BadInput, "need at least 3 breakpoints");

    PolygonalApprox approx;
    approx.domain_size = n;

    std::vector<long long> bp;
    bp.push_back(0);
    int interior = num_breakpoints - 2;
    for (int j = 0; j < interior; ++j) {
        double t = interior == 1 ? 0.0 : double(j) / double(interior - 1);
        long long c = llround(std::pow(double(n), t));
        bp.push_back(std::clamp(c, 1ll, n));
    }
    bp.push_back(n);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    approx.breakpoints = bp;

    const int segs = int(bp.size()) - 1;
    std::vector<double> slope(segs);
    for (int j = 0; j < segs; ++j)
        slope[j] = (entropy_g(bp[j + 1], n) - entropy_g(bp[j], n)) / double(bp[j + 1] - bp[j]);

    // f(c) = slope[last] * c + sum_j min(delta_j * c, delta_j * bp[j+1])
    for (int j = 0; j + 1 < segs; ++j) {
        double delta = slope[j] - slope[j + 1];
        if (delta < 0.0) delta = 0.0;  // guards fp noise; chords of g are concave
        approx.terms.push_back({delta, 0.0, delta * double(bp[j + 1]), 0.0, double(n)});
    }
    approx.terms.push_back({slope[segs - 1], slope[segs - 1], 0.0, 0.0, double(n)});

    for (long long c = 0; c <= n; ++c)
        approx.sup_error = std::max(approx.sup_error, std::abs(approx.value(c) - entropy_g(c, n)));
    return approx;
}

/// Pairwise reduction of one triangle term: an auxiliary binary variable z
/// selects the active affine piece, and each listed element contributes a
/// submodular potential over (z, x_element). All potentials are explicit so
/// callers can wire them into a flow graph or inspect them directly.
struct PairwiseFragment {
    double aux_cost0 = 0.0;  // unary potential on z = 0
    double aux_cost1 = 0.0;  // unary potential on z = 1

    struct PairTerm {
        int node;  // element index
        double e00, e01, e10, e11;  // theta(z, x)
    };
    std::vector<PairTerm> pairs;

    // originating term, kept for closed-form evaluation
    double a_lower = 0.0, a_upper = 0.0, b_upper = 0.0;
    long long base = 0;           // cardinality contributed by elements not in pairs
    bool count_complement = false;  // indicator is (1 - x) instead of x

    long long cardinality(std::span<const std::uint8_t> x) const {
        long long c = base;
        for (const auto& p : pairs) {
            bool on = x[std::size_t(p.node)] != 0;
            if (count_complement) on = !on;
            c += on ? 1 : 0;
        }
        return c;
    }

    double closed_form(long long c) const {
        return std::min(a_lower * double(c), a_upper * double(c) + b_upper);
    }

    /// Value with the auxiliary variable fixed (sum of the emitted potentials).
    double table_value(bool z, std::span<const std::uint8_t> x) const {
        double s = z ? aux_cost1 : aux_cost0;
        for (const auto& p : pairs) {
            bool on = x[std::size_t(p.node)] != 0;
            if (!z) s += on ? p.e01 : p.e00;
            else s += on ? p.e11 : p.e10;
        }
        return s;
    }

    double min_value(std::span<const std::uint8_t> x) const {
        return std::min(table_value(false, x), table_value(true, x));
    }
};

namespace detail {

inline PairwiseFragment make_fragment(const TriangleTerm& t, std::span<const int> nodes,
                                      long long base, bool count_complement) {
    if (t.a_lower < t.a_upper)
        throw Error(Errc::NotSubmodular, "triangle term is not concave (a_lower < a_upper)");

    PairwiseFragment f;
    f.a_lower = t.a_lower;
    f.a_upper = t.a_upper;
    f.b_upper = t.b_upper;
    f.base = base;
    f.count_complement = count_complement;
    f.pairs.reserve(nodes.size());
    if (!count_complement) {
        // counting x: z = 0 selects the lower piece
        f.aux_cost0 = t.a_lower * double(base);
        f.aux_cost1 = t.a_upper * double(base) + t.b_upper;
        for (int v : nodes) f.pairs.push_back({v, 0.0, t.a_lower, 0.0, t.a_upper});
    } else {
        // counting (1 - x): z = 1 selects the lower piece
        f.aux_cost0 = t.a_upper * double(base) + t.b_upper;
        f.aux_cost1 = t.a_lower * double(base);
        for (int v : nodes) f.pairs.push_back({v, t.a_upper, 0.0, t.a_lower, 0.0});
    }
    return f;
}

}  // namespace detail

/// Reduction for a binary labeling over elements 0..num_elements-1:
/// |S^1| counts x_p, |S^0| counts (1 - x_p).
inline PairwiseFragment reduce_binary(const TriangleTerm& t, int k, int num_elements) {
    if (k != 0 && k != 1) throw Error(Errc::NotBinary, "binary reduction needs k in {0,1}");
    std::vector<int> nodes(std::size_t(num_elements), 0);
    for (int i = 0; i < num_elements; ++i) nodes[std::size_t(i)] = i;
    return detail::make_fragment(t, nodes, 0, /*count_complement=*/k == 0);
}

/// Reduction for an alpha-expansion move from labeling S_t. Expansion
/// variables x_p are indexed by element; elements currently labeled alpha
/// keep it and enter the k = alpha cardinality as a constant base.
inline PairwiseFragment reduce_expansion(const TriangleTerm& t, int k, int alpha,
                                         const Labeling& s_t) {
    std::vector<int> nodes;
    long long base = 0;
    if (k == alpha) {
        for (int p = 0; p < int(s_t.assignments.size()); ++p) {
            if (s_t.assignments[std::size_t(p)] == alpha) ++base;
            else nodes.push_back(p);
        }
        return detail::make_fragment(t, nodes, base, /*count_complement=*/false);
    }
    for (int p = 0; p < int(s_t.assignments.size()); ++p)
        if (s_t.assignments[std::size_t(p)] == k) nodes.push_back(p);
    return detail::make_fragment(t, nodes, 0, /*count_complement=*/true);
}

}  // namespace volcut

#endif  // VOLCUT_ENTROPY_APPROX_HPP
