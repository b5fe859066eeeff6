#ifndef VOLCUT_BINARY_ENERGY_HPP
#define VOLCUT_BINARY_ENERGY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/entropy_approx.hpp"
#include "volcut/maxflow.hpp"

namespace volcut {

/// Pseudo-boolean energy over binary variables: unary terms, submodular
/// pairwise terms, and min-of-affine cardinality fragments. Assembled in
/// doubles, then quantized to integer capacities for the exact min-cut.
struct BinaryProblem {
    int num_vars = 0;
    double constant = 0.0;
    std::vector<std::array<double, 2>> unary;  // (e0, e1) per variable

    struct PairPotential {
        int u, v;
        double e00, e01, e10, e11;
    };
    std::vector<PairPotential> pairs;
    std::vector<PairwiseFragment> fragments;  // node ids refer to variables

    explicit BinaryProblem(int n = 0) : num_vars(n), unary(std::size_t(n), {0.0, 0.0}) {}

    void add_unary(int v, double e0, double e1) {
        unary[std::size_t(v)][0] += e0;
        unary[std::size_t(v)][1] += e1;
    }
};

/// The same energy with every coefficient scaled to integers by a fixed
/// quantum (1e-6 of the largest finite coefficient magnitude). Infinite
/// costs map to a sentinel strictly larger than any achievable cut.
struct QuantizedBinaryProblem {
    double quantum = 1.0;
    int num_vars = 0;
    long long constant = 0;
    long long int_inf = 0;
    std::vector<std::array<long long, 2>> unary;

    struct QPair {
        int u, v;
        std::array<long long, 4> e;  // e00, e01, e10, e11
    };
    std::vector<QPair> pairs;

    struct QFragment {
        long long a_lower, a_upper, b_upper;
        long long base;
        bool count_complement;
        std::vector<int> nodes;
    };
    std::vector<QFragment> fragments;

    /// Objective value of a variable assignment, fragments evaluated in
    /// closed form (min over each auxiliary variable).
    long long evaluate(std::span<const std::uint8_t> x) const {
        long long e = constant;
        for (int v = 0; v < num_vars; ++v) e += unary[std::size_t(v)][x[std::size_t(v)] ? 1 : 0];
        for (const auto& p : pairs)
            e += p.e[std::size_t((x[std::size_t(p.u)] ? 2 : 0) + (x[std::size_t(p.v)] ? 1 : 0))];
        for (const auto& f : fragments) {
            long long c = f.base;
            for (int v : f.nodes) {
                bool on = x[std::size_t(v)] != 0;
                if (f.count_complement) on = !on;
                c += on ? 1 : 0;
            }
            e += std::min(f.a_lower * c, f.a_upper * c + f.b_upper);
        }
        return e;
    }
};

inline QuantizedBinaryProblem quantize(const BinaryProblem& p) {
    double max_mag = 0.0;
    auto consider = [&max_mag](double v) {
        if (std::isfinite(v)) max_mag = std::max(max_mag, std::abs(v));
    };
    // the constant does not affect the argmin and must not inflate the quantum
    for (const auto& u : p.unary) {
        consider(u[0]);
        consider(u[1]);
    }
    for (const auto& pr : p.pairs) {
        consider(pr.e00);
        consider(pr.e01);
        consider(pr.e10);
        consider(pr.e11);
    }
    for (const auto& f : p.fragments) {
        consider(f.a_lower);
        consider(f.a_upper);
        consider(f.b_upper);
    }

    QuantizedBinaryProblem q;
    // 1e-9 of the largest coefficient: coarse enough for exact 64-bit sums,
    // fine enough that unary terms survive next to near-infinite smoothness
    q.quantum = max_mag > 0 ? max_mag * 1e-9 : 1.0;
    q.num_vars = p.num_vars;

    auto scale = [&q](double v) -> long long {
        return llround(v / q.quantum);  // finite inputs only
    };

    long long finite_sum = 0;
    auto tally = [&finite_sum](long long v) { finite_sum += std::abs(v); };

    q.constant = std::isfinite(p.constant) ? scale(p.constant) : 0;
    tally(q.constant);

    q.unary.resize(std::size_t(p.num_vars), {0, 0});
    std::vector<std::array<bool, 2>> unary_inf(std::size_t(p.num_vars), {false, false});
    for (int v = 0; v < p.num_vars; ++v)
        for (int b = 0; b < 2; ++b) {
            double val = p.unary[std::size_t(v)][std::size_t(b)];
            if (std::isfinite(val)) {
                q.unary[std::size_t(v)][std::size_t(b)] = scale(val);
                tally(q.unary[std::size_t(v)][std::size_t(b)]);
            } else {
                unary_inf[std::size_t(v)][std::size_t(b)] = true;
            }
        }

    q.pairs.reserve(p.pairs.size());
    for (const auto& pr : p.pairs) {
        QuantizedBinaryProblem::QPair qp{pr.u, pr.v,
                                         {scale(pr.e00), scale(pr.e01), scale(pr.e10), scale(pr.e11)}};
        for (long long e : qp.e) tally(e);
        q.pairs.push_back(std::move(qp));
    }

    q.fragments.reserve(p.fragments.size());
    for (const auto& f : p.fragments) {
        QuantizedBinaryProblem::QFragment qf;
        qf.a_lower = scale(f.a_lower);
        qf.a_upper = scale(f.a_upper);
        qf.b_upper = scale(f.b_upper);
        qf.base = f.base;
        qf.count_complement = f.count_complement;
        qf.nodes.reserve(f.pairs.size());
        for (const auto& pt : f.pairs) qf.nodes.push_back(pt.node);
        long long cmax = qf.base + (long long)qf.nodes.size();
        tally(std::abs(qf.a_lower) * cmax);
        tally(std::abs(qf.a_upper) * cmax + std::abs(qf.b_upper));
        q.fragments.push_back(std::move(qf));
    }

    q.int_inf = finite_sum + 1;
    for (int v = 0; v < p.num_vars; ++v)
        for (int b = 0; b < 2; ++b)
            if (unary_inf[std::size_t(v)][std::size_t(b)])
                q.unary[std::size_t(v)][std::size_t(b)] = q.int_inf;
    return q;
}

struct BinarySolve {
    std::vector<std::uint8_t> x;
    long long q_value = 0;
    double quantum = 1.0;

    double value() const { return double(q_value) * quantum; }
};

/// Exact minimizer of the quantized energy via reduction to min-cut.
/// Every pairwise interaction must be submodular.
inline BinarySolve solve_quantized(const QuantizedBinaryProblem& q) {
    FlowGraph g;
    if (q.num_vars > 0) g.add_node(q.num_vars);
    long long constant = q.constant;
    std::vector<std::array<long long, 2>> theta(q.unary.begin(), q.unary.end());

    auto add_pairwise = [&](int u, int v, long long a, long long b, long long c, long long d) {
        // E(xu,xv) = A + (C-A)[xu=1] + (D-C)[xv=1] + (B+C-A-D)[xu=0][xv=1]
        long long w = b + c - a - d;
        if (w < 0) throw Error(Errc::NotSubmodular, "pairwise term is not submodular");
        constant += a;
        theta[std::size_t(u)][1] += c - a;
        theta[std::size_t(v)][1] += d - c;
        if (w > 0) g.add_edge(u, v, w, 0);
    };

    for (const auto& pr : q.pairs) add_pairwise(pr.u, pr.v, pr.e[0], pr.e[1], pr.e[2], pr.e[3]);

    for (const auto& f : q.fragments) {
        if (f.a_lower < f.a_upper)
            throw Error(Errc::NotSubmodular, "fragment with a_lower < a_upper");
        int aux = g.add_node(1);
        theta.push_back({0, 0});
        if (!f.count_complement) {
            theta[std::size_t(aux)][0] += f.a_lower * f.base;
            theta[std::size_t(aux)][1] += f.a_upper * f.base + f.b_upper;
            for (int v : f.nodes) add_pairwise(aux, v, 0, f.a_lower, 0, f.a_upper);
        } else {
            theta[std::size_t(aux)][0] += f.a_upper * f.base + f.b_upper;
            theta[std::size_t(aux)][1] += f.a_lower * f.base;
            for (int v : f.nodes) add_pairwise(aux, v, f.a_upper, 0, f.a_lower, 0);
        }
    }

    for (int v = 0; v < g.num_nodes(); ++v) {
        long long m = std::min(theta[std::size_t(v)][0], theta[std::size_t(v)][1]);
        constant += m;
        // x = 0 <-> source side: cutting v->t pays theta(0)
        g.add_tweights(v, theta[std::size_t(v)][1] - m, theta[std::size_t(v)][0] - m);
    }

    auto sol = g.solve();
    BinarySolve out;
    out.quantum = q.quantum;
    out.q_value = sol.flow + constant;
    out.x.resize(std::size_t(q.num_vars));
    for (int v = 0; v < q.num_vars; ++v) out.x[std::size_t(v)] = sol.source_side[std::size_t(v)] ? 0 : 1;
    return out;
}

}  // namespace volcut

#endif  // VOLCUT_BINARY_ENERGY_HPP
