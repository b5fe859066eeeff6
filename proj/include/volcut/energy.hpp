#ifndef VOLCUT_ENERGY_HPP
#define VOLCUT_ENERGY_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/models.hpp"

namespace volcut {

/// Assignment of every element of the domain to a segment index in
/// {0..K-1} or kOutlier.
struct Labeling {
    std::vector<int> assignments;
    int num_labels = 0;  // K

    std::size_t size() const { return assignments.size(); }

    int num_inliers() const {
        int n = 0;
        for (int a : assignments) n += a != kOutlier;
        return n;
    }

    /// Cardinality of each segment, outliers excluded.
    std::vector<long long> segment_sizes() const {
        std::vector<long long> c(std::size_t(num_labels), 0);
        for (int a : assignments)
            if (a != kOutlier) ++c[std::size_t(a)];
        return c;
    }

    int active_labels() const {
        int n = 0;
        for (long long c : segment_sizes()) n += c > 0;
        return n;
    }
};

/// Point on the K-simplex: relative segment volumes, outliers excluded.
struct VolumeDistribution {
    std::vector<double> v;
};

/// Strictly positive target distribution of segment volumes.
struct TargetWeights {
    std::vector<double> w;
};

struct NeighborEdge {
    int p = 0, q = 0;
    double weight = 1.0;  // alpha_pq >= 0
};

struct NeighborGraph {
    enum class Kind { Grid8, Delaunay, Custom };
    std::vector<NeighborEdge> edges;
    Kind kind = Kind::Custom;
};

enum class WeightMode { Uniform, Fixed, Reestimated };

struct EnergyConfig {
    double lambda = 0.0;        // smoothness strength
    double gamma = 1.0;         // entropy weight (Reestimated mode)
    double label_cost = 0.0;    // h per active non-outlier label
    double outlier_cost = 0.0;  // flat per-datum cost of the outlier label
    WeightMode weight_mode = WeightMode::Uniform;
    TargetWeights weights;      // used when weight_mode == Fixed
};

// ---------------------------------------------------------------------------

inline VolumeDistribution volume_distribution(const Labeling& s) {
    long long total = 0;
    auto sizes = s.segment_sizes();
    for (long long c : sizes) total += c;
    if (total == 0) throw Error(Errc::EmptyInlierSet, "all elements are outliers");
    VolumeDistribution vd;
    vd.v.resize(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) vd.v[k] = double(sizes[k]) / double(total);
    return vd;
}

/// H(V) = -sum v_k ln v_k, natural log, 0 ln 0 == 0.
inline double entropy(const VolumeDistribution& vd) {
    double h = 0;
    for (double v : vd.v) h -= xlogx(v);
    return h;
}

/// KL(V | W) = sum v_k ln(v_k / w_k) >= 0.
inline double kl_to_target(const VolumeDistribution& vd, const TargetWeights& w) {
    double kl = 0;
    for (std::size_t k = 0; k < vd.v.size(); ++k)
        if (vd.v[k] > 0) kl += vd.v[k] * std::log(vd.v[k] / w.w[k]);
    return kl;
}

/// H(V|W) = -sum v_k ln w_k = entropy(V) + kl_to_target(V, W).
inline double cross_entropy(const VolumeDistribution& vd, const TargetWeights& w) {
    double ce = 0;
    for (std::size_t k = 0; k < vd.v.size(); ++k)
        if (vd.v[k] > 0) ce -= vd.v[k] * std::log(w.w[k]);
    return ce;
}

inline TargetWeights uniform_weights(int k) {
    TargetWeights w;
    w.w.assign(std::size_t(k), 1.0 / double(k));
    return w;
}

// ---------------------------------------------------------------------------

/// Sum over segments of -log P^k(I_p); outliers pay outlier_cost each.
/// Infinite per-element costs yield an infinite (legal) energy value.
inline double data_term(const Labeling& s, std::span<const Model> models,
                        std::span<const Datum> data, double outlier_cost = 0.0) {
    double e = 0;
    for (std::size_t p = 0; p < s.assignments.size(); ++p) {
        int k = s.assignments[p];
        if (k == kOutlier) e += outlier_cost;
        else e += neg_log_likelihood(models[std::size_t(k)], data[p]);
    }
    return e;
}

/// E_W: data_term plus -|S^k| ln w^k per segment (weighted likelihoods).
inline double weighted_data_term(const Labeling& s, std::span<const Model> models,
                                 std::span<const Datum> data, const TargetWeights& w,
                                 double outlier_cost = 0.0) {
    double e = data_term(s, models, data, outlier_cost);
    auto sizes = s.segment_sizes();
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) continue;  // 0 * ln 0 convention
        e += w.w[k] > 0 ? -double(sizes[k]) * std::log(w.w[k]) : kInf;
    }
    return e;
}

/// E-hat: data_term + |Omega_in| * H(S); the weighted term minimized over W.
inline double unbiased_data_term(const Labeling& s, std::span<const Model> models,
                                 std::span<const Datum> data, double outlier_cost = 0.0) {
    double e = data_term(s, models, data, outlier_cost);
    int inliers = s.num_inliers();
    if (inliers > 0) e += double(inliers) * entropy(volume_distribution(s));
    return e;
}

/// lambda * sum alpha_pq [S_p != S_q]; the outlier label counts as a label.
inline double smoothness_term(const Labeling& s, const NeighborGraph& g, double lambda) {
    double e = 0;
    for (const auto& edge : g.edges)
        if (s.assignments[std::size_t(edge.p)] != s.assignments[std::size_t(edge.q)])
            e += edge.weight;
    return lambda * e;
}

/// h times the number of distinct nonempty non-outlier labels.
inline double label_cost_term(const Labeling& s, double h) {
    return h * double(s.active_labels());
}

/// Full objective. The data part depends on the weight mode:
///   Uniform      data_term + |Omega_in| ln K   (== Fixed with uniform W)
///   Fixed        weighted_data_term with cfg.weights
///   Reestimated  data_term + gamma * |Omega_in| * H(S)
/// plus smoothness, label costs, and per-outlier costs (inside data_term).
inline double total_energy(const Labeling& s, std::span<const Model> models,
                           std::span<const Datum> data, const NeighborGraph& g,
                           const EnergyConfig& cfg) {
    double e = 0;
    switch (cfg.weight_mode) {
        case WeightMode::Uniform:
            e = data_term(s, models, data, cfg.outlier_cost) +
                double(s.num_inliers()) * std::log(double(s.num_labels));
            break;
        case WeightMode::Fixed:
            e = weighted_data_term(s, models, data, cfg.weights, cfg.outlier_cost);
            break;
        case WeightMode::Reestimated: {
            e = data_term(s, models, data, cfg.outlier_cost);
            int inliers = s.num_inliers();
            if (inliers > 0) e += cfg.gamma * double(inliers) * entropy(volume_distribution(s));
            break;
        }
    }
    e += smoothness_term(s, g, cfg.lambda);
    e += label_cost_term(s, cfg.label_cost);
    return e;
}

// ---------------------------------------------------------------------------
// Diagnostics (not part of any optimized objective)

/// H(S|I) over a discretization of the data: how undetermined the labeling
/// is given the observation alone.
inline double conditional_label_entropy(const Labeling& s, std::span<const Datum> data,
                                        int bins = 64) {
    auto bin_of = [&](const Datum& d) -> int {
        if (const auto* v = std::get_if<GrayIntensity>(&d)) return color_bin(*v, bins);
        if (const auto* c = std::get_if<PixelColor>(&d)) {
            int b = std::max(2, int(std::cbrt(double(bins))));
            return (color_bin(c->r, b) * b + color_bin(c->g, b)) * b + color_bin(c->b, b);
        }
        throw Error(Errc::BadInput, "conditional entropy needs intensity or color data");
    };
    // joint counts over (bin, label); outlier treated as one more label
    std::vector<std::vector<double>> joint;
    std::vector<double> marginal;
    double n = double(data.size());
    for (std::size_t p = 0; p < data.size(); ++p) {
        int b = bin_of(data[p]);
        int l = s.assignments[p] == kOutlier ? s.num_labels : s.assignments[p];
        if (std::size_t(b) >= joint.size()) {
            joint.resize(std::size_t(b) + 1);
            marginal.resize(std::size_t(b) + 1, 0.0);
        }
        auto& row = joint[std::size_t(b)];
        if (std::size_t(l) >= row.size()) row.resize(std::size_t(l) + 1, 0.0);
        row[std::size_t(l)] += 1.0;
        marginal[std::size_t(b)] += 1.0;
    }
    double h = 0;
    for (std::size_t b = 0; b < joint.size(); ++b)
        for (double c : joint[b])
            if (c > 0) h -= (c / n) * std::log(c / marginal[b]);
    return h;
}

}  // namespace volcut

#endif  // VOLCUT_ENERGY_HPP
