#ifndef VOLCUT_OPTIMIZE_HPP
#define VOLCUT_OPTIMIZE_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "volcut/binary_energy.hpp"
#include "volcut/common.hpp"
#include "volcut/energy.hpp"
#include "volcut/entropy_approx.hpp"
#include "volcut/models.hpp"

namespace volcut {

struct OptimizeOptions {
    int breakpoints = 16;   // per-segment entropy approximation
    int max_iters = 100;    // outer block-coordinate iterations
    double rel_tol = 1e-6;  // relative energy decrease treated as converged
};

/// How models are (re-)estimated from segment members.
struct ModelPolicy {
    enum class Kind { Histogram, Gaussian, Line, Homography };
    Kind kind = Kind::Histogram;
    int bins = 16;            // histogram bins per channel
    double epsilon = 1e-4;    // histogram smoothing mass, in counts
    double sigma = 0.1;       // gaussian / line noise level
    double hom_sigma = 0.0;   // if > 0, homography Sigma is fixed to hom_sigma^2 I
};

inline Model refit_model(const ModelPolicy& policy, std::span<const Datum> data,
                         std::span<const int> members) {
    if (members.empty()) throw Error(Errc::EmptySegment, "refit of an empty segment");
    switch (policy.kind) {
        case ModelPolicy::Kind::Histogram: {
            std::vector<PixelColor> px;
            px.reserve(members.size());
            for (int p : members) px.push_back(std::get<PixelColor>(data[std::size_t(p)]));
            return fit_histogram(px, policy.bins, policy.epsilon);
        }
        case ModelPolicy::Kind::Gaussian: {
            std::vector<double> xs;
            xs.reserve(members.size());
            for (int p : members) xs.push_back(std::get<GrayIntensity>(data[std::size_t(p)]));
            return fit_gaussian_mean(xs, policy.sigma);
        }
        case ModelPolicy::Kind::Line: {
            std::vector<Point2> pts;
            pts.reserve(members.size());
            for (int p : members) pts.push_back(std::get<Point2>(data[std::size_t(p)]));
            return fit_line(pts, policy.sigma);
        }
        case ModelPolicy::Kind::Homography: {
            std::vector<MatchPair> ms;
            ms.reserve(members.size());
            for (int p : members) ms.push_back(std::get<MatchPair>(data[std::size_t(p)]));
            auto model = fit_homography(ms);
            if (policy.hom_sigma > 0)
                model.Sigma = policy.hom_sigma * policy.hom_sigma * Eigen::Matrix2d::Identity();
            return model;
        }
    }
    throw Error(Errc::BadInput, "unknown model policy");
}

namespace detail {

/// Weight handling for one solve. Bound optimization runs Fixed-weight inner
/// solves whose -ln w term is scaled by gamma so the bound matches the
/// gamma-weighted entropy it linearizes.
struct SolveContext {
    WeightMode mode = WeightMode::Uniform;
    TargetWeights weights;      // Fixed mode
    double weight_scale = 1.0;  // multiplies -ln w in Fixed mode
    double gamma = 1.0;         // entropy weight in Reestimated mode
    double lambda = 0.0;
    double label_cost = 0.0;
    double outlier_cost = 0.0;
    int num_labels = 0;
};

inline SolveContext make_context(const EnergyConfig& cfg, int num_labels) {
    SolveContext ctx;
    ctx.mode = cfg.weight_mode;
    ctx.weights = cfg.weights;
    ctx.gamma = cfg.gamma;
    ctx.lambda = cfg.lambda;
    ctx.label_cost = cfg.label_cost;
    ctx.outlier_cost = cfg.outlier_cost;
    ctx.num_labels = num_labels;
    return ctx;
}

inline double label_weight_cost(const SolveContext& ctx, int k) {
    switch (ctx.mode) {
        case WeightMode::Uniform: return std::log(double(ctx.num_labels));
        case WeightMode::Fixed: {
            double w = ctx.weights.w[std::size_t(k)];
            return w > 0 ? -ctx.weight_scale * std::log(w) : kInf;
        }
        case WeightMode::Reestimated: return 0.0;  // entropy handled by fragments
    }
    return 0.0;
}

inline double assign_cost(const SolveContext& ctx, std::span<const Model> models,
                          const Datum& datum, int k) {
    if (k == kOutlier) return ctx.outlier_cost;
    return neg_log_likelihood(models[std::size_t(k)], datum) + label_weight_cost(ctx, k);
}

/// The governing energy of a solve under this context. Identical to
/// total_energy for the three public weight modes with weight_scale == 1.
inline double context_energy(const SolveContext& ctx, const Labeling& s,
                             std::span<const Model> models, std::span<const Datum> data,
                             const NeighborGraph& g) {
    double e = data_term(s, models, data, ctx.outlier_cost);
    switch (ctx.mode) {
        case WeightMode::Uniform:
            e += double(s.num_inliers()) * std::log(double(ctx.num_labels));
            break;
        case WeightMode::Fixed: {
            auto sizes = s.segment_sizes();
            for (std::size_t k = 0; k < sizes.size(); ++k) {
                if (sizes[k] == 0) continue;
                double w = ctx.weights.w[k];
                e += w > 0 ? -ctx.weight_scale * double(sizes[k]) * std::log(w) : kInf;
            }
            break;
        }
        case WeightMode::Reestimated: {
            int inliers = s.num_inliers();
            if (inliers > 0)
                e += ctx.gamma * double(inliers) * entropy(volume_distribution(s));
            break;
        }
    }
    e += smoothness_term(s, g, ctx.lambda);
    e += label_cost_term(s, ctx.label_cost);
    return e;
}

inline TriangleTerm activity_term(double h) {
    // h * [c >= 1] == min(h * c, h) on integer cardinalities
    return TriangleTerm{h, 0.0, h, 0.0, kInf};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Binary global segmentation

struct BinarySegmentDetail {
    Labeling labeling;
    QuantizedBinaryProblem problem;
    long long q_value = 0;
    double quantum = 1.0;
};

namespace detail {

inline BinarySegmentDetail binary_segment_impl(std::span<const Datum> data,
                                               std::span<const Model> models,
                                               const NeighborGraph& g, const SolveContext& ctx,
                                               const OptimizeOptions& opt) {
    if (models.size() != 2 || ctx.num_labels != 2)
        throw Error(Errc::NotBinary, "binary_segment requires exactly 2 models");
    const int n = int(data.size());

    BinaryProblem p(n);
    for (int i = 0; i < n; ++i)
        p.add_unary(i, assign_cost(ctx, models, data[std::size_t(i)], 0),
                    assign_cost(ctx, models, data[std::size_t(i)], 1));

    for (const auto& e : g.edges) {
        double w = ctx.lambda * e.weight;
        if (w > 0) p.pairs.push_back({e.p, e.q, 0.0, w, w, 0.0});
    }

    if (ctx.mode == WeightMode::Reestimated && ctx.gamma > 0) {
        auto approx = build_entropy_approx(n, opt.breakpoints);
        for (const auto& t : approx.terms) {
            auto scaled = t.scaled(ctx.gamma);
            p.fragments.push_back(reduce_binary(scaled, 1, n));
            p.fragments.push_back(reduce_binary(scaled, 0, n));
        }
    }
    if (ctx.label_cost > 0) {
        auto t = activity_term(ctx.label_cost);
        p.fragments.push_back(reduce_binary(t, 1, n));
        p.fragments.push_back(reduce_binary(t, 0, n));
    }

    BinarySegmentDetail out;
    out.problem = quantize(p);
    auto sol = solve_quantized(out.problem);
    out.q_value = sol.q_value;
    out.quantum = sol.quantum;
    out.labeling.num_labels = 2;
    out.labeling.assignments.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) out.labeling.assignments[std::size_t(i)] = sol.x[std::size_t(i)];
    return out;
}

}  // namespace detail

/// Global minimizer over binary labelings for fixed models. In Reestimated
/// mode the entropy enters through its polygonal approximation, so the result
/// is optimal w.r.t. the approximated objective.
inline BinarySegmentDetail binary_segment_detail(std::span<const Datum> data,
                                                 std::span<const Model> models,
                                                 const NeighborGraph& g, const EnergyConfig& cfg,
                                                 const OptimizeOptions& opt = {}) {
    return detail::binary_segment_impl(data, models, g, detail::make_context(cfg, 2), opt);
}

inline Labeling binary_segment(std::span<const Datum> data, std::span<const Model> models,
                               const NeighborGraph& g, const EnergyConfig& cfg,
                               const OptimizeOptions& opt = {}) {
    return binary_segment_detail(data, models, g, cfg, opt).labeling;
}

// ---------------------------------------------------------------------------
// Alpha-expansion

struct Move {
    enum class Kind { BinaryGlobal, Expansion };
    Kind kind = Kind::Expansion;
    int alpha = 0;
    Labeling labeling;  // result of the move (the input labeling if rejected)
    double energy_before = 0.0;
    double energy_after = 0.0;
    bool accepted = false;
    long long q_objective = 0;  // solver optimum of the move problem
    double quantum = 1.0;
};

struct ExpandDetail {
    Move move;
    QuantizedBinaryProblem problem;
    std::vector<int> var_to_element;
    Labeling proposed;  // solver argmin before the acceptance check
};

namespace detail {

inline ExpandDetail expand_impl(const Labeling& s_t, int alpha, std::span<const Datum> data,
                                std::span<const Model> models, const NeighborGraph& g,
                                const SolveContext& ctx, const OptimizeOptions& opt,
                                const PolygonalApprox* approx) {
    const int n = int(s_t.assignments.size());
    ExpandDetail out;
    out.move.alpha = alpha;
    out.move.energy_before = context_energy(ctx, s_t, models, data, g);

    std::vector<int> var_of(std::size_t(n), -1);
    for (int p = 0; p < n; ++p) {
        if (s_t.assignments[std::size_t(p)] == alpha) continue;
        var_of[std::size_t(p)] = int(out.var_to_element.size());
        out.var_to_element.push_back(p);
    }
    const int nv = int(out.var_to_element.size());

    BinaryProblem prob(nv);
    for (int v = 0; v < nv; ++v) {
        int p = out.var_to_element[std::size_t(v)];
        prob.add_unary(v, assign_cost(ctx, models, data[std::size_t(p)],
                                      s_t.assignments[std::size_t(p)]),
                       assign_cost(ctx, models, data[std::size_t(p)], alpha));
    }
    // data cost of elements that already hold alpha (forced to keep it)
    for (int p = 0; p < n; ++p)
        if (s_t.assignments[std::size_t(p)] == alpha)
            prob.constant += assign_cost(ctx, models, data[std::size_t(p)], alpha);

    for (const auto& e : g.edges) {
        double w = ctx.lambda * e.weight;
        if (w <= 0) continue;
        int vp = var_of[std::size_t(e.p)], vq = var_of[std::size_t(e.q)];
        int lp = s_t.assignments[std::size_t(e.p)], lq = s_t.assignments[std::size_t(e.q)];
        if (vp < 0 && vq < 0) continue;  // both keep alpha
        if (vp < 0) prob.add_unary(vq, w, 0.0);
        else if (vq < 0) prob.add_unary(vp, w, 0.0);
        else prob.pairs.push_back({vp, vq, lp != lq ? w : 0.0, w, w, 0.0});
    }

    auto add_fragment = [&](PairwiseFragment f) {
        for (auto& pt : f.pairs) pt.node = var_of[std::size_t(pt.node)];
        prob.fragments.push_back(std::move(f));
    };

    auto sizes = s_t.segment_sizes();
    if (ctx.mode == WeightMode::Reestimated && ctx.gamma > 0 && approx) {
        for (int k = 0; k < ctx.num_labels; ++k) {
            if (k != alpha && sizes[std::size_t(k)] == 0) continue;  // stays empty
            for (const auto& t : approx->terms)
                add_fragment(reduce_expansion(t.scaled(ctx.gamma), k, alpha, s_t));
        }
        // The fragments approximate sum_k -c_k ln(c_k / N) with N frozen at the
        // current inlier count; the exact term is sum_k -c_k ln c_k + N ln N.
        // First-order in the inlier-count change, the difference is gamma per
        // element entering (+) or leaving (-) the inlier set.
        if (alpha == kOutlier) {
            for (int v = 0; v < nv; ++v) prob.add_unary(v, 0.0, -ctx.gamma);
        } else {
            for (int v = 0; v < nv; ++v)
                if (s_t.assignments[std::size_t(out.var_to_element[std::size_t(v)])] == kOutlier)
                    prob.add_unary(v, 0.0, ctx.gamma);
        }
    }
    if (ctx.label_cost > 0) {
        auto t = activity_term(ctx.label_cost);
        for (int k = 0; k < ctx.num_labels; ++k) {
            if (k == alpha) continue;
            if (sizes[std::size_t(k)] > 0) add_fragment(reduce_expansion(t, k, alpha, s_t));
        }
        if (alpha != kOutlier) {
            if (sizes[std::size_t(alpha)] > 0) prob.constant += ctx.label_cost;
            else add_fragment(reduce_expansion(t, alpha, alpha, s_t));
        }
    }

    out.problem = quantize(prob);
    auto sol = solve_quantized(out.problem);
    out.move.q_objective = sol.q_value;
    out.move.quantum = sol.quantum;

    out.proposed = s_t;
    for (int v = 0; v < nv; ++v)
        if (sol.x[std::size_t(v)])
            out.proposed.assignments[std::size_t(out.var_to_element[std::size_t(v)])] = alpha;

    out.move.energy_after = context_energy(ctx, out.proposed, models, data, g);
    if (out.move.energy_after < out.move.energy_before) {
        out.move.accepted = true;
        out.move.labeling = out.proposed;
    } else {
        out.move.accepted = false;
        out.move.labeling = s_t;
        out.move.energy_after = out.move.energy_before;
    }
    return out;
}

/// One pass of expansion moves over all labels (plus the outlier label when
/// enabled), in fixed index order. Returns true if any move was accepted.
inline bool expansion_sweep(Labeling& s, std::span<const Datum> data,
                            std::span<const Model> models, const NeighborGraph& g,
                            const SolveContext& ctx, const OptimizeOptions& opt,
                            bool allow_outlier,
                            std::map<long long, PolygonalApprox>* approx_cache) {
    bool improved = false;
    std::vector<int> alphas;
    for (int k = 0; k < ctx.num_labels; ++k) alphas.push_back(k);
    if (allow_outlier) alphas.push_back(kOutlier);
    for (int alpha : alphas) {
        const PolygonalApprox* approx = nullptr;
        if (ctx.mode == WeightMode::Reestimated && ctx.gamma > 0 && approx_cache) {
            long long n_in = std::max(1, s.num_inliers());
            auto it = approx_cache->find(n_in);
            if (it == approx_cache->end())
                it = approx_cache->emplace(n_in, build_entropy_approx(n_in, opt.breakpoints)).first;
            approx = &it->second;
        }
        auto det = expand_impl(s, alpha, data, models, g, ctx, opt, approx);
        if (det.move.accepted) {
            s = det.move.labeling;
            improved = true;
        }
    }
    return improved;
}

/// Minimizes over labelings for fixed models: global binary cut for K = 2
/// without outliers, expansion sweeps otherwise.
inline Labeling solve_labels(const Labeling& s0, std::span<const Datum> data,
                             std::span<const Model> models, const NeighborGraph& g,
                             const SolveContext& ctx, const OptimizeOptions& opt,
                             bool allow_outlier) {
    if (ctx.num_labels == 2 && !allow_outlier)
        return binary_segment_impl(data, models, g, ctx, opt).labeling;
    Labeling s = s0;
    std::map<long long, PolygonalApprox> cache;
    for (int sweep = 0; sweep < opt.max_iters; ++sweep)
        if (!expansion_sweep(s, data, models, g, ctx, opt, allow_outlier, &cache)) break;
    return s;
}

}  // namespace detail

/// Optimal expansion move for label alpha from s_t; accepted only when the
/// governing energy strictly decreases, otherwise a null move is returned.
inline ExpandDetail expand_detail(const Labeling& s_t, int alpha, std::span<const Datum> data,
                                  std::span<const Model> models, const NeighborGraph& g,
                                  const EnergyConfig& cfg, const OptimizeOptions& opt = {}) {
    auto ctx = detail::make_context(cfg, s_t.num_labels);
    PolygonalApprox approx;
    const PolygonalApprox* ap = nullptr;
    if (ctx.mode == WeightMode::Reestimated && ctx.gamma > 0) {
        approx = build_entropy_approx(std::max(1, s_t.num_inliers()), opt.breakpoints);
        ap = &approx;
    }
    return detail::expand_impl(s_t, alpha, data, models, g, ctx, opt, ap);
}

inline Move expand(const Labeling& s_t, int alpha, std::span<const Datum> data,
                   std::span<const Model> models, const NeighborGraph& g,
                   const EnergyConfig& cfg, const OptimizeOptions& opt = {}) {
    return expand_detail(s_t, alpha, data, models, g, cfg, opt).move;
}

// ---------------------------------------------------------------------------
// Block-coordinate pipelines

struct IterationRecord {
    double energy = 0.0;
    std::vector<double> volumes;
    int active_labels = 0;
};

struct SolveReport {
    std::vector<IterationRecord> iterations;
    Labeling labeling;
    std::vector<Model> models;
    std::string termination;
    double wall_seconds = 0.0;
    bool all_outlier_warning = false;

    double final_energy() const {
        return iterations.empty() ? kInf : iterations.back().energy;
    }
};

namespace detail {

inline IterationRecord snapshot(const SolveContext& ctx, const Labeling& s,
                                std::span<const Model> models, std::span<const Datum> data,
                                const NeighborGraph& g) {
    IterationRecord rec;
    rec.energy = context_energy(ctx, s, models, data, g);
    rec.active_labels = s.active_labels();
    if (s.num_inliers() > 0) rec.volumes = volume_distribution(s).v;
    else rec.volumes.assign(std::size_t(s.num_labels), 0.0);
    return rec;
}

/// Re-estimates each nonempty segment's model; a refit is kept only when it
/// does not increase that segment's data cost (the DLT homography estimate
/// minimizes an algebraic proxy, not the likelihood itself). Empty segments
/// keep their previous (frozen) model. Returns true if any model changed.
inline bool refit_models(std::vector<Model>& models, const Labeling& s,
                         std::span<const Datum> data, const ModelPolicy& policy,
                         std::size_t min_support = 1) {
    bool changed = false;
    std::vector<std::vector<int>> members(models.size());
    for (int p = 0; p < int(s.assignments.size()); ++p) {
        int k = s.assignments[std::size_t(p)];
        if (k != kOutlier) members[std::size_t(k)].push_back(p);
    }
    for (std::size_t k = 0; k < models.size(); ++k) {
        if (members[k].size() < std::max<std::size_t>(min_support, 1)) continue;
        Model candidate;
        try {
            candidate = refit_model(policy, data, members[k]);
        } catch (const Error&) {
            continue;  // degenerate geometry; keep the old model
        }
        double before = 0, after = 0;
        for (int p : members[k]) {
            before += neg_log_likelihood(models[k], data[std::size_t(p)]);
            after += neg_log_likelihood(candidate, data[std::size_t(p)]);
        }
        if (after <= before) {
            if (after < before) changed = true;
            models[k] = std::move(candidate);
        }
    }
    return changed;
}

}  // namespace detail

/// Bound optimization of the entropy-corrected energy: each outer iteration
/// linearizes the entropy at the current volumes (W_t = V_{S_t}), minimizes
/// the resulting weighted-likelihood energy over S and over P, and repeats.
/// The recorded energy is the entropy-corrected objective and never increases.
inline SolveReport bound_optimize(std::span<const Datum> data, std::vector<Model> models,
                                  const NeighborGraph& g, const EnergyConfig& cfg,
                                  const ModelPolicy& policy, int max_iters,
                                  const Labeling* init = nullptr,
                                  const OptimizeOptions& opt = {}) {
    if (cfg.weight_mode != WeightMode::Reestimated)
        throw Error(Errc::BadInput, "bound_optimize requires the re-estimated weight mode");
    auto t0 = std::chrono::steady_clock::now();
    const int k = int(models.size());

    auto outer_ctx = detail::make_context(cfg, k);
    SolveReport rep;

    Labeling s;
    if (init) {
        s = *init;
    } else {
        // per-element argmin under uniform weights
        s.num_labels = k;
        s.assignments.resize(data.size());
        for (std::size_t p = 0; p < data.size(); ++p) {
            int best = 0;
            double best_cost = kInf;
            for (int j = 0; j < k; ++j) {
                double c = neg_log_likelihood(models[std::size_t(j)], data[p]);
                if (c < best_cost) {
                    best_cost = c;
                    best = j;
                }
            }
            s.assignments[p] = best;
        }
    }

    rep.iterations.push_back(detail::snapshot(outer_ctx, s, models, data, g));
    std::string termination = "max_iters";
    for (int it = 0; it < max_iters; ++it) {
        double before = rep.iterations.back().energy;

        auto sizes = s.segment_sizes();
        long long inliers = 0;
        for (long long c : sizes) inliers += c;
        detail::SolveContext inner = outer_ctx;
        inner.mode = WeightMode::Fixed;
        inner.weight_scale = cfg.gamma;
        inner.weights.w.resize(std::size_t(k));
        for (int j = 0; j < k; ++j)
            inner.weights.w[std::size_t(j)] =
                inliers > 0 ? double(sizes[std::size_t(j)]) / double(inliers) : 0.0;

        Labeling s_next = detail::solve_labels(s, data, models, g, inner, opt, false);
        auto models_next = models;
        detail::refit_models(models_next, s_next, data, policy);

        double after = detail::context_energy(outer_ctx, s_next, models_next, data, g);
        if (after > before) {
            termination = "converged";  // quantization-level wobble; keep the better state
            break;
        }
        s = std::move(s_next);
        models = std::move(models_next);
        rep.iterations.push_back(detail::snapshot(outer_ctx, s, models, data, g));
        if (before - after < opt.rel_tol * std::max(1.0, std::abs(before))) {
            termination = "converged";
            break;
        }
    }

    rep.labeling = std::move(s);
    rep.models = std::move(models);
    rep.termination = termination;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

enum class Variant { Standard, FixedW, Bound, HighOrder };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Standard: return "standard";
        case Variant::FixedW: return "fixed-w";
        case Variant::Bound: return "bound";
        case Variant::HighOrder: return "high-order";
    }
    return "?";
}

/// Block-coordinate segmentation: fit models from the current segments, then
/// optimize the labeling under the variant's energy, until convergence.
inline SolveReport segment_pipeline(std::span<const Datum> data, const NeighborGraph& g,
                                    const EnergyConfig& cfg, const Labeling& init, Variant variant,
                                    const ModelPolicy& policy, const OptimizeOptions& opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    const int k = init.num_labels;

    std::vector<std::vector<int>> members(std::size_t(k), std::vector<int>{});
    for (int p = 0; p < int(init.assignments.size()); ++p) {
        int lab = init.assignments[std::size_t(p)];
        if (lab != kOutlier) members[std::size_t(lab)].push_back(p);
    }
    std::vector<Model> models;
    for (int j = 0; j < k; ++j) models.push_back(refit_model(policy, data, members[std::size_t(j)]));

    EnergyConfig vcfg = cfg;
    switch (variant) {
        case Variant::Standard: vcfg.weight_mode = WeightMode::Uniform; break;
        case Variant::FixedW:
            vcfg.weight_mode = WeightMode::Fixed;
            if (int(vcfg.weights.w.size()) != k)
                throw Error(Errc::BadInput, "fixed-w variant needs K target weights");
            break;
        case Variant::Bound:
        case Variant::HighOrder: vcfg.weight_mode = WeightMode::Reestimated; break;
    }

    if (variant == Variant::Bound) {
        auto rep = bound_optimize(data, std::move(models), g, vcfg, policy, opt.max_iters, &init, opt);
        rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

    auto ctx = detail::make_context(vcfg, k);
    SolveReport rep;
    Labeling s = init;
    rep.iterations.push_back(detail::snapshot(ctx, s, models, data, g));
    std::string termination = "max_iters";
    for (int it = 0; it < opt.max_iters; ++it) {
        double before = rep.iterations.back().energy;

        Labeling s_next = detail::solve_labels(s, data, models, g, ctx, opt, false);
        auto models_next = models;
        bool refit_changed = detail::refit_models(models_next, s_next, data, policy);

        double after = detail::context_energy(ctx, s_next, models_next, data, g);
        bool same_labels = s_next.assignments == s.assignments;
        if (after > before) {
            termination = "converged";
            break;
        }
        s = std::move(s_next);
        models = std::move(models_next);
        rep.iterations.push_back(detail::snapshot(ctx, s, models, data, g));
        if ((same_labels && !refit_changed) ||
            before - after < opt.rel_tol * std::max(1.0, std::abs(before))) {
            termination = "converged";
            break;
        }
    }

    rep.labeling = std::move(s);
    rep.models = std::move(models);
    rep.termination = termination;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// PEARL-style multi-model fitting

struct PearlOptions {
    int num_proposals = 200;
    std::uint64_t seed = 1;
    int max_outer = 100;
};

/// Propose models from random minimal subsets, alternate expansion sweeps
/// over all proposals plus the outlier label with inlier re-estimation, until
/// no move decreases the energy. In Reestimated mode the entropy term is
/// carried by triangle fragments inside each expansion (never by zero-weight
/// bound steps, which could not repopulate empty models).
inline SolveReport pearl_fit(std::span<const Datum> data, const NeighborGraph& g,
                             const EnergyConfig& cfg, const ModelPolicy& policy,
                             const PearlOptions& po, const OptimizeOptions& opt = {}) {
    if (po.num_proposals < 1) throw Error(Errc::BadInput, "need at least one proposal");
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(po.seed);
    const int n = int(data.size());

    const int subset = policy.kind == ModelPolicy::Kind::Homography ? 4 : 2;
    std::vector<Model> models;
    std::vector<int> pick;
    for (int j = 0; j < po.num_proposals; ++j) {
        Model m;
        bool ok = false;
        for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
            pick.clear();
            while (int(pick.size()) < subset) {
                int c = rng.uniform_int(n);
                if (std::find(pick.begin(), pick.end(), c) == pick.end()) pick.push_back(c);
            }
            try {
                m = refit_model(policy, data, pick);
                ok = true;
            } catch (const Error&) {
            }
        }
        if (!ok) throw Error(Errc::DegenerateFit, "could not draw a non-degenerate proposal");
        models.push_back(std::move(m));
    }

    auto ctx = detail::make_context(cfg, po.num_proposals);
    SolveReport rep;
    Labeling s;
    s.num_labels = po.num_proposals;
    s.assignments.assign(std::size_t(n), kOutlier);

    rep.iterations.push_back(detail::snapshot(ctx, s, models, data, g));
    std::string termination = "max_iters";
    std::size_t min_support = std::size_t(subset);
    std::map<long long, PolygonalApprox> cache;
    for (int it = 0; it < po.max_outer; ++it) {
        double before = rep.iterations.back().energy;
        bool moved = detail::expansion_sweep(s, data, models, g, ctx, opt, true, &cache);
        bool refitted = detail::refit_models(models, s, data, policy, min_support);
        rep.iterations.push_back(detail::snapshot(ctx, s, models, data, g));
        double after = rep.iterations.back().energy;
        if (!moved && !refitted) {
            termination = "converged";
            break;
        }
        if (before - after < opt.rel_tol * std::max(1.0, std::abs(before)) && !moved) {
            termination = "converged";
            break;
        }
    }

    rep.all_outlier_warning = s.num_inliers() == 0;
    rep.labeling = std::move(s);
    rep.models = std::move(models);
    rep.termination = termination;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace volcut

#endif  // VOLCUT_OPTIMIZE_HPP
