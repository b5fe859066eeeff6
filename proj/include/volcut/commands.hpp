#ifndef VOLCUT_COMMANDS_HPP
#define VOLCUT_COMMANDS_HPP

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/energy.hpp"
#include "volcut/geometry.hpp"
#include "volcut/io.hpp"
#include "volcut/metrics.hpp"
#include "volcut/models.hpp"
#include "volcut/optimize.hpp"
#include "volcut/synthetic.hpp"

namespace volcut {

namespace detail {

inline Variant parse_variant(const std::string& name) {
    if (name == "standard") return Variant::Standard;
    if (name == "fixed-w") return Variant::FixedW;
    if (name == "bound") return Variant::Bound;
    if (name == "high-order") return Variant::HighOrder;
    throw Error(Errc::BadInput, "unknown variant '" + name + "'");
}

inline Json report_common(const SolveReport& rep, const EnergyConfig& cfg,
                          std::span<const Datum> data, const NeighborGraph& g,
                          const std::optional<TargetWeights>& w) {
    const Labeling& s = rep.labeling;
    Json j;
    j["final_energy"] = rep.final_energy();
    j["iterations"] = rep.iterations.size();
    j["termination"] = rep.termination;

    Json terms;
    terms["data"] = data_term(s, rep.models, data, cfg.outlier_cost);
    switch (cfg.weight_mode) {
        case WeightMode::Uniform:
            terms["weight"] = double(s.num_inliers()) * std::log(double(s.num_labels));
            break;
        case WeightMode::Fixed:
            terms["weight"] = weighted_data_term(s, rep.models, data, cfg.weights,
                                                 cfg.outlier_cost) -
                              data_term(s, rep.models, data, cfg.outlier_cost);
            break;
        case WeightMode::Reestimated:
            terms["entropy"] = s.num_inliers() > 0
                                   ? cfg.gamma * double(s.num_inliers()) *
                                         entropy(volume_distribution(s))
                                   : 0.0;
            break;
    }
    terms["smoothness"] = smoothness_term(s, g, cfg.lambda);
    terms["label_cost"] = label_cost_term(s, cfg.label_cost);
    j["terms"] = terms;

    Json energies = Json::array();
    for (const auto& it : rep.iterations) energies.push_back(it.energy);
    j["energies"] = energies;

    if (s.num_inliers() > 0) {
        auto v = volume_distribution(s);
        j["volumes"] = v.v;
        j["kl_uniform"] = kl_to_target(v, uniform_weights(s.num_labels));
        if (w) {
            j["w"] = w->w;
            j["kl_target"] = kl_to_target(v, *w);
        }
    } else {
        j["volumes"] = Json::array();
        j["all_outliers"] = true;
    }
    j["active_labels"] = s.active_labels();
    j["outliers"] = int(s.size()) - s.num_inliers();
    return j;
}

inline void emit_report(const std::string& out_dir, const Json& j) {
    write_json_report(out_dir + "/report.json", j);
    std::cout << to_key_value_lines(j);
}

inline std::vector<Datum> image_to_data(const Image& img) {
    std::vector<Datum> data;
    data.reserve(img.pixels());
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        if (img.channels == 1) {
            data.emplace_back(GrayIntensity(img.data[p] / 255.0));
        } else {
            data.emplace_back(PixelColor{img.data[3 * p] / 255.0, img.data[3 * p + 1] / 255.0,
                                         img.data[3 * p + 2] / 255.0});
        }
    }
    return data;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
    std::string image;
    std::string boxes;   // GrabCut-style init
    std::string labels;  // or: init label mask (PGM)
    std::string gt;      // optional ground-truth mask (PGM)
    std::string out = "out";
    std::string variant = "standard";
    std::string model = "auto";  // auto | histogram | gaussian
    std::vector<double> w;
    std::vector<double> lambda_sweep;  // when nonempty, overrides lambda
    double lambda = 4.0;
    double gamma = 1.0;
    double label_cost = 0.0;
    double outlier_cost = 0.0;
    int bins = 16;
    double sigma = 0.1;
    int breakpoints = 16;
    int max_iters = 100;
    std::uint64_t seed = 1;
    bool no_contrast = false;
};

namespace detail {

struct SegmentInstance {
    std::vector<Datum> data;      // domain pixels only
    std::vector<int> pixel_of;    // element -> pixel index in the full image
    Labeling init;
    int width = 0, height = 0;    // full image size
    NeighborGraph graph;
};

inline SegmentInstance load_segment_instance(const SegmentArgs& args, const Image& img) {
    SegmentInstance inst;
    inst.width = img.width;
    inst.height = img.height;
    auto full = image_to_data(img);

    if (!args.boxes.empty()) {
        auto boxes = read_boxes(args.boxes);
        if (boxes.outer_x0 < 0 || boxes.outer_y0 < 0 || boxes.outer_x1 > img.width ||
            boxes.outer_y1 > img.height || boxes.outer_x0 >= boxes.outer_x1 ||
            boxes.outer_y0 >= boxes.outer_y1)
            throw Error(Errc::BadInput, args.boxes + ": outer box outside the image");
        std::vector<int> var_of(full.size(), -1);
        for (int y = boxes.outer_y0; y < boxes.outer_y1; ++y)
            for (int x = boxes.outer_x0; x < boxes.outer_x1; ++x) {
                int p = y * img.width + x;
                var_of[std::size_t(p)] = int(inst.data.size());
                inst.data.push_back(full[std::size_t(p)]);
                inst.pixel_of.push_back(p);
                bool inner = x >= boxes.inner_x0 && x < boxes.inner_x1 && y >= boxes.inner_y0 &&
                             y < boxes.inner_y1;
                inst.init.assignments.push_back(inner ? 1 : 0);
            }
        inst.init.num_labels = 2;
        // grid over the restricted domain
        auto all_edges = grid8_graph(img.width, img.height, full, !args.no_contrast);
        inst.graph.kind = all_edges.kind;
        for (const auto& e : all_edges.edges) {
            int a = var_of[std::size_t(e.p)], b = var_of[std::size_t(e.q)];
            if (a >= 0 && b >= 0) inst.graph.edges.push_back({a, b, e.weight});
        }
    } else if (!args.labels.empty()) {
        auto mask = read_pnm(args.labels);
        if (mask.channels != 1 || mask.width != img.width || mask.height != img.height)
            throw Error(Errc::BadInput, args.labels + ": init mask must be a PGM of the image size");
        int k = 0;
        for (std::size_t p = 0; p < mask.pixels(); ++p) k = std::max(k, int(mask.data[p]) + 1);
        inst.data = full;
        inst.pixel_of.resize(full.size());
        std::iota(inst.pixel_of.begin(), inst.pixel_of.end(), 0);
        inst.init.num_labels = k;
        inst.init.assignments.assign(mask.data.begin(), mask.data.end());
        inst.graph = grid8_graph(img.width, img.height, full, !args.no_contrast);
    } else {
        throw Error(Errc::BadInput, "segment needs --boxes or --labels for initialization");
    }
    return inst;
}

}  // namespace detail

inline int cmd_segment(const SegmentArgs& args) {
    auto img = read_pnm(args.image);
    auto inst = detail::load_segment_instance(args, img);
    std::filesystem::create_directories(args.out);

    Variant variant = detail::parse_variant(args.variant);
    ModelPolicy policy;
    if (args.model == "histogram" || (args.model == "auto" && img.channels == 3))
        policy.kind = ModelPolicy::Kind::Histogram;
    else if (args.model == "gaussian" || args.model == "auto")
        policy.kind = ModelPolicy::Kind::Gaussian;
    else
        throw Error(Errc::BadInput, "unknown model '" + args.model + "'");
    policy.bins = args.bins;
    policy.sigma = args.sigma;
    if (policy.kind == ModelPolicy::Kind::Histogram && img.channels != 3)
        throw Error(Errc::BadInput, "histogram model needs a color (P6) image");

    EnergyConfig cfg;
    cfg.gamma = args.gamma;
    cfg.label_cost = args.label_cost;
    cfg.outlier_cost = args.outlier_cost;
    if (variant == Variant::FixedW) {
        if (int(args.w.size()) != inst.init.num_labels)
            throw Error(Errc::BadInput, "--w needs one weight per label");
        cfg.weights = TargetWeights{args.w};
    }

    OptimizeOptions opt;
    opt.breakpoints = args.breakpoints;
    opt.max_iters = args.max_iters;

    std::optional<std::vector<int>> gt;
    if (!args.gt.empty()) {
        auto gt_img = read_pnm(args.gt);
        if (gt_img.channels != 1 || gt_img.width != img.width || gt_img.height != img.height)
            throw Error(Errc::BadInput, args.gt + ": ground truth must be a PGM of the image size");
        std::vector<int> labels(gt_img.data.begin(), gt_img.data.end());
        gt = std::move(labels);
    }

    std::vector<double> lambdas = args.lambda_sweep.empty()
                                      ? std::vector<double>{args.lambda}
                                      : args.lambda_sweep;

    struct RunResult {
        double lambda;
        SolveReport rep;
        double error = -1.0;
    };
    auto run_one = [&](double lambda) {
        EnergyConfig c = cfg;
        c.lambda = lambda;
        RunResult r{lambda, segment_pipeline(inst.data, inst.graph, c, inst.init, variant, policy, opt),
                    -1.0};
        if (gt) {
            std::vector<int> gt_domain;
            gt_domain.reserve(inst.pixel_of.size());
            for (int p : inst.pixel_of) gt_domain.push_back((*gt)[std::size_t(p)]);
            r.error = misclassification_error(r.rep.labeling, gt_domain,
                                              inst.init.num_labels == 2);
        }
        return r;
    };

    std::vector<RunResult> results;
    if (lambdas.size() == 1) {
        results.push_back(run_one(lambdas[0]));
    } else {
        std::vector<std::future<RunResult>> jobs;
        for (double l : lambdas)
            jobs.push_back(std::async(std::launch::async, run_one, l));
        for (auto& j : jobs) results.push_back(j.get());
    }

    // best by error when ground truth is present, by energy otherwise
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        bool better = gt ? results[i].error < results[best].error
                         : results[i].rep.final_energy() < results[best].rep.final_energy();
        if (better) best = i;
    }
    const auto& rep = results[best].rep;

    std::vector<int> full_mask(img.pixels(), 0);
    for (std::size_t e = 0; e < inst.pixel_of.size(); ++e)
        full_mask[std::size_t(inst.pixel_of[e])] = rep.labeling.assignments[e];
    write_pnm(args.out + "/mask.pgm", mask_to_image(img.width, img.height, full_mask));

    std::string log;
    for (std::size_t i = 0; i < rep.iterations.size(); ++i)
        log += "iter=" + std::to_string(i) +
               " energy=" + std::to_string(rep.iterations[i].energy) + "\n";
    write_text_file(args.out + "/energy_log.txt", log);

    EnergyConfig final_cfg = cfg;
    final_cfg.lambda = results[best].lambda;
    switch (variant) {
        case Variant::Standard: final_cfg.weight_mode = WeightMode::Uniform; break;
        case Variant::FixedW: final_cfg.weight_mode = WeightMode::Fixed; break;
        default: final_cfg.weight_mode = WeightMode::Reestimated; break;
    }
    std::optional<TargetWeights> w;
    if (variant == Variant::FixedW) w = cfg.weights;

    Json j;
    j["command"] = "segment";
    j["variant"] = args.variant;
    j["lambda"] = results[best].lambda;
    j.update(detail::report_common(rep, final_cfg, inst.data, inst.graph, w));
    if (gt) {
        j["error"] = results[best].error;
        if (lambdas.size() > 1) {
            Json sweep = Json::array();
            for (const auto& r : results) {
                Json row;
                row["lambda"] = r.lambda;
                row["error"] = r.error;
                row["energy"] = r.rep.final_energy();
                sweep.push_back(row);
            }
            j["lambda_sweep"] = sweep;
            j["best_lambda"] = results[best].lambda;
            j["best_error"] = results[best].error;
        }
    }
    detail::emit_report(args.out, j);
    return 0;
}

// ---------------------------------------------------------------------------
// fitlines

struct FitLinesArgs {
    std::string points;  // CSV; empty with synthesize = generator input
    bool synthesize = false;
    int lines = 4;
    std::vector<double> probs = {0.4, 0.3, 0.2, 0.1};
    int inliers = 1000;
    int outliers = 200;
    std::string out = "out";
    std::string variant = "high-order";  // fixed-w | high-order
    double sigma = 0.025;
    double gamma = 1.0;
    double label_cost = 5.0;
    double outlier_cost = -1.0;  // < 0: derived from the proposal count
    int proposals = 200;
    int breakpoints = 16;
    int max_iters = 100;
    std::uint64_t seed = 1;
};

namespace detail {

inline Json label_histogram_outputs(const std::string& out_dir, const Labeling& s) {
    auto sizes = s.segment_sizes();
    std::vector<std::pair<std::string, long long>> bars;
    std::string text;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) continue;
        bars.push_back({std::to_string(k), sizes[k]});
        text += "label " + std::to_string(k) + " count " + std::to_string(sizes[k]) + "\n";
    }
    long long out_count = (long long)s.size() - s.num_inliers();
    bars.push_back({"outlier", out_count});
    text += "outlier count " + std::to_string(out_count) + "\n";
    write_text_file(out_dir + "/label_histogram.txt", text);
    write_histogram_svg(out_dir + "/label_histogram.svg", bars);

    Json hist = Json::array();
    for (const auto& b : bars) {
        Json row;
        row["label"] = b.first;
        row["count"] = b.second;
        hist.push_back(row);
    }
    return hist;
}

}  // namespace detail

inline int cmd_fitlines(const FitLinesArgs& args) {
    std::vector<Point2> pts;
    std::vector<int> gt;
    if (args.synthesize) {
        LineDatasetOptions o;
        o.num_lines = args.lines;
        o.probabilities = args.probs;
        o.num_inliers = args.inliers;
        o.num_outliers = args.outliers;
        o.sigma = args.sigma;
        auto ds = make_line_dataset(args.seed, o);
        pts = std::move(ds.points);
        gt = std::move(ds.gt);
    } else if (!args.points.empty()) {
        pts = read_points_csv(args.points);
    } else {
        throw Error(Errc::BadInput, "fitlines needs --points or --synthesize");
    }
    if (pts.size() < 2) throw Error(Errc::BadInput, "need at least 2 points");
    std::filesystem::create_directories(args.out);

    EnergyConfig cfg;
    cfg.lambda = 0.0;  // no smoothness in the line experiment
    cfg.gamma = args.gamma;
    cfg.label_cost = args.label_cost;
    Variant variant = detail::parse_variant(args.variant);
    cfg.weight_mode =
        variant == Variant::FixedW ? WeightMode::Uniform : WeightMode::Reestimated;
    // default outlier cost mirrors the uniform prior over proposals so the
    // inlier/outlier balance is comparable across both weight modes
    cfg.outlier_cost = args.outlier_cost >= 0
                           ? args.outlier_cost
                           : 2.0 + (cfg.weight_mode == WeightMode::Uniform
                                        ? std::log(double(args.proposals))
                                        : 0.0);

    ModelPolicy policy;
    policy.kind = ModelPolicy::Kind::Line;
    policy.sigma = args.sigma;

    PearlOptions po;
    po.num_proposals = args.proposals;
    po.seed = args.seed;
    po.max_outer = args.max_iters;

    OptimizeOptions opt;
    opt.breakpoints = args.breakpoints;

    std::vector<Datum> data;
    data.reserve(pts.size());
    for (const auto& p : pts) data.emplace_back(p);
    NeighborGraph g;  // empty: no smoothness

    auto rep = pearl_fit(data, g, cfg, policy, po, opt);

    write_points_csv(args.out + "/assignments.csv", pts, rep.labeling.assignments);
    write_scatter_svg(args.out + "/points.svg", pts, rep.labeling.assignments, 1.0);
    auto hist = detail::label_histogram_outputs(args.out, rep.labeling);

    Json j;
    j["command"] = "fitlines";
    j["variant"] = args.variant;
    j["seed"] = args.seed;
    j["proposals"] = args.proposals;
    j["outlier_cost"] = cfg.outlier_cost;
    j.update(detail::report_common(rep, cfg, data, g, std::nullopt));
    j["label_histogram"] = hist;
    if (rep.all_outlier_warning) j["warning"] = "no proposals survived; all points are outliers";
    if (!gt.empty()) j["accuracy"] = label_accuracy(rep.labeling, gt);
    detail::emit_report(args.out, j);
    return 0;
}

// ---------------------------------------------------------------------------
// fithomography

struct FitHomographyArgs {
    std::string matches;  // CSV x1,y1,x2,y2
    bool synthesize = false;
    int num_matches = 300;
    double split = 0.7;
    double noise = 1.0;
    std::string out = "out";
    std::string variant = "high-order";  // fixed-w | high-order
    double lambda = 1.0;
    double gamma = 1.0;
    double label_cost = 5.0;
    double outlier_cost = -1.0;
    double hom_sigma = 5.0;  // fixed model std-dev in pixels
    int proposals = 100;
    int breakpoints = 16;
    int max_iters = 100;
    std::uint64_t seed = 1;
};

inline int cmd_fithomography(const FitHomographyArgs& args) {
    std::vector<MatchPair> matches;
    std::vector<int> gt;
    if (args.synthesize) {
        auto ds = make_homography_dataset(args.seed, args.num_matches, args.split, args.noise);
        matches = std::move(ds.matches);
        gt = std::move(ds.gt);
    } else if (!args.matches.empty()) {
        matches = read_matches_csv(args.matches);
    } else {
        throw Error(Errc::BadInput, "fithomography needs --matches or --synthesize");
    }
    if (matches.size() < 8)
        throw Error(Errc::BadInput, "need at least 8 matches for two models");
    std::filesystem::create_directories(args.out);

    std::vector<Point2> first;
    first.reserve(matches.size());
    for (const auto& m : matches) first.push_back(m.p);
    bool fallback = false;
    auto g = point_graph(first, 5.0, &fallback);  // weights exp(-d^2/5^2)
    if (fallback)
        std::cerr << "warning: degenerate triangulation; using k-nearest (k=6) graph\n";

    EnergyConfig cfg;
    cfg.lambda = args.lambda;
    cfg.gamma = args.gamma;
    cfg.label_cost = args.label_cost;
    Variant variant = detail::parse_variant(args.variant);
    cfg.weight_mode =
        variant == Variant::FixedW ? WeightMode::Uniform : WeightMode::Reestimated;
    // on-model cost scale: ln((2pi)^2 |Sigma|^0.5) ~= ln((2pi)^2 * 25) for sigma = 5
    double base_cost = std::log(kTwoPi * kTwoPi * args.hom_sigma * args.hom_sigma);
    cfg.outlier_cost = args.outlier_cost >= 0
                           ? args.outlier_cost
                           : base_cost + 8.0 + (cfg.weight_mode == WeightMode::Uniform
                                                    ? std::log(double(args.proposals))
                                                    : 1.0);

    ModelPolicy policy;
    policy.kind = ModelPolicy::Kind::Homography;
    policy.hom_sigma = args.hom_sigma;

    PearlOptions po;
    po.num_proposals = args.proposals;
    po.seed = args.seed;
    po.max_outer = args.max_iters;

    OptimizeOptions opt;
    opt.breakpoints = args.breakpoints;

    std::vector<Datum> data;
    data.reserve(matches.size());
    for (const auto& m : matches) data.emplace_back(m);

    auto rep = pearl_fit(data, g, cfg, policy, po, opt);

    {
        std::ofstream out(args.out + "/assignments.csv", std::ios::binary);
        char buf[200];
        for (std::size_t i = 0; i < matches.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", matches[i].p.x,
                          matches[i].p.y, matches[i].q.x, matches[i].q.y,
                          rep.labeling.assignments[i]);
            out << buf;
        }
    }
    write_scatter_svg(args.out + "/points.svg", first, rep.labeling.assignments, 512.0);
    auto hist = detail::label_histogram_outputs(args.out, rep.labeling);

    Json j;
    j["command"] = "fithomography";
    j["variant"] = args.variant;
    j["seed"] = args.seed;
    j["proposals"] = args.proposals;
    j["graph"] = g.kind == NeighborGraph::Kind::Delaunay ? "delaunay" : "knn6";
    j["outlier_cost"] = cfg.outlier_cost;
    j.update(detail::report_common(rep, cfg, data, g, std::nullopt));
    j["label_histogram"] = hist;
    if (!gt.empty()) {
        j["accuracy"] = label_accuracy(rep.labeling, gt);
        // volumes of the two largest recovered models, for bias inspection
        auto sizes = rep.labeling.segment_sizes();
        std::sort(sizes.rbegin(), sizes.rend());
        Json top = Json::array();
        for (std::size_t i = 0; i < std::min<std::size_t>(4, sizes.size()) && sizes[i] > 0; ++i)
            top.push_back(sizes[i]);
        j["top_model_sizes"] = top;
    }
    detail::emit_report(args.out, j);
    return 0;
}

// ---------------------------------------------------------------------------
// gamma-sweep

struct GammaSweepArgs {
    std::string image;  // grayscale PGM
    std::string out = "out";
    std::vector<double> gammas = {0.0, 1.0, 3.0};
    int k_init = 5;
    double lambda = 2.0;
    double sigma = 0.1;
    double label_cost = 0.0;
    int breakpoints = 16;
    int max_iters = 100;
    std::uint64_t seed = 1;
    bool no_contrast = false;
};

inline int cmd_gamma_sweep(const GammaSweepArgs& args) {
    auto img = read_pnm(args.image);
    if (img.channels != 1) throw Error(Errc::BadInput, "gamma-sweep needs a grayscale PGM");
    std::filesystem::create_directories(args.out);

    auto data = detail::image_to_data(img);
    auto g = grid8_graph(img.width, img.height, data, !args.no_contrast);

    // initial labeling: rank quantiles of intensity, K equal chunks
    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::get<GrayIntensity>(data[std::size_t(a)]) <
               std::get<GrayIntensity>(data[std::size_t(b)]);
    });
    Labeling init;
    init.num_labels = args.k_init;
    init.assignments.resize(data.size());
    for (std::size_t r = 0; r < order.size(); ++r)
        init.assignments[std::size_t(order[r])] =
            std::min<int>(args.k_init - 1, int(r * std::size_t(args.k_init) / order.size()));

    ModelPolicy policy;
    policy.kind = ModelPolicy::Kind::Gaussian;
    policy.sigma = args.sigma;

    OptimizeOptions opt;
    opt.breakpoints = args.breakpoints;
    opt.max_iters = args.max_iters;

    auto run_one = [&](double gamma) {
        EnergyConfig cfg;
        cfg.lambda = args.lambda;
        cfg.gamma = gamma;
        cfg.label_cost = args.label_cost;
        return segment_pipeline(data, g, cfg, init, Variant::HighOrder, policy, opt);
    };

    std::vector<SolveReport> reps;
    if (args.gammas.size() == 1) {
        reps.push_back(run_one(args.gammas[0]));
    } else {
        std::vector<std::future<SolveReport>> jobs;
        for (double gamma : args.gammas)
            jobs.push_back(std::async(std::launch::async, run_one, gamma));
        for (auto& jb : jobs) reps.push_back(jb.get());
    }

    Json j;
    j["command"] = "gamma-sweep";
    j["k_init"] = args.k_init;
    j["lambda"] = args.lambda;
    Json table = Json::array();
    std::string text = "gamma active_labels entropy kl_uniform energy\n";
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const auto& rep = reps[i];
        char name[64];
        std::snprintf(name, sizeof name, "mask_gamma_%g.pgm", args.gammas[i]);
        write_pnm(args.out + "/" + name,
                  mask_to_image(img.width, img.height, rep.labeling.assignments));

        auto v = volume_distribution(rep.labeling);
        Json row;
        row["gamma"] = args.gammas[i];
        row["active_labels"] = rep.labeling.active_labels();
        row["entropy"] = entropy(v);
        row["kl_uniform"] = kl_to_target(v, uniform_weights(rep.labeling.num_labels));
        row["volumes"] = v.v;
        row["energy"] = rep.final_energy();
        row["mask"] = name;
        table.push_back(row);
        char line[160];
        std::snprintf(line, sizeof line, "%g %d %.6f %.6f %.6f\n", args.gammas[i],
                      rep.labeling.active_labels(), entropy(v),
                      kl_to_target(v, uniform_weights(rep.labeling.num_labels)),
                      rep.final_energy());
        text += line;
    }
    j["sweep"] = table;
    write_text_file(args.out + "/label_counts.txt", text);
    detail::emit_report(args.out, j);
    return 0;
}

// ---------------------------------------------------------------------------
// synth: writes generator outputs so every command has file-based inputs

struct SynthArgs {
    std::string kind;  // bias | regions3 | lines | homography
    std::string out = "out";
    std::uint64_t seed = 1;
};

inline int cmd_synth(const SynthArgs& args) {
    std::filesystem::create_directories(args.out);
    auto to_image = [](const SyntheticImage& s) {
        Image img;
        img.width = s.width;
        img.height = s.height;
        img.channels = 1;
        img.data.resize(s.gray.size());
        for (std::size_t i = 0; i < s.gray.size(); ++i)
            img.data[i] = std::uint8_t(std::lround(std::clamp(s.gray[i], 0.0, 1.0) * 255.0));
        return img;
    };

    Json j;
    j["command"] = "synth";
    j["kind"] = args.kind;
    j["seed"] = args.seed;
    if (args.kind == "bias") {
        auto s = make_bias_image(args.seed);
        write_pnm(args.out + "/image.pgm", to_image(s));
        write_pnm(args.out + "/gt.pgm", mask_to_image(s.width, s.height, s.gt));
        // outer box = whole image, inner box = the true strip
        write_text_file(args.out + "/boxes.txt",
                        "outer 0 0 " + std::to_string(s.width) + " " + std::to_string(s.height) +
                            "\ninner 0 0 " + std::to_string(s.width / 4) + " " +
                            std::to_string(s.height) + "\n");
    } else if (args.kind == "regions3") {
        auto s = make_regions3_image(args.seed);
        write_pnm(args.out + "/image.pgm", to_image(s));
        write_pnm(args.out + "/gt.pgm", mask_to_image(s.width, s.height, s.gt));
    } else if (args.kind == "lines") {
        auto ds = make_line_dataset(args.seed);
        write_points_csv(args.out + "/points.csv", ds.points);
        write_points_csv(args.out + "/points_gt.csv", ds.points, ds.gt);
    } else if (args.kind == "homography") {
        auto ds = make_homography_dataset(args.seed);
        std::ofstream out(args.out + "/matches.csv", std::ios::binary);
        char buf[200];
        for (std::size_t i = 0; i < ds.matches.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", ds.matches[i].p.x,
                          ds.matches[i].p.y, ds.matches[i].q.x, ds.matches[i].q.y);
            out << buf;
        }
    } else {
        throw Error(Errc::BadInput, "unknown synth kind '" + args.kind + "'");
    }
    detail::emit_report(args.out, j);
    return 0;
}

}  // namespace volcut

#endif  // VOLCUT_COMMANDS_HPP
