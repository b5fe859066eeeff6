#ifndef VOLCUT_SYNTHETIC_HPP
#define VOLCUT_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/models.hpp"

namespace volcut {

struct SyntheticImage {
    int width = 0, height = 0;
    std::vector<double> gray;  // row-major, in [0,1]
    std::vector<int> gt;       // ground-truth label per pixel
};

/// 100x100 grayscale with a 25/75 split: the left strip (25 columns) draws
/// from N(0.45, 0.1), the rest from N(0.55, 0.1); heavy overlap makes the
/// equal-volume bias decisive. Foreground (strip) is label 1.
inline SyntheticImage make_bias_image(std::uint64_t seed, int width = 100, int height = 100) {
    SyntheticImage img;
    img.width = width;
    img.height = height;
    img.gray.resize(std::size_t(width) * std::size_t(height));
    img.gt.resize(img.gray.size());
    Rng rng(seed);
    int strip = width / 4;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            std::size_t p = std::size_t(y) * std::size_t(width) + std::size_t(x);
            bool fg = x < strip;
            img.gt[p] = fg ? 1 : 0;
            img.gray[p] = std::clamp(rng.normal(fg ? 0.45 : 0.55, 0.1), 0.0, 1.0);
        }
    return img;
}

/// Three vertical regions with unequal areas (50/30/20) and means spread
/// wide enough to segment but close enough that volume terms matter.
inline SyntheticImage make_regions3_image(std::uint64_t seed, int width = 60, int height = 60) {
    SyntheticImage img;
    img.width = width;
    img.height = height;
    img.gray.resize(std::size_t(width) * std::size_t(height));
    img.gt.resize(img.gray.size());
    Rng rng(seed);
    int b1 = width / 2, b2 = width * 8 / 10;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            std::size_t p = std::size_t(y) * std::size_t(width) + std::size_t(x);
            int region = x < b1 ? 0 : (x < b2 ? 1 : 2);
            double mean = region == 0 ? 0.25 : (region == 1 ? 0.5 : 0.75);
            img.gt[p] = region;
            img.gray[p] = std::clamp(rng.normal(mean, 0.08), 0.0, 1.0);
        }
    return img;
}

struct LineDatasetOptions {
    int num_lines = 4;
    std::vector<double> probabilities = {0.4, 0.3, 0.2, 0.1};
    int num_inliers = 1000;
    int num_outliers = 200;
    double sigma = 0.025;
};

struct LineDataset {
    std::vector<Point2> points;
    std::vector<int> gt;  // line index or kOutlier
    std::vector<LineModel> lines;
};

/// Points sampled from fixed lines in the unit square with the given
/// per-line probabilities, perpendicular noise, and uniform outliers.
inline LineDataset make_line_dataset(std::uint64_t seed, const LineDatasetOptions& opt = {}) {
    // segment endpoints; the first four give distinct, crossing lines
    static const double segs[][4] = {
        {0.05, 0.10, 0.95, 0.90},
        {0.05, 0.90, 0.95, 0.15},
        {0.25, 0.05, 0.40, 0.95},
        {0.05, 0.72, 0.95, 0.80},
        {0.60, 0.05, 0.70, 0.95},
        {0.05, 0.40, 0.95, 0.35},
    };
    const int max_lines = int(sizeof(segs) / sizeof(segs[0]));
    if (opt.num_lines < 1 || opt.num_lines > max_lines)
        throw Error(Errc::BadInput, "num_lines out of range");
    if (int(opt.probabilities.size()) != opt.num_lines)
        throw Error(Errc::BadInput, "need one probability per line");

    LineDataset ds;
    Rng rng(seed);
    std::vector<double> cum;
    double total = 0;
    for (double p : opt.probabilities) {
        total += p;
        cum.push_back(total);
    }

    for (int l = 0; l < opt.num_lines; ++l) {
        double dx = segs[l][2] - segs[l][0], dy = segs[l][3] - segs[l][1];
        double norm = std::hypot(dx, dy);
        ds.lines.push_back({{segs[l][0], segs[l][1]}, dx / norm, dy / norm, opt.sigma});
    }

    for (int i = 0; i < opt.num_inliers; ++i) {
        double r = rng.uniform() * total;
        int l = int(std::lower_bound(cum.begin(), cum.end(), r) - cum.begin());
        l = std::min(l, opt.num_lines - 1);
        const auto& seg = segs[l];
        double t = rng.uniform();
        double x = seg[0] + t * (seg[2] - seg[0]);
        double y = seg[1] + t * (seg[3] - seg[1]);
        const auto& ln = ds.lines[std::size_t(l)];
        double off = rng.normal(0.0, opt.sigma);
        ds.points.push_back({x - off * ln.dir_y, y + off * ln.dir_x});
        ds.gt.push_back(l);
    }
    for (int i = 0; i < opt.num_outliers; ++i) {
        ds.points.push_back({rng.uniform(), rng.uniform()});
        ds.gt.push_back(kOutlier);
    }
    return ds;
}

struct HomographyDataset {
    std::vector<MatchPair> matches;
    std::vector<int> gt;  // plane index
    Eigen::Matrix3d h0, h1;
};

/// Matches from two planes meeting at a vertical fold (like two walls): the
/// homographies agree on the fold line, so matches near it are ambiguous and
/// volume terms decide who claims them. The fold position sets the split.
inline HomographyDataset make_homography_dataset(std::uint64_t seed, int num_matches = 300,
                                                 double split = 0.7, double noise = 1.0) {
    HomographyDataset ds;
    const double extent = 512.0;
    const double fold = split * extent;
    ds.h0 << 1.04, 0.05, 8.0, -0.03, 0.99, -5.0, 4e-5, -2e-5, 1.0;
    // h1 = h0 + v * l^T with l the fold line, so both agree along the fold
    Eigen::Vector3d v(0.5, -0.37, 1.6e-3);
    Eigen::Vector3d l(1.0, 0.0, -fold);
    ds.h1 = ds.h0 + v * l.transpose();
    Rng rng(seed);
    for (int i = 0; i < num_matches; ++i) {
        Point2 p{rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
        bool first_plane = p.x < fold;
        const Eigen::Matrix3d& h = first_plane ? ds.h0 : ds.h1;
        Eigen::Vector3d q = h * Eigen::Vector3d(p.x, p.y, 1.0);
        ds.matches.push_back(
            {p, {q.x() / q.z() + noise * rng.normal(), q.y() / q.z() + noise * rng.normal()}});
        ds.gt.push_back(first_plane ? 0 : 1);
    }
    return ds;
}

}  // namespace volcut

#endif  // VOLCUT_SYNTHETIC_HPP
