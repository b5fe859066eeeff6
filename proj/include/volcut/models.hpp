#ifndef VOLCUT_MODELS_HPP
#define VOLCUT_MODELS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "volcut/common.hpp"

namespace volcut {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// Observations

struct PixelColor {
    double r = 0, g = 0, b = 0;
};

using GrayIntensity = double;

struct Point2 {
    double x = 0, y = 0;
};

/// A pair of matching points, one per image, in pixel units.
struct MatchPair {
    Point2 p;  // first image
    Point2 q;  // second image
};

using Datum = std::variant<PixelColor, GrayIntensity, Point2, MatchPair>;

// ---------------------------------------------------------------------------
// Probability models

/// Color histogram over bins_per_channel^3 RGB bins, normalized to total
/// mass 1 with a smoothing floor so empty bins keep epsilon/(n + eps*B) mass.
struct HistogramModel {
    int bins_per_channel = 16;
    std::vector<double> counts;  // size bins_per_channel^3, sums to 1
    double smoothing_epsilon = 0.0;

    int num_bins() const { return bins_per_channel * bins_per_channel * bins_per_channel; }
};

/// Channel value in [0,1] -> bin index in [0, bins), closed upper edge.
inline int color_bin(double v, int bins) {
    int b = int(v * bins);
    return std::clamp(b, 0, bins - 1);
}

inline int histogram_bin(const HistogramModel& h, const PixelColor& c) {
    int b = h.bins_per_channel;
    return (color_bin(c.r, b) * b + color_bin(c.g, b)) * b + color_bin(c.b, b);
}

/// Gaussian intensity model; sigma is a fixed configuration parameter shared
/// across segments and never re-estimated.
struct GaussianModel {
    double mu = 0.5;
    double sigma = 0.1;
};

/// Line with unit direction; sigma is the known perpendicular noise level.
struct LineModel {
    Point2 point;
    double dir_x = 1, dir_y = 0;
    double sigma = 0.025;

    double perp_distance(const Point2& p) const {
        // component of (p - point) along the unit normal (-dir_y, dir_x)
        return std::abs(-(p.x - point.x) * dir_y + (p.y - point.y) * dir_x);
    }
};

/// Homography with residual covariance for the symmetric Mahalanobis
/// transfer distance.
struct HomographyModel {
    Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
    Eigen::Matrix2d Sigma = Eigen::Matrix2d::Identity();
};

using Model = std::variant<HistogramModel, GaussianModel, LineModel, HomographyModel>;

// ---------------------------------------------------------------------------
// Estimation

/// counts = (empirical + eps) / (n + eps * B); throws EmptySegment on no data.
inline HistogramModel fit_histogram(std::span<const PixelColor> data, int bins_per_channel,
                                    double smoothing_epsilon) {
    if (bins_per_channel < 1) throw Error(Errc::BadInput, "bins_per_channel must be >= 1");
    if (smoothing_epsilon < 0) throw Error(Errc::BadInput, "smoothing_epsilon must be >= 0");
    if (data.empty()) throw Error(Errc::EmptySegment, "fit_histogram on empty data");

    HistogramModel h;
    h.bins_per_channel = bins_per_channel;
    h.smoothing_epsilon = smoothing_epsilon;
    h.counts.assign(std::size_t(h.num_bins()), 0.0);
    for (const auto& c : data) h.counts[std::size_t(histogram_bin(h, c))] += 1.0;
    double denom = double(data.size()) + smoothing_epsilon * double(h.num_bins());
    for (auto& m : h.counts) m = (m + smoothing_epsilon) / denom;
    return h;
}

inline GaussianModel fit_gaussian_mean(std::span<const double> data, double sigma) {
    if (data.empty()) throw Error(Errc::EmptySegment, "fit_gaussian_mean on empty data");
    if (!(sigma > 0)) throw Error(Errc::BadInput, "sigma must be positive");
    double s = 0;
    for (double v : data) s += v;
    return {s / double(data.size()), sigma};
}

/// Total-least-squares line: centroid plus the dominant eigenvector of the
/// 2x2 scatter matrix; minimizes summed squared perpendicular distance.
inline LineModel fit_line(std::span<const Point2> data, double sigma) {
    if (!(sigma > 0)) throw Error(Errc::BadInput, "sigma must be positive");
    if (data.size() < 2) throw Error(Errc::DegenerateFit, "fit_line needs >= 2 points");

    double cx = 0, cy = 0;
    for (const auto& p : data) {
        cx += p.x;
        cy += p.y;
    }
    cx /= double(data.size());
    cy /= double(data.size());

    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : data) {
        Eigen::Vector2d d(p.x - cx, p.y - cy);
        scatter += d * d.transpose();
    }
    if (scatter.norm() == 0.0)
        throw Error(Errc::DegenerateFit, "fit_line needs >= 2 distinct points");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
    Eigen::Vector2d dir = eig.eigenvectors().col(1);  // largest eigenvalue
    if (dir.x() < 0 || (dir.x() == 0 && dir.y() < 0)) dir = -dir;  // canonical sign
    return {{cx, cy}, dir.x(), dir.y(), sigma};
}

namespace detail {

inline Eigen::Vector2d apply_homography(const Eigen::Matrix3d& h, const Point2& p) {
    Eigen::Vector3d v = h * Eigen::Vector3d(p.x, p.y, 1.0);
    if (std::abs(v.z()) < 1e-300) return Eigen::Vector2d(kInf, kInf);
    return v.hnormalized();
}

// Similarity normalization (centroid to origin, mean distance sqrt(2)).
inline Eigen::Matrix3d conditioning_transform(std::span<const MatchPair> ms, bool first) {
    double cx = 0, cy = 0;
    for (const auto& m : ms) {
        const Point2& p = first ? m.p : m.q;
        cx += p.x;
        cy += p.y;
    }
    cx /= double(ms.size());
    cy /= double(ms.size());
    double dist = 0;
    for (const auto& m : ms) {
        const Point2& p = first ? m.p : m.q;
        dist += std::hypot(p.x - cx, p.y - cy);
    }
    dist /= double(ms.size());
    double s = dist > 0 ? std::sqrt(2.0) / dist : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

}  // namespace detail

/// Symmetric Mahalanobis transfer distance squared:
/// ||q - Hp||^2_Sigma + ||p - H^-1 q||^2_Sigma.
inline double symmetric_transfer_sq(const HomographyModel& m, const MatchPair& match) {
    Eigen::Matrix2d inv = m.Sigma.inverse();
    Eigen::Vector2d fwd = detail::apply_homography(m.H, match.p);
    Eigen::Vector2d bwd = detail::apply_homography(m.H.inverse(), match.q);
    if (!fwd.allFinite() || !bwd.allFinite()) return kInf;
    Eigen::Vector2d e1 = Eigen::Vector2d(match.q.x, match.q.y) - fwd;
    Eigen::Vector2d e2 = Eigen::Vector2d(match.p.x, match.p.y) - bwd;
    return e1.dot(inv * e1) + e2.dot(inv * e2);
}

/// DLT least-squares homography (normalized coordinates), then Sigma from
/// the empirical second moment of the transfer residuals in both images,
/// floored to SPD by adding tau * I when near-singular.
inline HomographyModel fit_homography(std::span<const MatchPair> matches) {
    if (matches.size() < 4) throw Error(Errc::DegenerateFit, "fit_homography needs >= 4 matches");

    Eigen::Matrix3d t1 = detail::conditioning_transform(matches, true);
    Eigen::Matrix3d t2 = detail::conditioning_transform(matches, false);

    Eigen::MatrixXd a(2 * matches.size(), 9);
    for (std::size_t i = 0; i < matches.size(); ++i) {
        Eigen::Vector3d p = t1 * Eigen::Vector3d(matches[i].p.x, matches[i].p.y, 1.0);
        Eigen::Vector3d q = t2 * Eigen::Vector3d(matches[i].q.x, matches[i].q.y, 1.0);
        double x = p.x() / p.z(), y = p.y() / p.z();
        double u = q.x() / q.z(), v = q.y() / q.z();
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    if (svd.rank() < 8) throw Error(Errc::DegenerateFit, "rank-deficient homography system");
    Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);

    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    Eigen::Matrix3d hm = t2.inverse() * hn * t1;
    if (std::abs(hm.determinant()) < 1e-12 * std::pow(hm.norm(), 3))
        throw Error(Errc::DegenerateFit, "singular homography");
    hm /= hm.norm();  // Frobenius norm 1
    // canonical sign: largest-magnitude entry positive
    double biggest = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (std::abs(hm(r, c)) > std::abs(biggest)) biggest = hm(r, c);
    if (biggest < 0) hm = -hm;

    HomographyModel model;
    model.H = hm;

    Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
    Eigen::Matrix3d hinv = hm.inverse();
    for (const auto& m : matches) {
        Eigen::Vector2d e1 = Eigen::Vector2d(m.q.x, m.q.y) - detail::apply_homography(hm, m.p);
        Eigen::Vector2d e2 = Eigen::Vector2d(m.p.x, m.p.y) - detail::apply_homography(hinv, m.q);
        second += e1 * e1.transpose() + e2 * e2.transpose();
    }
    second /= 2.0 * double(matches.size());

    constexpr double kTau = 1e-6;  // px^2
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(second);
    if (eig.eigenvalues()(0) < kTau) second += kTau * Eigen::Matrix2d::Identity();
    model.Sigma = second;
    return model;
}

// ---------------------------------------------------------------------------
// Likelihood

inline double neg_log_likelihood(const HistogramModel& m, const PixelColor& c) {
    double mass = m.counts[std::size_t(histogram_bin(m, c))];
    return mass > 0 ? -std::log(mass) : kInf;
}

inline double neg_log_likelihood(const GaussianModel& m, GrayIntensity v) {
    double d = v - m.mu;
    return d * d / (2.0 * m.sigma * m.sigma) + std::log(m.sigma * std::sqrt(kTwoPi));
}

inline double neg_log_likelihood(const LineModel& m, const Point2& p) {
    double d = m.perp_distance(p);
    return d * d / (2.0 * m.sigma * m.sigma) + std::log(m.sigma * std::sqrt(kTwoPi));
}

inline double neg_log_likelihood(const HomographyModel& m, const MatchPair& match) {
    double d2 = symmetric_transfer_sq(m, match);
    if (!std::isfinite(d2)) return kInf;
    return 0.5 * d2 + std::log(kTwoPi * kTwoPi * std::sqrt(m.Sigma.determinant()));
}

/// -log P(datum | model); the datum kind must match the model kind.
inline double neg_log_likelihood(const Model& model, const Datum& datum) {
    if (const auto* h = std::get_if<HistogramModel>(&model)) {
        if (const auto* c = std::get_if<PixelColor>(&datum)) return neg_log_likelihood(*h, *c);
    } else if (const auto* g = std::get_if<GaussianModel>(&model)) {
        if (const auto* v = std::get_if<GrayIntensity>(&datum)) return neg_log_likelihood(*g, *v);
    } else if (const auto* l = std::get_if<LineModel>(&model)) {
        if (const auto* p = std::get_if<Point2>(&datum)) return neg_log_likelihood(*l, *p);
    } else if (const auto* hm = std::get_if<HomographyModel>(&model)) {
        if (const auto* mp = std::get_if<MatchPair>(&datum)) return neg_log_likelihood(*hm, *mp);
    }
    throw Error(Errc::BadInput, "datum kind does not match model kind");
}

}  // namespace volcut

#endif  // VOLCUT_MODELS_HPP
