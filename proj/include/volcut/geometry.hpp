#ifndef VOLCUT_GEOMETRY_HPP
#define VOLCUT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/energy.hpp"
#include "volcut/models.hpp"

namespace volcut {

/// Delaunay triangulation edges by Bowyer-Watson insertion. Throws
/// DegenerateFit when no triangulation exists (fewer than 3 points or all
/// points collinear); callers fall back to a k-nearest graph.
inline std::vector<std::pair<int, int>> delaunay_edges(std::span<const Point2> pts) {
    const int n = int(pts.size());
    if (n < 3) throw Error(Errc::DegenerateFit, "triangulation needs >= 3 points");

    // collinearity check via the scatter matrix
    long double cx = 0, cy = 0;
    for (const auto& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= n;
    cy /= n;
    long double sxx = 0, sxy = 0, syy = 0, scale = 0;
    for (const auto& p : pts) {
        long double dx = p.x - cx, dy = p.y - cy;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        scale = std::max(scale, dx * dx + dy * dy);
    }
    long double det = sxx * syy - sxy * sxy;  // ~0 iff collinear
    if (scale == 0 || det <= 1e-18L * scale * scale * n * n)
        throw Error(Errc::DegenerateFit, "all points collinear");

    struct Tri {
        int a, b, c;
    };

    double lo_x = kInf, hi_x = -kInf, lo_y = kInf, hi_y = -kInf;
    for (const auto& p : pts) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    double span_xy = std::max(hi_x - lo_x, hi_y - lo_y);
    if (span_xy <= 0) throw Error(Errc::DegenerateFit, "coincident points");
    double mx = (lo_x + hi_x) / 2, my = (lo_y + hi_y) / 2;

    // vertices n, n+1, n+2 form a super-triangle enclosing everything
    std::vector<Point2> v(pts.begin(), pts.end());
    v.push_back({mx - 40 * span_xy, my - 20 * span_xy});
    v.push_back({mx + 40 * span_xy, my - 20 * span_xy});
    v.push_back({mx, my + 40 * span_xy});

    auto in_circumcircle = [&v](const Tri& t, const Point2& p) {
        long double ax = v[std::size_t(t.a)].x - p.x, ay = v[std::size_t(t.a)].y - p.y;
        long double bx = v[std::size_t(t.b)].x - p.x, by = v[std::size_t(t.b)].y - p.y;
        long double ccx = v[std::size_t(t.c)].x - p.x, ccy = v[std::size_t(t.c)].y - p.y;
        long double d = (ax * ax + ay * ay) * (bx * ccy - ccx * by) -
                        (bx * bx + by * by) * (ax * ccy - ccx * ay) +
                        (ccx * ccx + ccy * ccy) * (ax * by - bx * ay);
        // positive when p lies inside the circumcircle of a CCW triangle
        long double orient = (v[std::size_t(t.b)].x - v[std::size_t(t.a)].x) *
                                 (v[std::size_t(t.c)].y - v[std::size_t(t.a)].y) -
                             (v[std::size_t(t.c)].x - v[std::size_t(t.a)].x) *
                                 (v[std::size_t(t.b)].y - v[std::size_t(t.a)].y);
        return orient >= 0 ? d > 0 : d < 0;
    };

    std::vector<Tri> tris = {{n, n + 1, n + 2}};
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, int>> hole;
        std::vector<Tri> keep;
        for (const auto& t : tris) {
            if (in_circumcircle(t, v[std::size_t(i)])) {
                hole.push_back({t.a, t.b});
                hole.push_back({t.b, t.c});
                hole.push_back({t.c, t.a});
            } else {
                keep.push_back(t);
            }
        }
        // edges appearing twice are interior to the hole and disappear
        std::vector<std::pair<int, int>> boundary;
        for (const auto& e : hole) {
            auto rev = std::make_pair(e.second, e.first);
            auto it = std::find(boundary.begin(), boundary.end(), rev);
            if (it != boundary.end()) boundary.erase(it);
            else boundary.push_back(e);
        }
        tris = std::move(keep);
        for (const auto& e : boundary) tris.push_back({e.first, e.second, i});
    }

    std::vector<std::pair<int, int>> edges;
    for (const auto& t : tris) {
        if (t.a >= n || t.b >= n || t.c >= n) continue;  // touches the super-triangle
        auto push = [&edges](int a, int b) {
            edges.push_back({std::min(a, b), std::max(a, b)});
        };
        push(t.a, t.b);
        push(t.b, t.c);
        push(t.c, t.a);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.empty()) throw Error(Errc::DegenerateFit, "triangulation produced no edges");
    return edges;
}

/// Undirected k-nearest-neighbor edges (deterministic tie-break by index).
inline std::vector<std::pair<int, int>> knn_edges(std::span<const Point2> pts, int k) {
    const int n = int(pts.size());
    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<double, int>> dist;
    for (int i = 0; i < n; ++i) {
        dist.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double dx = pts[std::size_t(i)].x - pts[std::size_t(j)].x;
            double dy = pts[std::size_t(i)].y - pts[std::size_t(j)].y;
            dist.push_back({dx * dx + dy * dy, j});
        }
        std::sort(dist.begin(), dist.end());
        for (int m = 0; m < std::min(k, int(dist.size())); ++m) {
            int j = dist[std::size_t(m)].second;
            edges.push_back({std::min(i, j), std::max(i, j)});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

/// Neighbor graph over points with weights exp(-d^2 / falloff^2); Delaunay
/// when possible, k-nearest (k = 6) fallback for degenerate geometry.
/// Sets *used_fallback when a fallback happened.
inline NeighborGraph point_graph(std::span<const Point2> pts, double falloff,
                                 bool* used_fallback = nullptr) {
    NeighborGraph g;
    std::vector<std::pair<int, int>> edges;
    try {
        edges = delaunay_edges(pts);
        g.kind = NeighborGraph::Kind::Delaunay;
        if (used_fallback) *used_fallback = false;
    } catch (const Error&) {
        edges = knn_edges(pts, 6);
        g.kind = NeighborGraph::Kind::Custom;
        if (used_fallback) *used_fallback = true;
    }
    for (const auto& e : edges) {
        double dx = pts[std::size_t(e.first)].x - pts[std::size_t(e.second)].x;
        double dy = pts[std::size_t(e.first)].y - pts[std::size_t(e.second)].y;
        double d2 = dx * dx + dy * dy;
        g.edges.push_back({e.first, e.second, std::exp(-d2 / (falloff * falloff))});
    }
    return g;
}

/// 8-connected grid graph. With contrast weighting the edge weight is
/// exp(-beta ||I_p - I_q||^2) / dist(p, q), beta = 1 / (2 E[||I_p - I_q||^2]).
inline NeighborGraph grid8_graph(int width, int height,
                                 std::span<const Datum> data = {}, bool contrast = false) {
    auto sq_diff = [&](int p, int q) -> double {
        if (const auto* a = std::get_if<GrayIntensity>(&data[std::size_t(p)])) {
            double d = *a - std::get<GrayIntensity>(data[std::size_t(q)]);
            return d * d;
        }
        const auto& a = std::get<PixelColor>(data[std::size_t(p)]);
        const auto& b = std::get<PixelColor>(data[std::size_t(q)]);
        return (a.r - b.r) * (a.r - b.r) + (a.g - b.g) * (a.g - b.g) + (a.b - b.b) * (a.b - b.b);
    };

    std::vector<std::array<int, 2>> offsets = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    NeighborGraph g;
    g.kind = NeighborGraph::Kind::Grid8;

    double beta = 0.0;
    if (contrast) {
        double sum = 0;
        long long cnt = 0;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                for (auto& o : offsets) {
                    int nx = x + o[0], ny = y + o[1];
                    if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
                    sum += sq_diff(y * width + x, ny * width + nx);
                    ++cnt;
                }
        beta = sum > 0 ? double(cnt) / (2.0 * sum) : 0.0;
    }

    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (auto& o : offsets) {
                int nx = x + o[0], ny = y + o[1];
                if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
                int p = y * width + x, q = ny * width + nx;
                double dist = (o[0] != 0 && o[1] != 0) ? std::sqrt(2.0) : 1.0;
                double w = 1.0 / dist;
                if (contrast) w *= std::exp(-beta * sq_diff(p, q));
                g.edges.push_back({p, q, w});
            }
    return g;
}

}  // namespace volcut

#endif  // VOLCUT_GEOMETRY_HPP
