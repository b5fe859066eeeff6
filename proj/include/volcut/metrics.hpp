#ifndef VOLCUT_METRICS_HPP
#define VOLCUT_METRICS_HPP

#include <algorithm>
#include <span>
#include <vector>

#include "volcut/common.hpp"
#include "volcut/energy.hpp"

namespace volcut {

/// Minimum-cost assignment (Hungarian algorithm with potentials, O(n^3)).
/// cost is rectangular; returns for each row the assigned column (-1 when
/// rows exceed columns).
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    if (cost.empty()) return {};
    int rows = int(cost.size());
    int cols = int(cost[0].size());
    int n = std::max(rows, cols);

    auto at = [&](int r, int c) -> double {
        return (r < rows && c < cols) ? cost[std::size_t(r)][std::size_t(c)] : 0.0;
    };

    std::vector<double> u(std::size_t(n) + 1, 0), v(std::size_t(n) + 1, 0);
    std::vector<int> p(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(std::size_t(n) + 1, kInf);
        std::vector<char> used(std::size_t(n) + 1, false);
        do {
            used[std::size_t(j0)] = true;
            int i0 = p[std::size_t(j0)], j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[std::size_t(j)]) continue;
                double cur = at(i0 - 1, j - 1) - u[std::size_t(i0)] - v[std::size_t(j)];
                if (cur < minv[std::size_t(j)]) {
                    minv[std::size_t(j)] = cur;
                    way[std::size_t(j)] = j0;
                }
                if (minv[std::size_t(j)] < delta) {
                    delta = minv[std::size_t(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[std::size_t(j)]) {
                    u[std::size_t(p[std::size_t(j)])] += delta;
                    v[std::size_t(j)] -= delta;
                } else {
                    minv[std::size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[std::size_t(j0)] != 0);
        do {
            int j1 = way[std::size_t(j0)];
            p[std::size_t(j0)] = p[std::size_t(j1)];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(std::size_t(rows), -1);
    for (int j = 1; j <= n; ++j) {
        int i = p[std::size_t(j)];
        if (i >= 1 && i <= rows && j <= cols) row_to_col[std::size_t(i - 1)] = j - 1;
    }
    return row_to_col;
}

/// Fraction of misclassified elements. K = 2 with a known foreground label
/// compares directly; otherwise labels are permuted optimally (Hungarian on
/// the confusion matrix) before counting. Ground-truth outliers and outlier
/// assignments count as one distinguished, non-permutable class.
inline double misclassification_error(const Labeling& s, std::span<const int> gt,
                                      bool known_foreground = false) {
    const std::size_t n = s.assignments.size();
    if (known_foreground) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i) wrong += s.assignments[i] != gt[i];
        return double(wrong) / double(n);
    }

    int ks = 0, kg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ks = std::max(ks, s.assignments[i] + 1);
        kg = std::max(kg, gt[i] + 1);
    }
    std::vector<std::vector<double>> confusion(std::size_t(ks),
                                               std::vector<double>(std::size_t(kg), 0.0));
    std::size_t outlier_hits = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ++total;
        if (s.assignments[i] == kOutlier || gt[i] == kOutlier) {
            outlier_hits += s.assignments[i] == gt[i];
            continue;
        }
        confusion[std::size_t(s.assignments[i])][std::size_t(gt[i])] += 1.0;
    }
    std::size_t matched = outlier_hits;
    if (ks > 0 && kg > 0) {
        // maximize matches == minimize negated counts
        for (auto& row : confusion)
            for (auto& c : row) c = -c;
        auto assign = hungarian(confusion);
        for (int r = 0; r < ks; ++r)
            if (assign[std::size_t(r)] >= 0)
                matched += std::size_t(-confusion[std::size_t(r)][std::size_t(assign[std::size_t(r)])]);
    }
    return 1.0 - double(matched) / double(total);
}

/// Point-label accuracy after optimal label matching (1 - misclassification).
inline double label_accuracy(const Labeling& s, std::span<const int> gt) {
    return 1.0 - misclassification_error(s, gt, false);
}

}  // namespace volcut

#endif  // VOLCUT_METRICS_HPP
