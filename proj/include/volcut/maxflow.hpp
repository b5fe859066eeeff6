#ifndef VOLCUT_MAXFLOW_HPP
#define VOLCUT_MAXFLOW_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "volcut/common.hpp"

namespace volcut {

/// Exact s/t min-cut over a sparse graph with integer capacities.
///
/// Capacities are 64-bit integers; callers quantize real-valued energies
/// before construction. The solver is Dinic's algorithm with arcs kept in
/// insertion order, so identical construction sequences produce identical
/// flows and identical side assignments. After solve(), the source side is
/// the set of nodes reachable from the source in the residual graph (the
/// canonical minimal source set).
class FlowGraph {
  public:
    using Cap = long long;

    /// Adds n fresh nodes, returns the first id (ids are consecutive).
    int add_node(int n) {
        if (n < 1) throw Error(Errc::BadInput, "add_node requires n >= 1");
        int first = int(excess_source_.size());
        excess_source_.resize(first + n, 0);
        excess_sink_.resize(first + n, 0);
        head_.resize(first + n, -1);
        return first;
    }

    int num_nodes() const { return int(excess_source_.size()); }

    /// Accumulates terminal capacities for a node (repeated calls add).
    void add_tweights(int v, Cap cap_source, Cap cap_sink) {
        check_node(v);
        if (cap_source < 0 || cap_sink < 0)
            throw Error(Errc::NegativeCapacity, "terminal capacity < 0");
        excess_source_[v] += cap_source;
        excess_sink_[v] += cap_sink;
    }

    /// Adds a directed edge u->v with capacity cap and v->u with rev_cap.
    void add_edge(int u, int v, Cap cap, Cap rev_cap) {
        check_node(u);
        check_node(v);
        if (u == v) throw Error(Errc::BadInput, "self-edge");
        if (cap < 0 || rev_cap < 0) throw Error(Errc::NegativeCapacity, "edge capacity < 0");
        push_arc(u, v, cap);
        push_arc(v, u, rev_cap);
    }

    struct Solution {
        Cap flow = 0;
        std::vector<std::uint8_t> source_side;  // per node, 1 if on the source side
    };

    /// Computes max-flow / min-cut. The graph must be fully constructed.
    Solution solve() {
        if (solved_) throw Error(Errc::BadInput, "solve() called twice");
        solved_ = true;
        const int n = num_nodes();
        const int s = n, t = n + 1;
        head_.resize(n + 2, -1);

        Cap trivial = 0;  // flow routed directly source->node->sink
        for (int v = 0; v < n; ++v) {
            Cap m = std::min(excess_source_[v], excess_sink_[v]);
            trivial += m;
            Cap cs = excess_source_[v] - m;
            Cap ct = excess_sink_[v] - m;
            if (cs > 0) push_arc_pair(s, v, cs);
            if (ct > 0) push_arc_pair(v, t, ct);
        }

        Cap flow = trivial + dinic(s, t);

        Solution sol;
        sol.flow = flow;
        sol.source_side.assign(n, 0);
        // level_ holds the last BFS result: reachable-from-source nodes have
        // a nonnegative level.
        for (int v = 0; v < n; ++v) sol.source_side[v] = level_[v] >= 0 ? 1 : 0;
        return sol;
    }

  private:
    struct Arc {
        int to;
        int next;  // next arc index at the same tail, -1 terminates
        Cap cap;
    };

    void check_node(int v) const {
        if (v < 0 || v >= num_nodes()) throw Error(Errc::BadInput, "node id out of range");
    }

    void push_arc(int u, int v, Cap cap) {
        arcs_.push_back({v, head_[u], cap});
        head_[u] = int(arcs_.size()) - 1;
    }

    void push_arc_pair(int u, int v, Cap cap) {
        push_arc(u, v, cap);
        push_arc(v, u, 0);
    }

    bool bfs(int s, int t) {
        level_.assign(head_.size(), -1);
        queue_.clear();
        queue_.push_back(s);
        level_[s] = 0;
        for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
            int u = queue_[qi];
            for (int a = head_[u]; a != -1; a = arcs_[a].next) {
                if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
                    level_[arcs_[a].to] = level_[u] + 1;
                    queue_.push_back(arcs_[a].to);
                }
            }
        }
        return level_[t] >= 0;
    }

    Cap dfs(int u, int t, Cap limit) {
        if (u == t) return limit;
        Cap pushed = 0;
        for (int& a = iter_[u]; a != -1; a = arcs_[a].next) {
            Arc& arc = arcs_[a];
            if (arc.cap <= 0 || level_[arc.to] != level_[u] + 1) continue;
            Cap d = dfs(arc.to, t, std::min(limit - pushed, arc.cap));
            if (d > 0) {
                arc.cap -= d;
                arcs_[a ^ 1].cap += d;
                pushed += d;
                if (pushed == limit) return pushed;
            }
        }
        level_[u] = -1;
        return pushed;
    }

    Cap dinic(int s, int t) {
        constexpr Cap kCapInf = std::numeric_limits<Cap>::max();
        Cap flow = 0;
        while (bfs(s, t)) {
            iter_ = head_;
            flow += dfs(s, t, kCapInf);
        }
        // final bfs() left level_ describing residual reachability from s
        return flow;
    }

    std::vector<Cap> excess_source_, excess_sink_;
    std::vector<int> head_;
    std::vector<Arc> arcs_;
    std::vector<int> level_, iter_, queue_;
    bool solved_ = false;
};

}  // namespace volcut

#endif  // VOLCUT_MAXFLOW_HPP
