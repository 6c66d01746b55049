#include "ckabs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "ckabs/errors.hpp"

namespace ckabs {

namespace {

// Basis arc of the transportation simplex; the basis always forms a
// spanning tree of the bipartite supply/demand graph.
struct Arc {
    int i, j;
    double flow;
};

constexpr int kNoArc = -1;

}  // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              const std::function<double(int, int)>& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    if (m == 0 || n == 0) {
        double total = 0.0;
        for (double s : supply) total += s;
        for (double d : demand) total += d;
        if (total > 1e-9) throw Error("transport problem with mass but no counterpart");
        return {};
    }

    std::vector<double> s(supply.begin(), supply.end());
    std::vector<double> d(demand.begin(), demand.end());
    double s_total = 0.0, d_total = 0.0;
    for (double x : s) {
        if (x < 0.0) throw Error("negative supply");
        s_total += x;
    }
    for (double x : d) {
        if (x < 0.0) throw Error("negative demand");
        d_total += x;
    }
    if (std::abs(s_total - d_total) > 1e-9)
        throw Error("transport problem is not balanced");
    // Absorb the floating-point gap so the northwest corner start closes.
    *std::max_element(d.begin(), d.end()) += s_total - d_total;

    // Northwest corner start: exactly m + n - 1 basic arcs, zero flows kept
    // as degenerate basis members.
    std::vector<Arc> basis;
    basis.reserve(static_cast<std::size_t>(m + n - 1));
    {
        int i = 0, j = 0;
        for (;;) {
            double x;
            if (s[static_cast<std::size_t>(i)] <= d[static_cast<std::size_t>(j)]) {
                x = s[static_cast<std::size_t>(i)];
                d[static_cast<std::size_t>(j)] -= x;
                s[static_cast<std::size_t>(i)] = 0.0;
            } else {
                x = d[static_cast<std::size_t>(j)];
                s[static_cast<std::size_t>(i)] -= x;
                d[static_cast<std::size_t>(j)] = 0.0;
            }
            basis.push_back({i, j, x});
            if (i == m - 1 && j == n - 1) break;
            if (s[static_cast<std::size_t>(i)] == 0.0 && i < m - 1)
                ++i;
            else
                ++j;
        }
    }

    // arc_at[i * n + j] = basis position or kNoArc.
    std::vector<int> arc_at(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), kNoArc);
    for (std::size_t b = 0; b < basis.size(); ++b)
        arc_at[static_cast<std::size_t>(basis[b].i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(basis[b].j)] = static_cast<int>(b);

    std::vector<double> u(static_cast<std::size_t>(m));
    std::vector<double> v(static_cast<std::size_t>(n));
    // Adjacency over tree nodes: suppliers 0..m-1, demanders m..m+n-1.
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(m + n));
    std::vector<int> queue, parent_arc(static_cast<std::size_t>(m + n));

    auto rebuild_adjacency = [&] {
        for (auto& list : adjacency) list.clear();
        for (std::size_t b = 0; b < basis.size(); ++b) {
            adjacency[static_cast<std::size_t>(basis[b].i)].push_back(static_cast<int>(b));
            adjacency[static_cast<std::size_t>(m + basis[b].j)].push_back(static_cast<int>(b));
        }
    };

    // Dual prices from the basis tree, rooted at supplier 0 with u[0] = 0.
    // Costs built from sums and differences of the inputs stay exact for
    // dyadic cost tables, so the optimality test below needs no tolerance.
    auto recompute_duals = [&] {
        rebuild_adjacency();
        std::vector<char> seen(static_cast<std::size_t>(m + n), 0);
        queue.assign(1, 0);
        seen[0] = 1;
        u[0] = 0.0;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const int node = queue[q];
            for (int b : adjacency[static_cast<std::size_t>(node)]) {
                const Arc& arc = basis[static_cast<std::size_t>(b)];
                const int other = node < m ? m + arc.j : arc.i;
                if (seen[static_cast<std::size_t>(other)]) continue;
                seen[static_cast<std::size_t>(other)] = 1;
                const double c = cost(arc.i, arc.j);
                if (node < m)
                    v[static_cast<std::size_t>(arc.j)] = c - u[static_cast<std::size_t>(arc.i)];
                else
                    u[static_cast<std::size_t>(arc.i)] = c - v[static_cast<std::size_t>(arc.j)];
                queue.push_back(other);
            }
        }
    };

    // Tree path between the endpoints of the entering arc.
    auto find_path = [&](int from, int to) {
        std::fill(parent_arc.begin(), parent_arc.end(), kNoArc);
        std::vector<char> seen(static_cast<std::size_t>(m + n), 0);
        queue.assign(1, from);
        seen[static_cast<std::size_t>(from)] = 1;
        for (std::size_t q = 0; q < queue.size() && !seen[static_cast<std::size_t>(to)]; ++q) {
            const int node = queue[q];
            for (int b : adjacency[static_cast<std::size_t>(node)]) {
                const Arc& arc = basis[static_cast<std::size_t>(b)];
                const int other = node < m ? m + arc.j : arc.i;
                if (seen[static_cast<std::size_t>(other)]) continue;
                seen[static_cast<std::size_t>(other)] = 1;
                parent_arc[static_cast<std::size_t>(other)] = b;
                queue.push_back(other);
            }
        }
        std::vector<int> path;  // arcs from `to` back to `from`
        int node = to;
        while (node != from) {
            const int b = parent_arc[static_cast<std::size_t>(node)];
            path.push_back(b);
            const Arc& arc = basis[static_cast<std::size_t>(b)];
            node = node < m ? m + arc.j : arc.i;
        }
        return path;
    };

    const long long pivot_guard = 64LL * (m + n) + 4096;
    const long long pivot_limit = 4000LL * (m + n) + 100000;
    long long pivots = 0;
    for (;;) {
        recompute_duals();

        // Entering arc: most negative reduced cost, first hit on ties; after
        // pivot_guard pivots switch to Bland's rule (first negative) which
        // cannot cycle.
        int enter_i = -1, enter_j = -1;
        double best = 0.0;
        const bool bland = pivots > pivot_guard;
        for (int i = 0; i < m && (enter_i < 0 || !bland); ++i) {
            const double ui = u[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) {
                if (arc_at[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                           static_cast<std::size_t>(j)] != kNoArc)
                    continue;
                const double reduced = cost(i, j) - ui - v[static_cast<std::size_t>(j)];
                if (reduced < best) {
                    best = reduced;
                    enter_i = i;
                    enter_j = j;
                    if (bland) break;
                }
            }
        }
        if (enter_i < 0) break;  // optimal
        if (++pivots > pivot_limit) throw Error("transportation simplex failed to converge");

        // The entering arc closes a unique cycle; flows alternate +/- along
        // it starting with + on the entering arc.
        const std::vector<int> path = find_path(enter_i, m + enter_j);
        double theta = std::numeric_limits<double>::infinity();
        int leaving = kNoArc;
        int sign = -1;  // first path arc (incident to the demand node) is -
        for (int b : path) {
            if (sign < 0) {
                const Arc& arc = basis[static_cast<std::size_t>(b)];
                // Ties broken by lowest (i, j) so the Bland phase cannot cycle.
                const bool better =
                    arc.flow < theta ||
                    (arc.flow == theta && leaving != kNoArc &&
                     std::make_pair(arc.i, arc.j) <
                         std::make_pair(basis[static_cast<std::size_t>(leaving)].i,
                                        basis[static_cast<std::size_t>(leaving)].j));
                if (better) {
                    theta = arc.flow;
                    leaving = b;
                }
            }
            sign = -sign;
        }
        sign = -1;
        for (int b : path) {
            basis[static_cast<std::size_t>(b)].flow += sign * theta;
            if (basis[static_cast<std::size_t>(b)].flow < 0.0)
                basis[static_cast<std::size_t>(b)].flow = 0.0;  // float dust only
            sign = -sign;
        }

        Arc& out = basis[static_cast<std::size_t>(leaving)];
        arc_at[static_cast<std::size_t>(out.i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(out.j)] = kNoArc;
        out = {enter_i, enter_j, theta};
        arc_at[static_cast<std::size_t>(enter_i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(enter_j)] = leaving;
    }

    TransportPlan plan;
    for (const Arc& arc : basis) {
        if (arc.flow <= 0.0) continue;
        plan.flows.emplace_back(arc.i, arc.j, arc.flow);
        plan.cost += cost(arc.i, arc.j) * arc.flow;
    }
    std::sort(plan.flows.begin(), plan.flows.end());
    return plan;
}

}  // namespace ckabs
