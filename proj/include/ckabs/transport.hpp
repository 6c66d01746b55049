#pragma once

#include <functional>
#include <span>
#include <tuple>
#include <vector>

namespace ckabs {

// Optimal plan of a balanced transportation problem.
struct TransportPlan {
    double cost = 0.0;
    std::vector<std::tuple<int, int, double>> flows;  // (supply index, demand index, mass)
};

// Exact transportation simplex over the dense bipartite problem
//   min sum cost(i,j) x(i,j)  s.t.  row sums = supply, column sums = demand.
// cost is evaluated lazily.  Supplies and demands must be nonnegative and
// balanced within 1e-9; the largest demand absorbs the rounding gap.  The
// solver knows nothing about the structure of the costs.
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              const std::function<double(int, int)>& cost);

}  // namespace ckabs
