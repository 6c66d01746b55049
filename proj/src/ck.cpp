#include "ckabs/ck.hpp"

#include <algorithm>
#include <cmath>

#include "ckabs/transport.hpp"

namespace ckabs {

namespace {

void require_comparable(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2) {
    if (chain1.alphabet_size != chain2.alphabet_size)
        throw AlphabetMismatch("chains emit different alphabets");
    if (chain1.n_states() == 0 || chain2.n_states() == 0)
        throw Error("chain has no states");
}

struct Walker {
    const LabeledMarkovChain& chain1;
    const LabeledMarkovChain& chain2;
    int max_level;
    LevelOverlap& result;
    std::vector<double>& tail;  // tail[l]: one-sided mass cut at level l

    void walk(int level, const ForwardMass& m1, const ForwardMass& m2) {
        const double t1 = m1.total();
        const double t2 = m2.total();
        const double r = std::min(t1, t2);
        const double d = std::abs(t1 - t2);
        if (r == 0.0) {
            // Every descendant of this word keeps zero mass on the smaller
            // side, so the other side's mass survives at all deeper levels.
            tail[static_cast<std::size_t>(level)] += d;
            return;
        }
        ++result.nodes_visited;
        result.overlap[static_cast<std::size_t>(level - 1)] += r;
        result.mismatch[static_cast<std::size_t>(level - 1)] += d;
        if (level == max_level) return;
        for (int letter = 0; letter < chain1.alphabet_size; ++letter)
            walk(level + 1, extend_mass(chain1, m1, letter), extend_mass(chain2, m2, letter));
    }
};

}  // namespace

LevelOverlap level_overlap(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2,
                           int max_level) {
    require_comparable(chain1, chain2);
    if (max_level < 1) throw Error("level count must be at least 1");

    LevelOverlap result;
    result.overlap.assign(static_cast<std::size_t>(max_level), 0.0);
    result.mismatch.assign(static_cast<std::size_t>(max_level), 0.0);
    std::vector<double> tail(static_cast<std::size_t>(max_level) + 1, 0.0);

    Walker walker{chain1, chain2, max_level, result, tail};
    for (int letter = 0; letter < chain1.alphabet_size; ++letter)
        walker.walk(1, initial_mass(chain1, letter), initial_mass(chain2, letter));

    double cut = 0.0;
    for (int level = 1; level <= max_level; ++level) {
        cut += tail[static_cast<std::size_t>(level)];
        result.mismatch[static_cast<std::size_t>(level - 1)] += cut;
    }
    return result;
}

CkResult ck_distance_at(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2,
                        int k) {
    const LevelOverlap levels = level_overlap(chain1, chain2, k);

    // Equivalent to 1 - sum_{l<k} 2^-l overlap_l - 2^(1-k) overlap_k, but
    // summing mismatches keeps the result exactly zero for identical
    // chains and nonnegative always.
    double value = 0.0;
    for (int l = 1; l < k; ++l)
        value += std::ldexp(levels.mismatch[static_cast<std::size_t>(l - 1)], -(l + 1));
    value += std::ldexp(levels.mismatch[static_cast<std::size_t>(k - 1)], -k);

    CkResult result;
    result.value = value;
    result.k_used = k;
    result.lower = value;
    result.upper = value + std::ldexp(levels.overlap[static_cast<std::size_t>(k - 1)], 1 - k);
    result.nodes_visited = levels.nodes_visited;
    return result;
}

CkResult ck_distance(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2,
                     double epsilon) {
    return ck_distance_at(chain1, chain2, horizon_for_accuracy(epsilon));
}

int horizon_for_accuracy(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("accuracy must lie in (0,1)");
    return static_cast<int>(std::ceil(std::log2(1.0 / epsilon))) + 1;
}

std::vector<double> CouplingMatrix::row_marginals(std::size_t n_words) const {
    std::vector<double> out(n_words, 0.0);
    for (const auto& [w1, w2, mass] : entries) out[w1] += mass;
    return out;
}

std::vector<double> CouplingMatrix::col_marginals(std::size_t n_words) const {
    std::vector<double> out(n_words, 0.0);
    for (const auto& [w1, w2, mass] : entries) out[w2] += mass;
    return out;
}

OracleResult kantorovich_lp_oracle(const LabeledMarkovChain& chain1,
                                   const LabeledMarkovChain& chain2, int k) {
    require_comparable(chain1, chain2);
    if (k < 1) throw Error("word length must be at least 1");
    const auto alphabet = static_cast<std::size_t>(chain1.alphabet_size);
    std::size_t n_words = 1;
    for (int i = 0; i < k; ++i) {
        n_words *= alphabet;
        if (n_words > 4096)
            throw TooLarge("oracle refuses more than 4096 words; use the recursive distance");
    }

    const std::vector<double> p1 = word_distribution(chain1, k);
    const std::vector<double> p2 = word_distribution(chain2, k);

    // Letters of each word, first letter first, for prefix comparisons.
    std::vector<int> digits(n_words * static_cast<std::size_t>(k));
    for (std::size_t w = 0; w < n_words; ++w) {
        std::size_t rest = w;
        for (int i = k - 1; i >= 0; --i) {
            digits[w * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)] =
                static_cast<int>(rest % alphabet);
            rest /= alphabet;
        }
    }

    std::vector<int> suppliers, demanders;
    std::vector<double> supply, demand;
    for (std::size_t w = 0; w < n_words; ++w) {
        if (p1[w] > 0.0) {
            suppliers.push_back(static_cast<int>(w));
            supply.push_back(p1[w]);
        }
        if (p2[w] > 0.0) {
            demanders.push_back(static_cast<int>(w));
            demand.push_back(p2[w]);
        }
    }

    const auto cost = [&](int a, int b) {
        const int* wa = digits.data() + static_cast<std::size_t>(suppliers[static_cast<std::size_t>(a)]) *
                                            static_cast<std::size_t>(k);
        const int* wb = digits.data() + static_cast<std::size_t>(demanders[static_cast<std::size_t>(b)]) *
                                            static_cast<std::size_t>(k);
        int l = 0;
        while (l < k && wa[l] == wb[l]) ++l;
        return l == k ? 0.0 : std::ldexp(1.0, -l);
    };

    const TransportPlan plan = solve_transport(supply, demand, cost);

    OracleResult result;
    result.value = plan.cost;
    result.coupling.k = k;
    result.coupling.alphabet_size = chain1.alphabet_size;
    for (const auto& [a, b, mass] : plan.flows)
        result.coupling.entries.emplace_back(
            static_cast<std::uint64_t>(suppliers[static_cast<std::size_t>(a)]),
            static_cast<std::uint64_t>(demanders[static_cast<std::size_t>(b)]), mass);
    std::sort(result.coupling.entries.begin(), result.coupling.entries.end());
    return result;
}

bool coupling_diagonal_check(const CouplingMatrix& coupling, std::span<const double> p1,
                             std::span<const double> p2, double tolerance) {
    if (p1.size() != p2.size()) throw Error("word distributions differ in size");
    std::vector<double> diagonal(p1.size(), 0.0);
    for (const auto& [w1, w2, mass] : coupling.entries)
        if (w1 == w2) diagonal[w1] += mass;
    for (std::size_t w = 0; w < p1.size(); ++w)
        if (std::abs(diagonal[w] - std::min(p1[w], p2[w])) > tolerance) return false;
    return true;
}

bool coupling_block_marginal_check(const CouplingMatrix& coupling,
                                   std::span<const double> p1_prefixes,
                                   std::span<const double> p2_prefixes, double tolerance) {
    if (p1_prefixes.size() != p2_prefixes.size())
        throw Error("prefix distributions differ in size");
    const auto alphabet = static_cast<std::uint64_t>(coupling.alphabet_size);
    if (alphabet == 0) throw Error("coupling has no alphabet");
    std::vector<double> outflow(p1_prefixes.size(), 0.0);
    std::vector<double> inflow(p1_prefixes.size(), 0.0);
    for (const auto& [w1, w2, mass] : coupling.entries) {
        const std::uint64_t prefix1 = w1 / alphabet;
        const std::uint64_t prefix2 = w2 / alphabet;
        if (prefix1 == prefix2) continue;
        outflow[prefix1] += mass;
        inflow[prefix2] += mass;
    }
    for (std::size_t w = 0; w < p1_prefixes.size(); ++w) {
        const double surplus = p1_prefixes[w] - p2_prefixes[w];
        if (std::abs(outflow[w] - std::max(surplus, 0.0)) > tolerance) return false;
        if (std::abs(inflow[w] - std::max(-surplus, 0.0)) > tolerance) return false;
    }
    return true;
}

}  // namespace ckabs
