#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ckabs/dynamics.hpp"
#include "ckabs/estimation.hpp"
#include "ckabs/markov.hpp"
#include "ckabs/symbolic.hpp"

namespace ckabs {

// Distance on labeled Markov chains used to score candidate splits.
struct ChainMetric {
    std::string name;
    std::function<double(const LabeledMarkovChain&, const LabeledMarkovChain&)> distance;
};

// Truncated behavioural distance with the given accuracy.
ChainMetric ck_metric(double epsilon);

// Direction a split extends a word in.  Only forward extension is
// implemented; backward and two-sided splits are declared so callers
// discover the design space, but they throw PastWordUnsupported.
enum class SplitDirection { forward, backward, two_sided };

// Replaces words[block] by its |A| one-letter extensions, in place,
// preserving the order of the other words.  Future words only
// (PastWordUnsupported).
Partition split_block(const Partition& partition, std::size_t block,
                      SplitDirection direction = SplitDirection::forward);

struct RefineIteration {
    // One entry per block of the incoming partition; empty only when the
    // candidate's batch had nothing estimable at all (degenerate budgets).
    std::vector<std::optional<double>> candidate_distance;
    std::size_t chosen = 0;
    std::vector<TimedWord> dropped;  // words of the adopted split never observed
    Partition partition;             // adopted word set
    LabeledMarkovChain chain;        // adopted abstraction
};

struct RefineReport {
    Partition initial_partition;
    std::vector<TimedWord> initial_dropped;
    LabeledMarkovChain initial_chain;
    std::vector<RefineIteration> iterations;
    std::uint64_t master_seed = 0;
    long long samples_per_candidate = 0;

    const Partition& final_partition() const {
        return iterations.empty() ? initial_partition : iterations.back().partition;
    }
    const LabeledMarkovChain& final_chain() const {
        return iterations.empty() ? initial_chain : iterations.back().chain;
    }
    // Union of all drops, in the order they happened; together with the
    // final partition these leaves cover the word tree exactly.
    std::vector<TimedWord> all_dropped() const;
};

// Greedy refinement: start from the one-letter partition, drop letters that
// are never observed (DegenerateAlphabet when fewer than two remain), then
// repeatedly split the block whose split moves the abstraction furthest
// under the metric, ties to the lowest block index.  Every candidate is
// estimated from fresh samples; batch seeds derive from
// (master_seed, iteration, block), so results do not depend on evaluation
// order.  config.n_samples is the budget per candidate estimate.
RefineReport refine(const DynamicalSystem& system, const ChainMetric& metric, int iterations,
                    const EstimationConfig& config);

}  // namespace ckabs
