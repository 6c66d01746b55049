#pragma once

#include <cstdint>
#include <vector>

#include "ckabs/dynamics.hpp"
#include "ckabs/markov.hpp"
#include "ckabs/symbolic.hpp"

namespace ckabs {

struct EstimationConfig {
    long long n_samples = 0;
    std::uint64_t master_seed = 0;
    // Words observed at most this often count as empirically null.  The
    // default 0 drops only never-observed words; positive values trade
    // soundness at small sample counts for fewer spurious blocks.
    long long zero_threshold = 0;
    int threads = 1;
};

// Raw counts from one batch of sampled traces.  Trajectory i uses seed
// derive_seed(master_seed, i), so the table is independent of thread count
// and evaluation order.  Each trajectory contributes one block observation
// at time 0 and one block transition from time 0 to time 1.
struct CountTable {
    std::vector<long long> word_count;  // time-0 block per partition word
    std::vector<long long> pair_count;  // row-major |W| x |W|
    long long n_samples = 0;

    long long pair_at(std::size_t from, std::size_t to) const {
        return pair_count[from * word_count.size() + to];
    }
};

CountTable count_blocks(const DynamicalSystem& system, const Partition& partition,
                        const EstimationConfig& config);

// Strict frequency estimate of the abstraction over the given partition:
// mu[w] = word_count / n_samples, tau[w][w'] = pair_count / word_count.
// Throws EmptyBlock when any word was observed at most zero_threshold
// times (the caller is expected to drop such words and retry), and
// NoMatch when a sampled trace or transition lies in no block, since the
// strict estimator refuses to renormalize over a partial cover.
LabeledMarkovChain estimate_abstraction(const DynamicalSystem& system, const Partition& partition,
                                        const EstimationConfig& config);

// Renormalizing variant for word sets that need not cover everything
// (e.g. after earlier drops): words observed at most zero_threshold times
// are dropped, trajectories that leave the kept words (at time 0 or via
// the time-1 shift) are discarded, and the chain is the frequency
// estimate conditioned on the retained trajectories.  Kept words whose
// retained transitions all vanish are dropped too, to a fixpoint.
struct PrunedEstimate {
    LabeledMarkovChain chain;
    Partition kept;
    std::vector<TimedWord> dropped;
    std::vector<long long> kept_counts;  // retained trajectories per kept word
};

PrunedEstimate estimate_with_drops(const DynamicalSystem& system, const Partition& partition,
                                   const EstimationConfig& config);

// Candidate words never observed more than zero_threshold times at time 0.
// Candidates are counted independently and may overlap; n_samples = 0
// returns every candidate.
std::vector<TimedWord> observed_zero_words(const DynamicalSystem& system,
                                           const std::vector<TimedWord>& candidates,
                                           const EstimationConfig& config);

}  // namespace ckabs
