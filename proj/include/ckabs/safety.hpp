#pragma once

#include <cstdint>
#include <vector>

#include "ckabs/dynamics.hpp"
#include "ckabs/estimation.hpp"
#include "ckabs/markov.hpp"

namespace ckabs {

struct SafetyQuery {
    int horizon = 0;
    double beta = 0.0;   // confidence slack on the walk probability
    int unsafe_label = 0;
};

// v[s] = probability that a walk that starts in s keeps every one of its
// next `horizon` states outside the unsafe label.  Computed backward in
// O(horizon n^2); horizon 0 gives v = 1 everywhere.  The starting state's
// own label is deliberately not consulted here.
std::vector<double> safe_walk_probabilities(const LabeledMarkovChain& chain,
                                            const SafetyQuery& query);

// Safely labeled states whose walk probability reaches 1 - beta.
std::vector<int> confident_initial_set(const LabeledMarkovChain& chain, const SafetyQuery& query);

// Initial mass of the confident set: the chain's estimate of the chance
// that a trajectory stays safe for `horizon` steps.
double estimate_safety_probability(const LabeledMarkovChain& chain, const SafetyQuery& query);

// Monte-Carlo reference on the concrete system: the fraction of sampled
// trajectories whose outputs avoid the unsafe label at times 0..horizon.
// Trajectory i uses seed derive_seed(seed, i).
double ground_truth_safety_probability(const DynamicalSystem& system, const SafetyQuery& query,
                                       long long n_samples, std::uint64_t seed);

// Baseline abstraction on a uniform grid of parts^dimension boxes over the
// initial box.  Box occupancy and one-step transitions are estimated from
// samples; states that step outside the grid are clamped to the nearest
// edge box.  A box is labeled unsafe as soon as it geometrically intersects
// an unsafe region; otherwise it takes its dominant sampled output label.
LabeledMarkovChain grid_abstraction(const AffineSystem& system, int parts_per_dim,
                                    const EstimationConfig& config, int unsafe_label);

}  // namespace ckabs
