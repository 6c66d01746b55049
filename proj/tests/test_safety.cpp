#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ckabs/safety.hpp"

#include "helpers.hpp"

using namespace ckabs;
using namespace ckabs::testing;

namespace {

SafetyQuery query_of(int horizon, double beta = 0.0, int unsafe_label = 1) {
    SafetyQuery q;
    q.horizon = horizon;
    q.beta = beta;
    q.unsafe_label = unsafe_label;
    return q;
}

}  // namespace

TEST_CASE("walk probabilities match exhaustive path enumeration") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const LabeledMarkovChain chain =
            (seed % 2 == 0) ? random_dense_chain(2, 2 + static_cast<int>(seed % 3), seed)
                            : random_sparse_chain(2, 2 + static_cast<int>(seed % 3), seed);
        for (int horizon = 0; horizon <= 4; ++horizon) {
            for (int unsafe = 0; unsafe < 2; ++unsafe) {
                const std::vector<double> v =
                    safe_walk_probabilities(chain, query_of(horizon, 0.0, unsafe));
                REQUIRE(v.size() == static_cast<std::size_t>(chain.n_states()));
                for (int s = 0; s < chain.n_states(); ++s)
                    CHECK(close(v[static_cast<std::size_t>(s)],
                                brute_safe_walk(chain, s, horizon, unsafe), 1e-12));
            }
        }
    }
}

TEST_CASE("a zero horizon is vacuously safe") {
    const LabeledMarkovChain chain = random_dense_chain(3, 4, 11);
    const std::vector<double> v = safe_walk_probabilities(chain, query_of(0));
    for (double x : v) CHECK(x == 1.0);
}

TEST_CASE("walk probabilities never increase with the horizon") {
    const LabeledMarkovChain chain = random_sparse_chain(2, 4, 23);
    std::vector<double> previous = safe_walk_probabilities(chain, query_of(0));
    for (int horizon = 1; horizon <= 6; ++horizon) {
        const std::vector<double> v = safe_walk_probabilities(chain, query_of(horizon));
        for (std::size_t s = 0; s < v.size(); ++s) CHECK(v[s] <= previous[s] + 1e-15);
        previous = v;
    }
}

TEST_CASE("hand-checked two-state walk probabilities") {
    const LabeledMarkovChain chain = make_chain(2, {0, 1}, {0.8, 0.2}, {0.9, 0.1, 0.5, 0.5});
    const std::vector<double> v1 = safe_walk_probabilities(chain, query_of(1));
    CHECK(close(v1[0], 0.9, 1e-15));
    CHECK(close(v1[1], 0.5, 1e-15));
    const std::vector<double> v2 = safe_walk_probabilities(chain, query_of(2));
    CHECK(close(v2[0], 0.81, 1e-15));
    CHECK(close(v2[1], 0.45, 1e-15));
}

TEST_CASE("the starting state's own label does not enter its walk probability") {
    // State 0 is unsafe itself but always jumps to the safe state 1.
    const LabeledMarkovChain chain = make_chain(2, {1, 0}, {0.5, 0.5}, {0.0, 1.0, 1.0, 0.0});
    const std::vector<double> v = safe_walk_probabilities(chain, query_of(1));
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.0);  // state 1 always jumps into the unsafe state
    // The confident set still excludes unsafe-labeled starts.
    CHECK(confident_initial_set(chain, query_of(1, 0.5)).empty());
}

TEST_CASE("confident sets filter by label and walk probability") {
    const LabeledMarkovChain chain = make_chain(2, {0, 1}, {0.8, 0.2}, {0.9, 0.1, 0.5, 0.5});
    CHECK(confident_initial_set(chain, query_of(2, 0.20)) == std::vector<int>{0});  // 0.81 >= 0.80
    CHECK(confident_initial_set(chain, query_of(2, 0.50)) == std::vector<int>{0});
    CHECK(confident_initial_set(chain, query_of(2, 0.05)).empty());                 // 0.81 < 0.95
    CHECK(estimate_safety_probability(chain, query_of(2, 0.20)) == 0.8);
    CHECK(estimate_safety_probability(chain, query_of(2, 0.05)) == 0.0);
}

TEST_CASE("confident sets grow with the allowed slack") {
    const LabeledMarkovChain chain = random_sparse_chain(2, 4, 31);
    std::vector<int> previous;
    for (double beta : {0.0, 0.05, 0.2, 0.5, 1.0}) {
        const std::vector<int> current = confident_initial_set(chain, query_of(3, beta));
        CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
        previous = current;
    }
}

TEST_CASE("the safety estimate is the confident set's initial mass") {
    const LabeledMarkovChain chain = random_dense_chain(2, 4, 37);
    const SafetyQuery q = query_of(2, 0.3);
    const std::vector<int> confident = confident_initial_set(chain, q);
    double mass = 0.0;
    for (int s : confident) mass += chain.mu[static_cast<std::size_t>(s)];
    CHECK(estimate_safety_probability(chain, q) == mass);
}

TEST_CASE("monte-carlo ground truth matches the rotation's geometry") {
    const DynamicalSystem sys = make_rotation_system(0.25);
    // Staying off label 0 for h extra steps means h+1 consecutive outputs in
    // the upper half-circle, an arc of length max(0, 1/2 - h/4).
    CHECK(close(ground_truth_safety_probability(sys, query_of(0, 0.0, 0), 100000, 19), 0.50, 0.02));
    CHECK(close(ground_truth_safety_probability(sys, query_of(1, 0.0, 0), 100000, 19), 0.25, 0.02));
    CHECK(ground_truth_safety_probability(sys, query_of(2, 0.0, 0), 100000, 19) == 0.0);
    CHECK(ground_truth_safety_probability(sys, query_of(3, 0.0, 0), 100000, 19) == 0.0);
}

TEST_CASE("grid abstractions validate and respect unsafe geometry") {
    const AffineSystem lorentz = make_lorentz_system();
    EstimationConfig config;
    config.n_samples = 20000;
    config.master_seed = 11;

    // With 2 parts per axis every position box touches the obstacle, so the
    // whole grid is labeled unsafe and certifies nothing.
    const LabeledMarkovChain coarse = grid_abstraction(lorentz, 2, config, 0);
    CHECK(validate(coarse).empty());
    CHECK(coarse.n_states() == 16);
    for (int label : coarse.labels) CHECK(label == 0);
    CHECK(estimate_safety_probability(coarse, query_of(2, 0.1, 0)) == 0.0);

    // Three parts per axis leave position cells clear of the obstacle.
    const LabeledMarkovChain fine = grid_abstraction(lorentz, 3, config, 0);
    CHECK(validate(fine).empty());
    CHECK(fine.n_states() == 81);
    CHECK(std::count(fine.labels.begin(), fine.labels.end(), 0) < 81);
    const double estimate = estimate_safety_probability(fine, query_of(1, 0.5, 0));
    CHECK(estimate > 0.0);
    CHECK(estimate <= 1.0);
}
