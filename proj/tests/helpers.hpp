#pragma once

// Shared test utilities: tiny chain builders, seeded random chains, and
// brute-force reference computations.  The references enumerate explicitly
// and share no code with the library's recursive or DP implementations.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ckabs/markov.hpp"
#include "ckabs/random.hpp"

namespace ckabs::testing {

inline LabeledMarkovChain make_chain(int alphabet_size, std::vector<int> labels,
                                     std::vector<double> mu, std::vector<double> tau) {
    LabeledMarkovChain chain;
    chain.alphabet_size = alphabet_size;
    chain.labels = std::move(labels);
    chain.mu = std::move(mu);
    chain.tau = std::move(tau);
    return chain;
}

// Random chain with strictly positive rows and initial mass, labels cycling
// through the alphabet so every letter is reachable.
inline LabeledMarkovChain random_dense_chain(int alphabet_size, int n_states,
                                             std::uint64_t seed) {
    Rng rng(seed);
    LabeledMarkovChain chain;
    chain.alphabet_size = alphabet_size;
    chain.labels.resize(static_cast<std::size_t>(n_states));
    for (int s = 0; s < n_states; ++s) chain.labels[static_cast<std::size_t>(s)] = s % alphabet_size;
    chain.mu.resize(static_cast<std::size_t>(n_states));
    chain.tau.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_states), 0.0);
    double mu_total = 0.0;
    for (int s = 0; s < n_states; ++s) {
        chain.mu[static_cast<std::size_t>(s)] = 0.05 + rng.uniform01();
        mu_total += chain.mu[static_cast<std::size_t>(s)];
        double row_total = 0.0;
        for (int t = 0; t < n_states; ++t) {
            chain.tau_at(s, t) = 0.05 + rng.uniform01();
            row_total += chain.tau_at(s, t);
        }
        for (int t = 0; t < n_states; ++t) chain.tau_at(s, t) /= row_total;
    }
    for (int s = 0; s < n_states; ++s) chain.mu[static_cast<std::size_t>(s)] /= mu_total;
    return chain;
}

// Random chain that may contain structural zeros (sparse rows), so pruning
// paths get exercised.  Rows keep at least one positive entry.
inline LabeledMarkovChain random_sparse_chain(int alphabet_size, int n_states,
                                              std::uint64_t seed) {
    Rng rng(seed);
    LabeledMarkovChain chain = random_dense_chain(alphabet_size, n_states, seed);
    for (int s = 0; s < n_states; ++s) {
        const int keep = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_states))) ;
        double row_total = 0.0;
        for (int t = 0; t < n_states; ++t) {
            if (t != keep && rng.uniform01() < 0.4) chain.tau_at(s, t) = 0.0;
            row_total += chain.tau_at(s, t);
        }
        for (int t = 0; t < n_states; ++t) chain.tau_at(s, t) /= row_total;
    }
    return chain;
}

// P(outputs start with word), by summing mu and tau products over every
// state sequence of the word's length.  Exponential; lengths stay small.
inline double brute_word_probability(const LabeledMarkovChain& chain, std::span<const int> word) {
    const int n = chain.n_states();
    if (word.empty()) return 1.0;
    double total = 0.0;
    std::vector<int> path(word.size(), 0);
    const std::size_t count = [&] {
        std::size_t c = 1;
        for (std::size_t i = 0; i < word.size(); ++i) c *= static_cast<std::size_t>(n);
        return c;
    }();
    for (std::size_t code = 0; code < count; ++code) {
        std::size_t rest = code;
        for (std::size_t i = 0; i < word.size(); ++i) {
            path[i] = static_cast<int>(rest % static_cast<std::size_t>(n));
            rest /= static_cast<std::size_t>(n);
        }
        bool labels_match = true;
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (chain.labels[static_cast<std::size_t>(path[i])] != word[i]) {
                labels_match = false;
                break;
            }
        }
        if (!labels_match) continue;
        double p = chain.mu[static_cast<std::size_t>(path[0])];
        for (std::size_t i = 0; i + 1 < word.size(); ++i) p *= chain.tau_at(path[i], path[i + 1]);
        total += p;
    }
    return total;
}

// P(a walk from state s keeps its next `horizon` states off the unsafe
// label), by enumerating every state path of that length.
inline double brute_safe_walk(const LabeledMarkovChain& chain, int start, int horizon,
                              int unsafe_label) {
    if (horizon == 0) return 1.0;
    const int n = chain.n_states();
    double total = 0.0;
    for (int t = 0; t < n; ++t) {
        if (chain.labels[static_cast<std::size_t>(t)] == unsafe_label) continue;
        total += chain.tau_at(start, t) * brute_safe_walk(chain, t, horizon - 1, unsafe_label);
    }
    return total;
}

inline bool close(double a, double b, double tolerance) { return std::fabs(a - b) <= tolerance; }

}  // namespace ckabs::testing
