#pragma once

#include <span>
#include <string>
#include <vector>

#include "ckabs/errors.hpp"
#include "ckabs/symbolic.hpp"

namespace ckabs {

// Finite Markov chain with one output letter per state and a distribution
// over initial states.  tau is row-stochastic, row s holds the successor
// probabilities of state s.
struct LabeledMarkovChain {
    int alphabet_size = 0;
    std::vector<double> mu;
    std::vector<double> tau;  // row-major n_states x n_states
    std::vector<int> labels;
    std::vector<TimedWord> state_names;  // optional, parallel to states

    int n_states() const { return static_cast<int>(mu.size()); }
    double tau_at(int from, int to) const {
        return tau[static_cast<std::size_t>(from) * mu.size() + static_cast<std::size_t>(to)];
    }
    double& tau_at(int from, int to) {
        return tau[static_cast<std::size_t>(from) * mu.size() + static_cast<std::size_t>(to)];
    }
};

// Structural checks with tolerance 1e-9: shapes, nonnegativity, mu sums to
// one, every tau row sums to one, labels within the alphabet, and when
// state names are present, each state's label is its name's anchor letter.
// Returns human-readable violations; empty means valid.
std::vector<std::string> validate(const LabeledMarkovChain& chain);

// Probability mass of one word prefix, split by current state:
// alpha[s] = P(first letters emitted and the chain now sits in s).
// alpha[s] = 0 whenever labels[s] differs from the last letter.
struct ForwardMass {
    std::vector<int> word;
    std::vector<double> alpha;

    double total() const;
};

// Mass after emitting the single letter a: mu restricted to states labeled a.
ForwardMass initial_mass(const LabeledMarkovChain& chain, int letter);

// Mass after appending one letter: alpha'[t] = [labels[t] = a] sum_s alpha[s] tau[s][t].
// One extension costs O(n_states^2).
ForwardMass extend_mass(const LabeledMarkovChain& chain, const ForwardMass& mass, int letter);

// P(the first |word| outputs equal word), by folding extend_mass.
double word_probability(const LabeledMarkovChain& chain, std::span<const int> word);

// Exact positivity of word_probability; no tolerance.
bool in_behaviour(const LabeledMarkovChain& chain, std::span<const int> word);

// Distribution of all length-k words, indexed base-|A| with the first
// letter most significant.  Size |A|^k, so k must stay small.
std::vector<double> word_distribution(const LabeledMarkovChain& chain, int k);

}  // namespace ckabs
