#include "ckabs/markov.hpp"

#include <cmath>

namespace ckabs {

namespace {

constexpr double kTolerance = 1e-9;

}  // namespace

std::vector<std::string> validate(const LabeledMarkovChain& chain) {
    std::vector<std::string> violations;
    const auto n = static_cast<std::size_t>(chain.n_states());

    if (chain.alphabet_size < 1) violations.push_back("alphabet must have at least one letter");
    if (n == 0) violations.push_back("chain has no states");
    if (chain.labels.size() != n) violations.push_back("labels size differs from state count");
    if (chain.tau.size() != n * n) violations.push_back("tau is not n_states x n_states");
    if (!chain.state_names.empty() && chain.state_names.size() != n)
        violations.push_back("state names size differs from state count");
    if (!violations.empty()) return violations;  // shape errors make the rest meaningless

    double mu_sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (chain.mu[s] < 0.0)
            violations.push_back("mu[" + std::to_string(s) + "] is negative");
        mu_sum += chain.mu[s];
    }
    if (std::abs(mu_sum - 1.0) > kTolerance)
        violations.push_back("mu sums to " + std::to_string(mu_sum) + ", not 1");

    for (std::size_t s = 0; s < n; ++s) {
        double row_sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double p = chain.tau[s * n + t];
            if (p < 0.0)
                violations.push_back("tau[" + std::to_string(s) + "][" + std::to_string(t) +
                                     "] is negative");
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > kTolerance)
            violations.push_back("tau row " + std::to_string(s) + " sums to " +
                                 std::to_string(row_sum) + ", not 1");
    }

    for (std::size_t s = 0; s < n; ++s)
        if (chain.labels[s] < 0 || chain.labels[s] >= chain.alphabet_size)
            violations.push_back("label of state " + std::to_string(s) + " is outside the alphabet");

    for (std::size_t s = 0; s < chain.state_names.size(); ++s) {
        const auto& name = chain.state_names[s];
        if (!name.shape_ok())
            violations.push_back("state name " + std::to_string(s) + " is malformed");
        else if (name.anchor() != chain.labels[s])
            violations.push_back("state " + std::to_string(s) +
                                 " is not labeled by its name's time-0 letter");
    }
    return violations;
}

double ForwardMass::total() const {
    double sum = 0.0;
    for (double a : alpha) sum += a;
    return sum;
}

ForwardMass initial_mass(const LabeledMarkovChain& chain, int letter) {
    if (letter < 0 || letter >= chain.alphabet_size)
        throw Error("letter outside the chain's alphabet");
    ForwardMass mass;
    mass.word.push_back(letter);
    mass.alpha.resize(static_cast<std::size_t>(chain.n_states()), 0.0);
    for (int s = 0; s < chain.n_states(); ++s)
        if (chain.labels[static_cast<std::size_t>(s)] == letter)
            mass.alpha[static_cast<std::size_t>(s)] = chain.mu[static_cast<std::size_t>(s)];
    return mass;
}

ForwardMass extend_mass(const LabeledMarkovChain& chain, const ForwardMass& mass, int letter) {
    if (letter < 0 || letter >= chain.alphabet_size)
        throw Error("letter outside the chain's alphabet");
    const auto n = static_cast<std::size_t>(chain.n_states());
    if (mass.alpha.size() != n) throw Error("forward mass does not match the chain");

    ForwardMass next;
    next.word = mass.word;
    next.word.push_back(letter);
    next.alpha.assign(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const double a = mass.alpha[s];
        if (a == 0.0) continue;
        const double* row = chain.tau.data() + s * n;
        for (std::size_t t = 0; t < n; ++t) next.alpha[t] += a * row[t];
    }
    for (std::size_t t = 0; t < n; ++t)
        if (chain.labels[t] != letter) next.alpha[t] = 0.0;
    return next;
}

double word_probability(const LabeledMarkovChain& chain, std::span<const int> word) {
    if (word.empty()) return 1.0;
    ForwardMass mass = initial_mass(chain, word[0]);
    for (std::size_t i = 1; i < word.size(); ++i) mass = extend_mass(chain, mass, word[i]);
    return mass.total();
}

bool in_behaviour(const LabeledMarkovChain& chain, std::span<const int> word) {
    return word_probability(chain, word) > 0.0;
}

std::vector<double> word_distribution(const LabeledMarkovChain& chain, int k) {
    if (k < 1) throw Error("word length must be at least 1");
    const auto a = static_cast<std::size_t>(chain.alphabet_size);
    std::size_t count = 1;
    for (int i = 0; i < k; ++i) {
        if (count > (static_cast<std::size_t>(1) << 40))
            throw TooLarge("word distribution too large to enumerate");
        count *= a;
    }
    std::vector<double> dist(count, 0.0);

    // Depth-first over prefixes; a prefix with zero mass leaves all its
    // continuations at probability zero.
    struct Frame {
        ForwardMass mass;
        std::size_t index;  // base-|A| encoding of the prefix
    };
    std::vector<Frame> stack;
    for (int letter = static_cast<int>(a) - 1; letter >= 0; --letter)
        stack.push_back({initial_mass(chain, letter), static_cast<std::size_t>(letter)});
    while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        stack.pop_back();
        const double total = frame.mass.total();
        if (static_cast<int>(frame.mass.word.size()) == k) {
            dist[frame.index] = total;
            continue;
        }
        if (total == 0.0) continue;
        for (int letter = static_cast<int>(a) - 1; letter >= 0; --letter)
            stack.push_back({extend_mass(chain, frame.mass, letter),
                             frame.index * a + static_cast<std::size_t>(letter)});
    }
    return dist;
}

}  // namespace ckabs
