#include "ckabs/safety.hpp"

#include <algorithm>
#include <cmath>

#include "ckabs/random.hpp"

namespace ckabs {

namespace {

void require_query(const LabeledMarkovChain& chain, const SafetyQuery& query) {
    if (query.horizon < 0) throw Error("horizon must be nonnegative");
    if (query.unsafe_label < 0 || query.unsafe_label >= chain.alphabet_size)
        throw Error("unsafe label outside the alphabet");
    if (!(query.beta >= 0.0 && query.beta <= 1.0)) throw Error("beta must lie in [0,1]");
}

}  // namespace

std::vector<double> safe_walk_probabilities(const LabeledMarkovChain& chain,
                                            const SafetyQuery& query) {
    require_query(chain, query);
    const auto n = static_cast<std::size_t>(chain.n_states());
    std::vector<double> value(n, 1.0);
    std::vector<double> next(n);
    for (int step = 0; step < query.horizon; ++step) {
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            const double* row = chain.tau.data() + s * n;
            for (std::size_t t = 0; t < n; ++t)
                if (chain.labels[t] != query.unsafe_label) acc += row[t] * value[t];
            next[s] = acc;
        }
        value.swap(next);
    }
    return value;
}

std::vector<int> confident_initial_set(const LabeledMarkovChain& chain, const SafetyQuery& query) {
    const std::vector<double> value = safe_walk_probabilities(chain, query);
    std::vector<int> states;
    for (int s = 0; s < chain.n_states(); ++s) {
        if (chain.labels[static_cast<std::size_t>(s)] == query.unsafe_label) continue;
        if (value[static_cast<std::size_t>(s)] >= 1.0 - query.beta) states.push_back(s);
    }
    return states;
}

double estimate_safety_probability(const LabeledMarkovChain& chain, const SafetyQuery& query) {
    double mass = 0.0;
    for (int s : confident_initial_set(chain, query)) mass += chain.mu[static_cast<std::size_t>(s)];
    return mass;
}

double ground_truth_safety_probability(const DynamicalSystem& system, const SafetyQuery& query,
                                       long long n_samples, std::uint64_t seed) {
    if (query.horizon < 0) throw Error("horizon must be nonnegative");
    if (n_samples < 1) throw Error("ground truth needs at least one sample");
    long long safe = 0;
    for (long long i = 0; i < n_samples; ++i) {
        State x = system.initial_sampler(derive_seed(seed, static_cast<std::uint64_t>(i)));
        bool ok = system.output(x) != query.unsafe_label;
        for (int t = 1; t <= query.horizon && ok; ++t) {
            x = system.step(x);
            ok = system.output(x) != query.unsafe_label;
        }
        if (ok) ++safe;
    }
    return static_cast<double>(safe) / static_cast<double>(n_samples);
}

LabeledMarkovChain grid_abstraction(const AffineSystem& system, int parts_per_dim,
                                    const EstimationConfig& config, int unsafe_label) {
    if (parts_per_dim < 1) throw Error("grid needs at least one part per dimension");
    if (config.n_samples < 1) throw Error("grid estimation needs samples");
    if (unsafe_label < 0 || unsafe_label >= system.alphabet_size)
        throw Error("unsafe label outside the alphabet");
    const auto d = static_cast<std::size_t>(system.dimension);
    std::size_t n_boxes = 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (n_boxes > 1u << 20) throw TooLarge("grid abstraction too fine");
        n_boxes *= static_cast<std::size_t>(parts_per_dim);
    }

    std::vector<double> width(d);
    for (std::size_t i = 0; i < d; ++i)
        width[i] = (system.init_box[i].second - system.init_box[i].first) / parts_per_dim;

    const auto box_of = [&](const State& x) {
        std::size_t index = 0;
        for (std::size_t i = 0; i < d; ++i) {
            auto part = static_cast<long long>(
                std::floor((x[i] - system.init_box[i].first) / width[i]));
            part = std::clamp<long long>(part, 0, parts_per_dim - 1);
            index = index * static_cast<std::size_t>(parts_per_dim) + static_cast<std::size_t>(part);
        }
        return index;
    };

    std::vector<long long> count(n_boxes, 0);
    std::vector<long long> pair(n_boxes * n_boxes, 0);
    std::vector<long long> label_count(n_boxes * static_cast<std::size_t>(system.alphabet_size), 0);
    for (long long i = 0; i < config.n_samples; ++i) {
        const State x0 = system.sample_initial(derive_seed(config.master_seed,
                                                           static_cast<std::uint64_t>(i)));
        const State x1 = system.step(x0);
        const std::size_t b0 = box_of(x0);
        ++count[b0];
        ++pair[b0 * n_boxes + box_of(x1)];
        ++label_count[b0 * static_cast<std::size_t>(system.alphabet_size) +
                      static_cast<std::size_t>(system.output(x0))];
    }

    LabeledMarkovChain chain;
    chain.alphabet_size = system.alphabet_size;
    chain.mu.resize(n_boxes);
    chain.tau.assign(n_boxes * n_boxes, 0.0);
    chain.labels.resize(n_boxes);

    for (std::size_t b = 0; b < n_boxes; ++b) {
        chain.mu[b] = static_cast<double>(count[b]) / static_cast<double>(config.n_samples);
        if (count[b] > 0) {
            for (std::size_t c = 0; c < n_boxes; ++c)
                chain.tau[b * n_boxes + c] =
                    static_cast<double>(pair[b * n_boxes + c]) / static_cast<double>(count[b]);
        } else {
            chain.tau[b * n_boxes + b] = 1.0;  // never sampled: keep the row stochastic
        }

        // Geometric bounds of this box inside the initial region.
        std::vector<std::pair<double, double>> bounds(d);
        std::size_t rest = b;
        for (std::size_t i = d; i-- > 0;) {
            const auto part = static_cast<double>(rest % static_cast<std::size_t>(parts_per_dim));
            rest /= static_cast<std::size_t>(parts_per_dim);
            bounds[i] = {system.init_box[i].first + part * width[i],
                         system.init_box[i].first + (part + 1) * width[i]};
        }

        bool unsafe = false;
        for (const auto& region : system.regions)
            if (region.label == unsafe_label && !region.box.empty() && region.overlaps_box(bounds)) {
                unsafe = true;
                break;
            }
        if (unsafe) {
            chain.labels[b] = unsafe_label;
            continue;
        }

        int best = -1;
        long long best_count = -1;
        for (int a = 0; a < system.alphabet_size; ++a) {
            const long long c = label_count[b * static_cast<std::size_t>(system.alphabet_size) +
                                            static_cast<std::size_t>(a)];
            if (c > best_count) {
                best_count = c;
                best = a;
            }
        }
        if (best_count <= 0) {
            // No sample fell here; label by the box center.
            State center(d);
            for (std::size_t i = 0; i < d; ++i)
                center[i] = 0.5 * (bounds[i].first + bounds[i].second);
            best = system.output(center);
        }
        chain.labels[b] = best;
    }
    return chain;
}

}  // namespace ckabs
