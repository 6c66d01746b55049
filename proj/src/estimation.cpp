#include "ckabs/estimation.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "ckabs/random.hpp"

namespace ckabs {

namespace {

std::string word_list(const std::vector<TimedWord>& words) {
    std::ostringstream out;
    for (std::size_t i = 0; i < words.size(); ++i) out << (i ? " " : "") << words[i].text();
    return out.str();
}

void merge(CountTable& into, const CountTable& from) {
    for (std::size_t i = 0; i < into.word_count.size(); ++i)
        into.word_count[i] += from.word_count[i];
    for (std::size_t i = 0; i < into.pair_count.size(); ++i)
        into.pair_count[i] += from.pair_count[i];
    into.n_samples += from.n_samples;
}

// Runs fn(i) for i in [0, n) over the requested number of workers.
// Trajectory seeds depend only on i, so any split yields the same counts.
template <typename Fn>
void for_each_trajectory(long long n, int threads, Fn&& make_worker) {
    const int workers = static_cast<int>(std::max<long long>(1, std::min<long long>(threads, n)));
    if (workers == 1) {
        make_worker(0)(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    const long long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long long lo = static_cast<long long>(w) * chunk;
        const long long hi = std::min(n, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            try {
                make_worker(w)(lo, hi);
            } catch (...) {
                failures[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
}

}  // namespace

CountTable count_blocks(const DynamicalSystem& system, const Partition& partition,
                        const EstimationConfig& config) {
    if (config.n_samples < 0) throw Error("sample count must be nonnegative");
    const auto n_words = partition.words.size();
    const BlockMatcher matcher(partition);
    const int past = partition.max_past();
    const int future = partition.max_future() + 1;  // one extra step for the shifted block

    std::vector<CountTable> tables(static_cast<std::size_t>(std::max<long long>(
        1, std::min<long long>(config.threads, std::max<long long>(config.n_samples, 1)))));
    for (auto& t : tables) {
        t.word_count.assign(n_words, 0);
        t.pair_count.assign(n_words * n_words, 0);
    }

    for_each_trajectory(config.n_samples, config.threads, [&](int worker) {
        return [&, worker](long long lo, long long hi) {
            CountTable& table = tables[static_cast<std::size_t>(worker)];
            for (long long i = lo; i < hi; ++i) {
                const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(i));
                const Trace trace = simulate_trace(system, seed, past, future);
                ++table.n_samples;
                // Traces outside the word set (possible once words have been
                // dropped) count toward n_samples only; the estimators decide
                // whether that is an error or a renormalization.
                const std::size_t at_zero = matcher.try_match_at(trace, 0);
                if (at_zero == BlockMatcher::npos) continue;
                ++table.word_count[at_zero];
                const std::size_t at_one = matcher.try_match_at(trace, 1);
                if (at_one == BlockMatcher::npos) continue;
                ++table.pair_count[at_zero * n_words + at_one];
            }
        };
    });

    CountTable total;
    total.word_count.assign(n_words, 0);
    total.pair_count.assign(n_words * n_words, 0);
    for (const auto& t : tables) merge(total, t);
    return total;
}

namespace {

LabeledMarkovChain chain_from_counts(const Partition& partition,
                                     const std::vector<long long>& word_count,
                                     const std::vector<long long>& pair_count,
                                     long long mu_denominator) {
    const auto n = partition.words.size();
    LabeledMarkovChain chain;
    chain.alphabet_size = partition.alphabet_size;
    chain.mu.resize(n);
    chain.tau.assign(n * n, 0.0);
    chain.labels.resize(n);
    chain.state_names = partition.words;
    for (std::size_t w = 0; w < n; ++w) {
        chain.mu[w] = static_cast<double>(word_count[w]) / static_cast<double>(mu_denominator);
        chain.labels[w] = partition.words[w].anchor();
        for (std::size_t v = 0; v < n; ++v)
            chain.tau[w * n + v] =
                static_cast<double>(pair_count[w * n + v]) / static_cast<double>(word_count[w]);
    }
    return chain;
}

}  // namespace

LabeledMarkovChain estimate_abstraction(const DynamicalSystem& system, const Partition& partition,
                                        const EstimationConfig& config) {
    const CountTable table = count_blocks(system, partition, config);
    const auto n = partition.words.size();

    // The strict estimator refuses to guess when the word set fails to cover
    // the sampled data; estimate_with_drops is the renormalizing variant.
    long long matched = 0;
    for (std::size_t w = 0; w < n; ++w) matched += table.word_count[w];
    if (matched < table.n_samples)
        throw NoMatch(std::to_string(table.n_samples - matched) +
                      " sampled traces lie in no block of the partition");
    for (std::size_t w = 0; w < n; ++w) {
        long long row = 0;
        for (std::size_t v = 0; v < n; ++v) row += table.pair_at(w, v);
        if (row < table.word_count[w])
            throw NoMatch("sampled transitions from " + partition.words[w].text() +
                          " leave every block of the partition");
    }

    std::vector<TimedWord> empty;
    for (std::size_t w = 0; w < n; ++w)
        if (table.word_count[w] <= config.zero_threshold) empty.push_back(partition.words[w]);
    if (!empty.empty())
        throw EmptyBlock("empirically null words: " + word_list(empty));
    return chain_from_counts(partition, table.word_count, table.pair_count, table.n_samples);
}

PrunedEstimate estimate_with_drops(const DynamicalSystem& system, const Partition& partition,
                                   const EstimationConfig& config) {
    const CountTable table = count_blocks(system, partition, config);
    const auto n = partition.words.size();

    std::vector<bool> keep(n);
    for (std::size_t w = 0; w < n; ++w) keep[w] = table.word_count[w] > config.zero_threshold;

    // A kept word whose observed transitions all lead into dropped words has
    // no usable row; drop it too and repeat until stable.
    std::vector<long long> retained(n, 0);
    for (;;) {
        bool changed = false;
        for (std::size_t w = 0; w < n; ++w) {
            if (!keep[w]) continue;
            long long sum = 0;
            for (std::size_t v = 0; v < n; ++v)
                if (keep[v]) sum += table.pair_at(w, v);
            retained[w] = sum;
            if (sum == 0) {
                keep[w] = false;
                changed = true;
            }
        }
        if (!changed) break;
    }

    PrunedEstimate result;
    result.kept.alphabet_size = partition.alphabet_size;
    for (std::size_t w = 0; w < n; ++w)
        (keep[w] ? result.kept.words : result.dropped).push_back(partition.words[w]);
    if (result.kept.words.empty())
        throw EmptyBlock("every word is empirically null: " + word_list(partition.words));

    const auto kept_n = result.kept.words.size();
    std::vector<long long> kept_counts(kept_n);
    std::vector<long long> kept_pairs(kept_n * kept_n);
    long long total = 0;
    std::vector<std::size_t> dense_index;
    for (std::size_t w = 0; w < n; ++w)
        if (keep[w]) dense_index.push_back(w);
    for (std::size_t i = 0; i < kept_n; ++i) {
        kept_counts[i] = retained[dense_index[i]];
        total += kept_counts[i];
        for (std::size_t j = 0; j < kept_n; ++j)
            kept_pairs[i * kept_n + j] = table.pair_at(dense_index[i], dense_index[j]);
    }
    result.chain = chain_from_counts(result.kept, kept_counts, kept_pairs, total);
    result.kept_counts = std::move(kept_counts);
    return result;
}

std::vector<TimedWord> observed_zero_words(const DynamicalSystem& system,
                                           const std::vector<TimedWord>& candidates,
                                           const EstimationConfig& config) {
    if (config.n_samples < 0) throw Error("sample count must be nonnegative");
    int past = 0;
    int future = 0;
    for (const auto& w : candidates) {
        if (!w.shape_ok()) throw Error("malformed candidate word");
        past = std::max(past, w.past);
        future = std::max(future, w.future);
    }

    std::vector<long long> counts(candidates.size(), 0);
    for (long long i = 0; i < config.n_samples; ++i) {
        const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(i));
        const Trace trace = simulate_trace(system, seed, past, future);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const auto& w = candidates[c];
            bool matches = true;
            for (int t = -w.past; t <= w.future && matches; ++t)
                matches = trace.label_at(t) == w.letter_at(t);
            if (matches) ++counts[c];
        }
    }

    std::vector<TimedWord> zero;
    for (std::size_t c = 0; c < candidates.size(); ++c)
        if (counts[c] <= config.zero_threshold) zero.push_back(candidates[c]);
    return zero;
}

}  // namespace ckabs
