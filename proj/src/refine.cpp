#include "ckabs/refine.hpp"

#include <sstream>

#include "ckabs/ck.hpp"
#include "ckabs/random.hpp"

namespace ckabs {

ChainMetric ck_metric(double epsilon) {
    const int k = horizon_for_accuracy(epsilon);  // validates epsilon up front
    std::ostringstream name;
    name << "ck(k=" << k << ")";
    ChainMetric metric;
    metric.name = name.str();
    metric.distance = [epsilon](const LabeledMarkovChain& a, const LabeledMarkovChain& b) {
        return ck_distance(a, b, epsilon).value;
    };
    return metric;
}

Partition split_block(const Partition& partition, std::size_t block, SplitDirection direction) {
    if (block >= partition.words.size()) throw Error("block index out of range");
    if (direction != SplitDirection::forward)
        throw PastWordUnsupported("only forward splits are implemented");
    const TimedWord& word = partition.words[block];
    if (word.past != 0) throw PastWordUnsupported("only future words can be split");

    Partition split;
    split.alphabet_size = partition.alphabet_size;
    split.words.reserve(partition.words.size() + static_cast<std::size_t>(partition.alphabet_size) - 1);
    for (std::size_t i = 0; i < partition.words.size(); ++i) {
        if (i != block) {
            split.words.push_back(partition.words[i]);
            continue;
        }
        for (int letter = 0; letter < partition.alphabet_size; ++letter) {
            TimedWord extended = word;
            extended.letters.push_back(letter);
            ++extended.future;
            split.words.push_back(std::move(extended));
        }
    }
    return split;
}

std::vector<TimedWord> RefineReport::all_dropped() const {
    std::vector<TimedWord> dropped = initial_dropped;
    for (const auto& iteration : iterations)
        dropped.insert(dropped.end(), iteration.dropped.begin(), iteration.dropped.end());
    return dropped;
}

namespace {

std::uint64_t batch_seed(std::uint64_t master, int iteration, std::size_t block) {
    return derive_seed(derive_seed(master, static_cast<std::uint64_t>(iteration)),
                       static_cast<std::uint64_t>(block));
}

}  // namespace

RefineReport refine(const DynamicalSystem& system, const ChainMetric& metric, int iterations,
                    const EstimationConfig& config) {
    if (iterations < 0) throw Error("iteration count must be nonnegative");
    if (system.alphabet_size < 2)
        throw DegenerateAlphabet("refinement needs at least two output letters");

    RefineReport report;
    report.master_seed = config.master_seed;
    report.samples_per_candidate = config.n_samples;

    Partition letters;
    letters.alphabet_size = system.alphabet_size;
    for (int a = 0; a < system.alphabet_size; ++a)
        letters.words.push_back(TimedWord::future_word({a}));

    EstimationConfig batch = config;
    batch.master_seed = batch_seed(config.master_seed, 0, 0);
    PrunedEstimate current = estimate_with_drops(system, letters, batch);
    if (current.kept.words.size() < 2)
        throw DegenerateAlphabet("fewer than two letters were ever observed");
    report.initial_partition = current.kept;
    report.initial_dropped = current.dropped;
    report.initial_chain = current.chain;

    for (int n = 1; n <= iterations; ++n) {
        const Partition& words = current.kept;
        std::vector<std::optional<double>> distances(words.words.size());
        std::vector<std::optional<PrunedEstimate>> outcomes(words.words.size());

        for (std::size_t block = 0; block < words.words.size(); ++block) {
            const Partition candidate = split_block(words, block);
            batch.master_seed = batch_seed(config.master_seed, n, block);
            try {
                PrunedEstimate estimate = estimate_with_drops(system, candidate, batch);
                distances[block] = metric.distance(current.chain, estimate.chain);
                outcomes[block] = std::move(estimate);
            } catch (const EmptyBlock&) {
                // Splitting this block left nothing estimable; skip it.
            }
        }

        std::size_t chosen = words.words.size();
        for (std::size_t block = 0; block < words.words.size(); ++block) {
            if (!distances[block]) continue;
            if (chosen == words.words.size() || *distances[block] > *distances[chosen])
                chosen = block;
        }
        if (chosen == words.words.size())
            throw Error("every candidate split failed estimation");

        RefineIteration record;
        record.candidate_distance = std::move(distances);
        record.chosen = chosen;
        record.dropped = outcomes[chosen]->dropped;
        record.partition = outcomes[chosen]->kept;
        record.chain = outcomes[chosen]->chain;
        current = std::move(*outcomes[chosen]);
        report.iterations.push_back(std::move(record));
    }
    return report;
}

}  // namespace ckabs
