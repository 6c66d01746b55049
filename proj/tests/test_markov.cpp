#include <doctest.h>

#include <numeric>
#include <vector>

#include "ckabs/markov.hpp"

#include "helpers.hpp"

using namespace ckabs;
using namespace ckabs::testing;

namespace {

// Exact two-state abstraction of the quarter rotation with one letter of
// memory: both letters carry mass 1/2 and every transition is a coin flip.
LabeledMarkovChain quarter_rotation_memory1() {
    return make_chain(2, {0, 1}, {0.5, 0.5}, {0.5, 0.5, 0.5, 0.5});
}

// With two letters of memory the quarter rotation is the deterministic
// four-cycle 00 -> 01 -> 11 -> 10 -> 00, each word carrying mass 1/4.
LabeledMarkovChain quarter_rotation_memory2() {
    std::vector<double> tau(16, 0.0);
    const auto idx = [](int from, int to) { return static_cast<std::size_t>(from * 4 + to); };
    // States ordered 00, 01, 10, 11; the label is the word's first letter.
    tau[idx(0, 1)] = 1.0;
    tau[idx(1, 3)] = 1.0;
    tau[idx(3, 2)] = 1.0;
    tau[idx(2, 0)] = 1.0;
    return make_chain(2, {0, 0, 1, 1}, {0.25, 0.25, 0.25, 0.25}, std::move(tau));
}

}  // namespace

TEST_CASE("validate accepts well-formed chains") {
    CHECK(validate(quarter_rotation_memory1()).empty());
    CHECK(validate(quarter_rotation_memory2()).empty());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(validate(random_dense_chain(2, 3, seed)).empty());
        CHECK(validate(random_sparse_chain(3, 4, seed)).empty());
    }
}

TEST_CASE("validate reports every structural defect") {
    LabeledMarkovChain chain = quarter_rotation_memory1();
    chain.mu = {0.7, 0.7};
    CHECK(!validate(chain).empty());

    chain = quarter_rotation_memory1();
    chain.tau[0] = 0.9;  // row 0 now sums to 1.4
    CHECK(!validate(chain).empty());

    chain = quarter_rotation_memory1();
    chain.mu = {1.5, -0.5};
    CHECK(!validate(chain).empty());

    chain = quarter_rotation_memory1();
    chain.labels = {0, 5};
    CHECK(!validate(chain).empty());

    chain = quarter_rotation_memory1();
    chain.tau.resize(3);
    CHECK(!validate(chain).empty());

    chain = quarter_rotation_memory2();
    chain.state_names = {TimedWord::parse("00@[0,1]"), TimedWord::parse("01@[0,1]"),
                         TimedWord::parse("10@[0,1]"), TimedWord::parse("11@[0,1]")};
    CHECK(validate(chain).empty());
    chain.state_names[0] = TimedWord::parse("10@[0,1]");  // anchor 1, label says 0
    CHECK(!validate(chain).empty());
}

TEST_CASE("forward mass folds one letter at a time") {
    const LabeledMarkovChain chain = quarter_rotation_memory2();
    ForwardMass mass = initial_mass(chain, 0);
    CHECK(mass.total() == doctest::Approx(0.5).epsilon(1e-12));
    mass = extend_mass(chain, mass, 0);
    CHECK(mass.total() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mass.word == std::vector<int>{0, 0});
    mass = extend_mass(chain, mass, 1);
    CHECK(mass.total() == doctest::Approx(0.25).epsilon(1e-12));
    mass = extend_mass(chain, mass, 0);  // 001 cannot continue with 0
    CHECK(mass.total() == 0.0);
}

TEST_CASE("word probability matches brute-force path enumeration") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const LabeledMarkovChain chain =
            (seed % 2 == 0) ? random_dense_chain(2, 3, seed) : random_sparse_chain(3, 4, seed);
        Rng rng(seed + 1000);
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<int> word;
            const int len = 1 + static_cast<int>(rng.below(4));
            for (int i = 0; i < len; ++i)
                word.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(chain.alphabet_size))));
            const double fast = word_probability(chain, word);
            const double slow = brute_word_probability(chain, word);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        }
    }
}

TEST_CASE("quarter rotation word probabilities are dyadic") {
    const LabeledMarkovChain chain = quarter_rotation_memory2();
    CHECK(word_probability(chain, std::vector<int>{0}) == doctest::Approx(0.5));
    CHECK(word_probability(chain, std::vector<int>{0, 0}) == doctest::Approx(0.25));
    CHECK(word_probability(chain, std::vector<int>{0, 0, 1}) == doctest::Approx(0.25));
    CHECK(word_probability(chain, std::vector<int>{0, 0, 1, 1}) == doctest::Approx(0.25));
    CHECK(word_probability(chain, std::vector<int>{0, 0, 0}) == 0.0);
    // The memory-1 chain spreads the same prefixes as independent flips.
    const LabeledMarkovChain coarse = quarter_rotation_memory1();
    CHECK(word_probability(coarse, std::vector<int>{0, 0, 1}) == doctest::Approx(0.125));
}

TEST_CASE("in_behaviour is exact positivity") {
    const LabeledMarkovChain chain = quarter_rotation_memory2();
    CHECK(in_behaviour(chain, std::vector<int>{0, 0, 1, 1, 0, 0}));
    CHECK(!in_behaviour(chain, std::vector<int>{0, 0, 0}));
    CHECK(!in_behaviour(chain, std::vector<int>{1, 0, 1}));
}

TEST_CASE("word distribution enumerates level k in base-alphabet order") {
    const LabeledMarkovChain chain = quarter_rotation_memory2();
    const std::vector<double> level2 = word_distribution(chain, 2);
    REQUIRE(level2.size() == 4);
    // Order 00, 01, 10, 11 with the first letter most significant.
    CHECK(level2[0] == doctest::Approx(0.25));
    CHECK(level2[1] == doctest::Approx(0.25));
    CHECK(level2[2] == doctest::Approx(0.25));
    CHECK(level2[3] == doctest::Approx(0.25));
    const std::vector<double> level3 = word_distribution(chain, 3);
    REQUIRE(level3.size() == 8);
    CHECK(level3[0] == 0.0);                       // 000
    CHECK(level3[1] == doctest::Approx(0.25));     // 001
    CHECK(std::accumulate(level3.begin(), level3.end(), 0.0) == doctest::Approx(1.0));

    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const LabeledMarkovChain random = random_sparse_chain(3, 4, seed);
        const std::vector<double> level = word_distribution(random, 3);
        REQUIRE(level.size() == 27);
        CHECK(std::accumulate(level.begin(), level.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        // Spot-check a few entries against word_probability.
        CHECK(level[0 * 9 + 0 * 3 + 0] == doctest::Approx(word_probability(random, std::vector<int>{0, 0, 0})));
        CHECK(level[2 * 9 + 1 * 3 + 0] == doctest::Approx(word_probability(random, std::vector<int>{2, 1, 0})));
    }
}
