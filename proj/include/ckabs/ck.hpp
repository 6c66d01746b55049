#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "ckabs/markov.hpp"

namespace ckabs {

// Per-level comparison of two chains' word distributions p1, p2 over words
// of length 1..max_level:
//   overlap[l-1]  = sum_w min(p1(w), p2(w))        (nonincreasing in l)
//   mismatch[l-1] = sum_w |p1(w) - p2(w)|          (= 2 - 2 overlap)
// Computed by one shared depth-first walk of the word tree that prunes any
// word with min mass zero: descendants inherit zero mass on that side, so
// they contribute nothing to overlap and exactly the surviving one-sided
// mass to every deeper mismatch.  nodes_visited counts words with positive
// min mass; it never exceeds sum_l |A|^l.
struct LevelOverlap {
    std::vector<double> overlap;
    std::vector<double> mismatch;
    std::uint64_t nodes_visited = 0;
};

LevelOverlap level_overlap(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2,
                           int max_level);

// Truncated behavioural distance with its enclosure of the untruncated
// limit: lower = value, upper = value + 2^(1-k) overlap[k-1], and
// upper - lower <= 2^(1-k).
struct CkResult {
    double value = 0.0;
    int k_used = 0;
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t nodes_visited = 0;
};

// Distance truncated at word length k, evaluated as
//   sum_{l<k} 2^-l (mismatch_l / 2) + 2^(1-k) (mismatch_k / 2),
// which equals 1 - sum_{l<k} 2^-l overlap_l - 2^(1-k) overlap_k but is
// exactly zero for identical chains and never negative.
CkResult ck_distance_at(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2, int k);

// Chooses k = ceil(log2(1/epsilon)) + 1, which makes the enclosure width
// 2^(1-k) overlap_k at most epsilon.
CkResult ck_distance(const LabeledMarkovChain& chain1, const LabeledMarkovChain& chain2,
                     double epsilon);

int horizon_for_accuracy(double epsilon);

// Joint distribution over pairs of length-k words, base-|A| encoded with
// the first letter most significant.  Rows marginalize to the first
// chain's word distribution, columns to the second's, within 1e-9.
struct CouplingMatrix {
    int k = 0;
    int alphabet_size = 0;
    std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> entries;  // sorted, positive mass

    std::vector<double> row_marginals(std::size_t n_words) const;
    std::vector<double> col_marginals(std::size_t n_words) const;
};

// Reference solution of the same distance as an explicit transportation
// problem over all |A|^k word pairs, solved by the generic simplex in
// transport.hpp.  Exponential in k; refuses more than 4096 words
// (TooLarge).  Exists to cross-check ck_distance_at, so it shares no code
// with the recursive path beyond the word distributions themselves.
struct OracleResult {
    double value = 0.0;
    CouplingMatrix coupling;
};

OracleResult kantorovich_lp_oracle(const LabeledMarkovChain& chain1,
                                   const LabeledMarkovChain& chain2, int k);

// Any optimal coupling keeps min(p1(w), p2(w)) mass on the diagonal.
bool coupling_diagonal_check(const CouplingMatrix& coupling, std::span<const double> p1,
                             std::span<const double> p2, double tolerance);

// Mass leaving or entering the block of each length-(k-1) prefix equals the
// one-sided surplus max(p1 - p2, 0) resp. max(p2 - p1, 0) of that prefix.
bool coupling_block_marginal_check(const CouplingMatrix& coupling,
                                   std::span<const double> p1_prefixes,
                                   std::span<const double> p2_prefixes, double tolerance);

}  // namespace ckabs
