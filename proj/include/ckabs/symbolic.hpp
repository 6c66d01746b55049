#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ckabs/dynamics.hpp"
#include "ckabs/errors.hpp"

namespace ckabs {

// Output word anchored at time 0: letters cover times -past .. future, so
// letters[past] is the time-0 letter and letters.size() == past + future + 1.
struct TimedWord {
    std::vector<int> letters;
    int past = 0;
    int future = 0;

    int length() const { return static_cast<int>(letters.size()); }
    int anchor() const { return letters[static_cast<std::size_t>(past)]; }
    int letter_at(int time) const { return letters[static_cast<std::size_t>(time + past)]; }
    bool shape_ok() const { return past >= 0 && future >= 0 && length() == past + future + 1; }

    bool operator==(const TimedWord&) const = default;

    // Text form "01@[0,1]": the letters, then the covered time interval.
    std::string text() const;
    static TimedWord parse(const std::string& text);

    // Word covering times 0 .. letters.size()-1.
    static TimedWord future_word(std::vector<int> letters);
};

// Finite word set intended to cover the state space block-disjointly.
struct Partition {
    std::vector<TimedWord> words;
    int alphabet_size = 0;

    int max_past() const;
    int max_future() const;
    bool future_only() const;  // true when every word has past = 0
};

// Checks word shapes, letter ranges and duplicates; returns human-readable
// violations, empty when the partition is well formed.
std::vector<std::string> check_partition(const Partition& partition);

// Longest common prefix of two equal-length letter sequences.
int common_prefix_length(std::span<const int> w1, std::span<const int> w2);

// 0 for equal words, else 2^-L with L the longest common prefix length.
// Exact: the result is a power of two or zero.
double cantor_distance(std::span<const int> w1, std::span<const int> w2);

// Overload for anchored words; the intervals must agree.
double cantor_distance(const TimedWord& w1, const TimedWord& w2);

// Resolves which block of the partition a trace lies in, reading the trace
// relative to time_origin (the word's time 0 is the trace's time_origin).
// Prebuilds a prefix tree when all words are future words, so repeated
// matching during estimation stays cheap.
class BlockMatcher {
public:
    // Returned by try_match_at when the trace lies in no block.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit BlockMatcher(const Partition& partition);

    // Index of the unique matching word.  Throws NoMatch / MultiMatch, or
    // Error when the trace does not span a word's interval.
    std::size_t match_at(const Trace& trace, int time_origin) const;

    // As match_at, but reports "no block" as npos instead of NoMatch.
    // Ambiguity (MultiMatch) and span problems still throw.
    std::size_t try_match_at(const Trace& trace, int time_origin) const;

private:
    const Partition& partition_;
    // Prefix tree over future words: child[node][letter], leaf word index
    // or npos.  Empty when some word has past > 0.
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> leaf_;
    bool use_tree_ = false;

    std::size_t match_linear(const Trace& trace, int time_origin) const;
};

// One-shot convenience around BlockMatcher.
std::size_t match_block(const Trace& trace, const Partition& partition);

// True when the words, viewed as leaves of the |A|-ary future prefix tree
// together with the dropped leaves, cover every infinite path exactly once.
// Only future words are supported (PastWordUnsupported otherwise).
bool is_partition_consistent(const Partition& partition, const std::vector<TimedWord>& dropped);

}  // namespace ckabs
