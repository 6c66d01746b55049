#include "ckabs/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ckabs {

std::string TimedWord::text() const {
    if (!shape_ok()) throw Error("malformed word: interval does not match letter count");
    std::ostringstream out;
    for (int letter : letters) {
        if (letter < 0 || letter > 9) throw Error("word text supports letters 0..9 only");
        out << letter;
    }
    out << "@[" << -past << "," << future << "]";
    return out.str();
}

TimedWord TimedWord::parse(const std::string& text) {
    const auto at = text.find('@');
    if (at == std::string::npos || at == 0) throw Error("word text must look like \"01@[0,1]\"");
    TimedWord word;
    for (std::size_t i = 0; i < at; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw Error("word letters must be digits 0..9");
        word.letters.push_back(c - '0');
    }
    int from = 0;
    int to = 0;
    char open = 0, comma = 0, close = 0;
    std::istringstream in(text.substr(at + 1));
    in >> open >> from >> comma >> to >> close;
    if (!in || open != '[' || comma != ',' || close != ']' || in.peek() != EOF)
        throw Error("word text must look like \"01@[0,1]\"");
    if (from > 0 || to < from) throw Error("word interval must contain time 0");
    word.past = -from;
    word.future = to;
    if (!word.shape_ok()) throw Error("word interval does not match letter count");
    return word;
}

TimedWord TimedWord::future_word(std::vector<int> letters) {
    if (letters.empty()) throw Error("words must have at least one letter");
    TimedWord word;
    word.future = static_cast<int>(letters.size()) - 1;
    word.letters = std::move(letters);
    return word;
}

int Partition::max_past() const {
    int m = 0;
    for (const auto& w : words) m = std::max(m, w.past);
    return m;
}

int Partition::max_future() const {
    int m = 0;
    for (const auto& w : words) m = std::max(m, w.future);
    return m;
}

bool Partition::future_only() const {
    return std::all_of(words.begin(), words.end(), [](const TimedWord& w) { return w.past == 0; });
}

std::vector<std::string> check_partition(const Partition& partition) {
    std::vector<std::string> violations;
    if (partition.alphabet_size < 1) violations.push_back("alphabet must have at least one letter");
    for (std::size_t i = 0; i < partition.words.size(); ++i) {
        const auto& w = partition.words[i];
        if (!w.shape_ok()) {
            violations.push_back("word " + std::to_string(i) + " has a malformed interval");
            continue;
        }
        for (int letter : w.letters)
            if (letter < 0 || letter >= partition.alphabet_size) {
                violations.push_back("word " + std::to_string(i) + " uses a letter outside the alphabet");
                break;
            }
        for (std::size_t j = i + 1; j < partition.words.size(); ++j)
            if (partition.words[j] == w)
                violations.push_back("words " + std::to_string(i) + " and " + std::to_string(j) +
                                     " are duplicates");
    }
    return violations;
}

int common_prefix_length(std::span<const int> w1, std::span<const int> w2) {
    if (w1.size() != w2.size())
        throw LengthMismatch("cantor distance needs words of equal length");
    int l = 0;
    while (static_cast<std::size_t>(l) < w1.size() && w1[static_cast<std::size_t>(l)] == w2[static_cast<std::size_t>(l)])
        ++l;
    return l;
}

double cantor_distance(std::span<const int> w1, std::span<const int> w2) {
    const int l = common_prefix_length(w1, w2);
    if (static_cast<std::size_t>(l) == w1.size()) return 0.0;
    return std::ldexp(1.0, -l);
}

double cantor_distance(const TimedWord& w1, const TimedWord& w2) {
    if (w1.past != w2.past || w1.future != w2.future)
        throw LengthMismatch("cantor distance needs words over the same interval");
    return cantor_distance(std::span<const int>(w1.letters), std::span<const int>(w2.letters));
}

BlockMatcher::BlockMatcher(const Partition& partition) : partition_(partition) {
    const auto violations = check_partition(partition);
    if (!violations.empty()) throw Error("malformed partition: " + violations.front());
    use_tree_ = partition.future_only() && !partition.words.empty();
    if (!use_tree_) return;

    const auto a = static_cast<std::size_t>(partition.alphabet_size);
    children_.push_back(std::vector<std::size_t>(a, npos));
    leaf_.push_back(npos);
    for (std::size_t i = 0; i < partition.words.size(); ++i) {
        std::size_t node = 0;
        for (int letter : partition.words[i].letters) {
            auto& slot = children_[node][static_cast<std::size_t>(letter)];
            if (slot == npos) {
                slot = children_.size();
                children_.push_back(std::vector<std::size_t>(a, npos));
                leaf_.push_back(npos);
            }
            node = slot;
        }
        leaf_[node] = i;  // duplicates were rejected above
    }
}

std::size_t BlockMatcher::match_at(const Trace& trace, int time_origin) const {
    const std::size_t found = try_match_at(trace, time_origin);
    if (found == npos) throw NoMatch("trace lies in no block of the partition");
    return found;
}

std::size_t BlockMatcher::try_match_at(const Trace& trace, int time_origin) const {
    if (!use_tree_) return match_linear(trace, time_origin);

    std::size_t found = npos;
    std::size_t node = 0;
    int depth = 0;
    for (;;) {
        if (leaf_[node] != npos) {
            if (found != npos)
                throw MultiMatch("trace lies in more than one block of the partition");
            found = leaf_[node];
        }
        const bool has_children =
            std::any_of(children_[node].begin(), children_[node].end(),
                        [](std::size_t c) { return c != npos; });
        if (!has_children) break;
        const int time = time_origin + depth;
        if (!trace.spans(time, time)) {
            if (found == npos) throw Error("trace does not span the partition words");
            break;
        }
        const int letter = trace.label_at(time);
        if (letter < 0 || letter >= partition_.alphabet_size)
            throw Error("trace letter outside the partition alphabet");
        const std::size_t next = children_[node][static_cast<std::size_t>(letter)];
        if (next == npos) break;
        node = next;
        ++depth;
    }
    return found;
}

std::size_t BlockMatcher::match_linear(const Trace& trace, int time_origin) const {
    std::size_t found = npos;
    for (std::size_t i = 0; i < partition_.words.size(); ++i) {
        const auto& w = partition_.words[i];
        if (!trace.spans(time_origin - w.past, time_origin + w.future))
            throw Error("trace does not span the partition words");
        bool matches = true;
        for (int t = -w.past; t <= w.future && matches; ++t)
            matches = trace.label_at(time_origin + t) == w.letter_at(t);
        if (!matches) continue;
        if (found != npos)
            throw MultiMatch("trace lies in more than one block of the partition");
        found = i;
    }
    return found;
}

std::size_t match_block(const Trace& trace, const Partition& partition) {
    return BlockMatcher(partition).match_at(trace, 0);
}

bool is_partition_consistent(const Partition& partition, const std::vector<TimedWord>& dropped) {
    if (partition.alphabet_size < 1) return false;
    std::vector<const TimedWord*> leaves;
    leaves.reserve(partition.words.size() + dropped.size());
    for (const auto& w : partition.words) leaves.push_back(&w);
    for (const auto& w : dropped) leaves.push_back(&w);

    std::size_t max_len = 0;
    for (const auto* w : leaves) {
        if (w->past != 0)
            throw PastWordUnsupported("consistency check covers future words only");
        if (!w->shape_ok()) return false;
        for (int letter : w->letters)
            if (letter < 0 || letter >= partition.alphabet_size) return false;
        max_len = std::max(max_len, w->letters.size());
    }
    if (leaves.empty()) return false;

    // Leaves cover the |A|-ary tree exactly once iff they are prefix-free
    // and their Kraft sum equals one.  Both checks are exact integer
    // arithmetic in units of |A|^-max_len.
    std::vector<std::vector<int>> sorted;
    sorted.reserve(leaves.size());
    for (const auto* w : leaves) sorted.push_back(w->letters);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& a = sorted[i];
        const auto& b = sorted[i + 1];
        if (a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin())) return false;
    }

    const auto base = static_cast<unsigned __int128>(partition.alphabet_size);
    unsigned __int128 full = 1;
    for (std::size_t i = 0; i < max_len; ++i) {
        if (full > (static_cast<unsigned __int128>(1) << 120) / base)
            throw TooLarge("partition words too long for the exact consistency check");
        full *= base;
    }
    unsigned __int128 kraft = 0;
    for (const auto* w : leaves) {
        unsigned __int128 weight = 1;
        for (std::size_t i = 0; i < max_len - w->letters.size(); ++i) weight *= base;
        kraft += weight;
        if (kraft > full) return false;
    }
    return kraft == full;
}

}  // namespace ckabs
