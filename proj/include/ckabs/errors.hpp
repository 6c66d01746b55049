#pragma once

#include <stdexcept>
#include <string>

namespace ckabs {

// Base class for every error raised by this library.  The CLI maps these to
// exit code 1; anything else escaping is a bug.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A trace needs labels before time 0 but the system has no inverse map.
struct PastUnavailable : Error {
    using Error::Error;
};

// Cantor distance requested between words of different shape.
struct LengthMismatch : Error {
    using Error::Error;
};

// A trace matches no block of the partition.
struct NoMatch : Error {
    using Error::Error;
};

// A trace matches more than one block, so the word set does not partition.
struct MultiMatch : Error {
    using Error::Error;
};

// Problem size exceeds a hard guardrail (word count of the exact solver).
struct TooLarge : Error {
    using Error::Error;
};

// Two chains with different alphabets were compared.
struct AlphabetMismatch : Error {
    using Error::Error;
};

// A partition word received no samples, so its row cannot be normalized.
struct EmptyBlock : Error {
    using Error::Error;
};

// Refinement started from an alphabet with at most one observable letter.
struct DegenerateAlphabet : Error {
    using Error::Error;
};

// An operation defined only for future words (past = 0) received a word
// with history.
struct PastWordUnsupported : Error {
    using Error::Error;
};

}  // namespace ckabs
