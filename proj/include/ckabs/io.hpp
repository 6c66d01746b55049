#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckabs/dynamics.hpp"
#include "ckabs/markov.hpp"
#include "ckabs/symbolic.hpp"

namespace ckabs {

// JSON forms round-trip value-identically: numbers serialize with enough
// digits to parse back to the same doubles.

nlohmann::json partition_to_json(const Partition& partition);
Partition partition_from_json(const nlohmann::json& j);

nlohmann::json chain_to_json(const LabeledMarkovChain& chain);
LabeledMarkovChain chain_from_json(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

// Affine system description: continuous-time A, b plus the Euler step, an
// ordered list of label regions ending in a catch-all, and the initial box.
AffineSystem affine_from_json(const nlohmann::json& j);

// Resolves a system argument: the built-ins "lorentz" and "rotation:<theta>",
// or a path to an affine system JSON file.
struct LoadedSystem {
    DynamicalSystem system;
    std::optional<AffineSystem> affine;  // present when the system is affine
    std::string description;
};

LoadedSystem load_system(const std::string& spec);

// Writes comment lines (prefixed "# "), then the header, then the rows.
void write_csv(std::ostream& out, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::string>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::string>& rows);

}  // namespace ckabs
