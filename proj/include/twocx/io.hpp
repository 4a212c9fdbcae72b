#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "twocx/constructions.hpp"
#include "twocx/highdim.hpp"
#include "twocx/moves.hpp"
#include "twocx/pairing.hpp"

namespace twocx::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);

/// Move scripts: indices are 1-based on disk. Words are written over the
/// generator names current at that point of the replay from `start`.
json script_to_json(const MoveScript& s, const Presentation& start);
/// Accepts a bare array of moves or {"regime", "stabilized", "moves"}.
MoveScript script_from_json(const json& j, const Presentation& start);

/// {"target": word, "factors": [{"g": word, "r": 1-based, "sign": +-1}]}
json witness_to_json(const NormalClosureWitness& w, const std::vector<std::string>& names);
NormalClosureWitness witness_from_json(const json& j, const std::vector<std::string>& names);
/// An array of witnesses (or null entries) or a single witness object.
std::vector<std::optional<NormalClosureWitness>> witnesses_from_json(const json& j,
                                                                     const std::vector<std::string>& names);

/// {"y_in_x": [words over P], "x_in_y": [words over Q]}
IsoWitness iso_from_json(const json& j, const Presentation& p, const Presentation& q);
json iso_to_json(const IsoWitness& w, const Presentation& p, const Presentation& q);

/// [{"coeff": int, "presentation": text}]
json sum_to_json(const FormalSum<Integer>& x);
FormalSum<Integer> sum_from_json(const json& j);

json certificate_to_json(const EquivalenceCertificate& c);
EquivalenceCertificate certificate_from_json(const json& j);

/// Text: order, identity index, then one comma separated table row per element.
FiniteGroup parse_group(const std::string& text);
std::string format_group(const FiniteGroup& g);

/// {"group": path | {"order","identity","table"}, "n", "ranks",
///  "entries": [[k, row, col, elem, coeff], ...]}; a group path is resolved
/// against `base`.
ChainComplexData chain_from_json(const json& j, const std::filesystem::path& base);
json chain_to_json(const ChainComplexData& c);
ChainComplexData load_chain(const std::filesystem::path& path);

struct Bundle {
  FormalSum<Integer> x;
  std::vector<EquivalenceCertificate> certificates;
  std::string report;
};

/// Writes x.sum, certs/NN.json and report.txt into a temporary sibling
/// directory and renames it over `dir`.
void write_bundle(const std::filesystem::path& dir, const Bundle& b);
Bundle read_bundle(const std::filesystem::path& dir);

std::string side_name(Side s);

}  // namespace twocx::io
