#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "bmrl/harness.hpp"
#include "bmrl/monotonic_world.hpp"
#include "bmrl/multichain_world.hpp"

namespace bmrl {

using nlohmann::json;

// Serializers for every config type; field names match the struct members.
void to_json(json& j, const ChainworldParams& p);
void from_json(const json& j, ChainworldParams& p);
void to_json(json& j, const GridSpec& g);
void from_json(const json& j, GridSpec& g);
void to_json(json& j, const MultiChainASpec& s);
void from_json(const json& j, MultiChainASpec& s);
void to_json(json& j, const MultiChainBSpec& s);
void from_json(const json& j, MultiChainBSpec& s);
void to_json(json& j, const MonotonicChainSpec& s);
void from_json(const json& j, MonotonicChainSpec& s);
void to_json(json& j, const ActionMode& m);
void from_json(const json& j, ActionMode& m);
void to_json(json& j, const NoiseSpec& n);
void from_json(const json& j, NoiseSpec& n);
void to_json(json& j, const AiConfig& c);
void from_json(const json& j, AiConfig& c);
void to_json(json& j, const FitConfig& c);
void from_json(const json& j, FitConfig& c);
void to_json(json& j, const Range& r);
void from_json(const json& j, Range& r);
void to_json(json& j, const ChainPopulation& p);
void from_json(const json& j, ChainPopulation& p);
void to_json(json& j, const GridPopulation& p);
void from_json(const json& j, GridPopulation& p);
void to_json(json& j, const Condition& c);
void from_json(const json& j, Condition& c);
void to_json(json& j, const SuiteConfig& c);
void from_json(const json& j, SuiteConfig& c);
void to_json(json& j, const SuiteResult& r);

// Build a world from a config object: {"type": "chainworld" | "grid" |
// "multichain_a" | "multichain_b" | "monotonic", "params": {...},
// "mode": {...}?, "noise": {...}?}. Noise is only valid for chainworlds.
std::unique_ptr<World> world_from_json(const json& j);

// Parse a file, translating parse/validation failures into
// std::invalid_argument with the file path in the message.
json load_json_file(const std::string& path);

// Manifest describing a run: config hash (FNV-1a of the compact config dump),
// seed, code version, and the subcommand. Deliberately has no timestamp so
// reruns are byte-identical.
json make_manifest(const json& config, std::uint64_t seed,
                   const std::string& subcommand);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace bmrl
