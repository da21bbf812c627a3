#pragma once

// JSON encodings shared by persistence, the map file format and the HTTP API.

#include <json.hpp>

#include "kmap/types.hpp"

namespace kmap {

using json = nlohmann::json;

void to_json(json& j, const DocumentRecord& doc);
void from_json(const json& j, DocumentRecord& doc);

void to_json(json& j, const LexiconEntry& entry);
void from_json(const json& j, LexiconEntry& entry);

void to_json(json& j, const Mention& mention);
void from_json(const json& j, Mention& mention);

void to_json(json& j, const Relation& relation);
void from_json(const json& j, Relation& relation);

}  // namespace kmap
