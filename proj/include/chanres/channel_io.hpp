#pragma once

// JSON channel files: {"dim_in", "dim_out", "repr": "kraus"|"choi", "data"}
// with complex entries stored as [re, im] pairs, rows first.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "chanres/core.hpp"

namespace chanres {

enum class Repr { Kraus, Choi };

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

/// Kraus repr is written when the spec carries Kraus operators, unless Choi is forced.
nlohmann::json channel_to_json(const ChannelSpec& channel, bool forceChoi = false);
ChannelSpec channel_from_json(const nlohmann::json& j);

ChannelSpec read_channel(const std::filesystem::path& path);
void write_channel(const std::filesystem::path& path, const ChannelSpec& channel, bool forceChoi = false);

/// Parses a whole document; malformed input throws Error(ParseError).
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace chanres
