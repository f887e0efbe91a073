#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "setomo/grid.hpp"

namespace setomo {

using json = nlohmann::json;

json grid_to_json(const ModeGrid& grid);
ModeGrid grid_from_json(const json& j);

// {grid:{...}, re:[...], im:[...]}
json field1d_to_json(const Field1D& f);
Field1D field1d_from_json(const json& j);

// {grid_s:{center,span,n}, grid_i:{...}, re:[[...]], im:[[...]]}, row-major.
json field2d_to_json(const Field2D& f);
Field2D field2d_from_json(const json& j);

// Serializes with every floating-point number rendered at 17 significant digits.
// Object keys come out in nlohmann's (sorted) order, so output is deterministic.
std::string dump_json(const json& j, int indent = 1);

// Shortest decimal string that round-trips to the same double.
std::string format_shortest(double x);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace setomo
