#pragma once

#include "core/geometry.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace darktext::data {

// Parses `x1,y1,x2,y2,x3,y3,x4,y4[,transcription]`. Corners are kept in file
// order; a `###` transcription marks an illegible (don't-care) box.
// `line_number` only feeds error messages.
TextBox parse_icdar_line(std::string_view line, int line_number = 0);

// Blank lines are skipped; a UTF-8 byte-order mark is tolerated.
std::vector<TextBox> read_icdar_file(const std::filesystem::path& path);
void write_icdar_file(const std::filesystem::path& path, const std::vector<TextBox>& boxes);
std::string format_icdar_line(const TextBox& box);

} // namespace darktext::data
