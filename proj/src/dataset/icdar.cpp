#include "dataset/icdar.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace darktext::data {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

std::string context(std::string_view line, int line_number) {
    std::string where = line_number > 0 ? "line " + std::to_string(line_number) + ": " : std::string{};
    return where + "'" + std::string(line) + "'";
}

std::string format_coord(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

} // namespace

TextBox parse_icdar_line(std::string_view line, int line_number) {
    line = trim(line);
    std::array<double, 8> coords{};
    std::size_t pos = 0;
    for (int i = 0; i < 8; ++i) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            // detector output may stop after the eighth coordinate
            if (i < 7) fail(ErrorCode::Parse, "expected at least 8 comma-separated fields at " + context(line, line_number));
            comma = line.size();
        }
        const std::string_view field = trim(line.substr(pos, comma - pos));
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
            fail(ErrorCode::Parse,
                 "non-numeric coordinate '" + std::string(field) + "' at " + context(line, line_number));
        }
        coords[i] = value;
        pos = std::min(comma + 1, line.size());
    }
    // the transcription may itself contain commas
    const std::string transcription(line.substr(pos));
    const bool legible = transcription != kDontCareMarker;
    std::array<Point, 4> quad;
    for (int i = 0; i < 4; ++i) quad[i] = Point{coords[2 * i], coords[2 * i + 1]};
    return TextBox(quad, legible, legible ? transcription : std::string{});
}

std::vector<TextBox> read_icdar_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open annotation file " + path.string());
    std::vector<TextBox> boxes;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        try {
            boxes.push_back(parse_icdar_line(line, number));
        } catch (const Error& e) {
            fail(e.code(), path.string() + ": " + e.what());
        }
    }
    return boxes;
}

std::string format_icdar_line(const TextBox& box) {
    std::string out;
    for (const auto& p : box.quad()) out += format_coord(p.x) + "," + format_coord(p.y) + ",";
    out += box.legible() ? box.transcription() : std::string(kDontCareMarker);
    return out;
}

void write_icdar_file(const std::filesystem::path& path, const std::vector<TextBox>& boxes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write annotation file " + path.string());
    for (const auto& b : boxes) out << format_icdar_line(b) << "\n";
}

} // namespace darktext::data
