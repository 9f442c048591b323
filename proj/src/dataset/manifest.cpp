#include "dataset/manifest.hpp"

#include "core/error.hpp"

#include <fstream>
#include <sstream>

namespace darktext::data {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open manifest " + path.string());
    const std::filesystem::path base = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        require(fields.size() == 4 || fields.size() == 5, ErrorCode::Parse,
                path.string() + ":" + std::to_string(number) +
                    ": expected short,long,annotation,split[,id]");
        auto resolve = [&](const std::string& p) -> std::filesystem::path {
            if (p.empty()) return {};
            std::filesystem::path q(p);
            return q.is_absolute() ? q : base / q;
        };
        ManifestEntry e;
        e.short_path = resolve(fields[0]);
        e.long_path = resolve(fields[1]);
        e.annotation_path = resolve(fields[2]);
        e.split = fields[3];
        e.id = fields.size() == 5 && !fields[4].empty() ? fields[4] : e.long_path.stem().string();
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write manifest " + path.string());
    const auto base = std::filesystem::absolute(path).parent_path();
    auto rel = [&](const std::filesystem::path& p) {
        return std::filesystem::absolute(p).lexically_normal().lexically_relative(base).generic_string();
    };
    out << "# short,long,annotation,split,id\n";
    for (const auto& e : entries) {
        out << rel(e.short_path) << "," << rel(e.long_path) << "," << rel(e.annotation_path) << "," << e.split << ","
            << e.id << "\n";
    }
}

std::vector<SamplePair> load_split(const std::vector<ManifestEntry>& entries, const std::string& split,
                                   const LoadOptions& options) {
    std::vector<SamplePair> pairs;
    for (const auto& e : entries) {
        if (!split.empty() && e.split != split) continue;
        pairs.push_back(load_pair(e.short_path, e.long_path, e.annotation_path, options, e.id));
    }
    require(!pairs.empty(), ErrorCode::EmptyCorpus, "manifest has no samples in split '" + split + "'");
    return pairs;
}

} // namespace darktext::data
