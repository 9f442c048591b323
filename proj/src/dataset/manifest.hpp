#pragma once

#include "dataset/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace darktext::data {

// One manifest record per line:
//   short_path,long_path,annotation_path,split[,id]
// Relative paths resolve against the manifest's directory and are written
// relative to it. Lines starting with '#' and blank lines are ignored. The
// id defaults to the stem of the long-exposure path.
struct ManifestEntry {
    std::filesystem::path short_path;
    std::filesystem::path long_path;
    std::filesystem::path annotation_path;
    std::string split;
    std::string id;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Loads every entry of `split` (all entries when split is empty).
std::vector<SamplePair> load_split(const std::vector<ManifestEntry>& entries, const std::string& split,
                                   const LoadOptions& options = {});

} // namespace darktext::data
