#pragma once

#include "core/image.hpp"

#include <filesystem>

namespace darktext {

enum class ImageReadMode { Color, Gray };

// 8-bit PNG/JPEG <-> unit floats: v / 255 on read, round(v * 255) on write.
// Colour images are RGB in memory.
ImageTensor read_image(const std::filesystem::path& path, ImageReadMode mode = ImageReadMode::Color);
void write_image(const std::filesystem::path& path, const ImageTensor& img);

template <class Tag>
void write_map(const std::filesystem::path& path, const UnitMap<Tag>& map) {
    write_image(path, as_image(map));
}

template <class Map>
Map read_map(const std::filesystem::path& path) {
    return map_from_image<Map>(read_image(path, ImageReadMode::Gray));
}

// Quantises exactly as write_image followed by read_image would.
ImageTensor quantize_8bit(const ImageTensor& img);

bool is_image_file(const std::filesystem::path& path);

} // namespace darktext
