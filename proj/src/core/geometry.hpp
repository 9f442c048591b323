#pragma once

#include <array>
#include <string>
#include <vector>

namespace darktext {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

// Axis-aligned rectangle: top-left (u, v), width w, height h.
struct Rect {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    double h = 0.0;

    double right() const { return u + w; }
    double bottom() const { return v + h; }
    double area() const { return w * h; }
    bool operator==(const Rect&) const = default;
};

double intersection_area(const Rect& a, const Rect& b);

// Quadrilateral text annotation, corners clockwise from top-left. Illegible
// (don't-care) boxes carry an empty transcription.
class TextBox {
public:
    TextBox() = default;
    TextBox(std::array<Point, 4> quad, bool legible, std::string transcription);
    static TextBox from_rect(const Rect& r, bool legible = true, std::string transcription = {});

    const std::array<Point, 4>& quad() const { return quad_; }
    bool legible() const { return legible_; }
    const std::string& transcription() const { return transcription_; }
    Rect aabb() const;

    void set_quad(std::array<Point, 4> quad) { quad_ = quad; }
    void set_legible(bool legible);
    bool operator==(const TextBox&) const = default;

private:
    std::array<Point, 4> quad_{};
    bool legible_ = true;
    std::string transcription_;
};

inline constexpr const char* kDontCareMarker = "###";

// Reorders corners clockwise (image coordinates, y down) starting from the
// corner nearest the top-left.
std::array<Point, 4> canonical_quad(std::array<Point, 4> quad);

enum class IouMode { AxisAligned, Polygon };

double box_iou(const TextBox& a, const TextBox& b, IouMode mode = IouMode::AxisAligned);
double rect_iou(const Rect& a, const Rect& b);

} // namespace darktext
