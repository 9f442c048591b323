#include "core/geometry.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>

namespace darktext {

double intersection_area(const Rect& a, const Rect& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.u, b.u);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.v, b.v);
    return (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
}

TextBox::TextBox(std::array<Point, 4> quad, bool legible, std::string transcription)
    : quad_(quad), legible_(legible), transcription_(legible ? std::move(transcription) : std::string{}) {}

TextBox TextBox::from_rect(const Rect& r, bool legible, std::string transcription) {
    return TextBox({Point{r.u, r.v}, Point{r.right(), r.v}, Point{r.right(), r.bottom()}, Point{r.u, r.bottom()}},
                   legible, std::move(transcription));
}

Rect TextBox::aabb() const {
    double x0 = quad_[0].x, x1 = quad_[0].x, y0 = quad_[0].y, y1 = quad_[0].y;
    for (const auto& p : quad_) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

void TextBox::set_legible(bool legible) {
    legible_ = legible;
    if (!legible) transcription_.clear();
}

std::array<Point, 4> canonical_quad(std::array<Point, 4> quad) {
    // signed area > 0 means clockwise when y points down
    double area2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Point& a = quad[i];
        const Point& b = quad[(i + 1) % 4];
        area2 += a.x * b.y - b.x * a.y;
    }
    if (area2 < 0.0) std::swap(quad[1], quad[3]);
    int start = 0;
    for (int i = 1; i < 4; ++i) {
        const double s = quad[i].x + quad[i].y;
        const double best = quad[start].x + quad[start].y;
        if (s < best || (s == best && quad[i].x < quad[start].x)) start = i;
    }
    std::rotate(quad.begin(), quad.begin() + start, quad.end());
    return quad;
}

double rect_iou(const Rect& a, const Rect& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;

BgPolygon to_polygon(const TextBox& box) {
    BgPolygon poly;
    for (const auto& p : box.quad()) bg::append(poly.outer(), BgPoint(p.x, p.y));
    bg::append(poly.outer(), BgPoint(box.quad()[0].x, box.quad()[0].y));
    bg::correct(poly);
    return poly;
}

double polygon_iou(const TextBox& a, const TextBox& b) {
    const BgPolygon pa = to_polygon(a);
    const BgPolygon pb = to_polygon(b);
    std::vector<BgPolygon> inter;
    bg::intersection(pa, pb, inter);
    double inter_area = 0.0;
    for (const auto& p : inter) inter_area += bg::area(p);
    const double uni = bg::area(pa) + bg::area(pb) - inter_area;
    return uni > 0.0 ? inter_area / uni : 0.0;
}

} // namespace

double box_iou(const TextBox& a, const TextBox& b, IouMode mode) {
    if (mode == IouMode::Polygon) return polygon_iou(a, b);
    return rect_iou(a.aabb(), b.aabb());
}

} // namespace darktext
