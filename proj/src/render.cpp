#include "cpack/render.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

namespace cpack {
namespace {

constexpr double kDedupQuantum = 1e-9;  // relative to the half width
constexpr double kLineReach = 1e6;      // parameter range before clipping

struct Box {
  double x0, y0, x1, y1;
};

// Liang-Barsky clip of p + t d, t in [-reach, reach], against the box.
std::optional<std::array<double, 4>> Clip(double px, double py, double dx,
                                          double dy, const Box& b,
                                          double reach) {
  double t0 = -reach, t1 = reach;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {px - b.x0, b.x1 - px, py - b.y0, b.y1 - py};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1) return std::nullopt;
  return std::array<double, 4>{px + t0 * dx, py + t0 * dy, px + t1 * dx,
                               py + t1 * dy};
}

// True when the circle's curve meets the box (not merely encloses it).
bool Meets(double cx, double cy, double r, const Box& b) {
  const double nx = std::clamp(cx, b.x0, b.x1) - cx;
  const double ny = std::clamp(cy, b.y0, b.y1) - cy;
  const double fx = std::max(std::abs(cx - b.x0), std::abs(cx - b.x1));
  const double fy = std::max(std::abs(cy - b.y0), std::abs(cy - b.y1));
  return std::hypot(nx, ny) <= r && r <= std::hypot(fx, fy);
}

}  // namespace

void validate(const Viewport& vp) {
  if (!(vp.half_width > 0.0) || !(vp.stroke > 0.0) || vp.px <= 0 ||
      !std::isfinite(vp.center.real()) || !std::isfinite(vp.center.imag())) {
    throw std::invalid_argument("Viewport: dimensions must be positive");
  }
}

std::string render_svg(const Dump& dump, const Viewport& vp) {
  validate(vp);
  const double hw = vp.half_width;
  const Box box{vp.center.real() - hw, vp.center.imag() - hw,
                vp.center.real() + hw, vp.center.imag() + hw};
  const double stroke = vp.stroke * 2.0 * hw / vp.px;
  const std::string px = std::to_string(vp.px);

  // World coordinates are used directly; the group flips the y axis.
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
      px + "\" height=\"" + px + "\" viewBox=\"" + format_number(box.x0) + " " +
      format_number(-box.y1) + " " + format_number(2.0 * hw) + " " +
      format_number(2.0 * hw) + "\">\n" +
      "<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" "
      "stroke-width=\"" +
      format_number(stroke) + "\">\n";

  std::set<std::tuple<bool, long long, long long, long long>> seen;
  const double q = kDedupQuantum * hw;
  for (const auto& t : dump.triangles) {
    for (int k = 0; k < 3; ++k) {
      const DumpCircle& c = t.circles[k];
      const auto key = std::make_tuple(c.is_line, std::llround(c.x / q),
                                       std::llround(c.y / q),
                                       std::llround(c.size / q));
      if (!seen.insert(key).second) continue;
      const std::string tag = " data-address=\"" + t.address +
                              "\" data-corner=\"" + std::to_string(k) + "\"";
      if (c.is_line) {
        // Points z with Re(conj(n) z) = offset: foot n * offset, direction i n.
        const auto seg = Clip(c.x * c.size, c.y * c.size, -c.y, c.x, box,
                              kLineReach * hw);
        if (!seg) continue;
        out += "<line class=\"line\"" + tag + " x1=\"" +
               format_number((*seg)[0]) + "\" y1=\"" +
               format_number((*seg)[1]) + "\" x2=\"" +
               format_number((*seg)[2]) + "\" y2=\"" +
               format_number((*seg)[3]) + "\"/>\n";
      } else {
        if (!Meets(c.x, c.y, c.size, box)) continue;
        out += "<circle class=\"circle\"" + tag + " cx=\"" +
               format_number(c.x) + "\" cy=\"" + format_number(c.y) +
               "\" r=\"" + format_number(c.size) + "\"/>\n";
      }
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string render_svg(const DevelopedComplex& dc, const Viewport& vp) {
  return render_svg(to_dump(dc), vp);
}

}  // namespace cpack
