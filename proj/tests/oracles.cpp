#include "oracles.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace oracle {

std::string octagon_rotation() {
  // Side k runs from polygon corner k to k + 1; sign +1 puts the edge's
  // first end at corner k.
  const std::vector<std::pair<std::string, int>> labels = {
      {"a", 1}, {"b", 1}, {"a", -1}, {"b", -1},
      {"c", 1}, {"d", 1}, {"c", -1}, {"d", -1}};
  using D = std::pair<std::string, int>;  // (edge, 0 first end / 1 second end)
  auto side_dart = [&](int k, int corner) -> D {
    const auto& [name, sign] = labels[k];
    const bool at_start = corner == k;
    return {name, at_start == (sign == 1) ? 0 : 1};
  };
  auto edge_dart = [&](int u, int v, int at) -> D {
    const int a = std::min(u, v), b = std::max(u, v);
    if (b - a == 1) return side_dart(a, at);
    if (a == 0 && b == 7) return side_dart(7, at);
    return {"e" + std::to_string(b), at == 0 ? 0 : 1};
  };
  std::map<D, D> next;
  for (int j = 1; j <= 6; ++j) {
    const int tri[3] = {0, j, j + 1};
    for (int r = 0; r < 3; ++r) {
      const int p = tri[r], q = tri[(r + 1) % 3], s = tri[(r + 2) % 3];
      next[edge_dart(p, s, p)] = edge_dart(p, q, p);
    }
  }
  const D start{"a", 0};
  std::string out = "rotation:";
  D d = start;
  do {
    out += " " + d.first + (d.second ? "'" : "");
    d = next.at(d);
  } while (d != start);
  return out;
}

std::vector<std::string> tokens_of(const std::string& rotation_line) {
  std::istringstream in(rotation_line.substr(rotation_line.find(':') + 1));
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::vector<std::vector<int>> face_cycles(const std::vector<std::string>& tokens) {
  const int m = static_cast<int>(tokens.size());
  auto other = [&](int p) {
    const std::string& t = tokens[p];
    const std::string want =
        t.back() == '\'' ? t.substr(0, t.size() - 1) : t + "'";
    for (int q = 0; q < m; ++q) {
      if (tokens[q] == want) return q;
    }
    return -1;
  };
  std::vector<bool> seen(m, false);
  std::vector<std::vector<int>> out;
  for (int p = 0; p < m; ++p) {
    if (seen[p]) continue;
    std::vector<int> cycle;
    for (int q = p; !seen[q]; q = (other(q) + 1) % m) {
      seen[q] = true;
      cycle.push_back(q);
    }
    out.push_back(cycle);
  }
  return out;
}

double chebyshev_u(int n, double y) {
  if (n < 0) return n == -1 ? 0.0 : -chebyshev_u(-n - 2, y);
  if (std::abs(y) < 1.0) {
    const double t = std::acos(y);
    return std::sin((n + 1) * t) / std::sin(t);
  }
  if (y == 1.0) return n + 1.0;
  const double t = std::acosh(y);
  return std::sinh((n + 1) * t) / std::sinh(t);
}

Mat naive_product(const std::vector<double>& xs) {
  Mat w{1, 0, 0, 1};
  for (double x : xs) {
    const Mat a{0, 1, -1, x};
    w = {w[0] * a[0] + w[1] * a[2], w[0] * a[1] + w[1] * a[3],
         w[2] * a[0] + w[3] * a[2], w[2] * a[1] + w[3] * a[3]};
  }
  return w;
}

Cx cross_ratio_affine(Cx z1, Cx z2, Cx z3, Cx z4) {
  return (z1 - z3) * (z2 - z4) / ((z1 - z4) * (z2 - z3));
}

Disk circle_through(Cx z1, Cx z2, Cx z3) {
  // Perpendicular bisector intersection.
  const Cx w = (z3 - z1) / (z2 - z1);
  const Cx c = (z2 - z1) * (w - std::norm(w)) / (w - std::conj(w)) + z1;
  return {c, std::abs(c - z1)};
}

Cx mobius(const CMat& m, Cx z) { return (m[0] * z + m[1]) / (m[2] * z + m[3]); }

CMat mul(const CMat& a, const CMat& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Disk image_circle(const CMat& m, Disk d) {
  const Cx i(0.0, 1.0);
  return circle_through(mobius(m, d.center + d.radius),
                        mobius(m, d.center + i * d.radius),
                        mobius(m, d.center - d.radius));
}

double shrinking_radius(double x) {
  return 1.0 / (std::numbers::sqrt2 * (x + 1.0) * (x + 1.0));
}

}  // namespace oracle
