#include "cpack/crossratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cpack {

Mat2 edge_matrix(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("edge_matrix: cross ratio must be finite");
  }
  return {0.0, 1.0, -1.0, x};
}

PartialProducts partial_products(const CornerOrder& order,
                                 const CrossRatioVector& c) {
  if (order.orientation_flipped) {
    throw std::invalid_argument(
        "partial_products: corner order read counterclockwise (orientation "
        "flip)");
  }
  PartialProducts w;
  w.start = order.start;
  const int m = static_cast<int>(order.edges.size());
  w.x.reserve(m);
  w.W.reserve(m);
  // Accumulated in extended precision: entries grow with the cross ratios,
  // and the closing residual a_m + 1 cancels against them.
  long double a = 1.0L, b = 0.0L, cc = 0.0L, d = 1.0L;
  for (int j = 0; j < m; ++j) {
    const int e = order.edges[j];
    if (e < 0 || e >= c.size()) {
      throw std::invalid_argument("partial_products: no value for edge " +
                                  std::to_string(e));
    }
    const double x = c[e];
    edge_matrix(x);  // validates x
    w.x.push_back(x);
    // [[a, b], [c, d]] * [[0, 1], [-1, x]]
    const long double na = -b, nb = a + b * x, nc = -d, nd = cc + d * x;
    a = na;
    b = nb;
    cc = nc;
    d = nd;
    w.W.push_back({static_cast<double>(a), static_cast<double>(b),
                   static_cast<double>(cc), static_cast<double>(d)});
  }
  return w;
}

PartialProducts partial_products(const RotationSystem& rs,
                                 const CrossRatioVector& c, int start) {
  if (c.size() != rs.num_edges()) {
    throw std::invalid_argument("partial_products: vector has " +
                                std::to_string(c.size()) + " values for " +
                                std::to_string(rs.num_edges()) + " edges");
  }
  return partial_products(corner_order(rs, start), c);
}

std::array<double, 3> vertex_residual(const PartialProducts& w) {
  const Mat2& last = w.W.back();
  return {last.a + 1.0, last.b, last.c};
}

std::array<double, 3> vertex_residual(const RotationSystem& rs,
                                      const CrossRatioVector& c, int start) {
  return vertex_residual(partial_products(rs, c, start));
}

double residual_norm(const std::array<double, 3>& r) {
  return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
}

ConditionReport check_conditions(const PartialProducts& w, bool strict,
                                 double zero_tol) {
  ConditionReport report;
  report.residual_norm = residual_norm(vertex_residual(w));
  const int m = w.size();
  bool strict_ok = true;
  bool nonstrict_ok = true;
  std::optional<Violation> first_strict, first_nonstrict;
  double margin = std::numeric_limits<double>::infinity();

  auto record = [](std::optional<Violation>& slot, int j, char entry,
                   double value) {
    if (!slot) slot = Violation{j, entry, value};
  };
  // sign = -1 for entries that must be negative, +1 for positive ones.
  auto sign_entry = [&](int j, char entry, double value, double sign) {
    const double v = sign * value;
    margin = std::min(margin, v);
    if (!(v > zero_tol)) {
      strict_ok = false;
      record(first_strict, j, entry, value);
    }
    if (!(v >= -zero_tol)) {
      nonstrict_ok = false;
      record(first_nonstrict, j, entry, value);
    }
  };
  auto zero_entry = [&](int j, char entry, double value) {
    if (!(std::abs(value) <= zero_tol)) {
      strict_ok = false;
      nonstrict_ok = false;
      record(first_strict, j, entry, value);
      record(first_nonstrict, j, entry, value);
    }
  };

  for (int j = 1; j <= m - 1; ++j) {
    const Mat2& wj = w.at(j);
    if (j == 1) {
      zero_entry(j, 'a', wj.a);
    } else {
      sign_entry(j, 'a', wj.a, -1.0);
    }
    sign_entry(j, 'b', wj.b, 1.0);
    sign_entry(j, 'c', wj.c, -1.0);
    if (j == m - 1) {
      zero_entry(j, 'd', wj.d);
    } else {
      sign_entry(j, 'd', wj.d, 1.0);
    }
  }
  report.strict_ok = strict_ok;
  report.nonstrict_ok = nonstrict_ok;
  report.first_violation = strict ? first_strict : first_nonstrict;
  report.min_margin = margin;
  return report;
}

ConditionReport check_strict(const RotationSystem& rs,
                             const CrossRatioVector& c, double zero_tol,
                             int start) {
  return check_conditions(partial_products(rs, c, start), true, zero_tol);
}

ConditionReport check_nonstrict(const RotationSystem& rs,
                                const CrossRatioVector& c, double zero_tol,
                                int start) {
  return check_conditions(partial_products(rs, c, start), false, zero_tol);
}

Membership membership(const RotationSystem& rs, const CrossRatioVector& c,
                      double tol, double zero_tol, int start) {
  if (!(tol > 0.0)) throw std::invalid_argument("membership: tol must be > 0");
  Membership result;
  result.report = check_strict(rs, c, zero_tol, start);
  result.member = result.report.residual_norm <= tol && result.report.strict_ok;
  return result;
}

CrossRatioVector symmetric_point(const RotationSystem& rs) {
  const double x = 2.0 * std::cos(std::numbers::pi / rs.valence());
  return CrossRatioVector(std::vector<double>(rs.num_edges(), x));
}

}  // namespace cpack
