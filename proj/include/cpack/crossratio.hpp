#pragma once

// Edge matrices, partial products and the membership conditions of the cross
// ratio parameter space of a one-vertex triangulation.
//
// With x_1..x_m read clockwise around the vertex and
//   A(x) = [[0, 1], [-1, x]],   W_j = A(x_1) ... A(x_j) = [[a_j, b_j], [c_j, d_j]],
// a vector c is a member when
//   W_m = -I                                            (closing)
//   a_j, c_j < 0 and b_j, d_j > 0 for 1 <= j <= m-1,
//   except a_1 = d_{m-1} = 0                             (surrounds once)
// The non-strict variant relaxes the inequalities to <= / >=.

#include <array>
#include <optional>
#include <vector>

#include "cpack/ribbon.hpp"

namespace cpack {

inline constexpr double kDefaultZeroTol = 1e-9;

struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Mat2 operator*(const Mat2& r) const {
    return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c,
            c * r.b + d * r.d};
  }
  bool operator==(const Mat2&) const = default;
};

// A(x) = [[0, 1], [-1, x]]. Throws std::invalid_argument for non-finite x.
Mat2 edge_matrix(double x);

// One real value per edge, indexed by edge id.
class CrossRatioVector {
 public:
  CrossRatioVector() = default;
  explicit CrossRatioVector(std::vector<double> values)
      : values_(std::move(values)) {}

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int edge) const { return values_[edge]; }
  double& operator[](int edge) { return values_[edge]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const CrossRatioVector&) const = default;

 private:
  std::vector<double> values_;
};

struct PartialProducts {
  int start = 0;               // dart position read as x_1
  std::vector<double> x;       // x_1..x_m, stored 0-based
  std::vector<Mat2> W;         // W_1..W_m, stored 0-based: W[j-1] = W_j

  const Mat2& at(int j) const { return W[j - 1]; }  // 1-based access
  int size() const { return static_cast<int>(W.size()); }
};

// Throws std::invalid_argument if c does not cover every edge of rs, or if
// the order is orientation-flipped.
PartialProducts partial_products(const CornerOrder& order,
                                 const CrossRatioVector& c);
PartialProducts partial_products(const RotationSystem& rs,
                                 const CrossRatioVector& c, int start = 0);

// (a_m + 1, b_m, c_m); zero exactly when W_m = -I.
std::array<double, 3> vertex_residual(const RotationSystem& rs,
                                      const CrossRatioVector& c,
                                      int start = 0);
std::array<double, 3> vertex_residual(const PartialProducts& w);
double residual_norm(const std::array<double, 3>& r);

struct Violation {
  int j = 0;         // 1-based index of W_j
  char entry = 'a';  // one of a, b, c, d
  double value = 0.0;
};

struct ConditionReport {
  double residual_norm = 0.0;
  bool strict_ok = false;
  bool nonstrict_ok = false;
  std::optional<Violation> first_violation;
  // Smallest distance of a sign-constrained entry from zero (signed: negative
  // means that entry has the wrong sign).
  double min_margin = 0.0;
};

// Evaluates both sign conditions on given partial products. The report's
// first_violation refers to the strict condition when `strict` is set and to
// the non-strict one otherwise.
ConditionReport check_conditions(const PartialProducts& w, bool strict,
                                 double zero_tol = kDefaultZeroTol);

ConditionReport check_strict(const RotationSystem& rs,
                             const CrossRatioVector& c,
                             double zero_tol = kDefaultZeroTol, int start = 0);
ConditionReport check_nonstrict(const RotationSystem& rs,
                                const CrossRatioVector& c,
                                double zero_tol = kDefaultZeroTol,
                                int start = 0);

struct Membership {
  bool member = false;
  ConditionReport report;
};

// member iff |vertex_residual| <= tol and the strict condition holds.
Membership membership(const RotationSystem& rs, const CrossRatioVector& c,
                      double tol, double zero_tol = kDefaultZeroTol,
                      int start = 0);

// Constant vector 2 cos(pi / m).
CrossRatioVector symmetric_point(const RotationSystem& rs);

}  // namespace cpack
