#pragma once

// Moebius geometry on the Riemann sphere.
//
// Points are homogeneous pairs, so infinity needs no special case. Circles and
// lines ("clines") are Hermitian forms [[A, B], [conj(B), C]] whose zero set
// is {z : A|z|^2 + conj(B) z + B conj(z) + C = 0}.

#include <array>
#include <complex>
#include <iosfwd>
#include <string>

namespace cpack {

using Complex = std::complex<double>;

inline constexpr double kTangencyTolerance = 1e-9;
inline constexpr double kPslTolerance = 1e-8;

class SpherePoint {
 public:
  SpherePoint() : SpherePoint(0.0, 1.0) {}
  // Homogeneous coordinates (a : b); infinity is (1 : 0).
  SpherePoint(Complex a, Complex b);
  static SpherePoint FromComplex(Complex z) { return {z, 1.0}; }
  static SpherePoint Infinity() { return {1.0, 0.0}; }

  Complex a() const { return a_; }
  Complex b() const { return b_; }

  bool is_infinity(double tol = 1e-15) const { return std::abs(b_) <= tol; }
  // Affine coordinate; infinite components when the point is infinity.
  Complex to_complex() const;

 private:
  Complex a_;
  Complex b_;
};

// Chordal-type distance |a1 b2 - a2 b1| of unit representatives; 0 iff equal,
// at most 1.
double distance(const SpherePoint& p, const SpherePoint& q);

class MoebiusMap {
 public:
  // Identity.
  MoebiusMap() = default;
  // z -> (a z + b) / (c z + d), rescaled to determinant one.
  MoebiusMap(Complex a, Complex b, Complex c, Complex d);

  static MoebiusMap Identity() { return {}; }

  Complex a() const { return m_[0]; }
  Complex b() const { return m_[1]; }
  Complex c() const { return m_[2]; }
  Complex d() const { return m_[3]; }
  Complex trace() const { return m_[0] + m_[3]; }
  Complex det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  MoebiusMap inverse() const;
  MoebiusMap operator-() const;
  MoebiusMap operator*(const MoebiusMap& rhs) const;

  SpherePoint operator()(const SpherePoint& p) const;

  // Entrywise (SL2) Frobenius distance.
  double sl2_distance(const MoebiusMap& other) const;
  // min over the two lifts: min(|M - N|, |M + N|).
  double psl_distance(const MoebiusMap& other) const;

 private:
  std::array<Complex, 4> m_{Complex(1.0), Complex(0.0), Complex(0.0),
                            Complex(1.0)};
};

std::ostream& operator<<(std::ostream& out, const MoebiusMap& m);

class Cline {
 public:
  // Generic Hermitian form; rescaled so that det = A C - |B|^2 = -1 and A >= 0
  // (for lines A = 0 and the first nonzero of Re B, Im B is positive).
  // Throws std::invalid_argument unless det < 0.
  Cline(double A, Complex B, double C);
  Cline() : A_(0.0), B_(1.0), C_(0.0) {}  // the imaginary axis

  // For forms known to have determinant -1 up to round-off (images of
  // normalized clines); only the sign is fixed. Avoids renormalizing by a
  // determinant lost to cancellation for tiny circles.
  static Cline FromUnitForm(double A, Complex B, double C);
  static Cline Circle(Complex center, double radius);
  // {z : Re(conj(n) z) = offset} with n = normal / |normal|.
  static Cline Line(Complex normal, double offset);

  double A() const { return A_; }
  Complex B() const { return B_; }
  double C() const { return C_; }

  // A == 0 up to round-off relative to the other coefficients.
  bool is_line(double rel_tol = 1e-14) const;
  Complex center() const;  // circles only
  double radius() const;   // circles only
  Complex unit_normal() const;  // lines only
  double offset() const;        // lines only

  // Value of the Hermitian form on the unit representative of p; zero iff
  // p lies on the cline.
  double incidence(const SpherePoint& p) const;

 private:
  double A_;
  Complex B_;
  double C_;
};

// Hermitian-form distance between two clines viewed as point sets.
double distance(const Cline& k1, const Cline& k2);

// Inversive product of det-normalized forms: 1 for externally tangent
// circles, -1 for internally tangent, |.| < 1 for transversal intersection.
double inversive_product(const Cline& k1, const Cline& k2);

Cline apply(const MoebiusMap& m, const Cline& k);
inline SpherePoint apply(const MoebiusMap& m, const SpherePoint& p) {
  return m(p);
}

// Image of z1 under the map sending (z2, z3, z4) to (1, 0, infinity).
// Throws std::invalid_argument when z2, z3, z4 are not pairwise distinct.
// Yields a non-finite value when z1 == z4.
Complex cross_ratio(const SpherePoint& z1, const SpherePoint& z2,
                    const SpherePoint& z3, const SpherePoint& z4);

// The unique element of PSL2(C) sending src[k] to dst[k].
MoebiusMap mobius_from_three_points(const std::array<SpherePoint, 3>& src,
                                    const std::array<SpherePoint, 3>& dst);

// Common point of two tangent clines. Throws DegeneracyError naming the
// failure when the clines are disjoint or cross transversally.
SpherePoint tangency_point(const Cline& k1, const Cline& k2,
                           double tol = kTangencyTolerance);

// |tr M|, independent of the SL2 lift.
inline double trace_abs(const MoebiusMap& m) { return std::abs(m.trace()); }

// 17-significant-digit dump, one row per line.
std::string debug_string(const MoebiusMap& m);

}  // namespace cpack
