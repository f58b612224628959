#include "cpack/moebius.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "cpack/error.hpp"

namespace cpack {
namespace {

// Tolerance below which two unit homogeneous points count as equal.
constexpr double kCoincidence = 1e-14;

Complex Det(const SpherePoint& u, const SpherePoint& w) {
  return u.a() * w.b() - u.b() * w.a();
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Num(Complex z) {
  return "(" + Num(z.real()) + " " + Num(z.imag()) + ")";
}

// Normalizes (p1, p2, p3) to (0, 1, infinity).
MoebiusMap Normalizer(const std::array<SpherePoint, 3>& p) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(Det(p[i], p[(i + 1) % 3])) <= kCoincidence) {
      throw DegeneracyError("three-point map: points " + std::to_string(i) +
                            " and " + std::to_string((i + 1) % 3) +
                            " coincide");
    }
  }
  const Complex s = Det(p[1], p[2]);
  const Complex t = Det(p[1], p[0]);
  return MoebiusMap(s * p[0].b(), -s * p[0].a(), t * p[2].b(), -t * p[2].a());
}

}  // namespace

SpherePoint::SpherePoint(Complex a, Complex b) {
  const double norm = std::hypot(std::abs(a), std::abs(b));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("SpherePoint: coordinates must be finite and "
                                "not both zero");
  }
  a /= norm;
  b /= norm;
  // Fix the phase: the larger component becomes real and positive.
  const Complex lead = std::abs(a) >= std::abs(b) ? a : b;
  const Complex phase = std::conj(lead) / std::abs(lead);
  a_ = a * phase;
  b_ = b * phase;
}

Complex SpherePoint::to_complex() const {
  if (b_ == Complex(0.0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return a_ / b_;
}

double distance(const SpherePoint& p, const SpherePoint& q) {
  return std::abs(Det(p, q));
}

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d) {
  const Complex det = a * d - b * c;
  if (!(std::abs(det) > 0.0) || !std::isfinite(std::abs(det))) {
    throw std::invalid_argument("MoebiusMap: singular or non-finite matrix");
  }
  const Complex s = std::sqrt(det);
  m_ = {a / s, b / s, c / s, d / s};
}

MoebiusMap MoebiusMap::inverse() const {
  MoebiusMap r;
  r.m_ = {m_[3], -m_[1], -m_[2], m_[0]};
  return r;
}

MoebiusMap MoebiusMap::operator-() const {
  MoebiusMap r;
  r.m_ = {-m_[0], -m_[1], -m_[2], -m_[3]};
  return r;
}

MoebiusMap MoebiusMap::operator*(const MoebiusMap& rhs) const {
  const auto& l = m_;
  const auto& r = rhs.m_;
  // The product has determinant one up to round-off; rescaling by the
  // principal square root keeps the SL2 lift.
  return MoebiusMap(l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3],
                    l[2] * r[0] + l[3] * r[2], l[2] * r[1] + l[3] * r[3]);
}

SpherePoint MoebiusMap::operator()(const SpherePoint& p) const {
  return {m_[0] * p.a() + m_[1] * p.b(), m_[2] * p.a() + m_[3] * p.b()};
}

double MoebiusMap::sl2_distance(const MoebiusMap& other) const {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += std::norm(m_[i] - other.m_[i]);
  return std::sqrt(sum);
}

double MoebiusMap::psl_distance(const MoebiusMap& other) const {
  return std::min(sl2_distance(other), sl2_distance(-other));
}

std::ostream& operator<<(std::ostream& out, const MoebiusMap& m) {
  return out << debug_string(m);
}

std::string debug_string(const MoebiusMap& m) {
  return "[[" + Num(m.a()) + ", " + Num(m.b()) + "], [" + Num(m.c()) + ", " +
         Num(m.d()) + "]]";
}

Cline::Cline(double A, Complex B, double C) {
  const double det = A * C - std::norm(B);
  if (!(det < 0.0) || !std::isfinite(det)) {
    throw std::invalid_argument("Cline: Hermitian form must have negative "
                                "determinant");
  }
  const double scale = 1.0 / std::sqrt(-det);
  *this = FromUnitForm(A * scale, B * scale, C * scale);
}

Cline Cline::FromUnitForm(double A, Complex B, double C) {
  if (!std::isfinite(A) || !std::isfinite(B.real()) ||
      !std::isfinite(B.imag()) || !std::isfinite(C)) {
    throw std::invalid_argument("Cline: non-finite coefficients");
  }
  bool flip = A < 0.0;
  if (A == 0.0) {
    flip = B.real() < 0.0 || (B.real() == 0.0 && B.imag() < 0.0);
  }
  if (flip) {
    A = -A;
    B = -B;
    C = -C;
  }
  Cline k;
  k.A_ = A;
  k.B_ = B;
  k.C_ = C;
  return k;
}

Cline Cline::Circle(Complex center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("Cline: radius must be > 0");
  return Cline(1.0, -center, std::norm(center) - radius * radius);
}

Cline Cline::Line(Complex normal, double offset) {
  const double length = std::abs(normal);
  if (!(length > 0.0)) throw std::invalid_argument("Cline: zero line normal");
  return Cline(0.0, normal / length, -2.0 * offset);
}

bool Cline::is_line(double rel_tol) const {
  const double scale = std::max({1.0, std::abs(B_), std::abs(C_)});
  return std::abs(A_) <= rel_tol * scale;
}

Complex Cline::center() const { return -B_ / A_; }

// With det = -1, radius^2 = (|B|^2 - A C) / A^2 = 1 / A^2.
double Cline::radius() const { return 1.0 / A_; }

Complex Cline::unit_normal() const { return B_ / std::abs(B_); }

double Cline::offset() const { return -C_ / (2.0 * std::abs(B_)); }

double Cline::incidence(const SpherePoint& p) const {
  const Complex a = p.a();
  const Complex b = p.b();
  return A_ * std::norm(a) + 2.0 * (B_ * std::conj(a) * b).real() +
         C_ * std::norm(b);
}

double distance(const Cline& k1, const Cline& k2) {
  auto dist = [&](double sign) {
    return std::sqrt(std::pow(k1.A() - sign * k2.A(), 2) +
                     2.0 * std::norm(k1.B() - sign * k2.B()) +
                     std::pow(k1.C() - sign * k2.C(), 2));
  };
  return std::min(dist(1.0), dist(-1.0));
}

double inversive_product(const Cline& k1, const Cline& k2) {
  return 0.5 * (k1.A() * k2.C() + k2.A() * k1.C()) -
         (k1.B() * std::conj(k2.B())).real();
}

Cline apply(const MoebiusMap& m, const Cline& k) {
  // K' = N^H K N with N = M^{-1}.
  const MoebiusMap n = m.inverse();
  const Complex n00 = n.a(), n01 = n.b(), n10 = n.c(), n11 = n.d();
  const Complex k00 = k.A(), k01 = k.B(), k10 = std::conj(k.B()), k11 = k.C();
  // T = K N
  const Complex t00 = k00 * n00 + k01 * n10;
  const Complex t01 = k00 * n01 + k01 * n11;
  const Complex t10 = k10 * n00 + k11 * n10;
  const Complex t11 = k10 * n01 + k11 * n11;
  // N^H T
  const Complex r00 = std::conj(n00) * t00 + std::conj(n10) * t10;
  const Complex r01 = std::conj(n00) * t01 + std::conj(n10) * t11;
  const Complex r11 = std::conj(n01) * t01 + std::conj(n11) * t11;
  return Cline::FromUnitForm(r00.real(), r01, r11.real());
}

Complex cross_ratio(const SpherePoint& z1, const SpherePoint& z2,
                    const SpherePoint& z3, const SpherePoint& z4) {
  const Complex d23 = Det(z2, z3);
  const Complex d24 = Det(z2, z4);
  const Complex d34 = Det(z3, z4);
  if (std::abs(d23) <= kCoincidence || std::abs(d24) <= kCoincidence ||
      std::abs(d34) <= kCoincidence) {
    throw std::invalid_argument("cross_ratio: z2, z3, z4 must be distinct");
  }
  return (Det(z1, z3) * d24) / (Det(z1, z4) * d23);
}

MoebiusMap mobius_from_three_points(const std::array<SpherePoint, 3>& src,
                                    const std::array<SpherePoint, 3>& dst) {
  return Normalizer(dst).inverse() * Normalizer(src);
}

SpherePoint tangency_point(const Cline& k1, const Cline& k2, double tol) {
  if (distance(k1, k2) <= tol) {
    throw DegeneracyError("tangency_point: clines coincide");
  }
  const double ip = inversive_product(k1, k2);
  if (std::abs(ip) < 1.0 - tol) {
    throw DegeneracyError("tangency_point: clines intersect transversally "
                          "(inversive product " + Num(ip) + ")");
  }
  if (std::abs(ip) > 1.0 + tol) {
    throw DegeneracyError("tangency_point: clines are disjoint "
                          "(inversive product " + Num(ip) + ")");
  }
  // K1 + ip K2 is the degenerate member of the pencil: a point-circle whose
  // kernel is the tangency point.
  const double a = k1.A() + ip * k2.A();
  const Complex b = k1.B() + ip * k2.B();
  const double c = k1.C() + ip * k2.C();
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), std::abs(b));
  const double lambda =
      std::abs(mean - rad) <= std::abs(mean + rad) ? mean - rad : mean + rad;
  const Complex u0 = b, u1 = lambda - a;
  const Complex v0 = lambda - c, v1 = std::conj(b);
  if (std::norm(u0) + std::norm(u1) >= std::norm(v0) + std::norm(v1)) {
    return {u0, u1};
  }
  return {v0, v1};
}

}  // namespace cpack
