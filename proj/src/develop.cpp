#include "cpack/develop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cpack/error.hpp"

namespace cpack {
namespace {

constexpr double kContactSeparation = 1e-12;
const Complex kI(0.0, 1.0);

int Mod3(int k) { return ((k % 3) + 3) % 3; }

void RequireMembership(const RotationSystem& rs, const CrossRatioVector& c,
                       std::optional<double> tol, const char* who) {
  if (!tol) return;
  const Membership mem = membership(rs, c, *tol);
  if (!mem.member) {
    std::string why = "residual " + std::to_string(mem.report.residual_norm);
    if (mem.report.first_violation) {
      const Violation& v = *mem.report.first_violation;
      why += ", sign violation at " + std::string(1, v.entry) + "_" +
             std::to_string(v.j);
    }
    throw Error(ErrorKind::kMembership,
                std::string(who) + ": vector is not a member (" + why + ")");
  }
}

// Frame of the vertex at `corner`: maps the corner picture
// (center = R, next = circle(i/2, 1/2), previous = {Im z = 1}) onto t.
MoebiusMap CornerFrame(const RealizedTriangle& t, int corner) {
  const auto& p = t.contacts;
  return mobius_from_three_points(
      {SpherePoint::FromComplex(0.0), SpherePoint::FromComplex(kI),
       SpherePoint::Infinity()},
      {p[Mod3(corner + 2)], p[Mod3(corner)], p[Mod3(corner + 1)]});
}

}  // namespace

RealizedTriangle make_triangle(int face, const std::array<Cline, 3>& circles) {
  return RealizedTriangle{
      face, circles,
      {tangency_point(circles[1], circles[2]),
       tangency_point(circles[2], circles[0]),
       tangency_point(circles[0], circles[1])}};
}

RealizedTriangle apply(const MoebiusMap& m, const RealizedTriangle& t) {
  return RealizedTriangle{
      t.face,
      {apply(m, t.circles[0]), apply(m, t.circles[1]), apply(m, t.circles[2])},
      {m(t.contacts[0]), m(t.contacts[1]), m(t.contacts[2])}};
}

MoebiusMap normalizing_map(const RealizedTriangle& t) {
  return mobius_from_three_points(
      t.contacts, {SpherePoint::FromComplex(1.0), SpherePoint::FromComplex(0.0),
                   SpherePoint::Infinity()});
}

EdgeConfiguration standard_edge_configuration(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("standard_edge_configuration: x must be > 0 "
                                "(degenerate rectangle)");
  }
  return EdgeConfiguration{
      Cline::Line(1.0, 0.0),
      Cline::Circle({0.5, 0.0}, 0.5),
      Cline::Line(1.0, 1.0),
      Cline::Circle({0.5, x}, 0.5),
      SpherePoint::FromComplex(0.0),
      SpherePoint::FromComplex(1.0),
      SpherePoint::Infinity(),
      SpherePoint::FromComplex({0.0, x}),
      SpherePoint::FromComplex({1.0, x})};
}

double configuration_cross_ratio(const SpherePoint& p14, const SpherePoint& p23,
                                 const SpherePoint& p12,
                                 const SpherePoint& p13) {
  return cross_ratio(p14, p23, p12, p13).imag();
}

RealizedTriangle cross_edge(const RealizedTriangle& t, int side, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("cross_edge: cross ratio must be > 0, got " +
                                std::to_string(x));
  }
  for (int k = 0; k < 3; ++k) {
    if (distance(t.contacts[k], t.contacts[Mod3(k + 1)]) <= kContactSeparation) {
      throw DegeneracyError("cross_edge: coincident tangency points");
    }
  }
  const int k = Mod3(side);
  const SpherePoint& p12 = t.contacts[Mod3(k + 1)];
  const SpherePoint& p23 = t.contacts[k];
  const SpherePoint& p13 = t.contacts[Mod3(k + 2)];
  const MoebiusMap to_standard = mobius_from_three_points(
      {p12, p23, p13}, {SpherePoint::FromComplex(0.0),
                        SpherePoint::FromComplex(1.0), SpherePoint::Infinity()});
  const MoebiusMap back = to_standard.inverse();
  const Cline c4 = apply(back, Cline::Circle({0.5, x}, 0.5));
  const SpherePoint p14 = back(SpherePoint::FromComplex({0.0, x}));
  const SpherePoint p34 = back(SpherePoint::FromComplex({1.0, x}));
  return RealizedTriangle{
      -1, {t.circles[Mod3(k + 1)], t.circles[k], c4}, {p14, p34, p13}};
}

double recover_cross_ratio(const RealizedTriangle& t, int side,
                           const RealizedTriangle& neighbor) {
  const int k = Mod3(side);
  const Cline& c1 = t.circles[k];
  const Cline& c3 = t.circles[Mod3(k + 1)];
  const Cline& c2 = t.circles[Mod3(k + 2)];
  int far = 0;
  double best = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double d = std::min(distance(neighbor.circles[i], c1),
                              distance(neighbor.circles[i], c3));
    if (d > best) {
      best = d;
      far = i;
    }
  }
  const Cline& c4 = neighbor.circles[far];
  return configuration_cross_ratio(tangency_point(c1, c4),
                                   tangency_point(c2, c3),
                                   tangency_point(c1, c2),
                                   tangency_point(c1, c3));
}

Developer::Developer(const RotationSystem& rs, const CrossRatioVector& c)
    : rs_(&rs), c_(&c), trace_(faces(rs)) {
  if (c.size() != rs.num_edges()) {
    throw std::invalid_argument("Developer: vector size does not match graph");
  }
}

RealizedTriangle Developer::base(const MoebiusMap& frame) const {
  RealizedTriangle t{
      0,
      {Cline::Line(1.0, 0.0), Cline::Line(1.0, 1.0),
       Cline::Circle({0.5, 0.0}, 0.5)},
      {SpherePoint::FromComplex(1.0), SpherePoint::FromComplex(0.0),
       SpherePoint::Infinity()}};
  return apply(frame, t);
}

Developer::Step Developer::cross(const RealizedTriangle& t, int side) const {
  const int k = Mod3(side);
  const int dart = trace_.faces[t.face].darts[k];
  const auto next = trace_.corners[rs_->successor(dart)];
  const RealizedTriangle r = cross_edge(t, k, (*c_)[rs_->edge_at(dart)]);
  Step step;
  step.triangle.face = next.face;
  step.entered_side = Mod3(next.corner - 1);
  for (int i = 0; i < 3; ++i) {
    step.triangle.circles[Mod3(step.entered_side + i)] = r.circles[i];
    step.triangle.contacts[Mod3(step.entered_side + i)] = r.contacts[i];
  }
  return step;
}

RealizedTriangle Developer::follow(const RealizedTriangle& start,
                                   const std::vector<int>& word) const {
  RealizedTriangle t = start;
  for (int side : word) t = cross(t, side).triangle;
  return t;
}

int Developer::corner_with_dart(const RealizedTriangle& t, int dart) const {
  const auto& darts = trace_.faces[t.face].darts;
  for (int k = 0; k < 3; ++k) {
    if (darts[k] == rs_->Wrap(dart)) return k;
  }
  throw std::logic_error("corner_with_dart: dart not in face");
}

std::pair<RealizedTriangle, int> Developer::rotate(const RealizedTriangle& t,
                                                   int corner,
                                                   bool forward) const {
  // Crossing side s maps corner s to the neighbour's corner `entered + 1`
  // and corner s + 1 to `entered`.
  if (forward) {
    Step step = cross(t, corner);
    return {std::move(step.triangle), Mod3(step.entered_side + 1)};
  }
  Step step = cross(t, Mod3(corner - 1));
  return {std::move(step.triangle), step.entered_side};
}

std::vector<std::pair<RealizedTriangle, int>> Developer::star(
    const RealizedTriangle& t, int corner) const {
  std::vector<std::pair<RealizedTriangle, int>> out;
  out.reserve(rs_->valence());
  out.emplace_back(t, corner);
  for (int i = 1; i < rs_->valence(); ++i) {
    out.push_back(rotate(out.back().first, out.back().second, true));
  }
  return out;
}

const DevelopedTriangle* DevelopedComplex::find(
    const std::string& address) const {
  auto it = index.find(address);
  return it == index.end() ? nullptr : &triangles[it->second];
}

DevelopedComplex develop(const RotationSystem& rs, const CrossRatioVector& c,
                         const DevelopOptions& options) {
  if (options.radius < 0) {
    throw std::invalid_argument("develop: radius must be >= 0");
  }
  if (options.radius > kDefaultMaxRadius && !options.allow_deep) {
    throw std::invalid_argument(
        "develop: radius " + std::to_string(options.radius) + " exceeds " +
        std::to_string(kDefaultMaxRadius) +
        "; deeper development needs the allow_deep flag");
  }
  RequireMembership(rs, c, options.membership_tol, "develop");

  const Developer dev(rs, c);
  DevelopedComplex dc;
  dc.radius = options.radius;
  dc.triangles.push_back({"@", dev.base(options.base_frame), -1, -1});

  std::size_t level_begin = 0;
  for (int level = 0; level < options.radius; ++level) {
    const std::size_t level_end = dc.triangles.size();
    struct Task {
      int parent;
      int side;
    };
    std::vector<Task> tasks;
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int side = 0; side < 3; ++side) {
        if (side != dc.triangles[i].entered_side) {
          tasks.push_back({static_cast<int>(i), side});
        }
      }
    }
    std::vector<std::optional<Developer::Step>> results(tasks.size());
    std::vector<std::string> failures(tasks.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t t = begin; t < tasks.size(); t += stride) {
        try {
          results[t] = dev.cross(dc.triangles[tasks[t].parent].triangle,
                                 tasks[t].side);
        } catch (const std::exception& e) {
          failures[t] = e.what();
        }
      }
    };
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
      for (auto& th : pool) th.join();
    }
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const std::string address = dc.triangles[tasks[t].parent].address +
                                  static_cast<char>('0' + tasks[t].side);
      if (!results[t]) {
        throw DegeneracyError("develop: failed at address " + address + ": " +
                              failures[t]);
      }
      dc.triangles.push_back({address, std::move(results[t]->triangle),
                              tasks[t].parent, results[t]->entered_side});
    }
    level_begin = level_end;
  }
  for (std::size_t i = 0; i < dc.triangles.size(); ++i) {
    dc.index.emplace(dc.triangles[i].address, static_cast<int>(i));
  }
  return dc;
}

VertexChain vertex_chain(const RotationSystem& rs, const CrossRatioVector& c,
                         int start) {
  const Developer dev(rs, c);
  const int m = rs.valence();
  const int k = dev.trace().corners[rs.Wrap(start)].corner;
  RealizedTriangle t;
  t.circles[k] = Cline::Line(1.0, 0.0);
  t.circles[Mod3(k + 1)] = Cline::Line(1.0, 1.0);
  t.circles[Mod3(k + 2)] = Cline::Circle({0.5, 0.0}, 0.5);
  t.contacts[k] = SpherePoint::FromComplex(1.0);
  t.contacts[Mod3(k + 1)] = SpherePoint::FromComplex(0.0);
  t.contacts[Mod3(k + 2)] = SpherePoint::Infinity();

  // The frame of the corner between darts start + j - 1 and start + j is
  // G_0 W_j, so the chain is the orbit of the corner picture under the
  // partial products. This stays well defined when a non-member chain
  // spirals into a point and the triangles degenerate numerically.
  const MoebiusMap g0 = CornerFrame(t, k);
  const Cline next_circle = Cline::Circle({0.0, 0.5}, 0.5);
  const Cline previous_line = Cline::Line(Complex(0.0, 1.0), 1.0);
  const PartialProducts w = partial_products(rs, c, start);
  VertexChain out{t.circles[k], {}, t.circles[Mod3(k + 1)], 0.0};
  out.chain.push_back(t.circles[Mod3(k + 1)]);
  MoebiusMap g = g0;
  for (int j = 1; j <= m; ++j) {
    const Mat2& wj = w.at(j);
    g = g0 * MoebiusMap(wj.a, wj.b, wj.c, wj.d);
    if (j < m) out.chain.push_back(apply(g, next_circle));
  }
  out.next = apply(g, next_circle);
  out.closing_error =
      std::max(distance(out.next, out.chain.front()),
               distance(apply(g, previous_line), apply(g0, previous_line)));
  return out;
}

MoebiusMap dart_holonomy(const HolonomyRep& rep, const RotationSystem& rs,
                         int dart) {
  const Dart& d = rs.dart(dart);
  const MoebiusMap& g = rep.generators[d.edge];
  return d.end == End::kFirst ? g : g.inverse();
}

namespace {

// A face-labelled triangle stored as the map taking the standard triangle
// (the base circles, labelled with `face`) onto it, plus a marked corner.
// Composing per-step maps computed in standard position keeps the entries
// well scaled where developed circles become tiny.
struct FramedCorner {
  MoebiusMap frame;
  int face = 0;
  int corner = 0;
};

FramedCorner Rotate(const Developer& dev, const FramedCorner& at,
                    bool forward) {
  RealizedTriangle standard = dev.base();
  standard.face = at.face;
  const auto [next, corner] = dev.rotate(standard, at.corner, forward);
  return {at.frame * normalizing_map(next).inverse(), next.face, corner};
}

MoebiusMap CornerFrame(const Developer& dev, const FramedCorner& at) {
  RealizedTriangle standard = dev.base();
  standard.face = at.face;
  return at.frame * CornerFrame(standard, at.corner);
}

}  // namespace

HolonomyRep holonomy(const RotationSystem& rs, const CrossRatioVector& c,
                     const HolonomyOptions& options) {
  RequireMembership(rs, c, options.membership_tol, "holonomy");
  const Developer dev(rs, c);
  const int m = rs.valence();
  const int j0 = dev.trace().faces[0].darts[0];
  std::vector<FramedCorner> star0{{options.base_frame, 0, 0}};
  for (int t = 1; t < m; ++t) star0.push_back(Rotate(dev, star0.back(), true));

  HolonomyRep rep;
  rep.base_frame = options.base_frame;
  rep.base_dart = j0;
  rep.edge_names = rs.edge_names();
  rep.generators.resize(rs.num_edges());
  const MoebiusMap base_inverse = options.base_frame.inverse();

  for (int e = 0; e < rs.num_edges(); ++e) {
    const int p1 = rs.positions_of(e)[0];
    // Star triangle between darts p1 - 1 and p1; its corner after the base
    // vertex is the far end of the edge, where it sits between darts
    // alpha(p1) and alpha(p1) + 1.
    FramedCorner at = star0[rs.Wrap(p1 - j0)];
    at.corner = Mod3(at.corner + 1);
    const int from = rs.successor(rs.opposite(p1));
    const int ahead = rs.Wrap(j0 - from);
    const bool forward = ahead <= m - ahead;
    const int steps = forward ? ahead : m - ahead;
    for (int s = 0; s < steps; ++s) at = Rotate(dev, at, forward);
    if (at.face != 0 || at.corner != 0) {
      throw std::logic_error("holonomy: walk did not reach a lift of face 0");
    }
    rep.generators[e] = at.frame * base_inverse;
  }

  // Transport around the base vertex, each step lifted like [[0,1],[-1,x]].
  MoebiusMap transport;
  MoebiusMap frame = CornerFrame(dev, star0[0]);
  for (int t = 0; t < m; ++t) {
    const FramedCorner next =
        t + 1 < m ? star0[t + 1] : Rotate(dev, star0[t], true);
    const MoebiusMap next_frame = CornerFrame(dev, next);
    MoebiusMap step = frame.inverse() * next_frame;
    if (step.c().real() > 0.0) step = -step;
    transport = transport * step;
    frame = next_frame;
  }
  rep.vertex_transport = transport;
  return rep;
}

std::vector<double> face_relation_residuals(const HolonomyRep& rep,
                                            const RotationSystem& rs) {
  std::vector<double> out;
  for (const auto& face : faces(rs).faces) {
    const MoebiusMap product = dart_holonomy(rep, rs, face.darts[0]) *
                               dart_holonomy(rep, rs, face.darts[1]) *
                               dart_holonomy(rep, rs, face.darts[2]);
    out.push_back(product.psl_distance(MoebiusMap::Identity()));
  }
  return out;
}

HolonomyRep conjugate(const HolonomyRep& rep, const MoebiusMap& m) {
  HolonomyRep out = rep;
  const MoebiusMap inv = m.inverse();
  for (auto& g : out.generators) g = m * g * inv;
  out.base_frame = m * rep.base_frame;
  return out;
}

TraceProbe trace_probe(const HolonomyRep& rep) {
  const int n = static_cast<int>(rep.generators.size());
  std::vector<MoebiusMap> letters;
  std::vector<std::string> names;
  for (int e = 0; e < n; ++e) {
    const std::string name =
        e < static_cast<int>(rep.edge_names.size()) ? rep.edge_names[e]
                                                    : "g" + std::to_string(e);
    letters.push_back(rep.generators[e]);
    names.push_back(name);
    letters.push_back(rep.generators[e].inverse());
    names.push_back(name + "^-1");
  }
  TraceProbe best;
  best.value = -1.0;
  auto consider = [&](double value, const std::string& word) {
    if (value > best.value) {
      best.value = value;
      best.word = word;
    }
  };
  for (std::size_t i = 0; i < letters.size(); ++i) {
    consider(trace_abs(letters[i]), names[i]);
  }
  for (std::size_t i = 0; i < letters.size(); ++i) {
    for (std::size_t j = 0; j < letters.size(); ++j) {
      consider(trace_abs(letters[i] * letters[j]), names[i] + " " + names[j]);
    }
  }
  return best;
}

double shrinking_circle_readback(const RotationSystem& rs,
                                 const CrossRatioVector& c, int edge) {
  const Developer dev(rs, c);
  const RealizedTriangle base = dev.base();
  const int j0 = dev.trace().faces[0].darts[0];
  const int p1 = rs.positions_of(edge)[0];
  const int steps = rs.Wrap(p1 - j0);
  std::pair<RealizedTriangle, int> cur{base, 0};
  for (int s = 0; s < steps; ++s) cur = dev.rotate(cur.first, cur.second, true);
  const RealizedTriangle& t = cur.first;
  const int corner = cur.second;
  const RealizedTriangle across = cross_edge(t, corner, c[edge]);
  const MoebiusMap frame = mobius_from_three_points(
      {t.contacts[Mod3(corner + 1)], t.contacts[corner],
       t.contacts[Mod3(corner + 2)]},
      {SpherePoint::FromComplex(0.0), SpherePoint::FromComplex(1.0),
       SpherePoint::FromComplex(kI)});
  const Cline image = apply(frame, across.circles[2]);
  if (image.is_line()) {
    throw DegeneracyError("shrinking_circle_readback: image is a line");
  }
  return image.radius();
}

}  // namespace cpack
