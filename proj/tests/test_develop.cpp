#include <cmath>
#include <random>

#include "cpack/develop.hpp"
#include "cpack/error.hpp"
#include "cpack/solver.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cpack;

namespace {

const Complex kI(0.0, 1.0);

SpherePoint P(Complex z) { return SpherePoint::FromComplex(z); }

double TriangleDistance(const RealizedTriangle& a, const RealizedTriangle& b) {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    d = std::max(d, distance(a.circles[k], b.circles[k]));
    d = std::max(d, distance(a.contacts[k], b.contacts[k]));
  }
  return d;
}

bool Tangent(const Cline& a, const Cline& b, double tol = 1e-8) {
  return std::abs(std::abs(inversive_product(a, b)) - 1.0) < tol;
}

MoebiusMap RandomMap(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  while (true) {
    const Complex a(u(gen), u(gen)), b(u(gen), u(gen)), c(u(gen), u(gen)),
        d(u(gen), u(gen));
    if (std::abs(a * d - b * c) > 0.3) return MoebiusMap(a, b, c, d);
  }
}

}  // namespace

TEST_CASE("standard edge configuration") {
  const EdgeConfiguration one = standard_edge_configuration(1.0);
  CHECK(distance(one.c4, Cline::Circle({0.5, 1.0}, 0.5)) < 1e-15);
  CHECK(distance(one.p14, P(kI)) < 1e-15);
  for (double x : {0.5, 1.0, 2.0, 7.0}) {
    const EdgeConfiguration s = standard_edge_configuration(x);
    CHECK(configuration_cross_ratio(s.p14, s.p23, s.p12, s.p13) ==
          doctest::Approx(x).epsilon(1e-15));
    CHECK(Tangent(s.c1, s.c2));
    CHECK(Tangent(s.c2, s.c3));
    CHECK(Tangent(s.c1, s.c3));
    CHECK(Tangent(s.c1, s.c4));
    CHECK(Tangent(s.c3, s.c4));
    // C2 and C4 have unit radii sum 1 and centers x apart.
    CHECK(Tangent(s.c2, s.c4) == (x == 1.0));
    CHECK(std::abs(s.c1.incidence(s.p14)) < 1e-14);
    CHECK(std::abs(s.c3.incidence(s.p34)) < 1e-14);
  }
  CHECK_THROWS_AS(standard_edge_configuration(0.0), std::invalid_argument);
  CHECK_THROWS_AS(standard_edge_configuration(-1.0), std::invalid_argument);
}

TEST_CASE("crossing an edge of the standard triangle") {
  const RealizedTriangle t = make_triangle(
      -1, {Cline::Line(1.0, 0.0), Cline::Line(1.0, 1.0), Cline::Circle(0.5, 0.5)});
  CHECK(distance(t.contacts[0], P(1.0)) < 1e-15);
  CHECK(distance(t.contacts[1], P(0.0)) < 1e-15);
  CHECK(t.contacts[2].is_infinity());

  const RealizedTriangle n = cross_edge(t, 0, 2.0);
  CHECK(distance(n.circles[2], Cline::Circle({0.5, 2.0}, 0.5)) < 1e-14);
  CHECK(distance(n.circles[0], t.circles[1]) == 0.0);
  CHECK(distance(n.circles[1], t.circles[0]) == 0.0);
  CHECK(recover_cross_ratio(t, 0, n) == doctest::Approx(2.0).epsilon(1e-12));

  // Crossing back recovers the original third circle.
  const RealizedTriangle back = cross_edge(n, 0, 2.0);
  CHECK(distance(back.circles[2], t.circles[2]) < 1e-10);
  CHECK_THROWS_AS(cross_edge(t, 0, 0.0), std::invalid_argument);
}

TEST_CASE("crossing commutes with Moebius maps") {
  std::mt19937_64 gen(3);
  const RealizedTriangle t = make_triangle(
      -1, {Cline::Line(1.0, 0.0), Cline::Line(1.0, 1.0), Cline::Circle(0.5, 0.5)});
  for (int trial = 0; trial < 20; ++trial) {
    const MoebiusMap m = RandomMap(gen);
    for (int side = 0; side < 3; ++side) {
      const double x = 0.3 + trial * 0.2;
      const RealizedTriangle a = cross_edge(apply(m, t), side, x);
      const RealizedTriangle b = apply(m, cross_edge(t, side, x));
      CHECK(TriangleDistance(a, b) < 1e-9);
      CHECK(recover_cross_ratio(apply(m, t), side, a) ==
            doctest::Approx(x).epsilon(1e-9));
    }
  }
}

TEST_CASE("development sizes and adjacency") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  const Developer dev(rs, c);

  DevelopOptions opts;
  opts.radius = 0;
  const DevelopedComplex d0 = develop(rs, c, opts);
  REQUIRE(d0.triangles.size() == 1);
  CHECK(d0.triangles[0].address == "@");
  CHECK(TriangleDistance(d0.triangles[0].triangle, dev.base()) == 0.0);

  for (int radius = 1; radius <= 4; ++radius) {
    opts.radius = radius;
    const DevelopedComplex dc = develop(rs, c, opts);
    CHECK(dc.triangles.size() == 1u + 3u * ((1u << radius) - 1u));
    for (std::size_t i = 1; i < dc.triangles.size(); ++i) {
      const auto& child = dc.triangles[i];
      const auto& parent = dc.triangles[child.parent];
      CHECK(dc.find(child.address) == &child);
      CHECK(child.address.substr(0, child.address.size() - 1) == parent.address);
      // Exactly two shared circles, all three pairwise tangent.
      int shared = 0;
      for (const Cline& a : child.triangle.circles) {
        for (const Cline& b : parent.triangle.circles) {
          if (distance(a, b) < 1e-9) ++shared;
        }
      }
      CHECK(shared == 2);
      const auto& k = child.triangle.circles;
      CHECK(Tangent(k[0], k[1]));
      CHECK(Tangent(k[1], k[2]));
      CHECK(Tangent(k[2], k[0]));
      // Ordering: by length, then lexicographic.
      const auto& prev = dc.triangles[i - 1].address;
      CHECK((prev.size() < child.address.size() ||
             (prev.size() == child.address.size() && prev < child.address)));
    }
  }
}

TEST_CASE("walking around a vertex returns to the same triangle") {
  const RotationSystem rs = fixtures::genus2();
  for (const CrossRatioVector& c :
       {symmetric_point(rs), fixtures::members(rs, 1, 0.3, 5)[0]}) {
    const Developer dev(rs, c);
    DevelopOptions opts;
    opts.radius = 2;
    for (const auto& dt : develop(rs, c, opts).triangles) {
      for (int corner = 0; corner < 3; ++corner) {
        std::pair<RealizedTriangle, int> cur{dt.triangle, corner};
        for (int s = 0; s < rs.valence(); ++s) {
          cur = dev.rotate(cur.first, cur.second, true);
        }
        CHECK(cur.second == corner);
        CHECK(cur.first.face == dt.triangle.face);
        CHECK(TriangleDistance(cur.first, dt.triangle) < 1e-8);
        // One step forward then back is the identity.
        auto fwd = dev.rotate(dt.triangle, corner, true);
        auto bwd = dev.rotate(fwd.first, fwd.second, false);
        CHECK(bwd.second == corner);
        CHECK(TriangleDistance(bwd.first, dt.triangle) < 1e-10);
      }
    }
  }
}

TEST_CASE("addresses resolve by following their words") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  const Developer dev(rs, c);
  DevelopOptions opts;
  opts.radius = 3;
  for (const auto& dt : develop(rs, c, opts).triangles) {
    std::vector<int> word;
    for (char ch : dt.address.substr(1)) word.push_back(ch - '0');
    CHECK(TriangleDistance(dev.follow(dev.base(), word), dt.triangle) == 0.0);
  }
}

TEST_CASE("cross ratios are recovered from developed tangency points") {
  const RotationSystem rs = fixtures::genus2();
  auto vectors = fixtures::members(rs, 5, 0.4, 9);
  vectors.push_back(symmetric_point(rs));
  for (const CrossRatioVector& c : vectors) {
    const Developer dev(rs, c);
    DevelopOptions opts;
    opts.radius = 2;
    for (const auto& dt : develop(rs, c, opts).triangles) {
      for (int side = 0; side < 3; ++side) {
        const auto step = dev.cross(dt.triangle, side);
        const int dart = dev.trace().faces[dt.triangle.face].darts[side];
        CHECK(recover_cross_ratio(dt.triangle, side, step.triangle) ==
              doctest::Approx(c[rs.edge_at(dart)]).epsilon(1e-9));
        // The neighbour sees the same edge from its entered side.
        const int back = dev.trace().faces[step.triangle.face].darts[step.entered_side];
        CHECK(rs.edge_at(back) == rs.edge_at(dart));
      }
    }
  }
}

TEST_CASE("development is Moebius-equivariant") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = fixtures::members(rs, 1, 0.3, 13)[0];
  std::mt19937_64 gen(17);
  DevelopOptions opts;
  const DevelopedComplex plain = develop(rs, c, opts);
  for (int trial = 0; trial < 10; ++trial) {
    opts.base_frame = RandomMap(gen);
    const DevelopedComplex moved = develop(rs, c, opts);
    REQUIRE(moved.triangles.size() == plain.triangles.size());
    for (std::size_t i = 0; i < plain.triangles.size(); ++i) {
      CHECK(TriangleDistance(moved.triangles[i].triangle,
                             apply(opts.base_frame, plain.triangles[i].triangle)) <
            1e-9);
    }
  }
}

TEST_CASE("parallel frontiers give identical output") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  DevelopOptions opts;
  opts.radius = 5;
  const DevelopedComplex seq = develop(rs, c, opts);
  opts.threads = 4;
  const DevelopedComplex par = develop(rs, c, opts);
  REQUIRE(seq.triangles.size() == par.triangles.size());
  for (std::size_t i = 0; i < seq.triangles.size(); ++i) {
    CHECK(seq.triangles[i].address == par.triangles[i].address);
    for (int k = 0; k < 3; ++k) {
      const Cline& a = seq.triangles[i].triangle.circles[k];
      const Cline& b = par.triangles[i].triangle.circles[k];
      CHECK((a.A() == b.A() && a.B() == b.B() && a.C() == b.C()));
    }
  }
}

TEST_CASE("development guards") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  DevelopOptions opts;
  opts.radius = kDefaultMaxRadius + 1;
  CHECK_THROWS_AS(develop(rs, c, opts), std::invalid_argument);
  opts.allow_deep = true;
  CHECK(develop(rs, c, opts).triangles.size() == 1u + 3u * 127u);
  opts.radius = -1;
  CHECK_THROWS_AS(develop(rs, c, opts), std::invalid_argument);

  const CrossRatioVector threes(std::vector<double>(9, 3.0));
  try {
    develop(rs, threes, {});
    FAIL("expected a membership error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMembership);
  }
}

TEST_CASE("vertex chain") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  const VertexChain chain = vertex_chain(rs, c, 0);
  REQUIRE(chain.chain.size() == 18);
  CHECK(chain.closing_error < 1e-8);
  for (int k = 0; k < 18; ++k) {
    CHECK(Tangent(chain.center, chain.chain[k]));
    CHECK(Tangent(chain.chain[k], chain.chain[(k + 1) % 18]));
  }

  // Same circles as the triangle-by-triangle walk around the base corner.
  const Developer dev(rs, c);
  const int j0 = dev.trace().faces[0].darts[0];
  const VertexChain at_base = vertex_chain(rs, c, j0);
  const auto star = dev.star(dev.base(), 0);
  for (int t = 0; t < 18; ++t) {
    const auto& [tri, corner] = star[t];
    CHECK(distance(at_base.chain[t], tri.circles[(corner + 1) % 3]) < 1e-9);
    CHECK(distance(at_base.center, tri.circles[corner]) < 1e-12);
  }

  for (const CrossRatioVector& m : fixtures::members(rs, 5, 0.4, 21)) {
    for (int start : {0, 7}) CHECK(vertex_chain(rs, m, start).closing_error < 1e-8);
  }
  const CrossRatioVector threes(std::vector<double>(9, 3.0));
  CHECK(vertex_chain(rs, threes, 0).closing_error > 1e-3);
}

TEST_CASE("holonomy relations") {
  const RotationSystem rs = fixtures::genus2();
  auto vectors = fixtures::members(rs, 5, 0.4, 33);
  vectors.push_back(symmetric_point(rs));
  for (const CrossRatioVector& c : vectors) {
    const HolonomyRep rep = holonomy(rs, c);
    REQUIRE(rep.generators.size() == 9);
    for (double r : face_relation_residuals(rep, rs)) CHECK(r < 1e-8);
    CHECK(rep.vertex_transport.sl2_distance(-MoebiusMap::Identity()) < 1e-8);
    for (int e = 0; e < 9; ++e) {
      const auto ends = rs.positions_of(e);
      CHECK(dart_holonomy(rep, rs, ends[0]).psl_distance(rep.generators[e]) ==
            0.0);
      CHECK((dart_holonomy(rep, rs, ends[1]) * rep.generators[e])
                .psl_distance(MoebiusMap::Identity()) < 1e-12);
    }
  }
}

TEST_CASE("holonomy under a change of base frame") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = fixtures::members(rs, 1, 0.3, 41)[0];
  const HolonomyRep rep = holonomy(rs, c);
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 5; ++trial) {
    HolonomyOptions opts;
    opts.base_frame = RandomMap(gen);
    const HolonomyRep moved = holonomy(rs, c, opts);
    const HolonomyRep conj = conjugate(rep, opts.base_frame);
    for (int e = 0; e < 9; ++e) {
      const double scale = 1.0 + trace_abs(rep.generators[e]);
      CHECK(moved.generators[e].psl_distance(conj.generators[e]) <
            1e-8 * scale * scale);
      CHECK(trace_abs(moved.generators[e]) ==
            doctest::Approx(trace_abs(rep.generators[e])).epsilon(1e-9));
    }
    CHECK(trace_probe(moved).value ==
          doctest::Approx(trace_probe(rep).value).epsilon(1e-9));
  }
}

TEST_CASE("trace probe at the symmetric point") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  const HolonomyRep rep = holonomy(rs, c);
  const TraceProbe probe = trace_probe(rep);
  // Frozen regression value of this implementation.
  CHECK(std::abs(probe.value - 31.1634374775982) < 1e-6);
  CHECK(!probe.word.empty());
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 5; ++trial) {
    HolonomyOptions opts;
    opts.base_frame = RandomMap(gen);
    CHECK(std::abs(trace_probe(holonomy(rs, c, opts)).value - probe.value) <
          1e-6);
    CHECK(std::abs(trace_probe(conjugate(rep, opts.base_frame)).value -
                   probe.value) < 1e-6);
  }
  // The probe dominates every single generator.
  for (const MoebiusMap& g : rep.generators) CHECK(trace_abs(g) <= probe.value);
}

TEST_CASE("shrinking circle readback") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector sym = symmetric_point(rs);
  // Oracle: push circle(1/2 + x i, 1/2) through z -> i z / (z + i - 1).
  const oracle::CMat frame{kI, 0.0, 1.0, kI - 1.0};
  for (double x : {0.5, 1.0, 2.0, 40.0}) {
    CrossRatioVector c = sym;
    c[0] = x;  // the readback depends only on the edge's own value
    const double r = shrinking_circle_readback(rs, c, 0);
    const oracle::Disk want = oracle::image_circle(frame, {{0.5, x}, 0.5});
    CHECK(r == doctest::Approx(want.radius).epsilon(1e-9));
    CHECK(r == doctest::Approx(oracle::shrinking_radius(x)).epsilon(1e-9));
    CHECK(r > 0.0);
  }
}
