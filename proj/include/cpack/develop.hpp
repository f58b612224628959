#pragma once

// Geometric realization of a cross ratio vector: the developed circle packing
// of the universal cover, the chain of circles around the vertex, and the
// holonomy representation.
//
// A realized triangle stores one cline per corner of its face (corner order
// of FaceTrace) and, for each corner k, the tangency point of the two other
// circles. The base triangle is face 0 placed with
//   corner 0 -> line Re z = 0, corner 1 -> line Re z = 1,
//   corner 2 -> circle(1/2, 1/2),
// so its contacts are 1, 0 and infinity.

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpack/crossratio.hpp"
#include "cpack/moebius.hpp"
#include "cpack/ribbon.hpp"

namespace cpack {

inline constexpr int kDefaultMaxRadius = 6;
inline constexpr double kDevelopMembershipTol = 1e-10;

struct RealizedTriangle {
  int face = -1;  // -1 when not tied to a face of the rotation system
  std::array<Cline, 3> circles;
  std::array<SpherePoint, 3> contacts;  // contacts[k] opposite corner k
};

// Builds a triangle from three pairwise tangent clines, computing contacts.
RealizedTriangle make_triangle(int face, const std::array<Cline, 3>& circles);

// Moebius image of a triangle.
RealizedTriangle apply(const MoebiusMap& m, const RealizedTriangle& t);

// Maps contacts (0, 1, 2) of t to (1, 0, infinity), the base contacts.
MoebiusMap normalizing_map(const RealizedTriangle& t);

struct EdgeConfiguration {
  // C1, C3 are the ends of the edge; C2 and C4 lie on either side of it.
  Cline c1, c2, c3, c4;
  SpherePoint p12, p23, p13, p14, p34;
};

// The normalized rectangle picture of an edge with cross ratio x > 0:
// C1 = {Re z = 0}, C3 = {Re z = 1}, C2 = circle(1/2, 1/2),
// C4 = circle(1/2 + x i, 1/2).
EdgeConfiguration standard_edge_configuration(double x);

// Im of cross_ratio(p14, p23, p12, p13).
double configuration_cross_ratio(const SpherePoint& p14, const SpherePoint& p23,
                                 const SpherePoint& p12,
                                 const SpherePoint& p13);

// Places the fourth circle across side `side` (joining corners side and
// side + 1) of t. With C1 = circles[side], C3 = circles[side + 1] and
// C2 = circles[side + 2], the result has circles (C3, C1, C4), so its side 0
// is the crossed edge, seen from the other triangle. The face field is -1.
RealizedTriangle cross_edge(const RealizedTriangle& t, int side, double x);

// Recomputes the cross ratio of the edge shared by side `side` of t and
// `neighbor` from tangency points of the four circles.
double recover_cross_ratio(const RealizedTriangle& t, int side,
                           const RealizedTriangle& neighbor);

// Triangle-level walker over the universal cover of the rotation system.
class Developer {
 public:
  Developer(const RotationSystem& rs, const CrossRatioVector& c);

  const RotationSystem& rotation() const { return *rs_; }
  const FaceTrace& trace() const { return trace_; }

  // Face 0 in the standard position, moved by `frame`.
  RealizedTriangle base(const MoebiusMap& frame = MoebiusMap::Identity()) const;

  struct Step {
    RealizedTriangle triangle;
    int entered_side = 0;  // side of the new triangle that was crossed
  };
  // Crosses side `side` of a face-labelled triangle into the neighbouring
  // face, relabelling circles into that face's corner order.
  Step cross(const RealizedTriangle& t, int side) const;

  // The triangle reached by crossing the sides of `word` from `start`.
  RealizedTriangle follow(const RealizedTriangle& start,
                          const std::vector<int>& word) const;

  // Corner of t's face whose dart (corner k sits between darts d_k - 1, d_k)
  // equals `dart`.
  int corner_with_dart(const RealizedTriangle& t, int dart) const;

  // Rotates one step around the vertex at `corner`: from the corner between
  // darts d - 1, d to the one between d, d + 1 (forward) or d - 2, d - 1.
  // Returns the new triangle and the corner of the same vertex in it.
  std::pair<RealizedTriangle, int> rotate(const RealizedTriangle& t,
                                          int corner, bool forward) const;

  // The m triangles around the vertex at `corner` of t, starting with t,
  // walking forward. The last step back to t is not taken.
  std::vector<std::pair<RealizedTriangle, int>> star(const RealizedTriangle& t,
                                                     int corner) const;

 private:
  const RotationSystem* rs_;
  const CrossRatioVector* c_;
  FaceTrace trace_;
};

struct DevelopOptions {
  int radius = 1;
  // Radii above kDefaultMaxRadius need this flag: deep development loses
  // precision and addresses are only unique while radius < m / 2.
  bool allow_deep = false;
  MoebiusMap base_frame;
  // Worker threads per BFS frontier; output does not depend on it.
  int threads = 1;
  // Membership is checked first unless this is unset.
  std::optional<double> membership_tol = kDevelopMembershipTol;
};

struct DevelopedTriangle {
  // "@" followed by the sides crossed from the base triangle, one digit each.
  std::string address;
  RealizedTriangle triangle;
  int parent = -1;        // index into DevelopedComplex::triangles
  int entered_side = -1;  // side of this triangle shared with the parent
};

struct DevelopedComplex {
  int radius = 0;
  // BFS order: by address length, then lexicographically.
  std::vector<DevelopedTriangle> triangles;
  std::unordered_map<std::string, int> index;

  const DevelopedTriangle* find(const std::string& address) const;
};

// Breadth-first development over non-backtracking dual paths.
DevelopedComplex develop(const RotationSystem& rs, const CrossRatioVector& c,
                         const DevelopOptions& options = {});

struct VertexChain {
  Cline center;
  std::vector<Cline> chain;  // C_1..C_m
  Cline next;                // the (m+1)-th circle; equals C_1 when closed
  double closing_error = 0.0;
};

// Develops the m triangles around the vertex, starting with the corner
// between darts start - 1 and start placed as the base triangle is.
VertexChain vertex_chain(const RotationSystem& rs, const CrossRatioVector& c,
                         int start = 0);

struct HolonomyRep {
  std::vector<MoebiusMap> generators;  // indexed by edge id
  MoebiusMap base_frame;
  int base_dart = 0;
  // Product of the SL2 transports around the base vertex, each lifted to the
  // sign of the edge matrix [[0, 1], [-1, x]]. Equals -I on members.
  MoebiusMap vertex_transport;
  std::vector<std::string> edge_names;
};

// rho(g) for the loop running along a dart: the generator of its edge, or
// its inverse for the second end.
MoebiusMap dart_holonomy(const HolonomyRep& rep, const RotationSystem& rs,
                         int dart);

struct HolonomyOptions {
  MoebiusMap base_frame;
  std::optional<double> membership_tol = kDevelopMembershipTol;
};

HolonomyRep holonomy(const RotationSystem& rs, const CrossRatioVector& c,
                     const HolonomyOptions& options = {});

// Max PSL2 distance from the identity of the face-relation products.
std::vector<double> face_relation_residuals(const HolonomyRep& rep,
                                            const RotationSystem& rs);

// Conjugates every generator by m.
HolonomyRep conjugate(const HolonomyRep& rep, const MoebiusMap& m);

struct TraceProbe {
  double value = 0.0;
  std::string word;
};

// max |tr| over single generators and all products of two generators or
// their inverses.
TraceProbe trace_probe(const HolonomyRep& rep);

// Radius of the fourth circle across `edge`, in the frame sending
// (p12, p23, p13) to (0, 1, i).
double shrinking_circle_readback(const RotationSystem& rs,
                                 const CrossRatioVector& c, int edge);

}  // namespace cpack
