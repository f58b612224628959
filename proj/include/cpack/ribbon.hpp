#pragma once

// Combinatorics of a one-vertex triangulation of a closed oriented surface.
//
// The single vertex carries a cyclic sequence of m = 2|E| edge ends (darts),
// listed clockwise. Darts are addressed by their position 0..m-1 in that
// sequence. Two permutations act on positions:
//   sigma(p) = p + 1 mod m          (clockwise successor)
//   alpha(p) = position of the other end of the same edge
// Faces are the orbits of phi = sigma o alpha. For a face orbit
// (d0, d1, d2) with d_{k+1} = phi(d_k), corner k of the face sits between the
// darts d_k - 1 and d_k at the vertex, and side k is the edge of dart d_k,
// joining corner k to corner k + 1.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cpack {

enum class End : std::uint8_t { kFirst = 0, kSecond = 1 };

struct Dart {
  int edge = 0;
  End end = End::kFirst;
  auto operator<=>(const Dart&) const = default;
};

class RotationSystem {
 public:
  // Validates the dart sequence; throws FormatError on any violation.
  RotationSystem(std::vector<std::string> edge_names, std::vector<Dart> darts);

  int num_edges() const { return static_cast<int>(edge_names_.size()); }
  int valence() const { return static_cast<int>(darts_.size()); }
  int num_faces() const { return 2 * num_edges() / 3; }
  int genus() const { return genus_; }

  const std::vector<Dart>& darts() const { return darts_; }
  const Dart& dart(int position) const { return darts_[Wrap(position)]; }
  int edge_at(int position) const { return darts_[Wrap(position)].edge; }

  int successor(int position) const { return Wrap(position + 1); }
  int opposite(int position) const { return opposite_[Wrap(position)]; }
  int face_step(int position) const { return successor(opposite(position)); }
  // Positions of the first and second end of an edge.
  std::array<int, 2> positions_of(int edge) const { return ends_[edge]; }

  const std::vector<std::string>& edge_names() const { return edge_names_; }
  const std::string& edge_name(int edge) const { return edge_names_[edge]; }
  std::optional<int> find_edge(std::string_view name) const;

  // Token text of the dart at a position: `name` or `name'`.
  std::string token(int position) const;

  int Wrap(int position) const {
    const int m = valence();
    return ((position % m) + m) % m;
  }

  bool operator==(const RotationSystem& other) const {
    return edge_names_ == other.edge_names_ && darts_ == other.darts_;
  }

 private:
  std::vector<std::string> edge_names_;
  std::vector<Dart> darts_;
  std::vector<int> opposite_;
  std::vector<std::array<int, 2>> ends_;
  std::unordered_map<std::string, int> index_;
  int genus_ = 0;
};

// Parses the graph file format:
//   # comment
//   rotation: t_1 t_2 ... t_{2E}
// Token `name` is the first end of edge `name`, `name'` its second end.
RotationSystem parse_rotation(std::string_view text);

// Inverse of parse_rotation (a single `rotation:` line).
std::string format_rotation(const RotationSystem& rs);

struct FaceTrace {
  struct Face {
    std::array<int, 3> darts;  // phi-orbit, starting at the smallest position
  };
  struct Corner {
    int face = 0;
    int corner = 0;
  };
  std::vector<Face> faces;      // sorted by smallest contained dart
  std::vector<Corner> corners;  // indexed by dart position
};

FaceTrace faces(const RotationSystem& rs);

enum class Orientation { kClockwise, kCounterclockwise };

struct CornerOrder {
  std::vector<Dart> darts;   // length m, starting at `start`
  std::vector<int> edges;    // edge id of each dart
  int start = 0;
  // Set when the order was read counterclockwise. Consumers that rely on the
  // clockwise convention (the edge-matrix products) reject flipped orders.
  bool orientation_flipped = false;
};

CornerOrder corner_order(const RotationSystem& rs, int start = 0,
                         Orientation orientation = Orientation::kClockwise);

}  // namespace cpack
