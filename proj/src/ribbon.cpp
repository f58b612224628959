#include "cpack/ribbon.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cpack/error.hpp"

namespace cpack {
namespace {

bool IsNameChar(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
         ch == '-' || ch == '.';
}

}  // namespace

RotationSystem::RotationSystem(std::vector<std::string> edge_names,
                               std::vector<Dart> darts)
    : edge_names_(std::move(edge_names)), darts_(std::move(darts)) {
  const int num_edges = static_cast<int>(edge_names_.size());
  if (num_edges == 0) throw FormatError("empty rotation");
  for (int e = 0; e < num_edges; ++e) {
    if (!index_.emplace(edge_names_[e], e).second) {
      throw FormatError("duplicate edge name '" + edge_names_[e] + "'");
    }
  }

  ends_.assign(num_edges, {-1, -1});
  for (int p = 0; p < static_cast<int>(darts_.size()); ++p) {
    const Dart& d = darts_[p];
    if (d.edge < 0 || d.edge >= num_edges) {
      throw FormatError("dart " + std::to_string(p) + " refers to no edge");
    }
    int& slot = ends_[d.edge][static_cast<int>(d.end)];
    if (slot >= 0) {
      throw FormatError("edge '" + edge_names_[d.edge] + "' has its " +
                        (d.end == End::kFirst ? "first" : "second") +
                        " end listed twice");
    }
    slot = p;
  }
  for (int e = 0; e < num_edges; ++e) {
    for (int k = 0; k < 2; ++k) {
      if (ends_[e][k] < 0) {
        throw FormatError("edge '" + edge_names_[e] + "' is missing its " +
                          (k == 0 ? "first" : "second") + " end");
      }
    }
  }

  opposite_.resize(darts_.size());
  for (const auto& pair : ends_) {
    opposite_[pair[0]] = pair[1];
    opposite_[pair[1]] = pair[0];
  }

  if (num_edges % 3 != 0) {
    throw FormatError("number of edges " + std::to_string(num_edges) +
                      " is not divisible by 3");
  }

  // Every phi-orbit must be a triangle.
  const int m = valence();
  std::vector<char> seen(m, 0);
  int face_count = 0;
  for (int p = 0; p < m; ++p) {
    if (seen[p]) continue;
    int length = 0;
    int q = p;
    do {
      seen[q] = 1;
      q = face_step(q);
      ++length;
    } while (q != p);
    if (length != 3) {
      throw FormatError("non-triangular face of length " +
                        std::to_string(length) + " through dart " +
                        token(p));
    }
    ++face_count;
  }

  // One vertex: chi = 1 - E + F = 2 - 2g.
  const int twice_genus = 1 + num_edges - face_count;
  genus_ = twice_genus / 2;
  if (genus_ < 2) {
    throw FormatError("genus < 2 (genus " + std::to_string(genus_) +
                      ", " + std::to_string(num_edges) + " edges)");
  }
}

std::optional<int> RotationSystem::find_edge(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string RotationSystem::token(int position) const {
  const Dart& d = dart(position);
  return edge_names_[d.edge] + (d.end == End::kSecond ? "'" : "");
}

RotationSystem parse_rotation(std::string_view text) {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;
  std::vector<Dart> darts;
  // Where each (edge, end) first appeared, for diagnostics.
  std::vector<std::array<std::pair<int, int>, 2>> seen_at;
  bool have_rotation = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    constexpr std::string_view kKey = "rotation:";
    if (line.substr(first, kKey.size()) != kKey) {
      throw FormatError("expected 'rotation:'", line_no,
                        static_cast<int>(first) + 1);
    }
    if (have_rotation) {
      throw FormatError(
          "second 'rotation:' line; only one-vertex graphs are supported",
          line_no, static_cast<int>(first) + 1);
    }
    have_rotation = true;

    std::size_t i = first + kKey.size();
    while (i < line.size()) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      const int column = static_cast<int>(i) + 1;
      std::size_t j = i;
      while (j < line.size() && IsNameChar(line[j])) ++j;
      if (j == i) {
        throw FormatError(std::string("unexpected character '") + line[i] + "'",
                          line_no, column);
      }
      std::string name(line.substr(i, j - i));
      End end = End::kFirst;
      if (j < line.size() && line[j] == '\'') {
        end = End::kSecond;
        ++j;
      }
      if (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
        throw FormatError(std::string("unexpected character '") + line[j] + "'",
                          line_no, static_cast<int>(j) + 1);
      }
      auto [it, inserted] = index.emplace(name, static_cast<int>(names.size()));
      if (inserted) {
        names.push_back(name);
        seen_at.push_back({std::pair{0, 0}, std::pair{0, 0}});
      }
      auto& where = seen_at[it->second][static_cast<int>(end)];
      if (where.first != 0) {
        throw FormatError("edge end '" + name +
                              (end == End::kSecond ? "'" : "") +
                              "' occurs more than once (first at line " +
                              std::to_string(where.first) + ", column " +
                              std::to_string(where.second) + ")",
                          line_no, column);
      }
      where = {line_no, column};
      darts.push_back({it->second, end});
      i = j;
    }
  }
  if (!have_rotation) throw FormatError("missing 'rotation:' line");
  return RotationSystem(std::move(names), std::move(darts));
}

std::string format_rotation(const RotationSystem& rs) {
  std::ostringstream out;
  out << "rotation:";
  for (int p = 0; p < rs.valence(); ++p) out << ' ' << rs.token(p);
  out << '\n';
  return out.str();
}

FaceTrace faces(const RotationSystem& rs) {
  const int m = rs.valence();
  FaceTrace trace;
  trace.corners.resize(m);
  std::vector<char> seen(m, 0);
  // Scanning positions in increasing order visits faces by smallest dart.
  for (int p = 0; p < m; ++p) {
    if (seen[p]) continue;
    FaceTrace::Face face;
    int q = p;
    for (int k = 0; k < 3; ++k) {
      face.darts[k] = q;
      seen[q] = 1;
      trace.corners[q] = {static_cast<int>(trace.faces.size()), k};
      q = rs.face_step(q);
    }
    trace.faces.push_back(face);
  }
  return trace;
}

CornerOrder corner_order(const RotationSystem& rs, int start,
                         Orientation orientation) {
  CornerOrder order;
  order.start = rs.Wrap(start);
  order.orientation_flipped = orientation == Orientation::kCounterclockwise;
  const int m = rs.valence();
  const int step = order.orientation_flipped ? -1 : 1;
  order.darts.reserve(m);
  order.edges.reserve(m);
  for (int j = 0; j < m; ++j) {
    const Dart& d = rs.dart(order.start + step * j);
    order.darts.push_back(d);
    order.edges.push_back(d.edge);
  }
  return order;
}

}  // namespace cpack
