#pragma once

// Text formats: graph files, cross ratio vectors (text and JSON) and dumps
// of developed complexes.
//
// Vector text format, one edge per line, any order:
//   # comment
//   a = 1.9696155060244163
//
// Dump format: a header, then one record per triangle in address order.
//   cpack-dump 1
//   radius 1
//   triangle @0 face 3
//   line <normal.x> <normal.y> <offset>
//   circle <center.x> <center.y> <radius>
//   circle ...
//   contact <x> <y>        (or: contact inf)
//   contact ...
//   contact ...
//   end
// Numbers are printed with 17 significant digits, so text -> Dump -> text
// is the identity.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "cpack/crossratio.hpp"
#include "cpack/develop.hpp"
#include "cpack/ribbon.hpp"

namespace cpack {

// Whole-file helpers; FormatError when the file cannot be read or written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

RotationSystem load_graph(const std::string& path);
void save_graph(const std::string& path, const RotationSystem& rs);

// Text or JSON ({"a": 1.96, ...}); JSON is detected by a leading '{'.
CrossRatioVector parse_vector(std::string_view text, const RotationSystem& rs);
std::string format_vector(const CrossRatioVector& c, const RotationSystem& rs);
std::string format_vector_json(const CrossRatioVector& c,
                               const RotationSystem& rs);
CrossRatioVector load_vector(const std::string& path, const RotationSystem& rs);

// %.17g formatting shared by every writer.
std::string format_number(double v);

struct DumpCircle {
  bool is_line = false;
  double x = 0.0, y = 0.0;  // center, or unit normal for lines
  double size = 0.0;        // radius, or offset for lines
};

struct DumpContact {
  bool infinite = false;
  double x = 0.0, y = 0.0;
};

struct DumpTriangle {
  std::string address;
  int face = 0;
  std::array<DumpCircle, 3> circles;
  std::array<DumpContact, 3> contacts;
};

struct Dump {
  int radius = 0;
  std::vector<DumpTriangle> triangles;

  bool operator==(const Dump&) const;
};

DumpCircle to_dump(const Cline& k);
DumpContact to_dump(const SpherePoint& p);
Dump to_dump(const DevelopedComplex& dc);

Dump parse_dump(std::string_view text);
std::string format_dump(const Dump& dump);

}  // namespace cpack
