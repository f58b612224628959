#include "cpack/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "cpack/error.hpp"
#include "json.hpp"

namespace cpack {
namespace {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

std::vector<Token> Split(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r') {
      ++i;
    }
    if (i > begin) {
      out.push_back({line.substr(begin, i - begin), static_cast<int>(begin) + 1});
    }
  }
  return out;
}

// Lines of `text` with '#' comments removed, numbered from 1.
std::vector<std::pair<int, std::string_view>> Lines(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    out.emplace_back(number, line);
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

double ParseNumber(const Token& t, int line) {
  double v = 0.0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw FormatError("expected a finite number, got '" + std::string(t.text) +
                          "'",
                      line, t.column);
  }
  return v;
}

int ParseInt(const Token& t, int line) {
  int v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("expected an integer, got '" + std::string(t.text) + "'",
                      line, t.column);
  }
  return v;
}

void SetValue(const RotationSystem& rs, std::vector<std::optional<double>>& vals,
              const std::string& name, double v, int line, int column) {
  const auto e = rs.find_edge(name);
  if (!e) throw FormatError("unknown edge '" + name + "'", line, column);
  if (vals[*e]) {
    throw FormatError("edge '" + name + "' given twice", line, column);
  }
  vals[*e] = v;
}

CrossRatioVector Collect(const RotationSystem& rs,
                         const std::vector<std::optional<double>>& vals) {
  std::vector<double> out;
  for (int e = 0; e < rs.num_edges(); ++e) {
    if (!vals[e]) {
      throw FormatError("missing value for edge '" + rs.edge_name(e) + "'");
    }
    out.push_back(*vals[e]);
  }
  return CrossRatioVector(std::move(out));
}

CrossRatioVector ParseJson(std::string_view text, const RotationSystem& rs) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into line and column.
    int line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw FormatError("malformed JSON", line, column);
  }
  if (!doc.is_object()) throw FormatError("JSON vector must be an object");
  std::vector<std::optional<double>> vals(rs.num_edges());
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_number()) {
      throw FormatError("value of edge '" + name + "' is not a number");
    }
    SetValue(rs, vals, name, value.get<double>(), 0, 0);
  }
  return Collect(rs, vals);
}

std::string Num(double v) { return format_number(v); }

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw FormatError("error writing '" + path + "'");
}

RotationSystem load_graph(const std::string& path) {
  return parse_rotation(read_file(path));
}

void save_graph(const std::string& path, const RotationSystem& rs) {
  write_file(path, format_rotation(rs));
}

CrossRatioVector parse_vector(std::string_view text, const RotationSystem& rs) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    return ParseJson(text, rs);
  }
  std::vector<std::optional<double>> vals(rs.num_edges());
  for (const auto& [number, line] : Lines(text)) {
    const auto tokens = Split(line);
    if (tokens.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("expected 'edge = value'", number, tokens[0].column);
    }
    const auto name_tokens = Split(line.substr(0, eq));
    const auto value_tokens = Split(line.substr(eq + 1));
    if (name_tokens.size() != 1) {
      throw FormatError("expected one edge name before '='", number,
                        tokens[0].column);
    }
    if (value_tokens.size() != 1) {
      throw FormatError("expected one value after '='", number,
                        static_cast<int>(eq) + 2);
    }
    Token value = value_tokens[0];
    value.column += static_cast<int>(eq) + 1;
    SetValue(rs, vals, std::string(name_tokens[0].text),
             ParseNumber(value, number), number, name_tokens[0].column);
  }
  return Collect(rs, vals);
}

std::string format_vector(const CrossRatioVector& c, const RotationSystem& rs) {
  std::string out;
  for (int e = 0; e < rs.num_edges(); ++e) {
    out += rs.edge_name(e) + " = " + Num(c[e]) + "\n";
  }
  return out;
}

std::string format_vector_json(const CrossRatioVector& c,
                               const RotationSystem& rs) {
  // Written by hand to keep edge order and 17-digit numbers.
  std::string out = "{\n";
  for (int e = 0; e < rs.num_edges(); ++e) {
    out += "  " + nlohmann::json(rs.edge_name(e)).dump() + ": " + Num(c[e]) +
           (e + 1 < rs.num_edges() ? ",\n" : "\n");
  }
  return out + "}\n";
}

CrossRatioVector load_vector(const std::string& path, const RotationSystem& rs) {
  return parse_vector(read_file(path), rs);
}

bool Dump::operator==(const Dump& o) const {
  return format_dump(*this) == format_dump(o);
}

DumpCircle to_dump(const Cline& k) {
  if (k.is_line()) {
    const Complex n = k.unit_normal();
    return {true, n.real(), n.imag(), k.offset()};
  }
  const Complex c = k.center();
  return {false, c.real(), c.imag(), k.radius()};
}

DumpContact to_dump(const SpherePoint& p) {
  if (p.is_infinity()) return {true, 0.0, 0.0};
  const Complex z = p.to_complex();
  return {false, z.real(), z.imag()};
}

Dump to_dump(const DevelopedComplex& dc) {
  Dump out;
  out.radius = dc.radius;
  for (const auto& t : dc.triangles) {
    DumpTriangle r;
    r.address = t.address;
    r.face = t.triangle.face;
    for (int k = 0; k < 3; ++k) {
      r.circles[k] = to_dump(t.triangle.circles[k]);
      r.contacts[k] = to_dump(t.triangle.contacts[k]);
    }
    out.triangles.push_back(std::move(r));
  }
  return out;
}

std::string format_dump(const Dump& dump) {
  std::string out = "cpack-dump 1\nradius " + std::to_string(dump.radius) + "\n";
  for (const auto& t : dump.triangles) {
    out += "triangle " + t.address + " face " + std::to_string(t.face) + "\n";
    for (const auto& k : t.circles) {
      out += std::string(k.is_line ? "line " : "circle ") + Num(k.x) + " " +
             Num(k.y) + " " + Num(k.size) + "\n";
    }
    for (const auto& p : t.contacts) {
      out += p.infinite ? std::string("contact inf\n")
                        : "contact " + Num(p.x) + " " + Num(p.y) + "\n";
    }
    out += "end\n";
  }
  return out;
}

Dump parse_dump(std::string_view text) {
  Dump dump;
  enum class State { kHeader, kRadius, kTriangle, kBody } state = State::kHeader;
  DumpTriangle cur;
  int circles = 0, contacts = 0;
  int last_line = 0;
  for (const auto& [number, line] : Lines(text)) {
    last_line = number;
    const auto t = Split(line);
    if (t.empty()) continue;
    auto expect_size = [&](std::size_t n) {
      if (t.size() != n) {
        throw FormatError("expected " + std::to_string(n) + " fields on '" +
                              std::string(t[0].text) + "' line",
                          number, t[0].column);
      }
    };
    switch (state) {
      case State::kHeader:
        if (t.size() != 2 || t[0].text != "cpack-dump" || t[1].text != "1") {
          throw FormatError("expected header 'cpack-dump 1'", number,
                            t[0].column);
        }
        state = State::kRadius;
        break;
      case State::kRadius:
        if (t[0].text != "radius") {
          throw FormatError("expected 'radius'", number, t[0].column);
        }
        expect_size(2);
        dump.radius = ParseInt(t[1], number);
        state = State::kTriangle;
        break;
      case State::kTriangle:
        if (t[0].text != "triangle") {
          throw FormatError("expected 'triangle'", number, t[0].column);
        }
        expect_size(4);
        if (t[1].text.empty() || t[1].text[0] != '@') {
          throw FormatError("address must start with '@'", number, t[1].column);
        }
        for (char ch : t[1].text.substr(1)) {
          if (ch < '0' || ch > '2') {
            throw FormatError("address digits must be 0, 1 or 2", number,
                              t[1].column);
          }
        }
        if (t[2].text != "face") {
          throw FormatError("expected 'face'", number, t[2].column);
        }
        cur = DumpTriangle{};
        cur.address = std::string(t[1].text);
        cur.face = ParseInt(t[3], number);
        circles = contacts = 0;
        state = State::kBody;
        break;
      case State::kBody:
        if (t[0].text == "line" || t[0].text == "circle") {
          expect_size(4);
          if (circles == 3 || contacts > 0) {
            throw FormatError("unexpected cline record", number, t[0].column);
          }
          DumpCircle& k = cur.circles[circles++];
          k.is_line = t[0].text == "line";
          k.x = ParseNumber(t[1], number);
          k.y = ParseNumber(t[2], number);
          k.size = ParseNumber(t[3], number);
        } else if (t[0].text == "contact") {
          if (circles != 3 || contacts == 3) {
            throw FormatError("unexpected contact record", number, t[0].column);
          }
          DumpContact& p = cur.contacts[contacts++];
          if (t.size() == 2 && t[1].text == "inf") {
            p.infinite = true;
          } else {
            expect_size(3);
            p.x = ParseNumber(t[1], number);
            p.y = ParseNumber(t[2], number);
          }
        } else if (t[0].text == "end") {
          expect_size(1);
          if (circles != 3 || contacts != 3) {
            throw FormatError("triangle needs three clines and three contacts",
                              number, t[0].column);
          }
          dump.triangles.push_back(std::move(cur));
          state = State::kTriangle;
        } else {
          throw FormatError("unknown record '" + std::string(t[0].text) + "'",
                            number, t[0].column);
        }
        break;
    }
  }
  if (state == State::kHeader || state == State::kRadius) {
    throw FormatError("truncated dump header", last_line);
  }
  if (state == State::kBody) {
    throw FormatError("unterminated triangle record", last_line);
  }
  return dump;
}

}  // namespace cpack
