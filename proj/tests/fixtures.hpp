#pragma once

#include <string>

#include "cpack/io.hpp"
#include "cpack/ribbon.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
  return std::string(CPACK_DATA_DIR) + "/" + name;
}

inline cpack::RotationSystem genus2() {
  return cpack::load_graph(data_path("genus2.graph"));
}

}  // namespace fixtures

#include <random>

#include "cpack/crossratio.hpp"
#include "cpack/solver.hpp"

namespace fixtures {

// Members near the symmetric point: free coordinates uniformly within
// `spread` of the symmetric value, then Newton on an auto-pivot. Returns
// false when the solve does not land on a member.
inline bool random_member(const cpack::RotationSystem& rs, std::mt19937_64& gen,
                          double spread, cpack::CrossRatioVector& out) {
  cpack::CrossRatioVector c = cpack::symmetric_point(rs);
  std::uniform_real_distribution<double> u(-spread, spread);
  for (int e = 0; e < rs.num_edges(); ++e) c[e] += u(gen);
  try {
    const auto dep = cpack::auto_pivot(rs, c);
    const cpack::SolveResult r = cpack::newton_solve(rs, c, dep);
    if (!r.report.member) return false;
    out = r.c;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

inline std::vector<cpack::CrossRatioVector> members(
    const cpack::RotationSystem& rs, int count, double spread,
    unsigned seed = 1) {
  std::mt19937_64 gen(seed);
  std::vector<cpack::CrossRatioVector> out;
  cpack::CrossRatioVector c;
  while (static_cast<int>(out.size()) < count) {
    if (random_member(rs, gen, spread, c)) out.push_back(c);
  }
  return out;
}

}  // namespace fixtures
