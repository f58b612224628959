#include "cpack/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "cpack/error.hpp"

namespace cpack {
namespace {

constexpr double kRankRatio = 1e-6;
constexpr int kMaxBisections = 60;

Eigen::Vector3d Residual(const RotationSystem& rs, const CrossRatioVector& c) {
  const auto r = vertex_residual(rs, c);
  return {r[0], r[1], r[2]};
}

Eigen::MatrixXd Jacobian(const RotationSystem& rs, const CrossRatioVector& c,
                         const SolveOptions& opts) {
  return opts.analytic_jacobian ? analytic_jacobian(rs, c)
                                : jacobian(rs, c, opts.fd_step);
}

Eigen::MatrixXd Columns(const Eigen::MatrixXd& j, const std::vector<int>& cols) {
  Eigen::MatrixXd out(j.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(k) = j.col(cols[k]);
  return out;
}

void CheckEdges(const RotationSystem& rs, const std::vector<int>& edges,
                const char* who) {
  std::set<int> seen;
  for (int e : edges) {
    if (e < 0 || e >= rs.num_edges()) {
      throw std::invalid_argument(std::string(who) + ": edge id " +
                                  std::to_string(e) + " out of range");
    }
    if (!seen.insert(e).second) {
      throw std::invalid_argument(std::string(who) + ": edge " +
                                  rs.edge_name(e) + " listed twice");
    }
  }
}

std::vector<int> Complement(int n, const std::vector<int>& edges) {
  std::vector<bool> in(n, false);
  for (int e : edges) in[e] = true;
  std::vector<int> out;
  for (int e = 0; e < n; ++e) {
    if (!in[e]) out.push_back(e);
  }
  return out;
}

bool Finite(const CrossRatioVector& c) {
  return std::all_of(c.values().begin(), c.values().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

void validate(const SolveOptions& opts) {
  if (!(opts.tol_residual > 0.0) || opts.max_iter < 0 ||
      !(opts.damping > 0.0 && opts.damping <= 1.0) || !(opts.fd_step > 0.0) ||
      !(opts.zero_tol > 0.0) || !(opts.max_condition > 1.0)) {
    throw std::invalid_argument(
        "SolveOptions: tolerances and steps must be positive, damping in "
        "(0, 1]");
  }
}

Eigen::MatrixXd jacobian(const RotationSystem& rs, const CrossRatioVector& c,
                         double fd_step) {
  const Eigen::Vector3d r0 = Residual(rs, c);
  Eigen::MatrixXd j(3, rs.num_edges());
  CrossRatioVector probe = c;
  for (int e = 0; e < rs.num_edges(); ++e) {
    probe[e] = c[e] + fd_step;
    j.col(e) = (Residual(rs, probe) - r0) / fd_step;
    probe[e] = c[e];
  }
  return j;
}

Eigen::MatrixXd analytic_jacobian(const RotationSystem& rs,
                                  const CrossRatioVector& c) {
  const PartialProducts w = partial_products(rs, c);
  const int m = w.size();
  // suffix[p] = A(x_{p+1}) ... A(x_m) for 0-based p; suffix[m] = I.
  std::vector<Mat2> suffix(m + 1);
  for (int p = m - 1; p >= 0; --p) suffix[p] = edge_matrix(w.x[p]) * suffix[p + 1];
  const Mat2 e{0.0, 0.0, 0.0, 1.0};
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, rs.num_edges());
  for (int p = 0; p < m; ++p) {
    const Mat2 prefix = p == 0 ? Mat2{} : w.W[p - 1];
    const Mat2 d = prefix * e * suffix[p + 1];
    const int edge = rs.edge_at(w.start + p);
    j(0, edge) += d.a;
    j(1, edge) += d.b;
    j(2, edge) += d.c;
  }
  return j;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

double block_condition(const Eigen::MatrixXd& j,
                       const std::array<int, 3>& dependent) {
  const Eigen::VectorXd s =
      singular_values(Columns(j, {dependent.begin(), dependent.end()}));
  if (!(s(2) > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / s(2);
}

std::array<int, 3> auto_pivot(const RotationSystem& rs,
                              const CrossRatioVector& c,
                              const std::vector<int>& candidates,
                              const SolveOptions& opts) {
  validate(opts);
  std::vector<int> cols = candidates;
  if (cols.empty()) cols = Complement(rs.num_edges(), {});
  CheckEdges(rs, cols, "auto_pivot");
  if (cols.size() < 3) {
    throw std::invalid_argument("auto_pivot: fewer than three candidates");
  }
  const Eigen::MatrixXd j = Columns(Jacobian(rs, c, opts), cols);
  const Eigen::VectorXd s = singular_values(j);
  if (!(s(0) > 0.0) || !(s(2) > kRankRatio * s(0))) {
    throw SolverError("auto_pivot: Jacobian has rank < 3 (sigma_3 / sigma_1 = " +
                      std::to_string(s(0) > 0.0 ? s(2) / s(0) : 0.0) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(j);
  std::array<int, 3> out{};
  for (int k = 0; k < 3; ++k) out[k] = cols[qr.colsPermutation().indices()(k)];
  std::sort(out.begin(), out.end());
  return out;
}

SolveResult newton_solve(const RotationSystem& rs, const CrossRatioVector& c0,
                         const std::array<int, 3>& dependent,
                         const SolveOptions& opts) {
  validate(opts);
  if (c0.size() != rs.num_edges()) {
    throw std::invalid_argument("newton_solve: vector size does not match graph");
  }
  if (!Finite(c0)) throw std::invalid_argument("newton_solve: non-finite input");
  CheckEdges(rs, {dependent.begin(), dependent.end()}, "newton_solve");

  SolveResult out{c0, {}};
  SolveReport& rep = out.report;
  Eigen::Vector3d r = Residual(rs, out.c);
  double norm = r.norm();
  int it = 0;
  for (; norm > opts.tol_residual && it < opts.max_iter; ++it) {
    const Eigen::MatrixXd j = Jacobian(rs, out.c, opts);
    rep.condition = block_condition(j, dependent);
    if (!std::isfinite(rep.condition) || rep.condition > opts.max_condition) {
      throw SolverError("newton_solve: singular dependent block (condition " +
                        std::to_string(rep.condition) +
                        "); choose another pivot");
    }
    Eigen::Matrix3d b;
    for (int k = 0; k < 3; ++k) b.col(k) = j.col(dependent[k]);
    const Eigen::Vector3d delta = b.fullPivLu().solve(-r);
    double lambda = opts.damping;
    bool accepted = false;
    while (lambda >= 1e-12) {
      CrossRatioVector trial = out.c;
      for (int k = 0; k < 3; ++k) trial[dependent[k]] += lambda * delta(k);
      const Eigen::Vector3d rt = Residual(rs, trial);
      const double nt = rt.norm();
      if (std::isfinite(nt) && nt < norm) {
        out.c = std::move(trial);
        r = rt;
        norm = nt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // no descent: stagnated
  }
  rep.iterations = it;
  rep.residual = norm;
  rep.converged = norm <= opts.tol_residual;
  const ConditionReport cond =
      check_conditions(partial_products(rs, out.c), true, opts.zero_tol);
  rep.min_margin = cond.min_margin;
  if (rep.converged) {
    rep.member = cond.strict_ok;
    if (!cond.strict_ok) rep.boundary_hit = cond.first_violation;
  }
  return out;
}

ContinuationPath single_edge_path(const RotationSystem& rs,
                                  const CrossRatioVector& c, int edge,
                                  double target) {
  std::vector<int> candidates;
  for (int e = 0; e < rs.num_edges(); ++e) {
    if (e != edge) candidates.push_back(e);
  }
  const auto dep = auto_pivot(rs, c, candidates);
  ContinuationPath path;
  path.free = Complement(rs.num_edges(), {dep.begin(), dep.end()});
  std::vector<double> values;
  for (int e : path.free) values.push_back(e == edge ? target : c[e]);
  path.targets.push_back(std::move(values));
  return path;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kBoundary: return "boundary";
    case Termination::kStalled: return "stalled";
    case Termination::kBlowup: return "blowup";
  }
  return "unknown";
}

ContinuationResult continuation(const RotationSystem& rs,
                                const CrossRatioVector& c_start,
                                const ContinuationPath& path,
                                const SolveOptions& opts) {
  validate(opts);
  const int n = rs.num_edges();
  if (static_cast<int>(path.free.size()) != n - 3) {
    throw std::invalid_argument("continuation: free set must have |E| - 3 = " +
                                std::to_string(n - 3) + " edges");
  }
  CheckEdges(rs, path.free, "continuation");
  for (const auto& t : path.targets) {
    if (t.size() != path.free.size()) {
      throw std::invalid_argument("continuation: waypoint size mismatch");
    }
  }
  if (!(path.initial_step > 0.0) || !(path.min_step > 0.0) ||
      !(path.max_step >= path.min_step) || !(path.growth >= 1.0)) {
    throw std::invalid_argument("continuation: bad step control");
  }

  std::vector<int> dep_list = Complement(n, path.free);
  std::array<int, 3> dep{dep_list[0], dep_list[1], dep_list[2]};

  ContinuationResult result;
  {
    SolveResult start = newton_solve(rs, c_start, dep, opts);
    if (!start.report.member) {
      throw Error(ErrorKind::kMembership,
                  "continuation: start point is not a member");
    }
    result.steps.push_back({start.c, start.report, dep, 0});
  }

  // Full-length target vector; dependent entries are ignored.
  auto is_dep = [&](int e) {
    return e == dep[0] || e == dep[1] || e == dep[2];
  };

  double h = std::min(path.initial_step, path.max_step);
  for (int wp = 0; wp < static_cast<int>(path.targets.size()); ++wp) {
    std::vector<double> goal = result.steps.back().c.values();
    for (std::size_t k = 0; k < path.free.size(); ++k) {
      goal[path.free[k]] = path.targets[wp][k];
    }
    std::vector<int> moving;
    for (int e : path.free) {
      if (goal[e] != result.steps.back().c[e]) moving.push_back(e);
    }
    std::vector<int> still = Complement(n, moving);

    auto repivot = [&](const CrossRatioVector& at) {
      dep = auto_pivot(rs, at, still, opts);
      ++result.repivots;
    };
    if (std::any_of(moving.begin(), moving.end(), is_dep)) {
      repivot(result.steps.back().c);
    }

    while (true) {
      const CrossRatioVector& cur = result.steps.back().c;
      double dist = 0.0;
      for (int e : moving) dist = std::max(dist, std::abs(goal[e] - cur[e]));
      if (dist == 0.0) break;

      const Eigen::MatrixXd j = Jacobian(rs, cur, opts);
      if (block_condition(j, dep) > opts.max_condition) repivot(cur);

      // Point at fraction s of the way to the goal, with tangent predictor.
      auto predict = [&](double s) {
        CrossRatioVector p = cur;
        Eigen::VectorXd dfree(n);
        dfree.setZero();
        for (int e : moving) {
          p[e] = s >= 1.0 ? goal[e] : cur[e] + s * (goal[e] - cur[e]);
          dfree(e) = p[e] - cur[e];
        }
        Eigen::Matrix3d b;
        for (int k = 0; k < 3; ++k) b.col(k) = j.col(dep[k]);
        const Eigen::Vector3d ddep = b.fullPivLu().solve(-(j * dfree));
        for (int k = 0; k < 3; ++k) p[dep[k]] += ddep(k);
        return p;
      };
      auto correct = [&](double s) -> std::optional<SolveResult> {
        try {
          SolveResult r = newton_solve(rs, predict(s), dep, opts);
          if (!r.report.converged) return std::nullopt;
          return r;
        } catch (const SolverError&) {
          return std::nullopt;
        }
      };

      const double hh = std::min(h, dist);
      const double s = hh >= dist ? 1.0 : hh / dist;
      std::optional<SolveResult> trial = correct(s);
      if (!trial) {
        h *= 0.5;
        if (h < path.min_step) {
          result.termination = Termination::kStalled;
          return result;
        }
        continue;
      }
      if (trial->report.member) {
        result.steps.push_back({trial->c, trial->report, dep, wp});
        h = std::min(h * path.growth, path.max_step);
        const auto& v = trial->c.values();
        if (std::any_of(v.begin(), v.end(), [&](double x) {
              return std::abs(x) > path.blowup;
            })) {
          result.termination = Termination::kBlowup;
          return result;
        }
        continue;
      }

      // Sign boundary ahead: bisect for a point in the band where the
      // non-strict condition holds and the strict one fails.
      auto in_band = [&](const SolveResult& r) {
        return check_conditions(partial_products(rs, r.c), false, opts.zero_tol)
            .nonstrict_ok;
      };
      double lo = 0.0, hi = s;
      std::optional<SolveResult> band;
      if (in_band(*trial)) band = trial;
      std::optional<Violation> violation = trial->report.boundary_hit;
      // Whether `hi` is a converged point past the boundary, as opposed to a
      // failed correction.
      bool hi_violates = true;
      for (int b = 0; !band && b < kMaxBisections; ++b) {
        if ((hi - lo) * dist < path.min_step) break;
        const double mid = 0.5 * (lo + hi);
        std::optional<SolveResult> r = correct(mid);
        if (!r) {
          hi = mid;
          hi_violates = false;
        } else if (r->report.member) {
          lo = mid;
        } else if (in_band(*r)) {
          band = r;
        } else {
          hi = mid;
          hi_violates = true;
          violation = r->report.boundary_hit;
        }
      }
      if (band) {
        result.termination = Termination::kBoundary;
        result.boundary_hit = band->report.boundary_hit;
        result.steps.push_back({band->c, band->report, dep, wp});
      } else if (hi_violates && (hi - lo) * dist < path.min_step) {
        // The band is narrower than the step resolution.
        result.termination = Termination::kBoundary;
        result.boundary_hit = violation;
      } else {
        result.termination = Termination::kStalled;
      }
      return result;
    }
  }
  return result;
}

void write_continuation_csv(std::ostream& out, const RotationSystem& rs,
                            const ContinuationResult& result,
                            const std::vector<int>& free,
                            const std::vector<CsvColumn>& extra) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "step";
  for (int e : free) out << ',' << rs.edge_name(e);
  out << ",residual,min_margin";
  for (const auto& col : extra) out << ',' << col.name;
  out << '\n';
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const auto& step = result.steps[i];
    out << i;
    for (int e : free) out << ',' << num(step.c[e]);
    out << ',' << num(step.report.residual) << ','
        << num(step.report.min_margin);
    for (const auto& col : extra) {
      out << ',' << (i < col.values.size() ? num(col.values[i]) : "");
    }
    out << '\n';
  }
}

}  // namespace cpack
