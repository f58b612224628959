#pragma once

// Newton correction onto the closing condition W_m = -I and continuation of
// members along schedules of free coordinates.
//
// The residual has three components and |E| unknowns. A solve freezes all
// but three "dependent" edges and runs Newton on those.

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpack/crossratio.hpp"
#include "cpack/ribbon.hpp"

namespace cpack {

struct SolveOptions {
  double tol_residual = 1e-12;
  int max_iter = 50;
  double damping = 1.0;  // initial step length, halved while the residual grows
  double fd_step = 1e-7;
  double zero_tol = kDefaultZeroTol;
  bool analytic_jacobian = false;
  // Dependent blocks with a larger 2-norm condition number count as singular.
  double max_condition = 1e12;
};

// Throws std::invalid_argument unless the options are in range.
void validate(const SolveOptions& opts);

// 3 x |E| forward-difference Jacobian of vertex_residual, one column per edge.
Eigen::MatrixXd jacobian(const RotationSystem& rs, const CrossRatioVector& c,
                         double fd_step = 1e-7);

// Exact Jacobian from prefix/suffix products: dW_m/dx_p = W_{p-1} E W_{p+1..m}
// with E = [[0, 0], [0, 1]], summed over both ends of each edge.
Eigen::MatrixXd analytic_jacobian(const RotationSystem& rs,
                                  const CrossRatioVector& c);

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);

// 2-norm condition number of the columns `dependent` of j.
double block_condition(const Eigen::MatrixXd& j,
                       const std::array<int, 3>& dependent);

// Column-pivoted QR choice of three dependent edges among `candidates` (all
// edges when empty), sorted by edge id. Throws SolverError if the Jacobian
// has rank < 3 (sigma_3 / sigma_1 <= 1e-6).
std::array<int, 3> auto_pivot(const RotationSystem& rs,
                              const CrossRatioVector& c,
                              const std::vector<int>& candidates = {},
                              const SolveOptions& opts = {});

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  // Set when a converged point fails the strict sign condition.
  std::optional<Violation> boundary_hit;
  bool member = false;  // converged and strict signs hold
  double condition = 0.0;  // of the dependent block at the last iterate
  double min_margin = 0.0;
};

struct SolveResult {
  CrossRatioVector c;
  SolveReport report;
};

// Newton on the dependent coordinates. Throws SolverError when the dependent
// block is singular (re-pivot) and std::invalid_argument for bad input.
// Running out of iterations is reported with converged = false.
SolveResult newton_solve(const RotationSystem& rs, const CrossRatioVector& c0,
                         const std::array<int, 3>& dependent,
                         const SolveOptions& opts = {});

struct ContinuationPath {
  std::vector<int> free;  // |E| - 3 edge ids
  // Waypoints, each giving a value for every free edge (same order).
  std::vector<std::vector<double>> targets;
  double initial_step = 0.1;  // max-norm change of the free coordinates
  double min_step = 1e-6;
  double max_step = 1.0;
  double growth = 1.5;
  // Stop when a coordinate exceeds this magnitude.
  double blowup = 1e8;
};

// A path moving one edge to `target`; the three dependent edges are chosen
// by auto_pivot among the others and every remaining edge stays frozen.
ContinuationPath single_edge_path(const RotationSystem& rs,
                                  const CrossRatioVector& c, int edge,
                                  double target);

enum class Termination {
  kCompleted,
  kBoundary,    // a strict sign entry reached zero; last point non-strict
  kStalled,     // step fell below min_step without a sign boundary
  kBlowup,      // a coordinate exceeded the blow-up bound
};

std::string to_string(Termination t);

struct ContinuationStep {
  CrossRatioVector c;
  SolveReport report;
  std::array<int, 3> dependent{};
  int waypoint = 0;  // index of the waypoint being approached
};

struct ContinuationResult {
  std::vector<ContinuationStep> steps;  // steps[0] is the start point
  Termination termination = Termination::kCompleted;
  std::optional<Violation> boundary_hit;
  int repivots = 0;
};

// Predictor-corrector continuation. Each emitted point is a member except a
// terminal boundary point, which satisfies only the non-strict condition.
// When the dependent block becomes ill-conditioned, dependents are re-chosen
// among edges that the current segment does not move.
ContinuationResult continuation(const RotationSystem& rs,
                                const CrossRatioVector& c_start,
                                const ContinuationPath& path,
                                const SolveOptions& opts = {});

struct CsvColumn {
  std::string name;
  std::vector<double> values;  // one per continuation step
};

// Header: step, the free edges by name, residual, min_margin, then `extra`.
void write_continuation_csv(std::ostream& out, const RotationSystem& rs,
                            const ContinuationResult& result,
                            const std::vector<int>& free,
                            const std::vector<CsvColumn>& extra = {});

}  // namespace cpack
