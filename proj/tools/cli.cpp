#include "cli.hpp"

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpack/crossratio.hpp"
#include "cpack/develop.hpp"
#include "cpack/error.hpp"
#include "cpack/io.hpp"
#include "cpack/render.hpp"
#include "cpack/ribbon.hpp"
#include "cpack/solver.hpp"

namespace cpack::cli {
namespace {

using Num = std::string (*)(double);
const Num num = format_number;

struct Args {
  std::string graph, vector, dump, output;
  double tol = kDevelopMembershipTol;
  double zero_tol = kDefaultZeroTol;
  bool json = false;
  // solve
  std::string pivot = "auto";
  SolveOptions solve;
  // develop
  int radius = 1;
  bool allow_deep = false;
  int threads = 1;
  // probe
  std::string edge;
  double to = 40.0;
  int steps = 80;
  // render
  std::string center = "0.5,0";
  Viewport vp;
};

std::string ViolationText(const std::optional<Violation>& v) {
  if (!v) return "none";
  return std::string(1, v->entry) + "_" + std::to_string(v->j) + " = " +
         num(v->value);
}

int EdgeId(const RotationSystem& rs, const std::string& name) {
  const auto e = rs.find_edge(name);
  if (!e) throw FormatError("unknown edge '" + name + "'");
  return *e;
}

class Runner {
 public:
  Runner(const Args& a, std::ostream& out, std::ostream& err)
      : a_(a), out_(out), err_(err) {}

  int ValidateGraph() {
    const RotationSystem rs = load_graph(a_.graph);
    Emit("valid\ngenus " + std::to_string(rs.genus()) + "\nvalence " +
         std::to_string(rs.valence()) + "\nedges " +
         std::to_string(rs.num_edges()) + "\nfaces " +
         std::to_string(rs.num_faces()) + "\n");
    return kOk;
  }

  int Symmetric() {
    const RotationSystem rs = load_graph(a_.graph);
    EmitVector(rs, symmetric_point(rs), "");
    return kOk;
  }

  int Check() {
    const RotationSystem rs = load_graph(a_.graph);
    const CrossRatioVector c = load_vector(a_.vector, rs);
    const Membership mem = membership(rs, c, a_.tol, a_.zero_tol);
    const ConditionReport nonstrict = check_nonstrict(rs, c, a_.zero_tol);
    const ConditionReport& r = mem.report;
    Emit("residual " + num(r.residual_norm) + "\nstrict " +
         (r.strict_ok ? "ok" : "fail") + "\nnonstrict " +
         (nonstrict.nonstrict_ok ? "ok" : "fail") + "\nfirst_violation " +
         ViolationText(r.first_violation) + "\nmin_margin " +
         num(r.min_margin) + "\nmember " + (mem.member ? "yes" : "no") + "\n");
    return mem.member ? kOk : kMembership;
  }

  int Solve() {
    const RotationSystem rs = load_graph(a_.graph);
    const CrossRatioVector c0 = load_vector(a_.vector, rs);
    std::array<int, 3> dep{};
    if (a_.pivot == "auto") {
      dep = auto_pivot(rs, c0, {}, a_.solve);
    } else {
      std::vector<std::string> names;
      std::stringstream ss(a_.pivot);
      for (std::string name; std::getline(ss, name, ',');) names.push_back(name);
      if (names.size() != 3) {
        throw FormatError("--pivot needs 'auto' or three comma-separated edges");
      }
      for (int k = 0; k < 3; ++k) dep[k] = EdgeId(rs, names[k]);
    }
    const SolveResult res = newton_solve(rs, c0, dep, a_.solve);
    const SolveReport& r = res.report;
    std::string head = "# converged " + std::string(r.converged ? "yes" : "no") +
                       "\n# iterations " + std::to_string(r.iterations) +
                       "\n# residual " + num(r.residual) + "\n# condition " +
                       num(r.condition) + "\n# dependent " +
                       rs.edge_name(dep[0]) + "," + rs.edge_name(dep[1]) + "," +
                       rs.edge_name(dep[2]) + "\n# member " +
                       (r.member ? "yes" : "no") + "\n# boundary " +
                       ViolationText(r.boundary_hit) + "\n";
    EmitVector(rs, res.c, head);
    if (!r.converged) return kSolver;
    return r.member ? kOk : kMembership;
  }

  int Develop() {
    const RotationSystem rs = load_graph(a_.graph);
    const CrossRatioVector c = load_vector(a_.vector, rs);
    DevelopOptions opts;
    opts.radius = a_.radius;
    opts.allow_deep = a_.allow_deep;
    opts.threads = a_.threads;
    opts.membership_tol = a_.tol;
    Emit(format_dump(to_dump(develop(rs, c, opts))));
    return kOk;
  }

  int Holonomy() {
    const RotationSystem rs = load_graph(a_.graph);
    const CrossRatioVector c = load_vector(a_.vector, rs);
    HolonomyOptions opts;
    opts.membership_tol = a_.tol;
    const HolonomyRep rep = holonomy(rs, c, opts);
    std::string s;
    for (int e = 0; e < rs.num_edges(); ++e) {
      s += "rho(" + rs.edge_name(e) + ") = " + debug_string(rep.generators[e]) +
           "\n";
    }
    const auto faces_res = face_relation_residuals(rep, rs);
    const FaceTrace ft = faces(rs);
    for (std::size_t f = 0; f < faces_res.size(); ++f) {
      s += "face " + std::to_string(f) + " (";
      for (int k = 0; k < 3; ++k) {
        s += (k ? " " : "") + rs.token(ft.faces[f].darts[k]);
      }
      s += ") residual " + num(faces_res[f]) + "\n";
    }
    s += "vertex_transport = " + debug_string(rep.vertex_transport) + "\n";
    s += "vertex_transport_error " +
         num(rep.vertex_transport.sl2_distance(-MoebiusMap::Identity())) + "\n";
    for (int e = 0; e < rs.num_edges(); ++e) {
      s += "trace " + rs.edge_name(e) + " " + num(trace_abs(rep.generators[e])) +
           "\n";
    }
    const TraceProbe probe = trace_probe(rep);
    s += "probe " + num(probe.value) + " " + probe.word + "\n";
    Emit(s);
    return kOk;
  }

  int Probe() {
    const RotationSystem rs = load_graph(a_.graph);
    const CrossRatioVector c = load_vector(a_.vector, rs);
    const int edge = EdgeId(rs, a_.edge);
    if (a_.steps <= 0) throw FormatError("--steps must be positive");
    ContinuationPath path = single_edge_path(rs, c, edge, a_.to);
    const std::vector<double> last = path.targets.back();
    path.targets.clear();
    std::size_t slot = 0;
    while (path.free[slot] != edge) ++slot;
    const double from = c[edge];
    for (int k = 1; k <= a_.steps; ++k) {
      std::vector<double> t = last;
      t[slot] = k == a_.steps ? a_.to : from + (a_.to - from) * k / a_.steps;
      path.targets.push_back(std::move(t));
    }
    path.initial_step = std::abs(a_.to - from) / a_.steps;
    path.max_step = std::max(path.initial_step, path.min_step);
    const ContinuationResult res = continuation(rs, c, path, a_.solve);

    CsvColumn trace{"trace_probe", {}}, readback{"readback", {}};
    for (const auto& step : res.steps) {
      HolonomyOptions h;
      h.membership_tol.reset();
      trace.values.push_back(trace_probe(holonomy(rs, step.c, h)).value);
      readback.values.push_back(shrinking_circle_readback(rs, step.c, edge));
    }
    std::ostringstream csv;
    write_continuation_csv(csv, rs, res, path.free, {trace, readback});
    Emit(csv.str());
    err_ << "termination " << to_string(res.termination);
    if (res.boundary_hit) err_ << " at " << ViolationText(res.boundary_hit);
    err_ << "\n";
    switch (res.termination) {
      case Termination::kCompleted:
      case Termination::kBoundary:
        return kOk;
      default:
        return kSolver;
    }
  }

  int Render() {
    Viewport vp = a_.vp;
    const auto comma = a_.center.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("center");
      vp.center = {std::stod(a_.center.substr(0, comma)),
                   std::stod(a_.center.substr(comma + 1))};
    } catch (const std::exception&) {
      throw FormatError("--center expects 'x,y', got '" + a_.center + "'");
    }
    Emit(render_svg(parse_dump(read_file(a_.dump)), vp));
    return kOk;
  }

 private:
  void Emit(const std::string& text) {
    if (a_.output.empty() || a_.output == "-") {
      out_ << text;
    } else {
      write_file(a_.output, text);
    }
  }

  void EmitVector(const RotationSystem& rs, const CrossRatioVector& c,
                  const std::string& head) {
    // JSON has no comments; the header goes to the diagnostics stream then.
    if (a_.json) {
      err_ << head;
      Emit(format_vector_json(c, rs));
    } else {
      Emit(head + format_vector(c, rs));
    }
  }

  const Args& a_;
  std::ostream& out_;
  std::ostream& err_;
};

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return kFormat;
    case ErrorKind::kMembership: return kMembership;
    case ErrorKind::kSolver: return kSolver;
    case ErrorKind::kDegeneracy: return kDegeneracy;
  }
  return kUnexpected;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  Args a;
  CLI::App app("Circle packings of one-vertex triangulations", "cpack");
  app.require_subcommand(1);

  auto output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", a.output, "Output file (default stdout)");
  };
  auto graph = [&](CLI::App* sub) {
    sub->add_option("graph", a.graph, "Graph file")->required();
  };
  auto vec = [&](CLI::App* sub) {
    sub->add_option("vector", a.vector, "Cross ratio vector file")->required();
  };
  auto solver_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", a.solve.tol_residual, "Residual tolerance")
        ->capture_default_str();
    sub->add_option("--max-iter", a.solve.max_iter, "Newton iterations")
        ->capture_default_str();
    sub->add_option("--damping", a.solve.damping, "Initial Newton step")
        ->capture_default_str();
    sub->add_option("--fd-step", a.solve.fd_step, "Finite-difference step")
        ->capture_default_str();
    sub->add_option("--zero-tol", a.solve.zero_tol, "Sign tolerance")
        ->capture_default_str();
    sub->add_flag("--analytic", a.solve.analytic_jacobian,
                  "Use the exact Jacobian");
  };
  auto membership_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", a.tol, "Membership residual tolerance")
        ->capture_default_str();
  };

  auto* validate_cmd = app.add_subcommand("validate-graph", "Check a graph file");
  graph(validate_cmd);
  output(validate_cmd);

  auto* symmetric_cmd =
      app.add_subcommand("symmetric", "Write the symmetric vector");
  graph(symmetric_cmd);
  symmetric_cmd->add_flag("--json", a.json, "Write JSON");
  output(symmetric_cmd);

  auto* check_cmd = app.add_subcommand("check", "Membership report");
  graph(check_cmd);
  vec(check_cmd);
  membership_tol(check_cmd);
  check_cmd->add_option("--zero-tol", a.zero_tol, "Sign tolerance")
      ->capture_default_str();
  output(check_cmd);

  auto* solve_cmd = app.add_subcommand("solve", "Newton correction");
  graph(solve_cmd);
  vec(solve_cmd);
  solve_cmd->add_option("--pivot", a.pivot, "auto or e1,e2,e3")
      ->capture_default_str();
  solver_flags(solve_cmd);
  solve_cmd->add_flag("--json", a.json, "Write JSON");
  output(solve_cmd);

  auto* develop_cmd = app.add_subcommand("develop", "Dump a developed complex");
  graph(develop_cmd);
  vec(develop_cmd);
  develop_cmd->add_option("--radius", a.radius, "Dual-graph radius")
      ->capture_default_str();
  develop_cmd->add_flag("--allow-deep", a.allow_deep,
                        "Allow radii above the default cap");
  develop_cmd->add_option("--threads", a.threads, "Frontier threads")
      ->capture_default_str();
  membership_tol(develop_cmd);
  output(develop_cmd);

  auto* holonomy_cmd = app.add_subcommand("holonomy", "Holonomy generators");
  graph(holonomy_cmd);
  vec(holonomy_cmd);
  membership_tol(holonomy_cmd);
  output(holonomy_cmd);

  auto* probe_cmd = app.add_subcommand("probe", "Continuation experiment (CSV)");
  graph(probe_cmd);
  vec(probe_cmd);
  probe_cmd->add_option("--edge", a.edge, "Edge to drive")->required();
  probe_cmd->add_option("--to", a.to, "Target value")->capture_default_str();
  probe_cmd->add_option("--steps", a.steps, "Number of waypoints")
      ->capture_default_str();
  solver_flags(probe_cmd);
  output(probe_cmd);

  auto* render_cmd = app.add_subcommand("render", "SVG of a dump");
  render_cmd->add_option("dump", a.dump, "Dump file")->required();
  render_cmd->add_option("--center", a.center, "View center x,y")
      ->capture_default_str();
  render_cmd->add_option("--half-width", a.vp.half_width, "View half width")
      ->capture_default_str();
  render_cmd->add_option("--px", a.vp.px, "Image size in pixels")
      ->capture_default_str();
  render_cmd->add_option("--stroke", a.vp.stroke, "Stroke width in pixels")
      ->capture_default_str();
  output(render_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kFormat;
  }

  Runner runner(a, out, err);
  const std::vector<std::pair<CLI::App*, std::function<int()>>> table = {
      {validate_cmd, [&] { return runner.ValidateGraph(); }},
      {symmetric_cmd, [&] { return runner.Symmetric(); }},
      {check_cmd, [&] { return runner.Check(); }},
      {solve_cmd, [&] { return runner.Solve(); }},
      {develop_cmd, [&] { return runner.Develop(); }},
      {holonomy_cmd, [&] { return runner.Holonomy(); }},
      {probe_cmd, [&] { return runner.Probe(); }},
      {render_cmd, [&] { return runner.Render(); }},
  };
  try {
    for (const auto& [cmd, fn] : table) {
      if (cmd->parsed()) return fn();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUnexpected;
}

}  // namespace cpack::cli
