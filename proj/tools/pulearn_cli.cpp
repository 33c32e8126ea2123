// pulearn: generate samples, learn partial isometries, compare and report.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pulearn/errors.hpp"
#include "pulearn/experiments.hpp"
#include "pulearn/io.hpp"
#include "pulearn/solver.hpp"

using namespace pulearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitNotConverged = 3;

std::vector<double> parse_list(const std::string& text, std::size_t expected,
                               const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InputError(std::string("--") + what + ": not a number: '" + cell + "'");
    }
  }
  if (expected && out.size() != expected) {
    throw InputError(std::string("--") + what + ": expected " +
                     std::to_string(expected) + " comma-separated values");
  }
  return out;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::string angles = "0.1,0.4,0.7";
  std::string x0 = "0.09205746178983236,0.5523447707389941,0.8285171561084912";
  int dim = 3;
  int steps = 1000;
  int n = 11;
  int d = 6;
  std::uint64_t seed = 1;
  bool flips = false;
  std::string out;
  std::string reference_out;
};

int cmd_gen(const GenArgs& a) {
  ObservationSample sample;
  std::optional<Matrix> reference;
  if (a.kind == "euler3") {
    const auto ang = parse_list(a.angles, 3, "angles");
    const auto x = parse_list(a.x0, 3, "x0");
    Vector x0(3);
    x0 << x[0], x[1], x[2];
    reference = euler_rotation(ang[0], ang[1], ang[2]);
    sample = generate_trajectory(*reference, x0, a.steps, a.seed, a.flips);
  } else if (a.kind == "random_orthogonal") {
    reference = random_orthogonal(a.dim, a.seed);
    Rng rng(a.seed + 1);
    const Vector x0 = random_unit_vector(a.dim, rng);
    sample = generate_trajectory(*reference, x0, a.steps, a.seed, a.flips);
  } else if (a.kind == "poly") {
    sample = generate_poly_sample(a.n, a.d, a.steps, a.seed);
  } else if (a.kind == "scalar") {
    sample = generate_scalar_sample(a.steps, a.seed);
  } else if (a.kind == "curve") {
    sample = generate_noisy_curve_sample(a.n, a.d, a.steps, a.seed);
  } else {
    throw InputError("gen: unknown kind '" + a.kind + "'");
  }
  write_sample_file(a.out, sample);
  if (!a.reference_out.empty()) {
    if (!reference) throw InputError("gen: kind '" + a.kind + "' has no reference matrix");
    std::ofstream os(a.reference_out, std::ios::binary);
    if (!os) throw Error("cannot open '" + a.reference_out + "' for writing");
    os << matrix_to_json(*reference);
  }
  std::printf("wrote %ld rows (n=%ld, D=%ld, seed %llu) to %s\n",
              static_cast<long>(sample.size()), static_cast<long>(sample.n()),
              static_cast<long>(sample.d()),
              static_cast<unsigned long long>(a.seed), a.out.c_str());
  return kExitOk;
}

// ---- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string input;
  std::string channel = "gram";
  int n = 0;
  int d = 0;
  int runs = 4;
  int rank = -1;
  int max_iters = 100;
  std::uint64_t seed = 0;
  std::string out;
  bool trace = false;
};

int cmd_solve(const SolveArgs& a) {
  ObservationSample sample = read_sample_file(a.input);
  const Index n = a.n > 0 ? a.n : sample.n();
  const Index d = a.d > 0 ? a.d : sample.d();
  if (n > sample.n() || d > sample.d()) {
    throw InputError("solve: --n/--d exceed the columns of the input");
  }
  sample = sample.truncated(n, d);

  SolverConfig cfg;
  cfg.channel = channel_from_string(a.channel);
  cfg.max_iterations = a.max_iters;
  cfg.num_runs = a.runs;
  if (a.rank >= 0) {
    // A single run at the requested rank.
    cfg.num_runs = a.rank + 1;
  }
  cfg.validate();

  Recovery rec;
  if (a.rank >= 0) {
    FidelityTensor s;
    GramPair grams;
    if (cfg.channel == Channel::gram) {
      auto [reg, g] = regularize(sample, Orthogonalization::inverse_sqrt);
      s = build_tensor_pairs(reg);
      grams = std::move(g);
    } else {
      s = build_tensor_pairs(sample);
      grams = identity_grams(sample);
    }
    RunOptions opts;
    opts.rank = a.rank;
    RunReport r = run(s, cfg, opts);
    rec.report.converged = r.converged();
    rec.report.fidelity = r.fidelity;
    rec.report.iterations = r.history;
    rec.report.solution = r.solution;
    rec.report.selected_run = 0;
    rec.report.runs.push_back(r);
    rec.grams = grams;
    if (r.solution.u.size() > 0) {
      rec.u = grams.rf.partialPivLu().solve(r.solution.u) * grams.rx;
    }
  } else {
    rec = recover_dynamics(sample, cfg.channel, cfg);
  }

  for (const std::string& w : rec.report.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  for (const RunReport& r : rec.report.runs) {
    std::cerr << "run rank " << r.rank << ": " << to_string(r.stop) << " after "
              << r.history.size() << " iterations, F = " << format_double(r.fidelity);
    if (!r.message.empty()) std::cerr << " (" << r.message << ")";
    std::cerr << "\n";
  }
  if (a.trace) {
    std::printf("%4s %24s %24s %24s\n", "iter", "mu", "F", "sum 1/lambda_G");
    for (const IterationRecord& h : rec.report.iterations) {
      std::printf("%4d %24.17g %24.17g %24.17g\n", h.iteration, h.mu,
                  h.fidelity, h.penalty);
    }
  }
  if (rec.u.size() == 0) {
    std::cerr << "error: no run produced a solution\n";
    return kExitDegenerate;
  }

  ModelFile m;
  m.d = d;
  m.n = n;
  m.channel = cfg.channel;
  m.u = rec.u;
  m.fidelity = rec.report.fidelity;
  m.converged = rec.report.converged;
  m.iterations = static_cast<int>(rec.report.iterations.size());
  m.seed = a.seed;
  m.history = rec.report.iterations;
  if (!a.out.empty()) write_model_file(a.out, m);
  std::cerr << (m.converged ? "converged" : "not converged") << ", F = "
            << format_double(m.fidelity) << "\n";
  return m.converged ? kExitOk : kExitNotConverged;
}

// ---- compare ----------------------------------------------------------------

int cmd_compare(const std::string& model, const std::string& reference,
                double tol) {
  const Matrix u = read_matrix_file(model);
  const Matrix ref = read_matrix_file(reference);
  if (u.rows() != ref.rows() || u.cols() != ref.cols()) {
    throw InputError("compare: shape mismatch (" + std::to_string(u.rows()) + "x" +
                     std::to_string(u.cols()) + " vs " + std::to_string(ref.rows()) +
                     "x" + std::to_string(ref.cols()) + ")");
  }
  const double diff = max_diff_up_to_sign(u, ref);
  std::printf("max diff (up to global sign) %s\n", format_double(diff).c_str());
  return diff < tol ? kExitOk : kExitNotConverged;
}

// ---- sweep ------------------------------------------------------------------

int cmd_sweep(int n, int m, std::uint64_t seed, int runs, const std::string& out) {
  SolverConfig cfg;
  cfg.num_runs = runs;
  const std::vector<SweepRow> rows = fidelity_sweep(n, m, seed, cfg);
  std::ofstream os = open_csv(out);
  os << "D,F_orig_over_M,gain,converged,F_orig,F_max,note\n";
  for (const SweepRow& r : rows) {
    os << r.d << ',' << format_double(r.ratio) << ',' << format_double(r.gain)
       << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.f_orig) << ','
       << format_double(r.f_max) << ',' << r.note << '\n';
  }
  std::printf("wrote %zu rows to %s\n", rows.size(), out.c_str());
  return kExitOk;
}

// ---- interp -----------------------------------------------------------------

// Piecewise-linear interpolation through the sample, sorted by x.
double sample_value(const std::vector<std::pair<double, double>>& pts, double y) {
  if (y <= pts.front().first) return pts.front().second;
  if (y >= pts.back().first) return pts.back().second;
  auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(y, -1e300));
  const auto& [x1, f1] = *it;
  const auto& [x0, f0] = *(it - 1);
  return x1 == x0 ? f1 : f0 + (f1 - f0) * (y - x0) / (x1 - x0);
}

int cmd_interp(const std::string& input, int n, int d, int grid,
               std::uint64_t seed, const std::string& exact,
               const std::string& out) {
  const ObservationSample sample = read_sample_file(input);
  if (sample.n() != 1 || sample.d() != 1) {
    throw InputError("interp: input must have one x and one f column");
  }
  if (grid < 2) throw InputError("interp: --grid must be at least 2");
  if (exact != "sample" && exact != "square") {
    throw InputError("interp: --exact must be 'sample' or 'square'");
  }
  SolverConfig cfg;
  const InterpolationModel model(sample.x.col(0), sample.f.col(0),
                                 sample.weights, n, d, cfg, seed);
  std::vector<std::pair<double, double>> pts;
  for (Index l = 0; l < sample.size(); ++l) pts.emplace_back(sample.x(l, 0), sample.f(l, 0));
  std::sort(pts.begin(), pts.end());

  const double lo = pts.front().first;
  const double hi = pts.back().first;
  std::ofstream os = open_csv(out);
  os << "x,f_exact,f_RN,f_LS,f_maxP,P_f,P_max\n";
  for (int i = 0; i < grid; ++i) {
    const double y = lo + (hi - lo) * i / (grid - 1);
    const InterpolationPoint p = model.evaluate(y);
    const double fe = exact == "square" ? y * y : sample_value(pts, y);
    os << format_double(y) << ',' << format_double(fe) << ','
       << format_double(p.f_rn) << ',' << format_double(p.f_ls) << ','
       << format_double(p.f_max_p) << ',' << format_double(p.p_at_f) << ','
       << format_double(p.p_max) << '\n';
  }
  std::cerr << (model.report().converged ? "converged" : "not converged")
            << ", F = " << format_double(model.report().fidelity) << "\n";
  std::printf("wrote %d rows to %s\n", grid, out.c_str());
  return model.report().converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn partially unitary mappings from observation samples"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write a sample CSV");
  g->add_option("kind", gen.kind, "euler3 | random_orthogonal | poly | scalar | curve")
      ->required();
  g->add_option("--angles", gen.angles, "phi,theta,psi for euler3");
  g->add_option("--x0", gen.x0, "initial state for euler3");
  g->add_option("--dim", gen.dim, "dimension for random_orthogonal");
  g->add_option("--steps,--points", gen.steps, "number of records");
  g->add_option("--n", gen.n, "x dimension for poly/curve");
  g->add_option("--d", gen.d, "f dimension for poly/curve");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_flag("--flips", gen.flips, "random +-1 phase flips (trajectories)");
  g->add_option("--out", gen.out, "output CSV")->required();
  g->add_option("--reference-out", gen.reference_out, "write the generating matrix");

  SolveArgs solve_args;
  auto* s = app.add_subcommand("solve", "learn u from a sample");
  s->add_option("--input", solve_args.input, "sample CSV")->required();
  s->add_option("--channel", solve_args.channel, "gram | unit")
      ->check(CLI::IsMember({"gram", "unit"}));
  s->add_option("--n", solve_args.n, "use the first n x-columns");
  s->add_option("--d", solve_args.d, "use the first d f-columns");
  s->add_option("--runs", solve_args.runs, "eigenstate ranks to try");
  s->add_option("--rank", solve_args.rank, "single run at this eigenstate rank");
  s->add_option("--max-iters", solve_args.max_iters, "iteration limit per run");
  s->add_option("--seed", solve_args.seed, "seed recorded in the model");
  s->add_option("--out", solve_args.out, "model JSON");
  s->add_flag("--trace", solve_args.trace, "print per-iteration diagnostics");

  std::string cmp_model, cmp_ref;
  double cmp_tol = 1e-12;
  auto* c = app.add_subcommand("compare", "max element difference up to sign");
  c->add_option("--model", cmp_model, "model JSON")->required();
  c->add_option("--reference", cmp_ref, "reference matrix JSON")->required();
  c->add_option("--tol", cmp_tol, "pass threshold");

  int sw_n = 20, sw_m = 1000, sw_runs = 4;
  std::uint64_t sw_seed = 1;
  std::string sw_out;
  auto* w = app.add_subcommand("sweep", "F_max vs F_orig for D = 1..n");
  w->add_option("--n", sw_n, "input dimension");
  w->add_option("--m", sw_m, "number of records");
  w->add_option("--seed", sw_seed, "RNG seed");
  w->add_option("--runs", sw_runs, "eigenstate ranks to try");
  w->add_option("--out", sw_out, "output CSV")->required();

  std::string ip_input, ip_out, ip_exact = "sample";
  int ip_n = 6, ip_d = 6, ip_grid = 201;
  std::uint64_t ip_seed = 1;
  auto* ip = app.add_subcommand("interp", "scalar interpolation evaluators");
  ip->add_option("--input", ip_input, "sample CSV with columns x0, f0")->required();
  ip->add_option("--n", ip_n, "x basis size");
  ip->add_option("--d", ip_d, "f basis size");
  ip->add_option("--grid", ip_grid, "number of query points");
  ip->add_option("--seed", ip_seed, "phase flip seed");
  ip->add_option("--exact", ip_exact, "sample | square");
  ip->add_option("--out", ip_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_solve(solve_args);
    if (*c) return cmd_compare(cmp_model, cmp_ref, cmp_tol);
    if (*w) return cmd_sweep(sw_n, sw_m, sw_seed, sw_runs, sw_out);
    if (*ip) return cmd_interp(ip_input, ip_n, ip_d, ip_grid, ip_seed, ip_exact, ip_out);
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const InputError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
