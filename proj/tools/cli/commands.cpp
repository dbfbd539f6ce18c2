#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli/subspace_file.hpp"
#include "subavg/blindid.hpp"
#include "subavg/errors.hpp"
#include "subavg/karcher.hpp"

namespace subavg::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  std::string rule = "hs";
  std::string step = "backtrack";
  double grad_tol = 1e-8;
  int max_iter = 500;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rule", rule, "CG coefficient rule")
        ->check(CLI::IsMember({"hs", "pr", "fr", "dy", "star"}))
        ->capture_default_str();
    cmd->add_option("--step", step, "step size rule")
        ->check(CLI::IsMember({"backtrack", "newton"}))
        ->capture_default_str();
    cmd->add_option("--grad-tol", grad_tol, "gradient norm tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "iteration limit")
        ->check(CLI::Range(1, 1 << 30))
        ->capture_default_str();
  }

  CGConfig config() const {
    CGConfig c;
    c.direction_rule = *parse_direction_rule(rule);
    c.step_rule = *parse_step_rule(step);
    c.grad_tol = grad_tol;
    c.max_iter = max_iter;
    c.validate();
    return c;
  }
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0;
    const char* first = item.data();
    const char* last = item.data() + item.size();
    const auto res = std::from_chars(first, last, v);
    if (item.empty() || res.ec != std::errc() || res.ptr != last) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "' as a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(std::string(flag) + ": empty list");
  return values;
}

int exit_code(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged:
      return kExitOk;
    case SolverStatus::MaxIterations:
      return kExitMaxIter;
    case SolverStatus::CutLocus:
      return kExitCutLocus;
    case SolverStatus::LineSearchFailed:
      return kExitLineSearch;
  }
  return kExitUsage;
}

std::string trace_csv(const CGTrace& trace) {
  std::string out = "iteration,cost,gradnorm,stepsize\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.iteration) + "," + format_double(r.cost) + "," +
           format_double(r.grad_norm) + "," + format_double(r.step) + "\n";
  }
  return out;
}

std::vector<StiefelBasis> stiefel_bases(const SubspaceFile& file) {
  std::vector<StiefelBasis> bases;
  bases.reserve(file.bases.size());
  for (const auto& b : file.bases) bases.push_back(to_stiefel(b));
  return bases;
}

int cmd_karcher_mean(const std::string& in, std::string out_path, std::string trace_path,
                     bool repair, const SolverFlags& flags, std::ostream& out) {
  const SubspaceFile file = read_subspace_file(in, repair);
  const KarcherProblem problem(stiefel_bases(file));
  const KarcherResult result = karcher_mean(problem, std::nullopt, flags.config());

  SubspaceFile mean{file.n, file.m, {gr::basis_from_projector(result.mean).matrix()}};
  if (trace_path.empty()) trace_path = out_path + ".trace.csv";
  write_text_file(out_path, format_subspace_file(mean));
  write_text_file(trace_path, trace_csv(result.trace));

  out << "status " << to_string(result.status) << "\n";
  if (!result.trace.records.empty()) {
    const auto& last = result.trace.records.back();
    out << "iterations " << last.iteration << "\n"
        << "cost " << format_double(last.cost) << "\n"
        << "gradnorm " << format_double(last.grad_norm) << "\n";
  }
  if (!result.converged()) out << "message " << result.message << "\n";
  if (result.offending_index) out << "offending_index " << *result.offending_index << "\n";
  return exit_code(result.status);
}

int cmd_distance(const std::string& in, bool repair, std::ostream& out) {
  const SubspaceFile file = read_subspace_file(in, repair);
  if (file.bases.size() != 2) {
    throw UsageError("distance: the input must hold exactly 2 bases, found " +
                     std::to_string(file.bases.size()));
  }
  const GrassmannPoint p = gr::projector_from_basis(to_stiefel(file.bases[0]));
  const GrassmannPoint q = gr::projector_from_basis(to_stiefel(file.bases[1]));
  const RealVector angles = gr::principal_angles(p, q);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", gr::distance(p, q));
  out << "distance " << buf << "\n" << "angles";
  for (Index k = 0; k < angles.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g", angles(k));
    out << " " << buf;
  }
  out << "\n";
  return kExitOk;
}

struct ExperimentFlags {
  Index n = 5;
  std::string eps_list = "0.5";
  std::string nest_list = "10";
  int trials = 100;
  Index samples = 10000;
  std::uint64_t seed = 0;
  std::string out_path;
  unsigned threads = 1;
};

std::string results_csv(const std::vector<blindid::TrialRow>& rows) {
  std::string out = "trial,sweep_param,sweep_value,amari_karcher,amari_euclid,status\n";
  for (const auto& r : rows) {
    out += std::to_string(r.trial) + "," + std::string(blindid::to_string(r.parameter)) + "," +
           format_double(r.sweep_value) + "," + (r.ok() ? format_double(r.amari_karcher) : "") +
           "," + (r.ok() ? format_double(r.amari_euclid) : "") + "," + r.status + "\n";
  }
  return out;
}

int cmd_bi_experiment(const ExperimentFlags& f, const SolverFlags& flags, std::ostream& out) {
  const std::vector<double> eps = parse_list(f.eps_list, "--eps-list");
  const std::vector<double> nest = parse_list(f.nest_list, "--nest-list");
  if (eps.size() > 1 && nest.size() > 1) {
    throw UsageError("bi-experiment: only one of --eps-list and --nest-list may hold several values");
  }

  blindid::MixingExperiment base;
  base.n = f.n;
  base.trials = f.trials;
  base.samples_per_trial = f.samples;
  base.rng_seed = f.seed;
  base.noise_level = eps.front();
  if (nest.front() < 1 || nest.front() != std::floor(nest.front())) {
    throw UsageError("--nest-list: values must be positive integers");
  }
  base.n_est = static_cast<int>(nest.front());

  blindid::Sweep sweep;
  if (eps.size() > 1) {
    sweep = {blindid::SweepParameter::NoiseLevel, eps};
  } else {
    sweep = {blindid::SweepParameter::Estimations, nest};
  }

  const CGConfig config = flags.config();
  const auto rows = blindid::run_experiment(base, sweep, config, std::max(1u, f.threads));
  write_text_file(f.out_path, results_csv(rows));

  const auto skipped = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); });
  out << "rows " << rows.size() << "\n" << "skipped " << skipped << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Karcher means of complex subspaces and the blind identification experiment",
               "subavg"};
  app.require_subcommand(1);

  std::string in;
  std::string out_path;
  std::string trace_path;
  bool repair = false;
  SolverFlags mean_flags;
  auto* mean_cmd = app.add_subcommand("karcher-mean", "Karcher mean of the subspaces in a file");
  mean_cmd->add_option("--in", in, "input subspace file")->required();
  mean_cmd->add_option("--out", out_path, "output subspace file")->required();
  mean_cmd->add_option("--trace", trace_path, "trace CSV (default: <out>.trace.csv)");
  mean_cmd->add_flag("--repair", repair, "re-orthonormalize bases that fail the check");
  mean_flags.attach(mean_cmd);

  std::string dist_in;
  bool dist_repair = false;
  auto* dist_cmd = app.add_subcommand("distance", "Geodesic distance between two subspaces");
  dist_cmd->add_option("--in", dist_in, "subspace file holding two bases")->required();
  dist_cmd->add_flag("--repair", dist_repair, "re-orthonormalize bases that fail the check");

  ExperimentFlags exp;
  SolverFlags exp_flags;
  auto* exp_cmd = app.add_subcommand("bi-experiment", "Blind identification sweep");
  exp_cmd->add_option("--n", exp.n, "sources and sensors")->capture_default_str();
  exp_cmd->add_option("--eps-list", exp.eps_list, "noise levels, comma separated")
      ->capture_default_str();
  exp_cmd->add_option("--nest-list", exp.nest_list, "estimations per trial, comma separated")
      ->capture_default_str();
  exp_cmd->add_option("--trials", exp.trials, "trials per sweep value")->capture_default_str();
  exp_cmd->add_option("--samples", exp.samples, "samples per estimation")->capture_default_str();
  exp_cmd->add_option("--seed", exp.seed, "random seed")->capture_default_str();
  exp_cmd->add_option("--out", exp.out_path, "results CSV")->required();
  exp_cmd->add_option("--threads", exp.threads, "worker threads")->capture_default_str();
  exp_flags.attach(exp_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mean_cmd) return cmd_karcher_mean(in, out_path, trace_path, repair, mean_flags, out);
    if (*dist_cmd) return cmd_distance(dist_in, dist_repair, out);
    if (*exp_cmd) return cmd_bi_experiment(exp, exp_flags, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CutLocus& e) {
    err << "error: " << e.what() << "\n";
    return kExitCutLocus;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace subavg::cli
