#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "pam/errors.hpp"
#include "pam/experiments.hpp"
#include "pam/io.hpp"
#include "pam/oracle.hpp"
#include "pam/path.hpp"

namespace pamlab {

using namespace pam;

namespace {

constexpr double kOracleTolerance = 1e-10;

struct Common {
  double alpha = 2.0;
  int d = 1;
  int N = 2000;
  std::uint64_t trials = 1;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  std::string kernel = "uniform";
  std::string out_dir;
  std::string format = "jsonl";
  unsigned threads = 1;
  bool canonical = false;
  bool zero_field = false;
};

// Writes to `fallback` unless an output directory is set.
class Sink {
 public:
  Sink(const std::string& dir, const std::string& name, std::ostream& fallback) {
    if (dir.empty()) {
      stream_ = &fallback;
      return;
    }
    std::filesystem::create_directories(dir);
    file_ = std::make_unique<std::ofstream>(std::filesystem::path(dir) / name, std::ios::binary);
    if (!*file_) throw PreconditionError("cannot open " + (std::filesystem::path(dir) / name).string());
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void add_model_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--alpha", c.alpha, "Pareto tail index")->capture_default_str();
  cmd->add_option("--d", c.d, "lattice dimension (1..3)")->capture_default_str();
  cmd->add_option("--N", c.N, "time horizon")->capture_default_str();
  cmd->add_option("--kernel", c.kernel,
                  "step weights in lexicographic step order (d=1: left,hold,right; "
                  "d=2: (-1,0),(0,-1),(0,0),(0,1),(1,0)) or 'uniform'")
      ->capture_default_str();
}

void add_output_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out_dir, "output directory (default: stdout)");
  cmd->add_option("--format", c.format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--canonical", c.canonical, "omit timing fields for byte-wise comparison");
}

void add_seed(CLI::App* cmd, Common& c) { cmd->add_option("--seed", c.seed, "master seed")->required(); }

void check_model(const Common& c) {
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw PreconditionError("alpha must be a positive number");
  if (c.d < 1 || c.d > kMaxDim) throw PreconditionError("d must be in 1.." + std::to_string(kMaxDim));
  if (c.N < 1) throw PreconditionError("N must be at least 1");
}

FieldRealization make_field(const Common& c, std::uint64_t field_seed) {
  const BallIndex ball(c.d, c.N);
  if (c.zero_field) return FieldRealization::from_values(ball, std::vector<double>(ball.size(), 0.0), c.alpha);
  return sample_pareto_field(field_seed, c.alpha, ball);
}

int cmd_simulate(const Common& c, bool gap_only, std::uint64_t path_samples, std::ostream& out, std::ostream& err) {
  check_model(c);
  TrialConfig cfg;
  cfg.alpha = c.alpha;
  cfg.d = c.d;
  cfg.N = c.N;
  cfg.trials = c.trials;
  cfg.master_seed = c.seed;
  cfg.kernel = parse_kernel(c.kernel, c.d);
  cfg.threads = c.threads;
  cfg.endpoint_law = !gap_only;
  cfg.path_samples = path_samples;
  validate(cfg);

  const auto records = run_trials(cfg);
  {
    Sink sink(c.out_dir, c.format == "csv" ? "trials.csv" : "trials.jsonl", out);
    if (c.format == "csv") *sink << csv_header(c.d, c.canonical) << '\n';
    for (const auto& r : records) *sink << (c.format == "csv" ? to_csv(r, c.canonical) : to_json(r, c.canonical)) << '\n';
  }
  const BatchSummary summary = summarize(records);
  if (!c.out_dir.empty()) {
    Sink s(c.out_dir, "summary.json", out);
    *s << to_json(summary) << '\n';
    if (!gap_only) {
      Sink h(c.out_dir, "w_over_N_histogram.csv", out);
      write_histogram_csv(*h, w_over_N_histogram(records));
    }
    if (!gap_only && c.d == 1 && records.size() >= 100) {
      const auto ks = endpoint_distribution_test(records);
      Sink e(c.out_dir, "endpoint_test.json", out);
      JsonLine j;
      j.add("alpha", c.alpha).add("N", c.N).add("ks_distance", ks.ks_distance).add("p_value", ks.p_value);
      j.add("used", static_cast<std::uint64_t>(ks.used)).add("ties_excluded", static_cast<std::uint64_t>(ks.ties_excluded));
      j.add("threshold", ks.threshold).add("passed", ks.passed);
      *e << j.str() << '\n';
    }
  }
  err << "summary " << to_json(summary) << '\n';
  int code = kOk;
  for (const auto& r : records) {
    if (!r.ok()) {
      err << "trial " << r.trial << ": " << *r.error << '\n';
      code = kPartialFailure;
    }
  }
  return code;
}

int cmd_oracle_check(const Common& c, std::uint64_t instances, std::ostream& out, std::ostream& err) {
  check_model(c);
  if (instances < 1) throw PreconditionError("seeds must be at least 1");
  const std::uint64_t paths = path_count(c.d, c.N);
  if (paths > kMaxEnumeratedPaths) {
    throw CapacityError("path count (2d+1)^N = " + std::to_string(2 * c.d + 1) + "^" + std::to_string(c.N) + " = " +
                        std::to_string(paths) + " exceeds the enumeration cap " + std::to_string(kMaxEnumeratedPaths));
  }
  const WalkKernel kernel = parse_kernel(c.kernel, c.d);
  Sink sink(c.out_dir, "oracle.jsonl", out);
  bool all = true;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < instances; ++i) {
    const std::uint64_t seed = trial_seed(c.seed, i);
    const auto field = make_field(c, seed);
    const auto cmp = compare_dp_vs_oracle(field, kernel, c.N);
    const bool pass = cmp.max_relative() < kOracleTolerance;
    all = all && pass;
    worst = std::max(worst, cmp.max_relative());
    JsonLine j;
    j.add("instance", i).add("seed", seed).add("alpha", c.alpha).add("d", c.d).add("N", c.N);
    j.add("paths", cmp.path_count).add("max_log_p_rel", cmp.max_log_p_rel).add("log_u_rel", cmp.log_u_rel);
    j.add("pass", pass);
    *sink << j.str() << '\n';
  }
  err << "oracle-check: " << instances << " instances, worst relative discrepancy " << format_double(worst) << '\n';
  return all ? kOk : kInvariantBreach;
}

int cmd_path_stats(const Common& c, std::ostream& out, std::ostream& err) {
  check_model(c);
  if (c.trials < 1) throw PreconditionError("trials must be at least 1");
  if (c.samples < kMinEventSamples) {
    throw PreconditionError("samples must be at least " + std::to_string(kMinEventSamples));
  }
  if (c.N < 3) throw PreconditionError("N must be at least 3 for path statistics");
  const WalkKernel kernel = parse_kernel(c.kernel, c.d);
  Sink sink(c.out_dir, "path_stats.jsonl", out);
  std::vector<double> c_estimates;
  std::uint64_t violations = 0;
  for (std::uint64_t i = 0; i < c.trials; ++i) {
    const std::uint64_t seed = trial_seed(c.seed, i);
    const auto field = make_field(c, seed);
    const auto fronts = forward_recursion(field, kernel, c.N);
    const auto law = endpoint_law(fronts);
    const auto modified = modified_field_stats(field, c.N);
    const PathSampler sampler(fronts, field, kernel);
    const PathClassifier classifier(field, modified, law);
    const auto survey = survey_events(sampler, classifier, c.samples, path_seed(seed), c.threads);
    violations += survey.nesting_violations;

    JsonLine j;
    j.add("type", "field").add("trial", i).add("seed", seed).add("alpha", c.alpha).add("d", c.d).add("N", c.N);
    j.add("samples", survey.samples).add("w", law.w).add("z1", modified.z(1)).add("z2", modified.z(2));
    j.add("slack", classifier.slack());
    for (PathEvent e : kAllEvents) {
      const auto est = survey.estimate(e);
      const std::string name(event_name(e));
      j.add(name, est.estimate).add(name + "_ci", std::vector<double>{est.ci.lo, est.ci.hi});
    }
    const auto origin = survey.endpoint_origin_estimate();
    j.add("endpoint_origin", origin.estimate)
        .add("endpoint_origin_ci", std::vector<double>{origin.ci.lo, origin.ci.hi})
        .add("endpoint_origin_exact", law.p_of(LatticeSite::origin(c.d)));
    j.add("nesting_violations", survey.nesting_violations);
    *sink << j.str() << '\n';
    c_estimates.push_back(survey.estimate(PathEvent::kC).estimate);
  }
  JsonLine s;
  s.add("type", "summary").add("fields", c.trials).add("samples", c.samples);
  s.add("median_C", stats::median(c_estimates));
  s.add("min_C", *std::min_element(c_estimates.begin(), c_estimates.end()));
  s.add("nesting_violations", violations);
  *sink << s.str() << '\n';
  if (violations > 0) {
    err << "invariant breach: " << violations << " sampled paths violate event nesting\n";
    return kInvariantBreach;
  }
  return kOk;
}

int cmd_scenario_d(const Common& c, int n, double epsilon, std::optional<double> eta, int retries, std::ostream& out,
                   std::ostream& err) {
  if (c.d != 1) throw PreconditionError("the scenario is defined for d = 1");
  const WalkKernel kernel = parse_kernel(c.kernel, 1);
  const ScenarioRun run = run_scenario_with_retry(n, epsilon, eta, kernel, c.alpha, retries);
  const ScenarioField& s = run.scenario;
  const SwitchResult& r = run.result;

  const auto write_jsonl = [&](std::ostream& os) {
    JsonLine head;
    head.add("type", "scenario").add("n", n).add("epsilon", s.epsilon).add("eta", s.eta).add("alpha", s.alpha);
    head.add("m_alpha", s.m_alpha).add("x", s.x).add("y", s.y).add("xi_x", s.xi_x()).add("xi_y", s.xi_y());
    head.add("window", std::vector<double>{static_cast<double>(s.window_lo), static_cast<double>(s.window_hi)});
    os << head.str() << '\n';
    for (const auto& a : run.attempts) {
      os << JsonLine().add("type", "attempt").add("epsilon", a.epsilon).add("outcome", std::string_view(a.outcome)).str()
         << '\n';
    }
    for (const auto& cl : s.clauses) {
      os << JsonLine()
                .add("type", "clause")
                .add("name", std::string_view(cl.name))
                .add("passed", cl.passed)
                .add("detail", std::string_view(cl.detail))
                .str()
         << '\n';
    }
    for (const auto& row : r.scan) {
      JsonLine j;
      j.add("type", "scan").add("N", row.N).add("psi_gap", row.psi_gap).add("scaled_psi_gap", row.scaled_psi_gap);
      j.add("tie", row.tie);
      j.add("w", row.w).add("z1", row.z1).add("z2", row.z2).add("p_w", row.p_w);
      os << j.str() << '\n';
    }
    JsonLine res;
    res.add("type", "result").add("N_star", r.N_star).add("w", r.w).add("z1", r.z1).add("z2", r.z2);
    res.add("p_w", r.p_w).add("w_is_z2", r.w_is_z2).add("top_two_are_x_y", r.top_two_are_x_y);
    res.add("sign_change_at_ends", r.sign_change_at_ends).add("scaled_gap_increasing", r.scaled_gap_increasing);
    res.add("all_clauses", s.all_clauses_hold());
    os << res.str() << '\n';
  };

  if (c.out_dir.empty()) {
    if (c.format == "csv") {
      write_scan_csv(out, r);
    } else {
      write_jsonl(out);
    }
  } else {
    Sink j(c.out_dir, "scenario.jsonl", out);
    write_jsonl(*j);
    Sink t(c.out_dir, "scan.csv", out);
    write_scan_csv(*t, r);
  }
  err << "scenario-d: N* = " << r.N_star << ", w = " << r.w[0] << ", z1 = " << r.z1[0] << ", z2 = " << r.z2[0]
      << (r.w_is_z2 ? " (w = z2)" : " (w != z2)") << '\n';
  return kOk;
}

int cmd_snapshot(const Common& c, const std::string& what, std::ostream& out) {
  check_model(c);
  const WalkKernel kernel = parse_kernel(c.kernel, c.d);
  const auto field = make_field(c, trial_seed(c.seed, 0));
  Sink sink(c.out_dir, what + ".csv", out);
  if (what == "field") {
    write_field_csv(*sink, field);
  } else if (what == "law") {
    write_law_csv(*sink, endpoint_law(final_front(field, kernel, c.N)));
  } else if (what == "path") {
    const auto fronts = forward_recursion(field, kernel, c.N);
    CounterRng rng(path_seed(field.seed()));
    write_path_csv(*sink, PathSampler(fronts, field, kernel).sample(rng));
  } else {
    write_path_csv(*sink, viterbi_path(field, kernel, c.N));
  }
  return kOk;
}

// Flat key=value lines become --key value arguments placed after the
// subcommand. Keys also given on the command line are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read config file " + path);
  const auto given = [&](const std::string& flag) {
    return std::any_of(out.begin(), out.end(), [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "master_seed") key = "seed";
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(value);
  }
  if (out.empty()) return out;
  out.insert(out.begin() + 1, extra.begin(), extra.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pamlab: random walk in a heavy-tailed random potential"};
  app.require_subcommand(1);
  Common c;

  auto* simulate = app.add_subcommand("simulate", "disorder-averaged trials, one record per field");
  bool gap_only = false;
  std::uint64_t path_samples = 0;
  add_model_options(simulate, c);
  add_output_options(simulate, c);
  add_seed(simulate, c);
  simulate->add_option("--trials", c.trials, "number of fields")->capture_default_str();
  simulate->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
  simulate->add_option("--path-samples", path_samples, "per-trial event-C samples (0 = off)");
  simulate->add_flag("--gap-only", gap_only, "field statistics only, no DP");

  auto* oracle = app.add_subcommand("oracle-check", "DP against brute-force path enumeration");
  std::uint64_t instances = 20;
  add_model_options(oracle, c);
  add_output_options(oracle, c);
  add_seed(oracle, c);
  oracle->add_option("--seeds", instances, "number of seeded fields")->capture_default_str();
  oracle->add_flag("--zero-field", c.zero_field, "use xi = 0");

  auto* paths = app.add_subcommand("path-stats", "path-event probabilities under the polymer measure");
  add_model_options(paths, c);
  add_output_options(paths, c);
  add_seed(paths, c);
  paths->add_option("--trials", c.trials, "number of fields")->capture_default_str();
  paths->add_option("--samples", c.samples, "paths per field")->capture_default_str();
  paths->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
  paths->add_flag("--zero-field", c.zero_field, "use xi = 0 (bare walk)");

  auto* scenario = app.add_subcommand("scenario-d", "deterministic two-peak field forcing w = z2");
  int n = 400;
  double epsilon = 0.05;
  std::optional<double> eta;
  int retries = 4;
  add_model_options(scenario, c);
  add_output_options(scenario, c);
  scenario->add_option("--n", n, "scale of the construction")->capture_default_str();
  scenario->add_option("--epsilon", epsilon, "peak-window width")->capture_default_str();
  scenario->add_option("--eta", eta, "interior-sum margin (default (m_alpha + log(kappa(1)/kappa(0)))/2)");
  scenario->add_option("--retries", retries, "epsilon halvings on failure")->capture_default_str();

  auto* snapshot = app.add_subcommand("snapshot", "export one field, endpoint law, or path as CSV");
  std::string what = "field";
  add_model_options(snapshot, c);
  add_output_options(snapshot, c);
  add_seed(snapshot, c);
  snapshot->add_option("--what", what, "field, law, path or viterbi")
      ->check(CLI::IsMember({"field", "law", "path", "viterbi"}))
      ->capture_default_str();
  snapshot->add_flag("--zero-field", c.zero_field, "use xi = 0");

  std::string config_path;
  for (auto* cmd : {simulate, oracle, paths, scenario, snapshot}) {
    cmd->add_option("--config", config_path, "flat key=value file of option values (command-line flags win)");
  }

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(c, gap_only, path_samples, out, err);
    if (*oracle) return cmd_oracle_check(c, instances, out, err);
    if (*paths) return cmd_path_stats(c, out, err);
    if (*scenario) return cmd_scenario_d(c, n, epsilon, eta, retries, out, err);
    if (*snapshot) return cmd_snapshot(c, what, out);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "invariant breach: " << e.what() << '\n';
    return kInvariantBreach;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace pamlab
