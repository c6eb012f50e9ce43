#include "pam/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <new>
#include <ostream>
#include <sstream>

#include "pam/errors.hpp"
#include "pam/io.hpp"
#include "pam/parallel.hpp"
#include "pam/rng.hpp"

namespace pam {

namespace {

constexpr std::uint64_t kPathStream = 0x70617468ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> coords_over(const LatticeSite& x, int N) {
  std::vector<double> out;
  for (int c : x.coords()) out.push_back(static_cast<double>(c) / N);
  return out;
}

}  // namespace

void validate(const TrialConfig& c) {
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw PreconditionError("alpha must be a positive number");
  if (c.d < 1 || c.d > kMaxDim) throw PreconditionError("d must be in 1.." + std::to_string(kMaxDim));
  if (c.N < 1) throw PreconditionError("N must be at least 1");
  if (c.trials < 1) throw PreconditionError("trials must be at least 1");
  if (c.kernel.dim() != c.d) throw PreconditionError("kernel dimension does not match d");
  if (c.gap_k < 1) throw PreconditionError("gap_k must be at least 1");
  if (c.path_samples > 0) {
    if (!c.endpoint_law) throw PreconditionError("path samples need the endpoint law");
    if (c.path_samples < kMinEventSamples) {
      throw PreconditionError("samples must be at least " + std::to_string(kMinEventSamples));
    }
    if (c.N < 3) throw PreconditionError("N must be at least 3 for path statistics");
  }
  if (BallIndex::cardinality(c.d, c.N) > BallIndex::kMaxSites) {
    throw PreconditionError("N exceeds the memory budget: |B_N| > " + std::to_string(BallIndex::kMaxSites));
  }
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) { return derive_seed(master_seed, trial); }

std::uint64_t path_seed(std::uint64_t field_seed) { return derive_seed(field_seed, kPathStream); }

TrialRecord run_trial(const TrialConfig& c, std::uint64_t trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord r;
  r.trial = trial;
  r.seed = trial_seed(c.master_seed, trial);
  r.alpha = c.alpha;
  r.d = c.d;
  r.N = c.N;
  try {
    const FieldRealization field = sample_pareto_field(r.seed, c.alpha, BallIndex(c.d, c.N));
    const ModifiedFieldStats modified = modified_field_stats(field, c.N);
    const OrderStats order = order_statistics(field, c.N);
    r.z1 = modified.z(1);
    r.z2 = modified.z(2);
    r.gaps = gap_diagnostics(order, modified, std::min(c.gap_k, order.size() - 1), c.alpha);
    r.ties_detected = modified.ties_detected();
    if (c.endpoint_law) {
      std::optional<FrontHistory> fronts;
      EndpointLaw law;
      if (c.path_samples > 0) {
        fronts.emplace(forward_recursion(field, c.kernel, c.N));
        law = endpoint_law(*fronts);
      } else {
        law = endpoint_law(final_front(field, c.kernel, c.N));
      }
      const LocalizationMass mass = localization_mass(law, modified);
      r.has_law = true;
      r.p_w = mass.p_w;
      r.p_z1 = mass.p_z1;
      r.p_z2 = mass.p_z2;
      r.two_point_mass = mass.two_point_mass;
      r.w = law.w;
      r.w_over_N = coords_over(law.w, c.N);
      r.w_equals_z1 = mass.w_equals_z1;
      r.w_in_top2 = mass.w_in_top2;
      r.ties_detected = r.ties_detected || law.ties_detected;
      if (c.d == 1) r.comparator = comparator_1d(field, c.N, c.kernel);
      if (c.path_samples > 0) {
        const PathSampler sampler(*fronts, field, c.kernel);
        const PathClassifier classifier(field, modified, law);
        r.event_C = estimate_event_probability(
            sampler, [&](const PathSample& p) { return classifier.classify(p).in_C; }, c.path_samples,
            path_seed(r.seed));
      }
    }
  } catch (const CapacityError& e) {
    r.error = e.what();
  } catch (const std::bad_alloc&) {
    r.error = "out of memory";
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<TrialRecord> run_trials(const TrialConfig& config) {
  validate(config);
  std::vector<TrialRecord> records(config.trials);
  parallel_for(records.size(), config.threads, [&](std::size_t i) { records[i] = run_trial(config, i); });
  return records;
}

std::string to_json(const TrialRecord& r, bool canonical) {
  JsonLine j;
  j.add("trial", r.trial).add("seed", r.seed).add("alpha", r.alpha).add("d", r.d).add("N", r.N);
  if (r.has_law) {
    j.add("p_w", r.p_w).add("p_z1", r.p_z1).add("p_z2", r.p_z2).add("two_point_mass", r.two_point_mass);
    j.add("w", r.w);
  } else {
    j.add_null("p_w").add_null("p_z1").add_null("p_z2").add_null("two_point_mass").add_null("w");
  }
  if (r.ok()) {
    j.add("z1", r.z1).add("z2", r.z2);
  } else {
    j.add_null("z1").add_null("z2");
  }
  if (r.has_law) {
    j.add("w_over_N", r.w_over_N).add("w_equals_z1", r.w_equals_z1).add("w_in_top2", r.w_in_top2);
  } else {
    j.add_null("w_over_N").add_null("w_equals_z1").add_null("w_in_top2");
  }
  j.add("ties_detected", r.ties_detected);
  j.add("gap_x", r.gaps.x_gaps).add("gap_x_scaled", r.gaps.x_gaps_scaled);
  j.add("gap_z12", r.gaps.z12).add("gap_z13", r.gaps.z13);
  j.add("gap_z12_scaled", r.gaps.z12_scaled).add("gap_z13_scaled", r.gaps.z13_scaled);
  j.add("N_times_gap_z12", r.gaps.n_times_z12);
  if (r.comparator) {
    j.add("comparator_choice", r.comparator->choice).add("comparator_agrees", r.comparator_agrees());
  } else {
    j.add_null("comparator_choice").add_null("comparator_agrees");
  }
  if (r.event_C) {
    j.add("event_C_estimate", r.event_C->estimate)
        .add("event_C_ci_lo", r.event_C->ci.lo)
        .add("event_C_ci_hi", r.event_C->ci.hi)
        .add("event_C_samples", r.event_C->samples);
  } else {
    j.add_null("event_C_estimate").add_null("event_C_ci_lo").add_null("event_C_ci_hi").add_null("event_C_samples");
  }
  if (r.error) {
    j.add("error", std::string_view(*r.error));
  } else {
    j.add_null("error");
  }
  if (!canonical) j.add("runtime_ms", r.runtime_ms);
  return j.str();
}

std::string csv_header(int d, bool canonical) {
  std::string h = "trial,seed,alpha,d,N,p_w,p_z1,p_z2,two_point_mass";
  for (int i = 1; i <= d; ++i) h += ",w_x" + std::to_string(i);
  for (int i = 1; i <= d; ++i) h += ",w_over_N_x" + std::to_string(i);
  h += ",w_equals_z1,w_in_top2,ties_detected,gap_z12,gap_z12_scaled,N_times_gap_z12,comparator_agrees,"
       "event_C_estimate,error";
  if (!canonical) h += ",runtime_ms";
  return h;
}

std::string to_csv(const TrialRecord& r, bool canonical) {
  std::ostringstream os;
  const auto num = [&](bool present, double v) { os << ',' << (present ? format_double(v) : ""); };
  const auto flag = [&](bool present, bool v) { os << ',' << (present ? (v ? "1" : "0") : ""); };
  os << r.trial << ',' << r.seed << ',' << format_double(r.alpha) << ',' << r.d << ',' << r.N;
  num(r.has_law, r.p_w);
  num(r.has_law, r.p_z1);
  num(r.has_law, r.p_z2);
  num(r.has_law, r.two_point_mass);
  for (int i = 0; i < r.d; ++i) os << ',' << (r.has_law ? std::to_string(r.w[i]) : "");
  for (int i = 0; i < r.d; ++i) num(r.has_law, r.has_law ? r.w_over_N[static_cast<std::size_t>(i)] : 0.0);
  flag(r.has_law, r.w_equals_z1);
  flag(r.has_law, r.w_in_top2);
  flag(true, r.ties_detected);
  num(r.ok(), r.gaps.z12);
  num(r.ok(), r.gaps.z12_scaled);
  num(r.ok(), r.gaps.n_times_z12);
  flag(r.comparator.has_value(), r.comparator_agrees());
  num(r.event_C.has_value(), r.event_C ? r.event_C->estimate : 0.0);
  os << ',';
  if (r.error) {
    std::string e = *r.error;
    std::replace(e.begin(), e.end(), ',', ';');
    std::replace(e.begin(), e.end(), '\n', ' ');
    os << e;
  }
  if (!canonical) os << ',' << format_double(r.runtime_ms);
  return os.str();
}

double endpoint_limit_constant(double alpha) { return (alpha + 1.0) / 2.0; }

double endpoint_limit_cdf(double x, double alpha) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x <= 0.0) return std::pow(1.0 + x, alpha + 1.0) / 2.0;
  return 1.0 - std::pow(1.0 - x, alpha + 1.0) / 2.0;
}

namespace {

void check_common_parameters(const std::vector<TrialRecord>& records, std::size_t minimum) {
  if (records.size() < minimum) {
    throw PreconditionError("need at least " + std::to_string(minimum) + " records, got " +
                            std::to_string(records.size()));
  }
  for (const auto& r : records) {
    if (r.alpha != records.front().alpha || r.d != records.front().d || r.N != records.front().N) {
      throw PreconditionError("mixed-parameter records: (alpha, d, N) differ across the batch");
    }
  }
}

}  // namespace

EndpointTestReport endpoint_distribution_test(const std::vector<TrialRecord>& records, double threshold) {
  check_common_parameters(records, 100);
  if (records.front().d != 1) throw PreconditionError("the analytic endpoint law is implemented for d = 1");
  EndpointTestReport report;
  report.threshold = threshold;
  std::vector<double> samples;
  for (const auto& r : records) {
    if (!r.ok() || !r.has_law) {
      ++report.failed_excluded;
    } else if (r.ties_detected) {
      ++report.ties_excluded;
    } else {
      samples.push_back(r.w_over_N[0]);
    }
  }
  if (samples.empty()) throw PreconditionError("no usable records for the endpoint test");
  const double alpha = records.front().alpha;
  report.used = samples.size();
  report.ks_distance = stats::ks_distance(samples, [alpha](double x) { return endpoint_limit_cdf(x, alpha); });
  report.p_value = stats::ks_pvalue(report.ks_distance, report.used);
  report.passed = report.ks_distance < threshold;
  return report;
}

FrequencyReport w_equals_z1_frequency(const std::vector<TrialRecord>& records) {
  check_common_parameters(records, 100);
  FrequencyReport f;
  for (const auto& r : records) {
    if (!r.ok() || !r.has_law) continue;
    ++f.trials;
    f.w_equals_z1 += r.w_equals_z1 ? 1 : 0;
    f.w_in_top2 += r.w_in_top2 ? 1 : 0;
  }
  if (f.trials == 0) throw PreconditionError("no usable records for the frequency report");
  f.z1_fraction = static_cast<double>(f.w_equals_z1) / static_cast<double>(f.trials);
  f.top2_fraction = static_cast<double>(f.w_in_top2) / static_cast<double>(f.trials);
  f.z1_ci = stats::wilson_interval(f.w_equals_z1, f.trials);
  f.top2_ci = stats::wilson_interval(f.w_in_top2, f.trials);
  return f;
}

std::vector<HistogramBin> w_over_N_histogram(const std::vector<TrialRecord>& records, int bins) {
  if (bins < 1) throw PreconditionError("histogram needs at least one bin");
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    out[static_cast<std::size_t>(k)].left = -1.0 + 2.0 * k / bins;
    out[static_cast<std::size_t>(k)].right = -1.0 + 2.0 * (k + 1) / bins;
  }
  for (const auto& r : records) {
    if (!r.ok() || !r.has_law) continue;
    const double v = r.w_over_N[0];
    const int k = std::clamp(static_cast<int>(std::floor((v + 1.0) / 2.0 * bins)), 0, bins - 1);
    ++out[static_cast<std::size_t>(k)].count;
  }
  return out;
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_left,bin_right,count\n";
  for (const auto& b : bins) out << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << '\n';
}

BatchSummary summarize(const std::vector<TrialRecord>& records) {
  BatchSummary s;
  s.trials = records.size();
  std::vector<double> p_w, p_z1, two, gap, event;
  std::size_t compared = 0, agreed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++s.failures;
      continue;
    }
    gap.push_back(r.gaps.n_times_z12);
    if (!r.has_law) continue;
    p_w.push_back(r.p_w);
    p_z1.push_back(r.p_z1);
    two.push_back(r.two_point_mass);
    if (r.comparator) {
      ++compared;
      agreed += r.comparator_agrees() ? 1 : 0;
    }
    if (r.event_C) event.push_back(r.event_C->estimate);
  }
  s.median_p_w = p_w.empty() ? kNaN : stats::median(p_w);
  s.median_p_z1 = p_z1.empty() ? kNaN : stats::median(p_z1);
  s.mean_two_point_mass = two.empty() ? kNaN : stats::mean(two);
  s.median_n_times_z12 = gap.empty() ? kNaN : stats::median(gap);
  s.comparator_agreement = compared == 0 ? kNaN : static_cast<double>(agreed) / static_cast<double>(compared);
  s.median_event_C = event.empty() ? kNaN : stats::median(event);
  return s;
}

std::string to_json(const BatchSummary& s) {
  JsonLine j;
  j.add("trials", static_cast<std::uint64_t>(s.trials)).add("failures", static_cast<std::uint64_t>(s.failures));
  j.add("median_p_w", s.median_p_w).add("median_p_z1", s.median_p_z1);
  j.add("mean_two_point_mass", s.mean_two_point_mass).add("median_N_times_gap_z12", s.median_n_times_z12);
  j.add("comparator_agreement", s.comparator_agreement).add("median_event_C", s.median_event_C);
  return j.str();
}

// ---------------------------------------------------------------------------
// Two-peak scenario

bool ScenarioField::all_clauses_hold() const {
  return !clauses.empty() && std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.passed; });
}

double pareto_mean(double alpha) {
  if (!(alpha > 1.0)) throw PreconditionError("alpha must exceed 1");
  return alpha / (alpha - 1.0);
}

double default_eta(double alpha, const WalkKernel& kernel) {
  return (pareto_mean(alpha) + std::log(kernel.prob(LatticeSite{1}) / kernel.hold())) / 2.0;
}

namespace {

std::string fmt(double v) { return format_double(v); }

// Unique site in [lo, hi] with value strictly inside (a, b).
ClauseCheck unique_peak_clause(const ScenarioField& s, const char* name, int lo, int hi, double a, double b,
                               int expected) {
  ClauseCheck c{name, false, {}};
  int count = 0;
  int found = 0;
  for (int i = lo; i <= hi; ++i) {
    const double v = s.field(LatticeSite{i});
    if (v > a && v < b) {
      ++count;
      found = i;
    }
  }
  c.passed = count == 1 && found == expected;
  c.detail = std::to_string(count) + " site(s) in [" + std::to_string(lo) + "," + std::to_string(hi) +
             "] with value in (" + fmt(a) + "," + fmt(b) + ")";
  return c;
}

}  // namespace

std::vector<ClauseCheck> check_scenario_clauses(const ScenarioField& s) {
  const double root = std::pow(static_cast<double>(s.n), 1.0 / s.alpha);
  const double eps = s.epsilon;
  std::vector<ClauseCheck> out;
  out.push_back(unique_peak_clause(s, "unique x", s.n, static_cast<int>(std::floor((1 + eps) * s.n)), root,
                                   (1 + eps) * root, s.x));
  out.push_back(unique_peak_clause(s, "unique y", 3 * s.n, static_cast<int>(std::floor((1 + eps) * 3 * s.n)),
                                   5.0 / 3.0 * root, (1 + eps) * 5.0 / 3.0 * root, s.y));

  ClauseCheck low{"others below n^(1/alpha)/2", true, {}};
  double highest = -std::numeric_limits<double>::infinity();
  for (int i = s.window_lo; i <= s.window_hi; ++i) {
    if (i == s.x || i == s.y) continue;
    highest = std::max(highest, s.field(LatticeSite{i}));
  }
  low.passed = highest < root / 2.0;
  low.detail = "max " + fmt(highest) + " vs bound " + fmt(root / 2.0);
  out.push_back(low);

  ClauseCheck sum{"interior sum", false, {}};
  double total = 0.0;
  for (int i = s.x + 1; i <= s.y - 1; ++i) total += s.field(LatticeSite{i});
  const double bound = (s.m_alpha - s.eta) * (s.y - s.x);
  sum.passed = total > bound;
  sum.detail = "sum " + fmt(total) + " vs (m_alpha - eta)(y - x) = " + fmt(bound);
  out.push_back(sum);
  return out;
}

ScenarioField build_two_peak_scenario(int n, double epsilon, std::optional<double> eta, const WalkKernel& kernel,
                                        double alpha) {
  if (kernel.dim() != 1) throw PreconditionError("the scenario is defined for d = 1");
  if (!(alpha > 1.0)) throw PreconditionError("alpha must exceed 1");
  if (n < 1) throw PreconditionError("n must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
  const double m = pareto_mean(alpha);
  const double log_ratio = std::log(kernel.prob(LatticeSite{1}) / kernel.hold());
  if (!(log_ratio > -m)) {
    throw PreconditionError("log(kappa(1)/kappa(0)) > -m_alpha fails: " + fmt(log_ratio) + " <= " + fmt(-m));
  }
  const double root = std::pow(static_cast<double>(n), 1.0 / alpha);
  if (!(m < root / 2.0)) {
    throw PreconditionError("m_alpha < n^(1/alpha)/2 fails: " + fmt(m) + " >= " + fmt(root / 2.0));
  }
  ScenarioField s;
  s.n = n;
  s.epsilon = epsilon;
  s.eta = eta ? *eta : default_eta(alpha, kernel);
  if (!(s.eta > 0.0)) throw PreconditionError("eta must be positive");
  s.alpha = alpha;
  s.m_alpha = m;
  s.x = n;
  s.y = 3 * n;
  s.window_lo = -7 * n;
  s.window_hi = static_cast<int>(std::floor((1 + epsilon) * 7 * n));

  const BallIndex ball(1, s.window_hi);
  std::vector<double> xi(ball.size(), 1.0);
  const double interior = std::min(m, std::nextafter(root / 2.0, 0.0));
  for (int i = s.x + 1; i < s.y; ++i) xi[ball.index_of(LatticeSite{i})] = interior;
  xi[ball.index_of(LatticeSite{s.x})] = (1 + epsilon / 2) * root;
  xi[ball.index_of(LatticeSite{s.y})] = (1 + epsilon / 2) * 5.0 / 3.0 * root;
  s.field = FieldRealization::from_values(ball, std::move(xi), alpha);
  s.clauses = check_scenario_clauses(s);
  return s;
}

SwitchResult detect_switch(const ScenarioField& s, const WalkKernel& kernel) {
  const int lo = (11 * s.n + 1) / 2;  // ceil(11n/2)
  const int hi = (13 * s.n) / 2;      // floor(13n/2)
  if (hi > s.field.radius()) throw PreconditionError("scenario field does not cover the scan window");
  const LatticeSite x{s.x};
  const LatticeSite y{s.y};
  const double xi_x = s.xi_x();
  const double xi_y = s.xi_y();

  const double tie_tolerance = 1e-9 * std::max(s.x * xi_x, s.y * xi_y);

  SwitchResult result;
  result.top_two_are_x_y = true;
  LogWeightFront front = initial_front(1, s.field.fingerprint());
  for (int N = 1; N <= hi; ++N) {
    front = advance_front(front, s.field, kernel);
    if (N < lo) continue;
    const EndpointLaw law = endpoint_law(front);
    const ModifiedFieldStats modified = modified_field_stats(s.field, N);
    ScanRow row;
    row.N = N;
    row.psi_gap = xi_y * modified_weight(N, s.y) - xi_x * modified_weight(N, s.x);
    row.scaled_psi_gap = (N + 1) * row.psi_gap;
    row.tie = std::abs(row.scaled_psi_gap) <= tie_tolerance;
    row.w = law.w;
    row.z1 = modified.z(1);
    row.z2 = modified.z(2);
    row.p_w = law.p_of(law.w);
    const bool top = (row.z1 == x && row.z2 == y) || (row.z1 == y && row.z2 == x);
    result.top_two_are_x_y = result.top_two_are_x_y && top;
    result.scan.push_back(row);
  }
  const auto negative = [](const ScanRow& row) { return !row.tie && row.psi_gap < 0; };
  const auto positive = [](const ScanRow& row) { return !row.tie && row.psi_gap > 0; };
  result.sign_change_at_ends = negative(result.scan.front()) && positive(result.scan.back());
  result.scaled_gap_increasing = true;
  for (std::size_t i = 1; i < result.scan.size(); ++i) {
    result.scaled_gap_increasing =
        result.scaled_gap_increasing && result.scan[i].scaled_psi_gap > result.scan[i - 1].scaled_psi_gap;
  }

  // Last negative gap that is followed by a positive one, strictly inside the window.
  std::optional<std::size_t> star;
  bool positive_after = false;
  for (std::size_t i = result.scan.size(); i-- > 0;) {
    const ScanRow& row = result.scan[i];
    if (positive(row)) positive_after = true;
    if (negative(row)) {
      if (positive_after) star = i;
      break;
    }
  }
  const auto describe = [&] {
    std::ostringstream os;
    os << "n=" << s.n << " epsilon=" << fmt(s.epsilon) << " eta=" << fmt(s.eta) << " alpha=" << fmt(s.alpha)
       << " xi(x)=" << fmt(xi_x) << " xi(y)=" << fmt(xi_y);
    return os.str();
  };
  if (!star || 2 * result.scan[*star].N <= 11 * s.n || 2 * result.scan[*star].N >= 13 * s.n) {
    throw ScenarioError("no sign change of psi_N(y) - psi_N(x) inside (11n/2, 13n/2): " + describe());
  }
  if (!result.top_two_are_x_y) {
    throw ScenarioError("{z1, z2} differs from {x, y} somewhere in the window: " + describe());
  }
  const ScanRow& row = result.scan[*star];
  result.N_star = row.N;
  result.w = row.w;
  result.z1 = row.z1;
  result.z2 = row.z2;
  result.p_w = row.p_w;
  result.w_is_z2 = row.w == row.z2;
  return result;
}

ScenarioRun run_scenario_with_retry(int n, double epsilon, std::optional<double> eta, const WalkKernel& kernel,
                                    double alpha, int retries) {
  ScenarioRun run;
  double eps = epsilon;
  for (int attempt = 0; attempt <= retries; ++attempt, eps /= 2) {
    ScenarioField s = build_two_peak_scenario(n, eps, eta, kernel, alpha);
    if (!s.all_clauses_hold()) {
      std::string failed;
      for (const auto& c : s.clauses) {
        if (!c.passed) failed += (failed.empty() ? "" : "; ") + c.name + " (" + c.detail + ")";
      }
      run.attempts.push_back({eps, "clause failure: " + failed});
      continue;
    }
    try {
      SwitchResult r = detect_switch(s, kernel);
      s.N_star = r.N_star;
      run.attempts.push_back({eps, "switch at N=" + std::to_string(r.N_star)});
      run.scenario = std::move(s);
      run.result = std::move(r);
      return run;
    } catch (const ScenarioError& e) {
      run.attempts.push_back({eps, e.what()});
    }
  }
  std::string log;
  for (const auto& a : run.attempts) log += "\n  epsilon=" + fmt(a.epsilon) + ": " + a.outcome;
  throw ScenarioError("no switch found after " + std::to_string(retries) + " epsilon halvings" + log);
}

void write_scan_csv(std::ostream& out, const SwitchResult& result) {
  out << "N,psi_gap,scaled_psi_gap,tie,w,z1,z2,p_w\n";
  for (const auto& r : result.scan) {
    out << r.N << ',' << format_double(r.psi_gap) << ',' << format_double(r.scaled_psi_gap) << ',' << (r.tie ? 1 : 0)
        << ',' << r.w[0] << ',' << r.z1[0] << ',' << r.z2[0] << ',' << format_double(r.p_w) << '\n';
  }
}

}  // namespace pam
