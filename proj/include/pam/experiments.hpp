#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pam/field.hpp"
#include "pam/path.hpp"
#include "pam/polymer.hpp"
#include "pam/stats.hpp"
#include "pam/walk_kernel.hpp"

namespace pam {

struct TrialConfig {
  double alpha = 2.0;
  int d = 1;
  int N = 100;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  WalkKernel kernel = uniform_kernel(1);
  unsigned threads = 1;
  bool endpoint_law = true;        // false: field and gap statistics only, no DP
  std::uint64_t path_samples = 0;  // > 0: per-trial event-C estimate
  std::size_t gap_k = 3;           // number of X(k) - X(k+1) gaps recorded
};

/// Throws PreconditionError naming the first invalid parameter.
void validate(const TrialConfig& config);

/// Field seed of trial i. Fields of the same trial index nest across N.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);
/// Seed of the path-sampling stream attached to a field seed.
std::uint64_t path_seed(std::uint64_t field_seed);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  int d = 1;
  int N = 0;
  bool has_law = false;
  double p_w = 0.0;
  double p_z1 = 0.0;
  double p_z2 = 0.0;
  double two_point_mass = 0.0;
  LatticeSite w;
  LatticeSite z1;
  LatticeSite z2;
  std::vector<double> w_over_N;
  bool w_equals_z1 = false;
  bool w_in_top2 = false;
  bool ties_detected = false;
  GapReport gaps;
  std::optional<ComparatorResult> comparator;  // d = 1 only
  std::optional<EventEstimate> event_C;
  double runtime_ms = 0.0;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
  bool comparator_agrees() const { return comparator && comparator->predicted == w; }
};

/// One JSON object with a fixed field order. Canonical output omits runtime_ms.
std::string to_json(const TrialRecord& record, bool canonical);

/// CSV form of the record: scalar columns only, w/N by coordinate.
std::string csv_header(int d, bool canonical);
std::string to_csv(const TrialRecord& record, bool canonical);

TrialRecord run_trial(const TrialConfig& config, std::uint64_t trial);

/// Records in trial-index order, independent of the thread count. Capacity
/// failures are stored in the record's error field; other errors propagate.
std::vector<TrialRecord> run_trials(const TrialConfig& config);

/// Weak-limit CDF of w/N in d = 1: (1+x)^(a+1)/2 on [-1,0], 1-(1-x)^(a+1)/2 on [0,1].
double endpoint_limit_cdf(double x, double alpha);
/// c_alpha = (alpha+1)/2 in d = 1.
double endpoint_limit_constant(double alpha);

struct EndpointTestReport {
  double ks_distance = 0.0;
  double p_value = 0.0;
  std::size_t used = 0;
  std::size_t ties_excluded = 0;
  std::size_t failed_excluded = 0;
  double threshold = 0.05;
  bool passed = false;
};

/// KS distance of w/N against the limit law. Needs at least 100 records with a
/// common (alpha, d, N) and d = 1; records with ties are excluded and counted.
EndpointTestReport endpoint_distribution_test(const std::vector<TrialRecord>& records, double threshold = 0.05);

struct FrequencyReport {
  std::size_t trials = 0;
  std::size_t w_equals_z1 = 0;
  std::size_t w_in_top2 = 0;
  double z1_fraction = 0.0;
  double top2_fraction = 0.0;
  stats::Interval z1_ci;
  stats::Interval top2_ci;
};

FrequencyReport w_equals_z1_frequency(const std::vector<TrialRecord>& records);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::uint64_t count = 0;
};

inline constexpr int kHistogramBins = 50;

/// First coordinate of w/N in uniform bins on [-1, 1]; x = 1 falls in the last bin.
std::vector<HistogramBin> w_over_N_histogram(const std::vector<TrialRecord>& records, int bins = kHistogramBins);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);

struct BatchSummary {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double median_p_w = 0.0;
  double mean_two_point_mass = 0.0;
  double median_p_z1 = 0.0;
  double median_n_times_z12 = 0.0;
  double comparator_agreement = 0.0;  // NaN unless d = 1
  double median_event_C = 0.0;        // NaN unless path samples were drawn
};

BatchSummary summarize(const std::vector<TrialRecord>& records);
std::string to_json(const BatchSummary& summary);

// Deterministic two-peak field on which w_N jumps to the second-best site.

struct ClauseCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioField {
  int n = 0;
  double epsilon = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double m_alpha = 0.0;
  int x = 0;
  int y = 0;
  int window_lo = 0;  // -7n
  int window_hi = 0;  // floor((1+eps) 7n)
  FieldRealization field = FieldRealization::constant(BallIndex(), 1.0);
  std::vector<ClauseCheck> clauses;
  std::optional<int> N_star;

  bool all_clauses_hold() const;
  double xi_x() const { return field(LatticeSite{x}); }
  double xi_y() const { return field(LatticeSite{y}); }
};

/// Mean of the Pareto(alpha) law, alpha/(alpha-1).
double pareto_mean(double alpha);
/// (m_alpha + log(kappa(1)/kappa(0))) / 2.
double default_eta(double alpha, const WalkKernel& kernel);

/// Builds the field and rechecks every defining clause on the realized values.
/// Throws PreconditionError naming the failing inequality.
ScenarioField build_two_peak_scenario(int n, double epsilon, std::optional<double> eta, const WalkKernel& kernel,
                                        double alpha);

/// Clause recheck on an arbitrary field over the window.
std::vector<ClauseCheck> check_scenario_clauses(const ScenarioField& scenario);

struct ScanRow {
  int N = 0;
  double psi_gap = 0.0;         // psi_N(y) - psi_N(x)
  double scaled_psi_gap = 0.0;  // (N+1)(psi_N(y) - psi_N(x))
  bool tie = false;             // scaled gap zero up to rounding
  LatticeSite w;
  LatticeSite z1;
  LatticeSite z2;
  double p_w = 0.0;
};

struct SwitchResult {
  int N_star = 0;
  LatticeSite w;
  LatticeSite z1;
  LatticeSite z2;
  double p_w = 0.0;
  bool w_is_z2 = false;
  bool scaled_gap_increasing = false;
  bool top_two_are_x_y = false;     // {z1, z2} = {x, y} at every scanned N
  bool sign_change_at_ends = false;  // gap < 0 at ceil(11n/2), > 0 at floor(13n/2)
  std::vector<ScanRow> scan;         // N from ceil(11n/2) to floor(13n/2)
};

/// Runs the DP across the window and returns the last N with psi_N(y) < psi_N(x),
/// provided a later N in the window has psi_N(y) > psi_N(x). Gaps within
/// rounding of zero count as ties and have neither sign. Throws
/// ScenarioError with the scenario parameters otherwise.
SwitchResult detect_switch(const ScenarioField& scenario, const WalkKernel& kernel);

struct SwitchAttempt {
  double epsilon = 0.0;
  std::string outcome;
};

struct ScenarioRun {
  ScenarioField scenario;
  SwitchResult result;
  std::vector<SwitchAttempt> attempts;
};

/// Builds and scans; on clause failure or a missing sign change halves epsilon,
/// up to `retries` times.
ScenarioRun run_scenario_with_retry(int n, double epsilon, std::optional<double> eta, const WalkKernel& kernel,
                                    double alpha, int retries = 4);

void write_scan_csv(std::ostream& out, const SwitchResult& result);

}  // namespace pam
