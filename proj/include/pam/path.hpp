#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "pam/field.hpp"
#include "pam/polymer.hpp"
#include "pam/rng.hpp"
#include "pam/stats.hpp"
#include "pam/walk_kernel.hpp"

namespace pam {

/// A trajectory S_0..S_N with S_0 = 0 and nearest-neighbour-or-hold steps.
class PathSample {
 public:
  /// Validates the step constraint and computes log[e^{H_N(S)} P(S)].
  PathSample(std::vector<LatticeSite> steps, const FieldRealization& field, const WalkKernel& kernel);

  int length() const { return static_cast<int>(steps_.size()) - 1; }
  std::span<const LatticeSite> steps() const { return steps_; }
  const LatticeSite& at(int i) const { return steps_[static_cast<std::size_t>(i)]; }
  const LatticeSite& endpoint() const { return steps_.back(); }
  double log_weight() const { return log_weight_; }

  /// l_N(x): number of i in 1..N with S_i = x.
  int local_time(const LatticeSite& x) const;
  /// Sites with positive local time and their counts, in site order.
  std::span<const std::pair<LatticeSite, int>> local_times() const { return local_times_; }
  /// First i >= 0 with S_i = x.
  std::optional<int> first_passage(const LatticeSite& x) const;

 private:
  std::vector<LatticeSite> steps_;
  std::vector<std::pair<LatticeSite, int>> local_times_;
  double log_weight_ = 0.0;
};

/// Exact sampler for the polymer measure: draws S_N from the endpoint law,
/// then S_{n-1} given S_n with probability proportional to
/// u_{n-1}(y) kappa(S_n - y).
class PathSampler {
 public:
  PathSampler(const FrontHistory& fronts, const FieldRealization& field, const WalkKernel& kernel);

  PathSample sample(CounterRng& rng) const;
  int horizon() const { return fronts_->horizon(); }

 private:
  const FrontHistory* fronts_;
  const FieldRealization* field_;
  const WalkKernel* kernel_;
  std::vector<double> endpoint_cdf_;
};

PathSample sample_path(const FrontHistory& fronts, const FieldRealization& field, const WalkKernel& kernel,
                       CounterRng& rng);

/// Maximum-weight path by max-plus recursion with backpointers. Ties go to
/// the lexicographically smallest endpoint and, backwards, to the first
/// predecessor in kernel step order.
PathSample viterbi_path(const FieldRealization& field, const WalkKernel& kernel, int N);

/// Allowed excess length of the approach to w:
/// (log log N)^{2/alpha} N^{1-1/alpha} if alpha > 1, (log N)^{1+2/alpha} if alpha <= 1.
double approach_slack(int N, double alpha);

struct EventFlags {
  bool in_C = false;
  std::array<bool, 2> in_A{};
  std::array<bool, 2> in_W{};
  std::array<bool, 2> in_tildeW{};
  std::array<bool, 2> in_D{};
  std::array<bool, 2> in_K{};
  std::size_t beta_N = 0;  // rank of the highest-potential visited site
  std::optional<int> tau_w;
};

/// Evaluates the path events for one (field, N, law). Build once per field;
/// classify() is O(N log N).
class PathClassifier {
 public:
  PathClassifier(const FieldRealization& field, const ModifiedFieldStats& modified, const EndpointLaw& law);

  EventFlags classify(const PathSample& path) const;

  int horizon() const { return N_; }
  double slack() const { return slack_; }
  const LatticeSite& w() const { return w_; }
  const LatticeSite& z(int i) const { return z_[static_cast<std::size_t>(i - 1)]; }
  std::size_t J(int i) const { return J_[static_cast<std::size_t>(i - 1)]; }

 private:
  const FieldRealization* field_;
  OrderStats order_;
  int N_;
  double slack_;
  LatticeSite w_;
  std::array<LatticeSite, 2> z_;
  std::array<std::size_t, 2> J_{};
};

EventFlags classify_path(const PathSample& path, const FieldRealization& field, const ModifiedFieldStats& modified,
                         const EndpointLaw& law);

enum class PathEvent { kC, kA1, kA2, kW1, kW2, kTildeW1, kTildeW2, kD1, kD2, kK1, kK2 };

std::string_view event_name(PathEvent e);
std::optional<PathEvent> parse_event(std::string_view name);
bool event_holds(const EventFlags& flags, PathEvent e);
inline constexpr std::array<PathEvent, 11> kAllEvents = {
    PathEvent::kC,  PathEvent::kA1, PathEvent::kA2,      PathEvent::kW1,      PathEvent::kW2, PathEvent::kTildeW1,
    PathEvent::kTildeW2, PathEvent::kD1, PathEvent::kD2, PathEvent::kK1, PathEvent::kK2};

struct EventEstimate {
  double estimate = 0.0;
  stats::Interval ci;
  std::uint64_t successes = 0;
  std::uint64_t samples = 0;
};

using PathPredicate = std::function<bool(const PathSample&)>;

inline constexpr std::uint64_t kMinEventSamples = 100;
/// Samples per RNG sub-stream; fixed so estimates do not depend on thread count.
inline constexpr std::uint64_t kSamplesPerStream = 1024;

/// Monte Carlo probability of an event under the polymer measure with a 95%
/// Wilson interval. Sample block b uses stream derive_seed(seed, b).
EventEstimate estimate_event_probability(const PathSampler& sampler, const PathPredicate& event,
                                         std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

/// Every event (plus the endpoint-at-origin event) counted on the same samples.
struct EventSurvey {
  std::uint64_t samples = 0;
  std::array<std::uint64_t, kAllEvents.size()> counts{};
  std::uint64_t endpoint_origin = 0;
  std::uint64_t nesting_violations = 0;  // paths breaking tildeW => W => A

  EventEstimate estimate(PathEvent e) const;
  EventEstimate endpoint_origin_estimate() const;
};

EventSurvey survey_events(const PathSampler& sampler, const PathClassifier& classifier, std::uint64_t samples,
                          std::uint64_t seed, unsigned threads = 1);

/// CSV with columns step,x1[,x2,x3].
void write_path_csv(std::ostream& out, const PathSample& path);

}  // namespace pam
