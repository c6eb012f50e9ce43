#include "pam/path.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pam/errors.hpp"
#include "pam/logmath.hpp"
#include "pam/parallel.hpp"

namespace pam {

PathSample::PathSample(std::vector<LatticeSite> steps, const FieldRealization& field, const WalkKernel& kernel)
    : steps_(std::move(steps)) {
  if (steps_.empty()) throw PreconditionError("a path needs at least S_0");
  if (!(steps_.front() == LatticeSite::origin(field.dim()))) throw PreconditionError("paths start at the origin");
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    const LatticeSite step = steps_[i] - steps_[i - 1];
    if (step.norm() > 1) {
      throw PreconditionError("path makes a step of length " + std::to_string(step.norm()) + " at time " +
                              std::to_string(i));
    }
    log_weight_ += field(steps_[i]) + kernel.log_prob(step);
  }
  std::vector<LatticeSite> visited(steps_.begin() + 1, steps_.end());
  std::sort(visited.begin(), visited.end());
  for (std::size_t i = 0; i < visited.size();) {
    std::size_t j = i;
    while (j < visited.size() && visited[j] == visited[i]) ++j;
    local_times_.emplace_back(visited[i], static_cast<int>(j - i));
    i = j;
  }
}

int PathSample::local_time(const LatticeSite& x) const {
  const auto it = std::lower_bound(local_times_.begin(), local_times_.end(), x,
                                   [](const auto& entry, const LatticeSite& key) { return entry.first < key; });
  return it != local_times_.end() && it->first == x ? it->second : 0;
}

std::optional<int> PathSample::first_passage(const LatticeSite& x) const {
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i] == x) return static_cast<int>(i);
  }
  return std::nullopt;
}

PathSampler::PathSampler(const FrontHistory& fronts, const FieldRealization& field, const WalkKernel& kernel)
    : fronts_(&fronts), field_(&field), kernel_(&kernel) {
  if (fronts.field_fingerprint() != field.fingerprint()) throw ProvenanceError("fronts were computed for another field");
  if (kernel.dim() != field.dim()) throw PreconditionError("kernel and field dimensions differ");
  const auto& last = fronts.back();
  const double log_u = log_sum_exp(last.logw);
  if (!std::isfinite(log_u)) throw InvariantError("final front has no finite mass");
  endpoint_cdf_.resize(last.logw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < last.logw.size(); ++i) {
    acc += std::exp(last.logw[i] - log_u);
    endpoint_cdf_[i] = acc;
  }
}

PathSample PathSampler::sample(CounterRng& rng) const {
  const int N = horizon();
  const auto& last = fronts_->back();
  const double target = rng.uniform() * endpoint_cdf_.back();
  auto it = std::upper_bound(endpoint_cdf_.begin(), endpoint_cdf_.end(), target);
  if (it == endpoint_cdf_.end()) --it;
  std::vector<LatticeSite> steps(static_cast<std::size_t>(N) + 1);
  steps[static_cast<std::size_t>(N)] = last.ball.site(static_cast<std::size_t>(it - endpoint_cdf_.begin()));

  const std::size_t k = kernel_->size();
  std::vector<double> logs(k);
  std::vector<LatticeSite> candidates(k);
  for (int n = N; n >= 1; --n) {
    const LatticeSite& x = steps[static_cast<std::size_t>(n)];
    const auto& prev = fronts_->at(n - 1);
    double m = kNegInf;
    for (std::size_t s = 0; s < k; ++s) {
      candidates[s] = x - kernel_->steps()[s];
      logs[s] = prev.log_weight(candidates[s]) + kernel_->log_probs()[s];
      m = std::max(m, logs[s]);
    }
    if (m == kNegInf) throw InvariantError("backward sampling reached a site with no predecessor mass");
    double total = 0.0;
    for (double& v : logs) {
      v = std::exp(v - m);
      total += v;
    }
    double u = rng.uniform() * total;
    std::size_t pick = 0;
    while (pick + 1 < k && (u -= logs[pick]) >= 0.0) ++pick;
    // Guard against rounding pushing the pick onto a zero-weight predecessor.
    while (logs[pick] == 0.0) pick = pick == 0 ? k - 1 : pick - 1;
    steps[static_cast<std::size_t>(n - 1)] = candidates[pick];
  }
  return PathSample(std::move(steps), *field_, *kernel_);
}

PathSample sample_path(const FrontHistory& fronts, const FieldRealization& field, const WalkKernel& kernel,
                       CounterRng& rng) {
  return PathSampler(fronts, field, kernel).sample(rng);
}

PathSample viterbi_path(const FieldRealization& field, const WalkKernel& kernel, int N) {
  if (N < 0) throw PreconditionError("time horizon N must be nonnegative");
  if (kernel.dim() != field.dim()) throw PreconditionError("kernel and field dimensions differ");
  if (field.radius() < N) throw PreconditionError("field radius is smaller than N");
  const int d = field.dim();
  const std::size_t k = kernel.size();

  std::vector<double> value{0.0};
  BallIndex ball(d, 0);
  std::vector<std::vector<std::uint8_t>> back(static_cast<std::size_t>(N) + 1);
  for (int n = 1; n <= N; ++n) {
    BallIndex next_ball(d, n);
    std::vector<double> next(next_ball.size(), kNegInf);
    auto& bp = back[static_cast<std::size_t>(n)];
    bp.assign(next_ball.size(), 0);
    for (std::size_t i = 0; i < next_ball.size(); ++i) {
      const LatticeSite x = next_ball.site(i);
      double best = kNegInf;
      for (std::size_t s = 0; s < k; ++s) {
        const auto j = ball.find(x - kernel.steps()[s]);
        if (!j) continue;
        const double cand = value[*j] + kernel.log_probs()[s];
        if (cand > best) {
          best = cand;
          bp[i] = static_cast<std::uint8_t>(s);
        }
      }
      next[i] = best + field(x);
    }
    value = std::move(next);
    ball = std::move(next_ball);
  }
  const std::size_t end = static_cast<std::size_t>(std::max_element(value.begin(), value.end()) - value.begin());
  std::vector<LatticeSite> steps(static_cast<std::size_t>(N) + 1);
  steps[static_cast<std::size_t>(N)] = ball.site(end);
  for (int n = N; n >= 1; --n) {
    const LatticeSite& x = steps[static_cast<std::size_t>(n)];
    const std::size_t i = BallIndex(d, n).index_of(x);
    steps[static_cast<std::size_t>(n - 1)] = x - kernel.steps()[back[static_cast<std::size_t>(n)][i]];
  }
  return PathSample(std::move(steps), field, kernel);
}

double approach_slack(int N, double alpha) {
  if (N < 3) throw PreconditionError("the approach slack needs N >= 3 (log log N > 0), got N=" + std::to_string(N));
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
  const double n = static_cast<double>(N);
  if (alpha > 1.0) return std::pow(std::log(std::log(n)), 2.0 / alpha) * std::pow(n, 1.0 - 1.0 / alpha);
  return std::pow(std::log(n), 1.0 + 2.0 / alpha);
}

PathClassifier::PathClassifier(const FieldRealization& field, const ModifiedFieldStats& modified,
                               const EndpointLaw& law)
    : field_(&field), order_(order_statistics(field, law.N)), N_(law.N), slack_(approach_slack(law.N, field.alpha())),
      w_(law.w) {
  if (law.field_fingerprint != field.fingerprint() || modified.field_fingerprint != field.fingerprint() ||
      modified.N != law.N) {
    throw ProvenanceError("path classification inputs come from different fields or horizons");
  }
  if (modified.order.size() < 2) throw PreconditionError("path classification needs |B_N| >= 2");
  for (int i = 1; i <= 2; ++i) {
    z_[static_cast<std::size_t>(i - 1)] = modified.z(static_cast<std::size_t>(i));
    J_[static_cast<std::size_t>(i - 1)] = order_.rank_of(modified.z_index(static_cast<std::size_t>(i)));
  }
}

namespace {

struct Approach {
  std::optional<int> tau;
  bool injective = false;  // S_0..S_tau pairwise distinct
  bool sticks = false;     // S_n = target for n in tau..N
};

Approach approach_to(const PathSample& path, const LatticeSite& target) {
  Approach a;
  a.tau = path.first_passage(target);
  if (!a.tau) return a;
  const int tau = *a.tau;
  std::vector<LatticeSite> prefix(path.steps().begin(), path.steps().begin() + tau + 1);
  std::sort(prefix.begin(), prefix.end());
  a.injective = std::adjacent_find(prefix.begin(), prefix.end()) == prefix.end();
  a.sticks = true;
  for (int n = tau; n <= path.length(); ++n) a.sticks = a.sticks && path.at(n) == target;
  return a;
}

}  // namespace

EventFlags PathClassifier::classify(const PathSample& path) const {
  if (path.length() != N_) throw ProvenanceError("path length does not match the classifier horizon");
  EventFlags f;
  const BallIndex& ball = order_.ball();
  f.beta_N = order_.size() + 1;
  for (const auto& [site, count] : path.local_times()) f.beta_N = std::min(f.beta_N, order_.rank_of(ball.index_of(site)));

  for (std::size_t i = 0; i < 2; ++i) {
    const LatticeSite& z = z_[i];
    f.in_A[i] = f.beta_N == J_[i];
    f.in_W[i] = f.in_A[i] && path.endpoint() == z;
    f.in_tildeW[i] = f.in_W[i] && path.local_time(z) > (N_ - z.norm()) / 2.0;
    const Approach a = approach_to(path, z);
    f.in_D[i] = a.tau && a.injective && a.sticks;
    f.in_K[i] = a.tau && *a.tau <= z.norm() + slack_;
  }

  const Approach a = approach_to(path, w_);
  f.tau_w = a.tau;
  if (a.tau && a.injective && a.sticks && *a.tau <= w_.norm() + slack_) {
    const double ceiling = (*field_)(w_);
    bool below = true;
    for (int i = 0; i < *a.tau && below; ++i) below = (*field_)(path.at(i)) < ceiling;
    f.in_C = below;
  }
  return f;
}

EventFlags classify_path(const PathSample& path, const FieldRealization& field, const ModifiedFieldStats& modified,
                         const EndpointLaw& law) {
  return PathClassifier(field, modified, law).classify(path);
}

std::string_view event_name(PathEvent e) {
  switch (e) {
    case PathEvent::kC: return "C";
    case PathEvent::kA1: return "A1";
    case PathEvent::kA2: return "A2";
    case PathEvent::kW1: return "W1";
    case PathEvent::kW2: return "W2";
    case PathEvent::kTildeW1: return "tildeW1";
    case PathEvent::kTildeW2: return "tildeW2";
    case PathEvent::kD1: return "D1";
    case PathEvent::kD2: return "D2";
    case PathEvent::kK1: return "K1";
    case PathEvent::kK2: return "K2";
  }
  return "?";
}

std::optional<PathEvent> parse_event(std::string_view name) {
  for (PathEvent e : kAllEvents) {
    if (event_name(e) == name) return e;
  }
  return std::nullopt;
}

bool event_holds(const EventFlags& f, PathEvent e) {
  switch (e) {
    case PathEvent::kC: return f.in_C;
    case PathEvent::kA1: return f.in_A[0];
    case PathEvent::kA2: return f.in_A[1];
    case PathEvent::kW1: return f.in_W[0];
    case PathEvent::kW2: return f.in_W[1];
    case PathEvent::kTildeW1: return f.in_tildeW[0];
    case PathEvent::kTildeW2: return f.in_tildeW[1];
    case PathEvent::kD1: return f.in_D[0];
    case PathEvent::kD2: return f.in_D[1];
    case PathEvent::kK1: return f.in_K[0];
    case PathEvent::kK2: return f.in_K[1];
  }
  return false;
}

namespace {

std::uint64_t block_count(std::uint64_t samples) { return (samples + kSamplesPerStream - 1) / kSamplesPerStream; }

std::uint64_t block_size(std::uint64_t samples, std::uint64_t b) {
  return std::min(kSamplesPerStream, samples - b * kSamplesPerStream);
}

EventEstimate make_estimate(std::uint64_t successes, std::uint64_t samples) {
  EventEstimate e;
  e.successes = successes;
  e.samples = samples;
  e.estimate = static_cast<double>(successes) / static_cast<double>(samples);
  e.ci = stats::wilson_interval(successes, samples);
  return e;
}

void check_samples(std::uint64_t samples) {
  if (samples < kMinEventSamples) {
    throw PreconditionError("event estimation needs at least " + std::to_string(kMinEventSamples) +
                            " samples, got " + std::to_string(samples));
  }
}

}  // namespace

EventEstimate estimate_event_probability(const PathSampler& sampler, const PathPredicate& event,
                                         std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  check_samples(samples);
  const std::uint64_t blocks = block_count(samples);
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t b) {
    CounterRng rng(derive_seed(seed, b));
    for (std::uint64_t i = 0; i < block_size(samples, b); ++i) hits[b] += event(sampler.sample(rng)) ? 1 : 0;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return make_estimate(total, samples);
}

EventEstimate EventSurvey::estimate(PathEvent e) const {
  return make_estimate(counts[static_cast<std::size_t>(e)], samples);
}

EventEstimate EventSurvey::endpoint_origin_estimate() const { return make_estimate(endpoint_origin, samples); }

EventSurvey survey_events(const PathSampler& sampler, const PathClassifier& classifier, std::uint64_t samples,
                          std::uint64_t seed, unsigned threads) {
  check_samples(samples);
  const std::uint64_t blocks = block_count(samples);
  std::vector<EventSurvey> partial(blocks);
  const LatticeSite origin = LatticeSite::origin(classifier.w().dim());
  parallel_for(blocks, threads, [&](std::size_t b) {
    CounterRng rng(derive_seed(seed, b));
    EventSurvey& s = partial[b];
    for (std::uint64_t i = 0; i < block_size(samples, b); ++i) {
      const PathSample path = sampler.sample(rng);
      const EventFlags f = classifier.classify(path);
      ++s.samples;
      for (std::size_t e = 0; e < kAllEvents.size(); ++e) s.counts[e] += event_holds(f, kAllEvents[e]) ? 1 : 0;
      s.endpoint_origin += path.endpoint() == origin ? 1 : 0;
      for (std::size_t j = 0; j < 2; ++j) {
        if ((f.in_tildeW[j] && !f.in_W[j]) || (f.in_W[j] && !f.in_A[j])) ++s.nesting_violations;
      }
    }
  });
  EventSurvey total;
  for (const auto& s : partial) {
    total.samples += s.samples;
    for (std::size_t e = 0; e < kAllEvents.size(); ++e) total.counts[e] += s.counts[e];
    total.endpoint_origin += s.endpoint_origin;
    total.nesting_violations += s.nesting_violations;
  }
  return total;
}

void write_path_csv(std::ostream& out, const PathSample& path) {
  const int d = path.at(0).dim();
  out << "step";
  for (int i = 1; i <= d; ++i) out << ",x" << i;
  out << '\n';
  for (int n = 0; n <= path.length(); ++n) {
    out << n;
    for (int j = 0; j < d; ++j) out << ',' << path.at(n)[j];
    out << '\n';
  }
}

}  // namespace pam
