#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pam/field.hpp"
#include "pam/lattice.hpp"
#include "pam/walk_kernel.hpp"

namespace pam {

/// log u_n(x) over B_n. Sites outside B_n carry u_n = 0 and are not stored.
struct LogWeightFront {
  int n = 0;
  BallIndex ball;
  std::vector<double> logw;
  std::uint64_t field_fingerprint = 0;

  /// log u_n(x); -inf for |x| > n.
  double log_weight(const LatticeSite& x) const;
};

/// Front at time 0: log u_0 = 0 at the origin.
LogWeightFront initial_front(int d, std::uint64_t field_fingerprint = 0);

/// One transfer step:
///   log u_{n+1}(x) = xi(x) + logsumexp_{|y| <= 1} [ log u_n(x - y) + log kappa(y) ].
/// Uses the active SIMD backend.
LogWeightFront advance_front(const LogWeightFront& front, const FieldRealization& field, const WalkKernel& kernel);

/// Fronts for n = 0..N, kept for backward sampling.
class FrontHistory {
 public:
  FrontHistory() = default;
  explicit FrontHistory(std::vector<LogWeightFront> fronts) : fronts_(std::move(fronts)) {}

  int horizon() const { return static_cast<int>(fronts_.size()) - 1; }
  const LogWeightFront& at(int n) const { return fronts_.at(static_cast<std::size_t>(n)); }
  const LogWeightFront& back() const { return fronts_.back(); }
  std::uint64_t field_fingerprint() const { return fronts_.front().field_fingerprint; }

 private:
  std::vector<LogWeightFront> fronts_;
};

/// Runs the transfer recursion to time N keeping every front.
/// Requires field.radius() >= N and matching dimensions.
FrontHistory forward_recursion(const FieldRealization& field, const WalkKernel& kernel, int N);

/// Same recursion keeping only the current front; O(|B_N|) memory.
LogWeightFront final_front(const FieldRealization& field, const WalkKernel& kernel, int N);

/// Endpoint law p_N(x) = u_N(x) / U_N and its maximizer.
struct EndpointLaw {
  int N = 0;
  BallIndex ball;
  std::vector<double> log_p;
  double logU = 0.0;
  LatticeSite w;
  std::size_t w_index = 0;
  bool ties_detected = false;  // several sites share the maximal log_p
  std::uint64_t field_fingerprint = 0;

  double log_p_of(const LatticeSite& x) const;
  double p_of(const LatticeSite& x) const;
};

EndpointLaw endpoint_law(const LogWeightFront& front);
inline EndpointLaw endpoint_law(const FrontHistory& fronts) { return endpoint_law(fronts.back()); }

struct LocalizationMass {
  double p_w = 0.0;
  double p_z1 = 0.0;
  double p_z2 = 0.0;
  double two_point_mass = 0.0;  // p_z1 + p_z2
  bool w_equals_z1 = false;
  bool w_in_top2 = false;
};

/// Throws ProvenanceError unless law and stats come from the same field and N.
LocalizationMass localization_mass(const EndpointLaw& law, const ModifiedFieldStats& modified);

/// d = 1 prediction of w from the log-weights of the two reach-and-stick
/// trajectories to z(1) and z(2):
///   log b(x) = sum_{i=1}^{|x|-1} xi(i sgn x) + (N+1-|x|) xi(x) + |x| log kappa(sgn x) + (N-|x|) log kappa(0).
struct ComparatorResult {
  int choice = 1;  // 1 if log_b_z1 > log_b_z2, else 2
  LatticeSite predicted;
  LatticeSite z1;
  LatticeSite z2;
  double log_b_z1 = 0.0;
  double log_b_z2 = 0.0;
};

double comparator_log_b(const FieldRealization& field, const WalkKernel& kernel, int N, int x);
ComparatorResult comparator_1d(const FieldRealization& field, int N, const WalkKernel& kernel);

/// CSV with columns x1[,x2,x3],log_p.
void write_law_csv(std::ostream& out, const EndpointLaw& law);

}  // namespace pam
