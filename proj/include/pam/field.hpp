#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "pam/lattice.hpp"

namespace pam {

/// Potential values xi(x) over a ball, with the seed they were drawn from.
///
/// Sampled fields are counter based: xi(x) is a function of (seed, alpha, x)
/// alone, so the field on B_N is exactly the restriction of the field on any
/// larger ball drawn from the same seed.
class FieldRealization {
 public:
  /// Explicit field. Values must be finite; alpha is informational (NaN if unknown).
  static FieldRealization from_values(BallIndex ball, std::vector<double> xi,
                                      double alpha = std::numeric_limits<double>::quiet_NaN());
  static FieldRealization constant(BallIndex ball, double value);

  const BallIndex& ball() const { return ball_; }
  int dim() const { return ball_.dim(); }
  int radius() const { return ball_.radius(); }
  std::span<const double> xi() const { return *xi_; }
  double at(std::size_t index) const { return (*xi_)[index]; }
  double operator()(const LatticeSite& x) const { return (*xi_)[ball_.index_of(x)]; }

  std::uint64_t seed() const { return seed_; }
  double alpha() const { return alpha_; }
  bool is_sampled() const { return sampled_; }
  /// Hash of (d, radius, every xi bit pattern). Identifies the field in provenance checks.
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// The same field restricted to B_N, N <= radius().
  FieldRealization restricted(int N) const;
  /// Copy with one site's value replaced.
  FieldRealization with_value(const LatticeSite& x, double value) const;

 private:
  friend FieldRealization sample_pareto_field(std::uint64_t seed, double alpha, const BallIndex& ball);

  FieldRealization(BallIndex ball, std::vector<double> xi, std::uint64_t seed, double alpha, bool sampled);

  BallIndex ball_;
  std::shared_ptr<const std::vector<double>> xi_;
  std::uint64_t seed_ = 0;
  double alpha_ = std::numeric_limits<double>::quiet_NaN();
  bool sampled_ = false;
  std::uint64_t fingerprint_ = 0;
};

/// Pareto(alpha) quantile: u^(-1/alpha) for u in (0,1).
double pareto_from_uniform(double u, double alpha);

/// Uniform in (0,1) attached to site x by the counter-based field stream.
double field_uniform(std::uint64_t seed, const LatticeSite& x);

/// i.i.d. Pareto(alpha) potential on the ball, deterministic in (seed, alpha, x).
FieldRealization sample_pareto_field(std::uint64_t seed, double alpha, const BallIndex& ball);

/// Values sorted in decreasing order with the sites achieving them.
/// Ties are broken towards the lexicographically smallest site and flagged.
class OrderStats {
 public:
  OrderStats(BallIndex ball, std::span<const double> values);

  std::size_t size() const { return order_.size(); }
  const BallIndex& ball() const { return ball_; }

  /// k-th largest value, k = 1..size().
  double value(std::size_t k) const { return values_[order_.at(k - 1)]; }
  /// Ball index of the site achieving value(k).
  std::size_t index(std::size_t k) const { return order_.at(k - 1); }
  LatticeSite site(std::size_t k) const { return ball_.site(index(k)); }
  /// Rank (1-based) of the site with the given ball index.
  std::size_t rank_of(std::size_t site_index) const { return rank_[site_index]; }

  bool ties_detected() const { return ties_; }

 private:
  BallIndex ball_;
  std::vector<double> values_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
  bool ties_ = false;
};

/// Order statistics X(k), x(k) of the raw field over B_N (N defaults to the field radius).
OrderStats order_statistics(const FieldRealization& field, int N = -1);

/// psi_N(x) = (1 - |x|/(N+1)) xi(x) over B_N and its order statistics Z(k), z(k).
struct ModifiedFieldStats {
  int N = 0;
  std::uint64_t field_fingerprint = 0;
  std::vector<double> psi;
  OrderStats order;

  double Z(std::size_t k) const { return order.value(k); }
  LatticeSite z(std::size_t k) const { return order.site(k); }
  std::size_t z_index(std::size_t k) const { return order.index(k); }
  bool ties_detected() const { return order.ties_detected(); }
};

double modified_weight(int N, int site_norm);

ModifiedFieldStats modified_field_stats(const FieldRealization& field, int N = -1);

struct GapReport {
  std::vector<double> x_gaps;         // X(k) - X(k+1), k = 1..k_max
  std::vector<double> x_gaps_scaled;  // divided by N^(d/alpha)
  double z12 = 0.0;                   // Z(1) - Z(2)
  double z13 = 0.0;                   // Z(1) - Z(3)
  double z12_scaled = 0.0;
  double z13_scaled = 0.0;
  double n_times_z12 = 0.0;           // N (Z(1) - Z(2))
};

/// N^(d/alpha), the scale of the field maximum on B_N.
double field_scale(int N, int d, double alpha);

/// Gap report. Requires k_max < |B_N|; Z(1)-Z(3) needs |B_N| >= 3 (NaN otherwise).
/// Scaled values use the field's alpha and are NaN when it is unknown.
GapReport gap_diagnostics(const OrderStats& stats, const ModifiedFieldStats& modified, std::size_t k_max,
                          double alpha);

/// CSV with columns x1[,x2,x3],xi,psi; psi evaluated at N = field radius.
void write_field_csv(std::ostream& out, const FieldRealization& field);

}  // namespace pam
