#include "pam/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "pam/errors.hpp"
#include "pam/io.hpp"
#include "pam/rng.hpp"

namespace pam {

namespace {

std::uint64_t zigzag(int v) {
  const auto w = static_cast<std::int64_t>(v);
  return (static_cast<std::uint64_t>(w) << 1) ^ static_cast<std::uint64_t>(w >> 63);
}

// Distinct for every site of any ball under BallIndex::kMaxSites.
std::uint64_t site_key(const LatticeSite& x) {
  const int bits = 64 / x.dim();
  std::uint64_t key = 0;
  for (int i = 0; i < x.dim(); ++i) key |= zigzag(x[i]) << (bits * i);
  return key;
}

std::uint64_t hash_values(int d, int radius, std::span<const double> xi) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(d) * 0x100000001b3ULL + static_cast<std::uint64_t>(radius));
  for (double v : xi) h = mix64(h ^ std::bit_cast<std::uint64_t>(v)) + kGoldenGamma;
  return h;
}

}  // namespace

FieldRealization::FieldRealization(BallIndex ball, std::vector<double> xi, std::uint64_t seed, double alpha,
                                   bool sampled)
    : ball_(std::move(ball)), seed_(seed), alpha_(alpha), sampled_(sampled) {
  if (xi.size() != ball_.size()) {
    throw PreconditionError("field has " + std::to_string(xi.size()) + " values for a ball of " +
                            std::to_string(ball_.size()) + " sites");
  }
  for (double v : xi) {
    if (!std::isfinite(v)) throw PreconditionError("field values must be finite");
  }
  fingerprint_ = hash_values(ball_.dim(), ball_.radius(), xi);
  xi_ = std::make_shared<const std::vector<double>>(std::move(xi));
}

FieldRealization FieldRealization::from_values(BallIndex ball, std::vector<double> xi, double alpha) {
  return FieldRealization(std::move(ball), std::move(xi), 0, alpha, false);
}

FieldRealization FieldRealization::constant(BallIndex ball, double value) {
  const std::size_t n = ball.size();
  return from_values(std::move(ball), std::vector<double>(n, value));
}

FieldRealization FieldRealization::restricted(int N) const {
  if (N < 0 || N > radius()) {
    throw PreconditionError("cannot restrict a field of radius " + std::to_string(radius()) + " to N=" +
                            std::to_string(N));
  }
  if (N == radius()) return *this;
  BallIndex small(dim(), N);
  std::vector<double> values;
  values.reserve(small.size());
  for (const auto& row : small.rows()) {
    const std::size_t src = *ball_.row_of(std::span<const int>(row.prefix.data(), static_cast<std::size_t>(dim() - 1)));
    const auto& big = ball_.rows()[src];
    const std::size_t first = big.offset + static_cast<std::size_t>(big.half - row.half);
    values.insert(values.end(), xi_->begin() + static_cast<std::ptrdiff_t>(first),
                  xi_->begin() + static_cast<std::ptrdiff_t>(first + row.length()));
  }
  return FieldRealization(std::move(small), std::move(values), seed_, alpha_, sampled_);
}

FieldRealization FieldRealization::with_value(const LatticeSite& x, double value) const {
  std::vector<double> values(xi_->begin(), xi_->end());
  values[ball_.index_of(x)] = value;
  return FieldRealization(ball_, std::move(values), seed_, alpha_, false);
}

double pareto_from_uniform(double u, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("Pareto shape alpha must be positive, got " + format_double(alpha));
  if (!(u > 0.0 && u < 1.0)) throw PreconditionError("uniform draw must lie in (0,1)");
  return std::pow(u, -1.0 / alpha);
}

double field_uniform(std::uint64_t seed, const LatticeSite& x) {
  const CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(x.dim())));
  return to_open_unit(rng.at(site_key(x)));
}

FieldRealization sample_pareto_field(std::uint64_t seed, double alpha, const BallIndex& ball) {
  if (!(alpha > 0.0)) throw PreconditionError("Pareto shape alpha must be positive, got " + format_double(alpha));
  const CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(ball.dim())));
  const double exponent = -1.0 / alpha;
  std::vector<double> xi(ball.size());
  std::array<int, kMaxDim> c{};
  const int d = ball.dim();
  for (const auto& row : ball.rows()) {
    for (int i = 0; i < d - 1; ++i) c[static_cast<std::size_t>(i)] = row.prefix[static_cast<std::size_t>(i)];
    for (int t = -row.half; t <= row.half; ++t) {
      c[static_cast<std::size_t>(d - 1)] = t;
      const LatticeSite x(std::span<const int>(c.data(), static_cast<std::size_t>(d)));
      xi[row.offset + static_cast<std::size_t>(t + row.half)] = std::pow(to_open_unit(rng.at(site_key(x))), exponent);
    }
  }
  return FieldRealization(ball, std::move(xi), seed, alpha, true);
}

OrderStats::OrderStats(BallIndex ball, std::span<const double> values)
    : ball_(std::move(ball)), values_(values.begin(), values.end()) {
  if (values_.empty()) throw PreconditionError("order statistics of an empty field");
  if (values_.size() != ball_.size()) throw PreconditionError("order statistics: value count does not match ball");
  order_.resize(values_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  // Ball indices follow lexicographic site order, so the index breaks ties.
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    if (values_[a] != values_[b]) return values_[a] > values_[b];
    return a < b;
  });
  rank_.resize(values_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) {
    rank_[order_[k]] = k + 1;
    if (k > 0 && values_[order_[k]] == values_[order_[k - 1]]) ties_ = true;
  }
}

OrderStats order_statistics(const FieldRealization& field, int N) {
  if (N < 0) N = field.radius();
  const FieldRealization f = field.restricted(N);
  return OrderStats(f.ball(), f.xi());
}

double modified_weight(int N, int site_norm) {
  return 1.0 - static_cast<double>(site_norm) / static_cast<double>(N + 1);
}

ModifiedFieldStats modified_field_stats(const FieldRealization& field, int N) {
  if (N < 0) N = field.radius();
  const FieldRealization f = field.restricted(N);
  const BallIndex& ball = f.ball();
  std::vector<double> psi(ball.size());
  for (const auto& row : ball.rows()) {
    for (int t = -row.half; t <= row.half; ++t) {
      const std::size_t i = row.offset + static_cast<std::size_t>(t + row.half);
      psi[i] = modified_weight(N, row.prefix_norm + std::abs(t)) * f.at(i);
    }
  }
  OrderStats order(ball, psi);
  return ModifiedFieldStats{N, field.fingerprint(), std::move(psi), std::move(order)};
}

double field_scale(int N, int d, double alpha) {
  return std::pow(static_cast<double>(N), static_cast<double>(d) / alpha);
}

GapReport gap_diagnostics(const OrderStats& stats, const ModifiedFieldStats& modified, std::size_t k_max,
                          double alpha) {
  if (k_max >= stats.size()) {
    throw PreconditionError("gap_diagnostics: k_max=" + std::to_string(k_max) + " must be below |B_N|=" +
                            std::to_string(stats.size()));
  }
  const int N = modified.N;
  const double scale = field_scale(N, stats.ball().dim(), alpha);
  GapReport report;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double gap = stats.value(k) - stats.value(k + 1);
    report.x_gaps.push_back(gap);
    report.x_gaps_scaled.push_back(gap / scale);
  }
  const std::size_t m = modified.order.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.z12 = m >= 2 ? modified.Z(1) - modified.Z(2) : nan;
  report.z13 = m >= 3 ? modified.Z(1) - modified.Z(3) : nan;
  report.z12_scaled = report.z12 / scale;
  report.z13_scaled = report.z13 / scale;
  report.n_times_z12 = static_cast<double>(N) * report.z12;
  return report;
}

void write_field_csv(std::ostream& out, const FieldRealization& field) {
  const int d = field.dim();
  for (int i = 1; i <= d; ++i) out << 'x' << i << ',';
  out << "xi,psi\n";
  const int N = field.radius();
  for (std::size_t i = 0; i < field.ball().size(); ++i) {
    const LatticeSite x = field.ball().site(i);
    for (int j = 0; j < d; ++j) out << x[j] << ',';
    out << format_double(field.at(i)) << ',' << format_double(modified_weight(N, x.norm()) * field.at(i)) << '\n';
  }
}

}  // namespace pam
