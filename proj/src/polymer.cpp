#include "pam/polymer.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "pam/errors.hpp"
#include "pam/io.hpp"
#include "pam/logmath.hpp"
#include "pam/simd/kernels.hpp"

namespace pam {

namespace {

std::span<const int> prefix_of(const BallIndex::Row& row, int d) {
  return {row.prefix.data(), static_cast<std::size_t>(d - 1)};
}

void check_recursion_inputs(const FieldRealization& field, const WalkKernel& kernel, int N) {
  if (N < 0) throw PreconditionError("time horizon N must be nonnegative");
  if (kernel.dim() != field.dim()) throw PreconditionError("kernel and field dimensions differ");
  if (field.radius() < N) {
    throw PreconditionError("field radius " + std::to_string(field.radius()) + " is smaller than N=" +
                            std::to_string(N));
  }
}

struct RowSource {
  std::span<const double> values;
  std::size_t out_start = 0;
  double shift = 0.0;
};

}  // namespace

double LogWeightFront::log_weight(const LatticeSite& x) const {
  const auto i = ball.find(x);
  return i ? logw[*i] : kNegInf;
}

LogWeightFront initial_front(int d, std::uint64_t field_fingerprint) {
  return LogWeightFront{0, BallIndex(d, 0), {0.0}, field_fingerprint};
}

LogWeightFront advance_front(const LogWeightFront& front, const FieldRealization& field, const WalkKernel& kernel) {
  const int d = field.dim();
  const int next = front.n + 1;
  check_recursion_inputs(field, kernel, next);
  if (front.ball.dim() != d) throw PreconditionError("front and field dimensions differ");
  if (front.field_fingerprint != field.fingerprint()) throw ProvenanceError("front was computed for another field");

  const auto& k = simd::active_kernels();
  LogWeightFront out{next, BallIndex(d, next), {}, front.field_fingerprint};
  out.logw.resize(out.ball.size());

  // Steps along the last axis act within a row; steps along the other axes
  // connect to neighbouring rows.
  std::array<double, 3> last_axis_shift{};
  std::array<std::array<double, 2>, kMaxDim - 1> prefix_shift{};
  for (std::size_t s = 0; s < kernel.size(); ++s) {
    const LatticeSite& y = kernel.steps()[s];
    const double lk = kernel.log_probs()[s];
    int axis = -1;
    for (int i = 0; i < d; ++i) {
      if (y[i] != 0) axis = i;
    }
    if (axis < 0) {
      last_axis_shift[1] = lk;
    } else if (axis == d - 1) {
      last_axis_shift[y[axis] < 0 ? 0 : 2] = lk;
    } else {
      prefix_shift[static_cast<std::size_t>(axis)][y[axis] < 0 ? 0 : 1] = lk;
    }
  }

  std::vector<double> m;
  std::vector<double> s;
  std::vector<RowSource> sources;
  std::array<int, kMaxDim - 1> neighbour{};
  const auto xi = field.xi();

  for (const auto& row : out.ball.rows()) {
    const std::size_t len = row.length();
    const auto prefix = prefix_of(row, d);
    sources.clear();

    if (const auto same = front.ball.row_of(prefix)) {
      const auto& src = front.ball.rows()[*same];
      const std::span<const double> values(front.logw.data() + src.offset, src.length());
      // out(p, t) <- in(p, t - y_d); source rows are one shorter on each side.
      for (std::size_t j = 0; j < 3; ++j) sources.push_back({values, j, last_axis_shift[j]});
    }
    for (int axis = 0; axis < d - 1; ++axis) {
      for (int sign : {-1, 1}) {
        std::copy(prefix.begin(), prefix.end(), neighbour.begin());
        neighbour[static_cast<std::size_t>(axis)] -= sign;
        const auto nb = front.ball.row_of(std::span<const int>(neighbour.data(), prefix.size()));
        if (!nb) continue;
        const auto& src = front.ball.rows()[*nb];
        sources.push_back({std::span<const double>(front.logw.data() + src.offset, src.length()),
                           static_cast<std::size_t>(row.half - src.half),
                           prefix_shift[static_cast<std::size_t>(axis)][sign < 0 ? 0 : 1]});
      }
    }

    m.assign(len, kNegInf);
    s.assign(len, 0.0);
    for (const auto& src : sources) {
      k.max_shifted(std::span<double>(m).subspan(src.out_start, src.values.size()), src.values, src.shift);
    }
    for (const auto& src : sources) {
      k.accumulate_exp(std::span<double>(s).subspan(src.out_start, src.values.size()),
                       std::span<const double>(m).subspan(src.out_start, src.values.size()), src.values, src.shift);
    }
    const auto& field_row = field.ball().rows()[*field.ball().row_of(prefix)];
    const auto base = xi.subspan(field_row.offset + static_cast<std::size_t>(field_row.half - row.half), len);
    k.finalize_log(std::span<double>(out.logw).subspan(row.offset, len), m, s, base);
  }
  return out;
}

FrontHistory forward_recursion(const FieldRealization& field, const WalkKernel& kernel, int N) {
  check_recursion_inputs(field, kernel, N);
  std::vector<LogWeightFront> fronts;
  fronts.reserve(static_cast<std::size_t>(N) + 1);
  fronts.push_back(initial_front(field.dim(), field.fingerprint()));
  for (int n = 0; n < N; ++n) fronts.push_back(advance_front(fronts.back(), field, kernel));
  return FrontHistory(std::move(fronts));
}

LogWeightFront final_front(const FieldRealization& field, const WalkKernel& kernel, int N) {
  check_recursion_inputs(field, kernel, N);
  LogWeightFront front = initial_front(field.dim(), field.fingerprint());
  for (int n = 0; n < N; ++n) front = advance_front(front, field, kernel);
  return front;
}

double EndpointLaw::log_p_of(const LatticeSite& x) const {
  if (x.dim() != ball.dim()) throw PreconditionError("site dimension does not match the law");
  const auto i = ball.find(x);
  return i ? log_p[*i] : kNegInf;
}

double EndpointLaw::p_of(const LatticeSite& x) const { return std::exp(log_p_of(x)); }

EndpointLaw endpoint_law(const LogWeightFront& front) {
  EndpointLaw law;
  law.N = front.n;
  law.ball = front.ball;
  law.field_fingerprint = front.field_fingerprint;
  law.logU = log_sum_exp(front.logw);
  if (!std::isfinite(law.logU)) throw InvariantError("endpoint front has no finite mass");
  law.log_p.resize(front.logw.size());
  for (std::size_t i = 0; i < front.logw.size(); ++i) law.log_p[i] = front.logw[i] - law.logU;
  std::size_t best = 0;
  for (std::size_t i = 1; i < law.log_p.size(); ++i) {
    if (law.log_p[i] > law.log_p[best]) {
      best = i;
      law.ties_detected = false;
    } else if (law.log_p[i] == law.log_p[best]) {
      law.ties_detected = true;
    }
  }
  law.w_index = best;
  law.w = law.ball.site(best);
  return law;
}

LocalizationMass localization_mass(const EndpointLaw& law, const ModifiedFieldStats& modified) {
  if (law.field_fingerprint != modified.field_fingerprint || law.N != modified.N) {
    throw ProvenanceError("endpoint law and modified-field statistics come from different fields or horizons");
  }
  LocalizationMass mass;
  const std::size_t z1 = modified.z_index(1);
  mass.p_w = std::exp(law.log_p[law.w_index]);
  mass.p_z1 = std::exp(law.log_p[z1]);
  if (modified.order.size() >= 2) {
    const std::size_t z2 = modified.z_index(2);
    mass.p_z2 = std::exp(law.log_p[z2]);
    mass.w_in_top2 = law.w_index == z1 || law.w_index == z2;
  } else {
    mass.w_in_top2 = law.w_index == z1;
  }
  mass.two_point_mass = mass.p_z1 + mass.p_z2;
  mass.w_equals_z1 = law.w_index == z1;
  return mass;
}

double comparator_log_b(const FieldRealization& field, const WalkKernel& kernel, int N, int x) {
  if (field.dim() != 1 || kernel.dim() != 1) throw PreconditionError("the comparator is defined for d = 1 only");
  const int r = std::abs(x);
  if (r > N || N > field.radius()) throw PreconditionError("comparator site outside B_N");
  const int sgn = x > 0 ? 1 : (x < 0 ? -1 : 0);
  double interior = 0.0;
  for (int i = 1; i <= r - 1; ++i) interior += field(LatticeSite{i * sgn});
  double log_b = interior + static_cast<double>(N + 1 - r) * field(LatticeSite{x}) +
                 static_cast<double>(N - r) * std::log(kernel.hold());
  if (r > 0) log_b += static_cast<double>(r) * kernel.log_prob(LatticeSite{sgn});
  return log_b;
}

ComparatorResult comparator_1d(const FieldRealization& field, int N, const WalkKernel& kernel) {
  if (field.dim() != 1) throw PreconditionError("the comparator is defined for d = 1 only");
  if (N < 1) throw PreconditionError("the comparator needs N >= 1 (two candidate sites)");
  const ModifiedFieldStats modified = modified_field_stats(field, N);
  ComparatorResult result;
  result.z1 = modified.z(1);
  result.z2 = modified.z(2);
  result.log_b_z1 = comparator_log_b(field, kernel, N, result.z1[0]);
  result.log_b_z2 = comparator_log_b(field, kernel, N, result.z2[0]);
  result.choice = result.log_b_z1 > result.log_b_z2 ? 1 : 2;
  result.predicted = result.choice == 1 ? result.z1 : result.z2;
  return result;
}

void write_law_csv(std::ostream& out, const EndpointLaw& law) {
  const int d = law.ball.dim();
  for (int i = 1; i <= d; ++i) out << 'x' << i << ',';
  out << "log_p\n";
  for (std::size_t i = 0; i < law.log_p.size(); ++i) {
    const LatticeSite x = law.ball.site(i);
    for (int j = 0; j < d; ++j) out << x[j] << ',';
    out << format_double(law.log_p[i]) << '\n';
  }
}

}  // namespace pam
