#include "pam/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "pam/errors.hpp"

namespace pam {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw PreconditionError("unsupported dimension d=" + std::to_string(d) + " (expected 1, 2 or 3)");
  }
}

}  // namespace

LatticeSite::LatticeSite(std::span<const int> coords) {
  check_dim(static_cast<int>(coords.size()));
  dim_ = static_cast<int>(coords.size());
  for (int i = 0; i < dim_; ++i) {
    coords_[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)];
    norm_ += std::abs(coords[static_cast<std::size_t>(i)]);
  }
}

LatticeSite::LatticeSite(std::initializer_list<int> coords)
    : LatticeSite(std::span<const int>(coords.begin(), coords.size())) {}

LatticeSite LatticeSite::origin(int d) {
  check_dim(d);
  std::array<int, kMaxDim> zero{};
  return LatticeSite(std::span<const int>(zero.data(), static_cast<std::size_t>(d)));
}

LatticeSite LatticeSite::operator+(const LatticeSite& other) const {
  std::array<int, kMaxDim> c{};
  for (int i = 0; i < dim_; ++i) c[i] = coords_[i] + other.coords_[i];
  return LatticeSite(std::span<const int>(c.data(), static_cast<std::size_t>(dim_)));
}

LatticeSite LatticeSite::operator-(const LatticeSite& other) const {
  std::array<int, kMaxDim> c{};
  for (int i = 0; i < dim_; ++i) c[i] = coords_[i] - other.coords_[i];
  return LatticeSite(std::span<const int>(c.data(), static_cast<std::size_t>(dim_)));
}

std::strong_ordering operator<=>(const LatticeSite& a, const LatticeSite& b) {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (int i = 0; i < a.dim_; ++i) {
    if (auto c = a.coords_[i] <=> b.coords_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const LatticeSite& a, const LatticeSite& b) { return (a <=> b) == 0; }

std::string LatticeSite::to_string() const {
  if (dim_ == 1) return std::to_string(coords_[0]);
  std::string s = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ',';
    s += std::to_string(coords_[i]);
  }
  return s + ')';
}

std::uint64_t BallIndex::cardinality(int d, int N) {
  check_dim(d);
  if (N < 0) return 0;
  // |B_N| in d dims = sum over the first coordinate of |B_{N-|x1|}| in d-1 dims.
  const auto n = static_cast<std::uint64_t>(N);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  switch (d) {
    case 1:
      return 2 * n + 1;
    case 2:
      if (n > (std::uint64_t{1} << 30)) return kMax;
      return 2 * n * n + 2 * n + 1;
    default:
      if (n > (std::uint64_t{1} << 20)) return kMax;
      return (4 * n * n * n + 6 * n * n + 8 * n + 3) / 3;
  }
}

BallIndex::BallIndex(int d, int N) : impl_(build(d, N)) {}

std::shared_ptr<const BallIndex::Impl> BallIndex::build(int d, int N) {
  check_dim(d);
  if (N < 0) throw PreconditionError("ball radius must be nonnegative, got N=" + std::to_string(N));
  const std::uint64_t count = cardinality(d, N);
  if (count > kMaxSites) {
    throw CapacityError("ball B_N with d=" + std::to_string(d) + ", N=" + std::to_string(N) + " has " +
                        std::to_string(count) + " sites, above the capacity of " + std::to_string(kMaxSites));
  }

  auto impl = std::make_shared<Impl>();
  impl->dim = d;
  impl->radius = N;
  if (d == 1) {
    impl->rows.push_back(Row{0, N, {}, 0});
  } else {
    impl->prefix_ball = build(d - 1, N);
    const BallIndex prefix_view = [&] {
      BallIndex b;
      b.impl_ = impl->prefix_ball;
      return b;
    }();
    std::size_t offset = 0;
    impl->rows.reserve(prefix_view.size());
    for (std::size_t r = 0; r < prefix_view.size(); ++r) {
      const LatticeSite p = prefix_view.site(r);
      Row row;
      row.offset = offset;
      row.half = N - p.norm();
      row.prefix_norm = p.norm();
      for (int i = 0; i < d - 1; ++i) row.prefix[static_cast<std::size_t>(i)] = p[i];
      impl->rows.push_back(row);
      offset += row.length();
    }
  }
  impl->row_starts.reserve(impl->rows.size());
  for (const Row& row : impl->rows) impl->row_starts.push_back(row.offset);
  impl->size = impl->rows.back().offset + impl->rows.back().length();
  if (impl->size != count) throw InvariantError("ball enumeration does not match the cardinality formula");
  return impl;
}

std::optional<std::size_t> BallIndex::find_in(const Impl& impl, std::span<const int> coords) {
  int norm = 0;
  for (int c : coords) norm += std::abs(c);
  if (norm > impl.radius) return std::nullopt;
  const int t = coords.back();
  if (impl.dim == 1) return static_cast<std::size_t>(t + impl.radius);
  const auto row = find_in(*impl.prefix_ball, coords.first(coords.size() - 1));
  const Row& r = impl.rows[*row];
  return r.offset + static_cast<std::size_t>(t + r.half);
}

std::optional<std::size_t> BallIndex::row_of(std::span<const int> prefix) const {
  if (static_cast<int>(prefix.size()) != dim() - 1) return std::nullopt;
  if (dim() == 1) return 0;
  return find_in(*impl_->prefix_ball, prefix);
}

std::optional<std::size_t> BallIndex::find(const LatticeSite& x) const {
  if (x.dim() != dim()) return std::nullopt;
  return find_in(*impl_, x.coords());
}

std::size_t BallIndex::index_of(const LatticeSite& x) const {
  const auto i = find(x);
  if (!i) {
    throw PreconditionError("site " + x.to_string() + " is outside B_" + std::to_string(radius()));
  }
  return *i;
}

LatticeSite BallIndex::site(std::size_t index) const {
  if (index >= size()) throw PreconditionError("ball index out of range");
  const auto& starts = impl_->row_starts;
  const auto it = std::upper_bound(starts.begin(), starts.end(), index);
  const Row& row = impl_->rows[static_cast<std::size_t>(it - starts.begin()) - 1];
  std::array<int, kMaxDim> c{};
  const int d = dim();
  for (int i = 0; i < d - 1; ++i) c[static_cast<std::size_t>(i)] = row.prefix[static_cast<std::size_t>(i)];
  c[static_cast<std::size_t>(d - 1)] = static_cast<int>(index - row.offset) - row.half;
  return LatticeSite(std::span<const int>(c.data(), static_cast<std::size_t>(d)));
}

BallIndex enumerate_ball(int d, int N) { return BallIndex(d, N); }

}  // namespace pam
