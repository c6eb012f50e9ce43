#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pam {

inline constexpr int kMaxDim = 3;

/// A point of Z^d, d in {1,2,3}, carrying its l1 norm.
class LatticeSite {
 public:
  LatticeSite() = default;
  explicit LatticeSite(std::span<const int> coords);
  LatticeSite(std::initializer_list<int> coords);

  static LatticeSite origin(int d);

  int dim() const { return dim_; }
  int norm() const { return norm_; }
  int operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const int> coords() const { return {coords_.data(), static_cast<std::size_t>(dim_)}; }

  LatticeSite operator+(const LatticeSite& other) const;
  LatticeSite operator-(const LatticeSite& other) const;

  // Lexicographic in the coordinates (dimension first).
  friend std::strong_ordering operator<=>(const LatticeSite& a, const LatticeSite& b);
  friend bool operator==(const LatticeSite& a, const LatticeSite& b);

  /// "x" for d=1, "(x1,x2,...)" otherwise.
  std::string to_string() const;

 private:
  std::array<int, kMaxDim> coords_{};
  int dim_ = 1;
  int norm_ = 0;
};

/// Dense enumeration of the l1 ball B_N = {x in Z^d : |x| <= N}.
///
/// Sites are laid out in lexicographic order of their coordinates. The ball is
/// split into rows: all sites sharing the first d-1 coordinates (the row
/// prefix) form one contiguous run over the last coordinate t in [-h, h],
/// h = N - |prefix|. Stencil code walks rows; the DP kernels rely on this.
///
/// Copies are cheap and share the immutable tables.
class BallIndex {
 public:
  struct Row {
    std::size_t offset = 0;  // index of the site with t = -half
    int half = 0;            // row spans t in [-half, half]
    std::array<int, kMaxDim - 1> prefix{};
    int prefix_norm = 0;

    std::size_t length() const { return 2 * static_cast<std::size_t>(half) + 1; }
  };

  static constexpr std::size_t kMaxSites = std::size_t{1} << 28;

  /// Number of sites of B_N without building it. Saturates on overflow.
  static std::uint64_t cardinality(int d, int N);

  BallIndex() : BallIndex(1, 0) {}
  BallIndex(int d, int N);

  int dim() const { return impl_->dim; }
  int radius() const { return impl_->radius; }
  std::size_t size() const { return impl_->size; }

  std::span<const Row> rows() const { return impl_->rows; }
  /// Row containing the given prefix (first d-1 coordinates), if inside the ball.
  std::optional<std::size_t> row_of(std::span<const int> prefix) const;

  std::optional<std::size_t> find(const LatticeSite& x) const;
  bool contains(const LatticeSite& x) const { return x.dim() == dim() && x.norm() <= radius(); }
  /// Index of a site known to be inside the ball; throws otherwise.
  std::size_t index_of(const LatticeSite& x) const;
  LatticeSite site(std::size_t index) const;

  friend bool operator==(const BallIndex& a, const BallIndex& b) {
    return a.dim() == b.dim() && a.radius() == b.radius();
  }

 private:
  struct Impl {
    int dim = 1;
    int radius = 0;
    std::size_t size = 0;
    std::vector<Row> rows;
    std::vector<std::size_t> row_starts;  // rows[i].offset, for binary search
    std::shared_ptr<const Impl> prefix_ball;
  };

  static std::shared_ptr<const Impl> build(int d, int N);
  static std::optional<std::size_t> find_in(const Impl& impl, std::span<const int> coords);

  std::shared_ptr<const Impl> impl_;
};

/// Builds B_N; rejects d outside {1,2,3} and balls over BallIndex::kMaxSites.
BallIndex enumerate_ball(int d, int N);

}  // namespace pam
