#pragma once

// Sobol low-discrepancy points with Joe-Kuo direction numbers.

#include <cstdint>
#include <vector>

namespace hotspot {

class Sobol {
 public:
  static constexpr std::size_t kMaxDim = 21;
  static constexpr unsigned kBits = 32;

  /// Throws InputError when dim is zero or exceeds kMaxDim.
  explicit Sobol(std::size_t dim);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  /// Next point in [0, 1)^dim. The all-zero first point is never returned.
  std::vector<double> next();
  /// Skips n points.
  void skip(std::uint64_t n);

 private:
  std::size_t dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> x_;
  std::vector<std::vector<std::uint32_t>> v_;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  [[nodiscard]] std::size_t dim() const { return lo.size(); }
  /// Maps a unit-box point into the box.
  [[nodiscard]] std::vector<double> scale(const std::vector<double>& u) const;
  /// Maps a box point into the unit box.
  [[nodiscard]] std::vector<double> unscale(const std::vector<double>& x) const;
  void validate() const;
};

/// First m Sobol points (zero point skipped) scaled into the box.
std::vector<std::vector<double>> sobol_points(std::size_t m, const Box& box);

}  // namespace hotspot
