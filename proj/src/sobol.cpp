#include "hotspot/sobol.hpp"

#include <array>
#include <bit>

#include "hotspot/common.hpp"

namespace hotspot {

namespace {

struct DirectionEntry {
  unsigned s;
  unsigned a;
  std::array<std::uint32_t, 8> m;
};

// Joe-Kuo new-joe-kuo-6.21201, dimensions 2..21.
constexpr std::array<DirectionEntry, Sobol::kMaxDim - 1> kJoeKuo{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
}};

}  // namespace

Sobol::Sobol(std::size_t dim) : dim_(dim), x_(dim, 0), v_(dim, std::vector<std::uint32_t>(kBits)) {
  if (dim == 0 || dim > kMaxDim)
    throw InputError("Sobol dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  for (unsigned b = 0; b < kBits; ++b) v_[0][b] = std::uint32_t{1} << (kBits - 1 - b);
  for (std::size_t d = 1; d < dim; ++d) {
    const auto& e = kJoeKuo[d - 1];
    auto& v = v_[d];
    for (unsigned b = 0; b < e.s && b < kBits; ++b) v[b] = e.m[b] << (kBits - 1 - b);
    for (unsigned b = e.s; b < kBits; ++b) {
      v[b] = v[b - e.s] ^ (v[b - e.s] >> e.s);
      for (unsigned k = 1; k < e.s; ++k)
        if ((e.a >> (e.s - 1 - k)) & 1U) v[b] ^= v[b - k];
    }
  }
}

std::vector<double> Sobol::next() {
  // Gray-code update: flip the direction number of the lowest zero bit of index.
  const unsigned c = static_cast<unsigned>(std::countr_one(index_));
  if (c >= kBits) throw std::out_of_range("Sobol sequence exhausted");
  ++index_;
  std::vector<double> out(dim_);
  for (std::size_t d = 0; d < dim_; ++d) {
    x_[d] ^= v_[d][c];
    out[d] = static_cast<double>(x_[d]) * 0x1.0p-32;
  }
  return out;
}

void Sobol::skip(std::uint64_t n) {
  for (std::uint64_t k = 0; k < n; ++k) next();
}

std::vector<double> Box::scale(const std::vector<double>& u) const {
  std::vector<double> x(u.size());
  for (std::size_t d = 0; d < u.size(); ++d) x[d] = lo[d] + u[d] * (hi[d] - lo[d]);
  return x;
}

std::vector<double> Box::unscale(const std::vector<double>& x) const {
  std::vector<double> u(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) u[d] = (x[d] - lo[d]) / (hi[d] - lo[d]);
  return u;
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) throw InputError("domain bounds are malformed");
  for (std::size_t d = 0; d < lo.size(); ++d)
    if (!(lo[d] < hi[d])) throw InputError("domain requires lo < hi in every dimension");
}

std::vector<std::vector<double>> sobol_points(std::size_t m, const Box& box) {
  box.validate();
  Sobol sobol(box.dim());
  std::vector<std::vector<double>> out;
  out.reserve(m);
  for (std::size_t n = 0; n < m; ++n) out.push_back(box.scale(sobol.next()));
  return out;
}

}  // namespace hotspot
