#include "oracles.hpp"

#include <cmath>

namespace starform::oracle {

double brute_force_semivariation(const PolyMeasure& gamma) {
  const std::size_t k = gamma.atom_count();
  const auto m = static_cast<std::size_t>(gamma.order());
  const std::size_t bits = m * k;
  const auto entries = gamma.entries();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    // Sign of atom j in factor l is bit l*k + j.
    double total = 0.0;
    for (std::size_t flat = 0; flat < entries.size(); ++flat) {
      std::size_t rest = flat;
      int sign = 1;
      for (std::size_t l = m; l > 0; --l) {
        const std::size_t j = rest % k;
        rest /= k;
        if ((mask >> ((l - 1) * k + j)) & 1u) sign = -sign;
      }
      total += sign * entries[flat];
    }
    best = std::max(best, std::abs(total));
  }
  return best;
}

PolyMeasure dyadic_tensor(int order, std::size_t atoms, Rng& rng) {
  std::size_t size = 1;
  for (int l = 0; l < order; ++l) size *= atoms;
  std::vector<double> entries(size);
  constexpr std::int64_t kScale = std::int64_t{1} << 20;
  for (auto& e : entries) {
    const auto raw = static_cast<std::int64_t>(rng.below(2 * kScale + 1)) - kScale;
    e = std::ldexp(static_cast<double>(raw), -20);
  }
  return PolyMeasure(order, atoms, std::move(entries));
}

std::vector<std::vector<std::size_t>> all_subsets(std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < k; ++j) {
      if ((mask >> j) & 1u) s.push_back(j);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double ellipsoid_volume(const std::vector<double>& axes) {
  double p = unit_ball_volume(static_cast<int>(axes.size()));
  for (double a : axes) p *= a;
  return p;
}

}  // namespace starform::oracle
