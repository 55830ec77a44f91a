#pragma once

#include <cmath>
#include <random>
#include <vector>

namespace modref::nn {

/// He-normal draw for conv weights: N(0, sqrt(2/fan_in)).
template <typename S>
std::vector<S> he_normal(size_t count, size_t fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  std::vector<S> v(count);
  for (S& x : v) x = static_cast<S>(dist(rng));
  return v;
}

}  // namespace modref::nn
