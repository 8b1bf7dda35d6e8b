#ifndef COVERCERT_RNG_HPP
#define COVERCERT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "covercert/errors.hpp"

namespace covercert {

// splitmix64 finalizer; used to derive independent streams from (seed, index)
// so that trial i sees the same randomness no matter how trials are scheduled
// across worker threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// Counter-based stream splitting: the engine for a given (master, counter)
// pair is a pure function of those two values.
inline Rng make_stream(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t s = splitmix64(master ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
  return Rng(s);
}

inline double uniform_real(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Inverse-CDF sampler over a fixed weight vector (weights need not be
// normalized; they must be nonnegative with positive total).
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights) {
    cum_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw InvalidDistribution("negative weight in sampler");
      acc += w;
      cum_.push_back(acc);
    }
    if (cum_.empty() || acc <= 0.0)
      throw InvalidDistribution("sampler needs positive total weight");
    total_ = acc;
  }

  std::size_t sample(Rng& rng) const {
    double u = uniform_real(rng) * total_;
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] > u) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  std::vector<double> cum_;
  double total_ = 0.0;
};

}  // namespace covercert

#endif
