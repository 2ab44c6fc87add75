#pragma once

#include <cmath>
#include <cstdint>

namespace brwlab {

// Counter-based generator: output i is a hash of (key, i).  Child streams are
// derived by hashing (key, stream id), so replicas and particles get
// independent streams without any coordination.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : key_(hash64(seed ^ kGamma)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() { return hash64(key_ + kGamma * ++counter_); }

  // uniform on (0, 1]
  double uniform() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  Rng split(std::uint64_t stream) const {
    Rng child(0);
    child.key_ = hash64(key_ ^ hash64(stream + kGamma));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t key() const { return key_; }

  // splitmix64 finalizer
  static std::uint64_t hash64(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace brwlab
