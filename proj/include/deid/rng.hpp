// rng.hpp -- stable keyed hashing and a small deterministic RNG.
//
// Surrogate draws are keyed hashes rather than stateful RNG streams, so
// parallel document processing cannot reorder them and outputs are
// reproducible across runs and machines.

#ifndef DEID_RNG_HPP
#define DEID_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace deid {

inline uint64_t fnv1a64(std::string_view s,
                        uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t mix64(uint64_t x) {  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class KeyedRng {
public:
  explicit KeyedRng(uint64_t seed) : state_(seed) {}

  KeyedRng(uint64_t seed, std::string_view doc_key, std::string_view purpose,
           std::string_view material)
      : state_(mix64(mix64(seed) ^ fnv1a64(doc_key)) ^
               mix64(fnv1a64(purpose) ^ fnv1a64(material))) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // uniform in [0, n); n > 0
  uint32_t below(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

private:
  uint64_t state_;
};

// In-place Fisher-Yates; hand-rolled so shuffles are identical across
// standard library implementations.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, uint64_t seed) {
  KeyedRng rng(mix64(seed));
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = rng.below(static_cast<uint32_t>(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace deid

#endif  // DEID_RNG_HPP
