#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace gsift {

/// splitmix64 (Steele, Lea & Flood). Tiny and fully specified, so shuffles
/// reproduce bit-for-bit in any language.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) from the top 53 bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Child seed for stream `index` of `seed`: first output of a splitmix64
/// seeded with seed ^ (first output of a splitmix64 seeded with index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  SplitMix64 inner(index);
  SplitMix64 outer(seed ^ inner.next());
  return outer.next();
}

/// Fisher-Yates from the back: swap element i with element next() % (i+1).
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace gsift
