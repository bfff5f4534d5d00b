#include "isl/rng.hpp"

namespace isl {

namespace {

// splitmix64: full-period mixer, the standard way to expand a small seed
// into well-distributed words.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 make_stream(const SeedSpec& seed, StreamLabel label) {
  std::uint64_t state = seed.master_seed;
  std::uint64_t h = splitmix64(state);
  state ^= (seed.trial_index + 1) * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(state);
  state ^= (static_cast<std::uint64_t>(label) + 1) * 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(state);

  std::uint64_t expand = h;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand)),
                    static_cast<std::uint32_t>(splitmix64(expand))};
  return std::mt19937_64(seq);
}

}  // namespace isl
