#include "rareval/random.hpp"

#include <numeric>
#include <stdexcept>

namespace rareval {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ sub);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sub)};
  return Rng(seq);
}

std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t population,
                                                    std::size_t k) {
  if (k > population) throw std::invalid_argument("sample larger than population");
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace rareval
