#include "whmc/rng.hpp"

#include <cmath>

namespace whmc {
namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                 std::string_view stream_id) {
  return splitmix64(master_seed ^ fnv1a64(stream_id));
}

double RngStream::exponential() { return -std::log1p(-uniform()); }

}  // namespace whmc
