#include "ljp/init.hpp"

#include <cmath>

#include "ljp/error.hpp"

namespace ljp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(fnv1a(name))));
}

void init_uniform(Tensor& t, double lo, double hi, std::uint64_t seed, std::string_view name) {
  auto rng = named_stream(seed, name);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : t.data()) v = dist(rng);
}

void init_glorot(Tensor& t, std::uint64_t seed, std::string_view name) {
  if (t.rank() != 2) throw RankError("glorot init needs a matrix");
  const double limit = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
  init_uniform(t, -limit, limit, seed, name);
}

}  // namespace ljp
