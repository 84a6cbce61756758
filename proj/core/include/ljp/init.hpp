#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ljp/tensor.hpp"

namespace ljp {

/// Independent stream per (seed, name), so adding or removing a parameter
/// never shifts the initial values of the others.
std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name);

void init_uniform(Tensor& t, double lo, double hi, std::uint64_t seed, std::string_view name);
/// U(-a, a) with a = sqrt(6 / (fan_in + fan_out)) for a [fan_out x fan_in] matrix.
void init_glorot(Tensor& t, std::uint64_t seed, std::string_view name);

}  // namespace ljp
