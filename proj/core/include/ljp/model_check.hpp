#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "ljp/corpus.hpp"
#include "ljp/gradcheck.hpp"
#include "ljp/model.hpp"

namespace ljp {

/// A random well-formed case for `config`: max_doc_len token ids drawn from
/// [2, vocab_size) (all distinct when the vocabulary allows), `numerals`
/// quantity annotations with values below 10^ln, and `collocations` pairs of
/// which the first ones attach each numeral to another token. Labels are
/// uniform over each task's classes.
IndexedCase random_case(const ModelConfig& config, std::size_t vocab_size, std::size_t collocations,
                        std::size_t numerals, std::mt19937_64& rng);

struct ModelGradCheckOptions {
  std::size_t vocab_size = 14;
  std::size_t cases = 1;
  std::size_t collocations = 4;
  std::size_t numerals = 2;
  /// Each coordinate of the seeded initialization is shifted by
  /// U(-perturbation, perturbation) before checking; 0 checks at init.
  double perturbation = 0.5;
  double step = 1e-3;
  Stencil stencil = Stencil::kFivePoint;
};

/// Finite-difference check of the summed multi-task loss over random cases
/// against reverse mode, for every parameter of a seeded model. Dropout is
/// off.
GradCheckReport check_model_gradients(const ModelConfig& config, std::uint64_t seed,
                                      const ModelGradCheckOptions& options = {});

}  // namespace ljp
