#include "ljp/model_check.hpp"

#include <algorithm>
#include <numeric>

#include "ljp/error.hpp"
#include "ljp/init.hpp"
#include "ljp/ops.hpp"
#include "ljp/training.hpp"

namespace ljp {

IndexedCase random_case(const ModelConfig& config, std::size_t vocab_size, std::size_t collocations,
                        std::size_t numerals, std::mt19937_64& rng) {
  const std::size_t len = config.encoder.max_doc_len;
  if (vocab_size < 3) throw ConfigError("random_case needs at least one content token");
  if (numerals > len) throw ConfigError("more numerals than token positions");

  IndexedCase c;
  std::vector<std::size_t> pool(vocab_size - 2);
  std::iota(pool.begin(), pool.end(), std::size_t{2});
  if (pool.size() >= len) {
    std::shuffle(pool.begin(), pool.end(), rng);
    c.token_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(len));
  } else {
    std::uniform_int_distribution<std::size_t> tok(2, vocab_size - 1);
    c.token_ids.resize(len);
    for (auto& t : c.token_ids) t = tok(rng);
  }

  std::vector<std::size_t> positions(len);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::shuffle(positions.begin(), positions.end(), rng);
  std::uint64_t limit = 1;
  for (std::size_t k = 0; k < config.wca.ln; ++k) limit *= 10;
  std::uniform_int_distribution<std::uint64_t> value(0, limit - 1);
  for (std::size_t k = 0; k < numerals; ++k) {
    c.numerals.push_back({positions[k], value(rng), "unit"});
  }
  std::sort(c.numerals.begin(), c.numerals.end(),
            [](const Numeral& a, const Numeral& b) { return a.pos < b.pos; });

  std::uniform_int_distribution<std::size_t> pos(0, len - 1);
  for (std::size_t k = 0; k < collocations; ++k) {
    Collocation col{pos(rng), pos(rng)};
    if (k < c.numerals.size()) col.second = c.numerals[k].pos;
    while (col.first == col.second) col.first = pos(rng);
    c.collocations.push_back(col);
  }

  const TaskGraph graph = config.graph();
  for (std::size_t t = 0; t < graph.task_count(); ++t) {
    c.labels.push_back(std::uniform_int_distribution<std::size_t>(0, graph.classes(t) - 1)(rng));
  }
  return c;
}

GradCheckReport check_model_gradients(const ModelConfig& config, std::uint64_t seed,
                                      const ModelGradCheckOptions& options) {
  Model model(config, options.vocab_size, seed);
  if (options.perturbation > 0.0) {
    auto jitter = named_stream(seed, "gradcheck.point");
    std::uniform_real_distribution<double> shift(-options.perturbation, options.perturbation);
    for (const auto& p : model.parameters()) {
      for (double& v : p.tensor->data()) v += shift(jitter);
    }
  }
  auto rng = named_stream(seed, "gradcheck.cases");
  std::vector<IndexedCase> cases;
  for (std::size_t i = 0; i < options.cases; ++i) {
    cases.push_back(random_case(config, options.vocab_size, options.collocations, options.numerals, rng));
  }
  ScalarFn loss = [&](Tape& tape) {
    Var total;
    for (const auto& c : cases) {
      ForwardVars fv = model.forward(tape, c);
      Var l = multitask_loss(fv.judgment, c.labels, model.graph());
      total = total.valid() ? add(total, l) : l;
    }
    return total;
  };
  const auto params = model.parameters();
  return check_gradients(loss, params, options.step, options.stencil);
}

}  // namespace ljp
