#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "ljp/checkpoint.hpp"
#include "ljp/error.hpp"
#include "ljp/model_check.hpp"
#include "test_support.hpp"

namespace ljp {
namespace {

struct Trained {
  RunConfig config;
  Vocabulary vocab;
  Model model;
  std::vector<IndexedCase> data;
};

Trained trained_toy() {
  RunConfig config;
  config.model = test::toy_config();
  config.train.learning_rate = 0.01;
  config.train.batch_size = 4;
  config.train.epochs = 2;
  config.train.dropout = 0.0;
  std::vector<std::string> tokens{Vocabulary::kPadToken, Vocabulary::kUnkToken};
  for (int i = 0; i < 12; ++i) tokens.push_back(i == 3 ? "quote\"d é" : "w" + std::to_string(i));
  Vocabulary vocab = Vocabulary::from_tokens(tokens);
  Model model(config.model, vocab.size(), 5);
  std::mt19937_64 rng(3);
  std::vector<IndexedCase> data;
  for (int i = 0; i < 8; ++i) data.push_back(random_case(config.model, vocab.size(), 4, 2, rng));
  train(model, data, nullptr, config.train);
  return {config, vocab, std::move(model), data};
}

std::string serialized(const Trained& t) {
  std::ostringstream out;
  write_checkpoint(out, t.config, t.vocab, t.model);
  return out.str();
}

Checkpoint parse(const std::string& text) {
  std::istringstream in(text);
  return read_checkpoint(in);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Trained t = trained_toy();
  const std::string text = serialized(t);
  Checkpoint back = parse(text);
  EXPECT_EQ(back.vocab.tokens(), t.vocab.tokens());
  EXPECT_EQ(back.config.model.tasks.size(), 3u);
  EXPECT_EQ(back.config.train.learning_rate, 0.01);
  auto a = t.model.parameters();
  auto b = back.model.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].tensor->values(), b[i].tensor->values()) << a[i].name;
  }
  EXPECT_EQ(evaluate(back.model, t.data), evaluate(t.model, t.data));
  EXPECT_EQ(serialized({back.config, back.vocab, std::move(back.model), {}}), text);
}

TEST(Checkpoint, FileRoundTrip) {
  Trained t = trained_toy();
  const auto path = std::filesystem::temp_directory_path() / "ljp_checkpoint_test.ckpt";
  save_checkpoint(path, t.config, t.vocab, t.model);
  Checkpoint back = load_checkpoint(path);
  EXPECT_EQ(predict(back.model, t.data[0]).output.y_hat, predict(t.model, t.data[0]).output.y_hat);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), IoError);
}

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

TEST(Checkpoint, CorruptionIsDiagnosed) {
  Trained t = trained_toy();
  const std::string text = serialized(t);
  EXPECT_THROW(parse(replace_first(text, "ljp-checkpoint 1", "something-else 1")), ParseError);
  EXPECT_THROW(parse(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(parse(replace_first(text, "param encoder.word_embedding", "param encoder.other")),
               SchemaError);
  EXPECT_THROW(parse(replace_first(text, "param encoder.word_embedding 2 14 8",
                                   "param encoder.word_embedding 2 14 7")),
               DimensionError);
  EXPECT_THROW(parse(replace_first(text, "variant = mpbfn-wca", "variant = mpfp")), SchemaError);
}

}  // namespace
}  // namespace ljp
