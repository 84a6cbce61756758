#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ljp/config.hpp"
#include "ljp/corpus.hpp"
#include "ljp/task_graph.hpp"

namespace ljp {

struct ItemSpec {
  std::string name;
  double severity = 1.0;
};

struct UnitSpec {
  std::string name;
  double grams = 1.0;
};

/// Generator for quantity-sensitive synthetic cases.
///
/// Each case reads
///   [filler] defendant MODIFIER VERB ITEM_A and ITEM_B [gap filler]
///   weighing QTY_A and QTY_B respectively [filler]
/// where QTY tokens are number+unit composites such as "10kg".
/// law = verb index, charge = law * |modifiers| + modifier index and
/// penalty = number of thresholds <= log10(sev_A * grams_A + sev_B * grams_B).
///
/// Config keys: seed, train_size, valid_size, test_size,
/// train_contrast_fraction, valid_contrast_fraction, test_contrast_fraction,
/// verbs, modifiers, items (name:severity,...), quantities,
/// units (name:grams,...), thresholds, filler, min_gap, max_gap,
/// max_edge_filler, filler_collocation_rate.
struct CorpusSpec {
  std::uint64_t seed = 7;
  std::size_t train_size = 2000;
  std::size_t valid_size = 200;
  std::size_t test_size = 400;
  double train_contrast_fraction = 0.5;
  double valid_contrast_fraction = 0.5;
  double test_contrast_fraction = 0.5;

  std::vector<std::string> verbs{"stole", "smuggled", "trafficked"};
  std::vector<std::string> modifiers{"alone", "jointly"};
  std::vector<ItemSpec> items{{"copper", 1},  {"silver", 3},   {"gold", 10},
                              {"ivory", 30},  {"weapons", 100}, {"drugs", 300}};
  std::vector<std::uint64_t> quantities{1, 2, 5, 10, 20, 50};
  std::vector<UnitSpec> units{{"g", 1}, {"kg", 1000}};
  std::vector<double> thresholds{0.75, 1.5, 2.25, 3.0, 3.75, 4.5, 5.25, 6.0, 6.75, 7.5};
  std::vector<std::string> filler{"the",   "court", "found",  "that",    "on",     "day",
                                  "in",    "city",  "near",   "market",  "later",  "police",
                                  "a",     "witness", "said", "records", "showed", "it"};
  std::size_t min_gap = 6;
  std::size_t max_gap = 9;
  std::size_t max_edge_filler = 2;
  double filler_collocation_rate = 0.5;

  /// Throws SpecError when the label rules are not total and consistent.
  void validate() const;

  std::size_t law_classes() const { return verbs.size(); }
  std::size_t charge_classes() const { return verbs.size() * modifiers.size(); }
  std::size_t penalty_classes() const { return thresholds.size() + 1; }
  /// The law/charge/penalty graph sized to this spec.
  TaskGraph task_graph() const;
};

CorpusSpec corpus_spec_from(const KeyValueConfig& kv);
CorpusSpec load_corpus_spec(const std::filesystem::path& path);

/// One item-with-quantity slot of a case.
struct Holding {
  std::size_t item = 0;
  std::size_t quantity = 0;
  std::size_t unit = 0;
};

double holding_grams(const CorpusSpec& spec, const Holding& h);
double quantity_score(const CorpusSpec& spec, const Holding& a, const Holding& b);
std::size_t penalty_bucket(const std::vector<double>& thresholds, double score);
std::string quantity_token(const CorpusSpec& spec, const Holding& h);

struct SyntheticSplit {
  std::vector<CaseRecord> records;
  /// Adjacent (i, i + 1) pairs that swap quantities between items.
  std::vector<std::pair<std::size_t, std::size_t>> contrast_pairs;
};

struct SyntheticCorpus {
  SyntheticSplit train;
  SyntheticSplit valid;
  SyntheticSplit test;
};

/// Builds `count` cases, of which round(count * contrast_fraction) (rounded
/// down to even) come as contrast pairs.
SyntheticSplit generate_split(const CorpusSpec& spec, std::size_t count, double contrast_fraction,
                              std::mt19937_64& rng);
SyntheticCorpus generate_corpus(const CorpusSpec& spec);

}  // namespace ljp
