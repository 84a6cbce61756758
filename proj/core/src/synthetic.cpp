#include "ljp/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "ljp/error.hpp"
#include "ljp/init.hpp"

namespace ljp {
namespace {

template <class T>
std::vector<T> parse_named(const KeyValueConfig& kv, const std::string& key, const std::vector<T>& fallback) {
  if (!kv.has(key)) return fallback;
  std::vector<T> out;
  for (const auto& raw : kv.get_list(key, {})) {
    const std::string entry = trim(raw);
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw ConfigError(key + ": entry '" + entry + "' must be name:number");
    T item;
    item.name = trim(entry.substr(0, colon));
    const std::string num = trim(entry.substr(colon + 1));
    double v = 0.0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), v);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
      throw ConfigError(key + ": entry '" + entry + "' must be name:number");
    }
    if constexpr (std::is_same_v<T, ItemSpec>) {
      item.severity = v;
    } else {
      item.grams = v;
    }
    out.push_back(std::move(item));
  }
  return out;
}

void require_distinct(const std::vector<std::string>& words, const std::string& what,
                      std::set<std::string>& seen) {
  for (const auto& w : words) {
    if (w.empty() || w.find_first_of(" \t\n") != std::string::npos) {
      throw SpecError(what + " '" + w + "' must be a single non-empty token");
    }
    if (!seen.insert(w).second) throw SpecError("token '" + w + "' is used twice in the lexicon");
  }
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

struct Draft {
  std::size_t verb = 0;
  std::size_t modifier = 0;
  Holding a;
  Holding b;
  std::vector<std::string> lead, gap, tail;
  bool filler_pair = false;
};

std::vector<std::string> draw_filler(const CorpusSpec& spec, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::string> out(n);
  for (auto& w : out) w = spec.filler[pick(rng, spec.filler.size())];
  return out;
}

Draft draw_draft(const CorpusSpec& spec, std::mt19937_64& rng) {
  Draft d;
  d.verb = pick(rng, spec.verbs.size());
  d.modifier = pick(rng, spec.modifiers.size());
  d.a.item = pick(rng, spec.items.size());
  do {
    d.b.item = pick(rng, spec.items.size());
  } while (d.b.item == d.a.item);
  d.a.quantity = pick(rng, spec.quantities.size());
  d.a.unit = pick(rng, spec.units.size());
  d.b.quantity = pick(rng, spec.quantities.size());
  d.b.unit = pick(rng, spec.units.size());
  d.lead = draw_filler(spec, pick(rng, spec.max_edge_filler + 1), rng);
  d.gap = draw_filler(spec, spec.min_gap + pick(rng, spec.max_gap - spec.min_gap + 1), rng);
  d.tail = draw_filler(spec, pick(rng, spec.max_edge_filler + 1), rng);
  d.filler_pair = std::bernoulli_distribution(spec.filler_collocation_rate)(rng);
  return d;
}

CaseRecord render(const CorpusSpec& spec, const Draft& d) {
  CaseRecord rec;
  auto& t = rec.tokens;
  t = d.lead;
  t.push_back("defendant");
  t.push_back(spec.modifiers[d.modifier]);
  const std::size_t verb_pos = t.size();
  t.push_back(spec.verbs[d.verb]);
  const std::size_t item_a = t.size();
  t.push_back(spec.items[d.a.item].name);
  t.push_back("and");
  const std::size_t item_b = t.size();
  t.push_back(spec.items[d.b.item].name);
  const std::size_t gap_start = t.size();
  t.insert(t.end(), d.gap.begin(), d.gap.end());
  t.push_back("weighing");
  const std::size_t qty_a = t.size();
  t.push_back(quantity_token(spec, d.a));
  t.push_back("and");
  const std::size_t qty_b = t.size();
  t.push_back(quantity_token(spec, d.b));
  t.push_back("respectively");
  t.insert(t.end(), d.tail.begin(), d.tail.end());

  rec.numerals.push_back({qty_a, spec.quantities[d.a.quantity], spec.units[d.a.unit].name});
  rec.numerals.push_back({qty_b, spec.quantities[d.b.quantity], spec.units[d.b.unit].name});
  rec.collocations.push_back({verb_pos, item_a});
  rec.collocations.push_back({verb_pos, item_b});
  rec.collocations.push_back({item_a, qty_a});
  rec.collocations.push_back({item_b, qty_b});
  if (d.filler_pair && d.gap.size() >= 2) rec.collocations.push_back({gap_start, gap_start + 1});

  const std::size_t law = d.verb;
  rec.labels["law"] = law;
  rec.labels["charge"] = law * spec.modifiers.size() + d.modifier;
  rec.labels["penalty"] = penalty_bucket(spec.thresholds, quantity_score(spec, d.a, d.b));
  return rec;
}

std::size_t draft_penalty(const CorpusSpec& spec, const Draft& d) {
  return penalty_bucket(spec.thresholds, quantity_score(spec, d.a, d.b));
}

Draft swapped(const Draft& d) {
  Draft s = d;
  std::swap(s.a.quantity, s.b.quantity);
  std::swap(s.a.unit, s.b.unit);
  return s;
}

}  // namespace

void CorpusSpec::validate() const {
  if (verbs.empty()) throw SpecError("at least one verb (crime type) is required");
  if (modifiers.empty()) throw SpecError("at least one modifier is required");
  if (items.size() < 2) throw SpecError("at least two items are required");
  if (quantities.size() < 2) throw SpecError("at least two quantities are required");
  if (units.empty()) throw SpecError("at least one unit is required");
  if (filler.empty()) throw SpecError("filler lexicon is empty");
  if (min_gap > max_gap) throw SpecError("min_gap exceeds max_gap");
  for (const auto& it : items) {
    if (!(it.severity > 0.0)) throw SpecError("item '" + it.name + "' needs a positive severity");
  }
  for (const auto& u : units) {
    if (!(u.grams > 0.0)) throw SpecError("unit '" + u.name + "' needs a positive gram factor");
  }
  for (auto q : quantities) {
    if (q == 0) throw SpecError("quantities must be positive");
  }
  std::set<std::uint64_t> distinct_q(quantities.begin(), quantities.end());
  if (distinct_q.size() != quantities.size()) throw SpecError("quantities must be distinct");
  if (thresholds.empty()) throw SpecError("at least one penalty threshold is required");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) throw SpecError("penalty thresholds must be strictly increasing");
  }
  for (double f : {train_contrast_fraction, valid_contrast_fraction, test_contrast_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) throw SpecError("contrast fractions must lie in [0, 1]");
  }
  if (!(filler_collocation_rate >= 0.0 && filler_collocation_rate <= 1.0)) {
    throw SpecError("filler_collocation_rate must lie in [0, 1]");
  }

  std::set<std::string> seen{"defendant", "and", "weighing", "respectively"};
  require_distinct(verbs, "verb", seen);
  require_distinct(modifiers, "modifier", seen);
  std::vector<std::string> item_names;
  for (const auto& it : items) item_names.push_back(it.name);
  require_distinct(item_names, "item", seen);
  std::set<std::string> filler_seen;
  for (const auto& w : filler) {
    if (seen.count(w)) throw SpecError("filler token '" + w + "' collides with a content token");
    filler_seen.insert(w);
  }
  std::set<std::string> unit_names;
  for (const auto& u : units) {
    if (u.name.empty() || !unit_names.insert(u.name).second) throw SpecError("unit names must be distinct and non-empty");
  }

  // A contrast pair needs some swap that changes the bucket.
  bool contrast_possible = false;
  for (std::size_t ia = 0; ia < items.size() && !contrast_possible; ++ia) {
    for (std::size_t ib = 0; ib < items.size() && !contrast_possible; ++ib) {
      if (ia == ib) continue;
      for (std::size_t qa = 0; qa < quantities.size() && !contrast_possible; ++qa) {
        for (std::size_t qb = 0; qb < quantities.size() && !contrast_possible; ++qb) {
          for (std::size_t u = 0; u < units.size() && !contrast_possible; ++u) {
            Holding a{ia, qa, u}, b{ib, qb, u};
            Holding sa{ia, qb, u}, sb{ib, qa, u};
            contrast_possible = penalty_bucket(thresholds, quantity_score(*this, a, b)) !=
                                penalty_bucket(thresholds, quantity_score(*this, sa, sb));
          }
        }
      }
    }
  }
  const bool wants_contrast =
      train_contrast_fraction > 0 || valid_contrast_fraction > 0 || test_contrast_fraction > 0;
  if (wants_contrast && !contrast_possible) {
    throw SpecError("no quantity swap changes the penalty bucket; contrast pairs are impossible");
  }
}

TaskGraph CorpusSpec::task_graph() const {
  return TaskGraph::legal_default(law_classes(), charge_classes(), penalty_classes());
}

CorpusSpec corpus_spec_from(const KeyValueConfig& kv) {
  kv.require_known({"seed", "train_size", "valid_size", "test_size", "train_contrast_fraction",
                    "valid_contrast_fraction", "test_contrast_fraction", "verbs", "modifiers",
                    "items", "quantities", "units", "thresholds", "filler", "min_gap", "max_gap",
                    "max_edge_filler", "filler_collocation_rate"});
  CorpusSpec s;
  s.seed = kv.get_u64("seed", s.seed);
  s.train_size = kv.get_size("train_size", s.train_size);
  s.valid_size = kv.get_size("valid_size", s.valid_size);
  s.test_size = kv.get_size("test_size", s.test_size);
  s.train_contrast_fraction = kv.get_double("train_contrast_fraction", s.train_contrast_fraction);
  s.valid_contrast_fraction = kv.get_double("valid_contrast_fraction", s.valid_contrast_fraction);
  s.test_contrast_fraction = kv.get_double("test_contrast_fraction", s.test_contrast_fraction);
  auto words = [&](const char* key, const std::vector<std::string>& fallback) {
    std::vector<std::string> out;
    for (const auto& w : kv.get_list(key, fallback)) {
      if (!trim(w).empty()) out.push_back(trim(w));
    }
    return out;
  };
  s.verbs = words("verbs", s.verbs);
  s.modifiers = words("modifiers", s.modifiers);
  s.filler = words("filler", s.filler);
  s.items = parse_named(kv, "items", s.items);
  s.units = parse_named(kv, "units", s.units);
  if (kv.has("quantities")) {
    s.quantities.clear();
    for (auto q : kv.get_size_list("quantities", {})) s.quantities.push_back(q);
  }
  s.thresholds = kv.get_double_list("thresholds", s.thresholds);
  s.min_gap = kv.get_size("min_gap", s.min_gap);
  s.max_gap = kv.get_size("max_gap", s.max_gap);
  s.max_edge_filler = kv.get_size("max_edge_filler", s.max_edge_filler);
  s.filler_collocation_rate = kv.get_double("filler_collocation_rate", s.filler_collocation_rate);
  s.validate();
  return s;
}

CorpusSpec load_corpus_spec(const std::filesystem::path& path) {
  return corpus_spec_from(KeyValueConfig::load(path));
}

double holding_grams(const CorpusSpec& spec, const Holding& h) {
  return static_cast<double>(spec.quantities.at(h.quantity)) * spec.units.at(h.unit).grams;
}

double quantity_score(const CorpusSpec& spec, const Holding& a, const Holding& b) {
  return spec.items.at(a.item).severity * holding_grams(spec, a) +
         spec.items.at(b.item).severity * holding_grams(spec, b);
}

std::size_t penalty_bucket(const std::vector<double>& thresholds, double score) {
  if (!(score > 0.0)) throw DomainError("quantity score must be positive");
  const double level = std::log10(score);
  std::size_t bucket = 0;
  for (double t : thresholds) {
    if (t <= level) ++bucket;
  }
  return bucket;
}

std::string quantity_token(const CorpusSpec& spec, const Holding& h) {
  return std::to_string(spec.quantities.at(h.quantity)) + spec.units.at(h.unit).name;
}

SyntheticSplit generate_split(const CorpusSpec& spec, std::size_t count, double contrast_fraction,
                              std::mt19937_64& rng) {
  spec.validate();
  std::size_t pairs = static_cast<std::size_t>(std::llround(static_cast<double>(count) * contrast_fraction)) / 2;
  pairs = std::min(pairs, count / 2);
  const std::size_t singles = count - 2 * pairs;

  // Interleave pairs and singles in a seeded order so pairs stay adjacent.
  std::vector<bool> slots(pairs + singles, false);
  std::fill(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(pairs), true);
  std::shuffle(slots.begin(), slots.end(), rng);

  SyntheticSplit split;
  split.records.reserve(count);
  for (bool is_pair : slots) {
    if (!is_pair) {
      split.records.push_back(render(spec, draw_draft(spec, rng)));
      continue;
    }
    Draft d;
    do {
      d = draw_draft(spec, rng);
    } while (draft_penalty(spec, d) == draft_penalty(spec, swapped(d)));
    const std::size_t first = split.records.size();
    split.records.push_back(render(spec, d));
    split.records.push_back(render(spec, swapped(d)));
    split.contrast_pairs.emplace_back(first, first + 1);
  }
  return split;
}

SyntheticCorpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  auto train_rng = named_stream(spec.seed, "corpus.train");
  auto valid_rng = named_stream(spec.seed, "corpus.valid");
  auto test_rng = named_stream(spec.seed, "corpus.test");
  corpus.train = generate_split(spec, spec.train_size, spec.train_contrast_fraction, train_rng);
  corpus.valid = generate_split(spec, spec.valid_size, spec.valid_contrast_fraction, valid_rng);
  corpus.test = generate_split(spec, spec.test_size, spec.test_contrast_fraction, test_rng);
  return corpus;
}

}  // namespace ljp
