#include "transcheck/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace transcheck::synth {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next() % n);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

std::string padded(std::string_view prefix, std::uint32_t i,
                   std::uint32_t width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*u", static_cast<int>(width), i);
  return std::string(prefix) + buf;
}

std::uint32_t digits(std::uint32_t n) {
  std::uint32_t d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("inconsistent synth spec: " + what);
  };
  if (spec.vocab_size < 10) fail("vocab_size must be >= 10");
  if (spec.corpus_size < 1) fail("corpus_size must be >= 1");
  if (spec.sentence_len_min < 1 ||
      spec.sentence_len_max < spec.sentence_len_min) {
    fail("bad sentence length range");
  }
  if (spec.sentence_len_max > spec.vocab_size) {
    fail("sentence_len_max exceeds vocab_size (sentences use distinct words)");
  }
  for (double rate :
       {spec.plant_under_rate, spec.plant_over_rate, spec.implicit_rate}) {
    if (rate < 0.0 || rate > 1.0) fail("rates must be in [0, 1]");
  }
  if (spec.plant_under_rate + spec.plant_over_rate > 1.0) {
    fail("plant rates sum above 1");
  }
  const bool planting =
      spec.plant_under_rate > 0.0 || spec.plant_over_rate > 0.0;
  if (planting && spec.sentence_len_min < 2) {
    fail("planting requires sentence length >= 2");
  }
  if (spec.dict_kind != "bijective" && spec.dict_kind != "k-to-1") {
    fail("dict_kind must be \"bijective\" or \"k-to-1\"");
  }
  if (spec.dict_kind == "k-to-1" && spec.k < 1) fail("k must be >= 1");
  if (planting) {
    auto implicit_count = static_cast<std::uint32_t>(
        std::llround(spec.implicit_rate * spec.vocab_size));
    if (spec.vocab_size - implicit_count < spec.sentence_len_max) {
      fail("not enough non-implicit words to plant violations");
    }
  }
}

// Distinct indices from `pool`, order randomized. Zipfian mode weights
// pool rank r by 1/(r+1).
std::vector<std::uint32_t> sample_distinct(Rng& rng,
                                           const std::vector<std::uint32_t>& pool,
                                           std::uint32_t count, bool zipfian) {
  std::vector<std::uint32_t> picked;
  picked.reserve(count);
  if (!zipfian) {
    std::vector<std::uint32_t> copy = pool;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::uint32_t j = i + rng.below(static_cast<std::uint32_t>(copy.size()) - i);
      std::swap(copy[i], copy[j]);
      picked.push_back(copy[i]);
    }
    return picked;
  }
  std::vector<double> cumulative(pool.size());
  double total = 0.0;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cumulative[r] = total;
  }
  std::vector<bool> used(pool.size(), false);
  while (picked.size() < count) {
    double u = rng.unit() * total;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t r = static_cast<std::size_t>(it - cumulative.begin());
    if (r >= pool.size()) r = pool.size() - 1;
    if (used[r]) continue;
    used[r] = true;
    picked.push_back(pool[r]);
  }
  return picked;
}

}  // namespace

SynthOutput generate(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const std::uint32_t width = digits(spec.vocab_size - 1);

  std::vector<std::string> src_words(spec.vocab_size);
  std::vector<std::string> dst_of(spec.vocab_size);
  for (std::uint32_t i = 0; i < spec.vocab_size; ++i) {
    src_words[i] = padded("s", i, width);
    std::uint32_t d = spec.dict_kind == "k-to-1" ? i / spec.k : i;
    dst_of[i] = padded("t", d, width);
  }

  SynthOutput output;
  for (std::uint32_t i = 0; i < spec.vocab_size; ++i) {
    output.dictionary[src_words[i]] = {dst_of[i]};
  }

  const auto implicit_count = static_cast<std::uint32_t>(
      std::llround(spec.implicit_rate * spec.vocab_size));
  std::vector<bool> is_implicit(spec.vocab_size, false);
  {
    std::vector<std::uint32_t> order(spec.vocab_size);
    for (std::uint32_t i = 0; i < spec.vocab_size; ++i) order[i] = i;
    auto shuffled = sample_distinct(rng, order, spec.vocab_size, false);
    for (std::uint32_t i = 0; i < implicit_count; ++i) {
      is_implicit[shuffled[i]] = true;
      output.implicit_words.push_back(src_words[shuffled[i]]);
    }
    std::sort(output.implicit_words.begin(), output.implicit_words.end());
  }

  std::vector<std::uint32_t> full_pool;
  std::vector<std::uint32_t> explicit_pool;
  for (std::uint32_t i = 0; i < spec.vocab_size; ++i) {
    full_pool.push_back(i);
    if (!is_implicit[i]) explicit_pool.push_back(i);
  }

  auto sentence_len = [&]() {
    return spec.sentence_len_min +
           rng.below(spec.sentence_len_max - spec.sentence_len_min + 1);
  };

  // Word indices -> (source tokens, faithful target tokens). Implicit
  // words translate to nothing.
  auto translate = [&](const std::vector<std::uint32_t>& words,
                       corpus::SentencePair& pair) {
    pair.source.clear();
    pair.target.clear();
    for (auto w : words) {
      pair.source.push_back(src_words[w]);
      if (!is_implicit[w]) pair.target.push_back(dst_of[w]);
    }
  };

  // Training corpus: faithful translations, non-empty targets.
  output.train.reserve(spec.corpus_size);
  for (std::uint32_t i = 0; i < spec.corpus_size; ++i) {
    corpus::SentencePair pair;
    pair.id = i;
    do {
      translate(sample_distinct(rng, full_pool, sentence_len(), spec.zipfian),
                pair);
    } while (pair.target.empty());
    output.train.push_back(std::move(pair));
  }

  if (spec.eval_size == 0) return output;

  enum class Plant { none, under, over };
  const auto under_count = static_cast<std::uint32_t>(
      std::llround(spec.plant_under_rate * spec.eval_size));
  const auto over_count = static_cast<std::uint32_t>(
      std::llround(spec.plant_over_rate * spec.eval_size));
  std::vector<Plant> plan(spec.eval_size, Plant::none);
  for (std::uint32_t i = 0; i < under_count; ++i) plan[i] = Plant::under;
  for (std::uint32_t i = 0; i < over_count; ++i) {
    plan[under_count + i] = Plant::over;
  }
  for (std::uint32_t i = spec.eval_size - 1; i > 0; --i) {
    std::swap(plan[i], plan[rng.below(i + 1)]);
  }

  output.eval_set.reserve(spec.eval_size);
  for (std::uint32_t i = 0; i < spec.eval_size; ++i) {
    eval::EvalRecord record;
    record.pair.id = i;
    if (plan[i] == Plant::none) {
      do {
        translate(
            sample_distinct(rng, full_pool, sentence_len(), spec.zipfian),
            record.pair);
      } while (record.pair.target.empty());
      output.eval_set.push_back(std::move(record));
      continue;
    }

    // Planted records avoid implicit words and pick a position whose
    // translation token is unique in the target, so the label is exact.
    std::vector<std::uint32_t> words;
    std::uint32_t position = 0;
    while (true) {
      words = sample_distinct(rng, explicit_pool, sentence_len(), spec.zipfian);
      translate(words, record.pair);
      std::vector<std::uint32_t> unique_positions;
      for (std::uint32_t p = 0; p < words.size(); ++p) {
        const auto& token = dst_of[words[p]];
        if (std::count(record.pair.target.begin(), record.pair.target.end(),
                       token) == 1) {
          unique_positions.push_back(p);
        }
      }
      if (!unique_positions.empty()) {
        position = unique_positions[rng.below(
            static_cast<std::uint32_t>(unique_positions.size()))];
        break;
      }
    }
    const std::string& planted_target = dst_of[words[position]];
    auto target_it = std::find(record.pair.target.begin(),
                               record.pair.target.end(), planted_target);
    if (plan[i] == Plant::under) {
      record.pair.target.erase(target_it);
      record.label_under = true;
      record.under_tokens.push_back(src_words[words[position]]);
    } else {
      record.pair.target.insert(target_it, planted_target);
      record.label_over = true;
      record.over_tokens.push_back(planted_target);
    }
    output.eval_set.push_back(std::move(record));
  }
  return output;
}

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

SynthSpec load_spec_toml(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open synth spec: " + path);
  }
  SynthSpec spec;
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto fail = [&](const std::string& what) {
      throw std::runtime_error("synth spec line " +
                               std::to_string(line_number) + ": " + what);
    };
    // Strip comments outside quotes.
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line.resize(i);
        break;
      }
    }
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected key = value");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }

    auto as_u32 = [&]() -> std::uint32_t {
      try {
        return static_cast<std::uint32_t>(std::stoul(value));
      } catch (const std::logic_error&) {
        fail("bad integer: " + value);
      }
      return 0;
    };
    auto as_u64 = [&]() -> std::uint64_t {
      try {
        return std::stoull(value);
      } catch (const std::logic_error&) {
        fail("bad integer: " + value);
      }
      return 0;
    };
    auto as_double = [&]() -> double {
      try {
        return std::stod(value);
      } catch (const std::logic_error&) {
        fail("bad number: " + value);
      }
      return 0;
    };
    auto as_bool = [&]() -> bool {
      if (value == "true") return true;
      if (value == "false") return false;
      fail("bad boolean: " + value);
      return false;
    };

    if (key == "vocab_size") spec.vocab_size = as_u32();
    else if (key == "dict_kind") spec.dict_kind = value;
    else if (key == "k") spec.k = as_u32();
    else if (key == "sentence_len_min") spec.sentence_len_min = as_u32();
    else if (key == "sentence_len_max") spec.sentence_len_max = as_u32();
    else if (key == "corpus_size") spec.corpus_size = as_u32();
    else if (key == "eval_size") spec.eval_size = as_u32();
    else if (key == "seed") spec.seed = as_u64();
    else if (key == "plant_under_rate") spec.plant_under_rate = as_double();
    else if (key == "plant_over_rate") spec.plant_over_rate = as_double();
    else if (key == "implicit_rate") spec.implicit_rate = as_double();
    else if (key == "zipfian") spec.zipfian = as_bool();
    else if (key == "source_lang") spec.source_lang = value;
    else if (key == "target_lang") spec.target_lang = value;
    else fail("unknown key: " + key);
  }
  return spec;
}

void write_outputs(const SynthOutput& output, const SynthSpec& spec,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream train(fs::path(out_dir) / "train.tsv", std::ios::binary);
    if (!train) {
      throw std::runtime_error("cannot write train.tsv under " + out_dir);
    }
    for (const auto& pair : output.train) {
      train << corpus::serialize_pair(pair) << "\n";
    }
  }
  if (!output.eval_set.empty()) {
    eval::save_eval_dataset(output.eval_set,
                            (fs::path(out_dir) / "eval.jsonl").string());
  }
  {
    std::ofstream dict(fs::path(out_dir) / "dict.tsv", std::ios::binary);
    if (!dict) {
      throw std::runtime_error("cannot write dict.tsv under " + out_dir);
    }
    for (const auto& [word, translations] : output.dictionary) {
      dict << word;
      for (const auto& t : translations) dict << "\t" << t;
      dict << "\n";
    }
  }
  {
    // Resolved spec echo, reloadable with load_spec_toml.
    std::ofstream echo(fs::path(out_dir) / "spec.resolved.toml",
                       std::ios::binary);
    echo << "vocab_size = " << spec.vocab_size << "\n"
         << "dict_kind = \"" << spec.dict_kind << "\"\n"
         << "k = " << spec.k << "\n"
         << "sentence_len_min = " << spec.sentence_len_min << "\n"
         << "sentence_len_max = " << spec.sentence_len_max << "\n"
         << "corpus_size = " << spec.corpus_size << "\n"
         << "eval_size = " << spec.eval_size << "\n"
         << "seed = " << spec.seed << "\n"
         << "plant_under_rate = " << spec.plant_under_rate << "\n"
         << "plant_over_rate = " << spec.plant_over_rate << "\n"
         << "implicit_rate = " << spec.implicit_rate << "\n"
         << "zipfian = " << (spec.zipfian ? "true" : "false") << "\n"
         << "source_lang = \"" << spec.source_lang << "\"\n"
         << "target_lang = \"" << spec.target_lang << "\"\n";
  }
}

}  // namespace transcheck::synth
