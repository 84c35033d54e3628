#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "transcheck/corpus.hpp"
#include "transcheck/eval.hpp"

namespace transcheck::synth {

// Desk-scale fixture generator with known ground truth. The seed fully
// determines the output.
struct SynthSpec {
  std::uint32_t vocab_size = 50;
  std::string dict_kind = "bijective";  // "bijective" | "k-to-1"
  std::uint32_t k = 2;                  // source words per target (k-to-1)
  std::uint32_t sentence_len_min = 3;
  std::uint32_t sentence_len_max = 8;
  std::uint32_t corpus_size = 1000;
  std::uint32_t eval_size = 0;
  std::uint64_t seed = 1;
  double plant_under_rate = 0.0;
  double plant_over_rate = 0.0;
  // Fraction of source words whose translations never appear in targets,
  // to exercise error-rate filtering.
  double implicit_rate = 0.0;
  bool zipfian = false;
  std::string source_lang = "src";
  std::string target_lang = "tgt";
};

struct SynthOutput {
  std::vector<corpus::SentencePair> train;
  std::vector<eval::EvalRecord> eval_set;  // exact labels by construction
  std::map<std::string, std::vector<std::string>> dictionary;
  std::vector<std::string> implicit_words;
};

// Training pairs are faithful word-by-word translations under the
// dictionary (implicit words' translations omitted). Eval pairs plant
// violations by deleting a translation (under) or duplicating one
// adjacently (over); planted sentences avoid implicit words so the labels
// stay exact. Throws std::invalid_argument on an inconsistent spec.
SynthOutput generate(const SynthSpec& spec);

// Flat TOML subset: "key = value" lines, '#' comments, bare/quoted strings,
// integers, floats, booleans.
SynthSpec load_spec_toml(const std::string& path);

// Writes train.tsv, eval.jsonl (when eval_size > 0), and dict.tsv
// (std-dict format) under out_dir.
void write_outputs(const SynthOutput& output, const SynthSpec& spec,
                   const std::string& out_dir);

}  // namespace transcheck::synth
