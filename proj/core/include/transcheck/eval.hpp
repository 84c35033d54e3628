#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transcheck/corpus.hpp"
#include "transcheck/detect.hpp"
#include "transcheck/lexicon.hpp"

namespace transcheck::eval {

struct EvalRecord {
  corpus::SentencePair pair;
  bool label_under = false;
  bool label_over = false;
  // Optional annotations of the offending tokens.
  std::vector<std::string> under_tokens;
  std::vector<std::string> over_tokens;

  bool operator==(const EvalRecord&) const = default;
};

enum class ViolationType { under, over };

std::string_view to_string(ViolationType type);
ViolationType violation_type_from_string(std::string_view s);

// JSONL, one record per line with required fields source, translation,
// label_under, label_over. Missing fields and empty datasets are fatal.
std::vector<EvalRecord> load_eval_dataset(const std::string& path);
void save_eval_dataset(std::span<const EvalRecord> records,
                       const std::string& path);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::uint64_t labeled = 0;   // |S|
  std::uint64_t flagged = 0;   // |S'|
  std::uint64_t hits = 0;      // |S intersect S'|
  std::uint64_t flagged_item_count = 0;  // total violations of the type

  bool operator==(const Metrics&) const = default;
};

// precision = hits/flagged (0 when nothing flagged),
// recall = hits/labeled (1 when nothing labeled),
// f = 2PR/(P+R) (0 when P+R = 0).
Metrics metrics_from_counts(std::uint64_t labeled, std::uint64_t flagged,
                            std::uint64_t hits,
                            std::uint64_t flagged_item_count = 0);

// Sentence-level: a record is flagged when it has at least one violation
// of the requested type.
Metrics evaluate(std::span<const EvalRecord> records,
                 const lexicon::Lexicon& lexicon,
                 const detect::CheckConfig& config, ViolationType type);

struct SweepPoint {
  double e_th = 0.0;
  Metrics metrics;
};

struct SweepResult {
  std::string dataset;
  std::vector<SweepPoint> points;
};

// "start:end:step" (inclusive end) or a comma-separated list. Values must
// be in (0, 1] and strictly increasing.
std::vector<double> parse_grid(std::string_view spec);

// Runs the under-translation evaluation per grid point.
SweepResult sweep_e_th(std::span<const EvalRecord> records,
                       const lexicon::Lexicon& lexicon,
                       const detect::CheckConfig& base_config,
                       std::span<const double> grid,
                       std::string dataset_name = {});

// Columns: dataset,e_th,precision,recall,f,count
std::string sweep_csv(const SweepResult& result);

std::string metrics_json(const Metrics& metrics, ViolationType type);

enum class BaselineKind { std_dict, word_align };

// Adapts an external lexicon source to the Lexicon shape so the unchanged
// detectors can run on it.
//   std-dict:    "word<TAB>trans1<TAB>trans2..." — all translations kept in
//                file order, score 1, error rate 0, no phrases.
//   word-align:  "src<TAB>dst<TAB>prob" — top c_tr by probability.
lexicon::Lexicon load_baseline_lexicon(const std::string& path,
                                       BaselineKind kind, std::uint32_t c_tr,
                                       lexicon::Direction direction);

}  // namespace transcheck::eval
