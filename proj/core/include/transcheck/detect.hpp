#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "transcheck/corpus.hpp"
#include "transcheck/lexicon.hpp"
#include "transcheck/phrases.hpp"

namespace transcheck::detect {

struct CheckConfig {
  // Error-rate tolerance in (0, 1]. Entries with error_rate > e_th are
  // exempt from under-translation judgment; 1.0 turns filtering off.
  double e_th = 0.2;
  // Max token distance between two occurrences for them to count as "near"
  // in the over-translation check.
  std::uint32_t proximity_window = 10;
  // Stop words of the target language, removed before over-translation
  // counting.
  corpus::StopWordSet stopwords;
};

// Genre presets for e_th.
inline constexpr double kEthDefault = 0.2;
inline constexpr double kEthNews = 0.15;
inline constexpr double kEthOral = 0.25;

struct UnderViolation {
  std::string item;  // offending source word or phrase key
  std::vector<lexicon::Translation> translations_checked;
  double error_rate = 0.0;

  bool operator==(const UnderViolation&) const = default;
};

struct OverViolation {
  std::string item;  // offending target word
  std::uint64_t count_target = 0;
  std::uint64_t count_source = 0;
  std::vector<std::size_t> positions;  // token positions in the translation

  bool operator==(const OverViolation&) const = default;
};

struct ViolationReport {
  std::uint64_t task_id = 0;
  std::vector<UnderViolation> under;
  std::vector<OverViolation> over;

  bool has_under() const { return !under.empty(); }
  bool has_over() const { return !over.empty(); }
  bool operator==(const ViolationReport&) const = default;
};

// For each source item that has a lexicon entry with error_rate <= e_th,
// emits a violation when none of the entry's translations occurs in the
// target. Items without an entry give no judgment. Violations are reported
// once per distinct item, in sentence order.
std::vector<UnderViolation> check_under(const phrases::ItemizedSentence& source,
                                        std::span<const corpus::Token> target,
                                        const lexicon::Lexicon& lexicon,
                                        const CheckConfig& config);

// Counts target-word occurrences after stop-word removal; a word with at
// least two near occurrences is flagged when fewer source-side item
// occurrences map to it than it occurs.
std::vector<OverViolation> check_over(const phrases::ItemizedSentence& source,
                                      std::span<const corpus::Token> target,
                                      const lexicon::Lexicon& lexicon,
                                      const CheckConfig& config);

// Itemizes the source with the lexicon's phrase inventory and runs both
// checks. Pure function of its inputs; reports are deterministic.
ViolationReport check(const corpus::SentencePair& pair,
                      const lexicon::Lexicon& lexicon,
                      const CheckConfig& config);

// One line of JSON (no trailing newline). `ts` and `key` add optional
// timestamp and dedup-key fields used by the monitor tooling.
std::string report_to_json(const ViolationReport& report,
                           std::optional<std::int64_t> ts = std::nullopt,
                           std::optional<std::uint64_t> key = std::nullopt);

}  // namespace transcheck::detect
