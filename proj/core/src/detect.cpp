#include "transcheck/detect.hpp"

#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace transcheck::detect {

using ordered_json = nlohmann::ordered_json;

std::vector<UnderViolation> check_under(const phrases::ItemizedSentence& source,
                                        std::span<const corpus::Token> target,
                                        const lexicon::Lexicon& lexicon,
                                        const CheckConfig& config) {
  std::vector<UnderViolation> violations;
  const phrases::TokenIndex target_index(target);
  for (const auto& item : source.distinct_items()) {
    const lexicon::LexiconEntry* entry = lexicon.find(item);
    if (entry == nullptr) continue;  // no evidence, no judgment
    if (entry->error_rate > config.e_th) continue;  // error-prone item
    bool present = false;
    for (const auto& trans : entry->translations) {
      if (target_index.contains_item(trans.item, lexicon.config.d_ph)) {
        present = true;
        break;
      }
    }
    if (!present) {
      violations.push_back({item, entry->translations, entry->error_rate});
    }
  }
  return violations;
}

std::vector<OverViolation> check_over(const phrases::ItemizedSentence& source,
                                      std::span<const corpus::Token> target,
                                      const lexicon::Lexicon& lexicon,
                                      const CheckConfig& config) {
  // Occurrence positions per target word, stop words removed. Positions
  // index the original token sequence.
  std::map<std::string_view, std::vector<std::size_t>> positions;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (config.stopwords.contains(target[i])) continue;
    positions[target[i]].push_back(i);
  }

  std::vector<OverViolation> violations;
  for (const auto& [word, occ] : positions) {
    if (occ.size() < 2) continue;
    bool near = false;
    for (std::size_t i = 1; i < occ.size(); ++i) {
      if (occ[i] - occ[i - 1] <= config.proximity_window) {
        near = true;
        break;
      }
    }
    if (!near) continue;

    // count_s: source-side item occurrences whose translation list
    // contains this word.
    auto mapped = lexicon.reverse_lookup(word);
    std::uint64_t count_source = 0;
    if (!mapped.empty()) {
      std::unordered_set<std::string_view> sources(mapped.begin(),
                                                   mapped.end());
      for (const auto& w : source.words) {
        if (sources.contains(w)) ++count_source;
      }
      for (const auto& p : source.phrases) {
        if (sources.contains(p.key)) ++count_source;
      }
    }
    if (count_source < occ.size()) {
      violations.push_back(
          {std::string(word), occ.size(), count_source, occ});
    }
  }
  return violations;
}

ViolationReport check(const corpus::SentencePair& pair,
                      const lexicon::Lexicon& lexicon,
                      const CheckConfig& config) {
  auto itemized =
      lexicon.config.phrases_src
          ? phrases::itemize(pair.source, lexicon.inventory_src,
                             lexicon.config.phrase_config())
          : phrases::ItemizedSentence{pair.source, {}};
  ViolationReport report;
  report.task_id = pair.id;
  report.under = check_under(itemized, pair.target, lexicon, config);
  report.over = check_over(itemized, pair.target, lexicon, config);
  return report;
}

std::string report_to_json(const ViolationReport& report,
                           std::optional<std::int64_t> ts,
                           std::optional<std::uint64_t> key) {
  ordered_json j;
  j["id"] = report.task_id;
  if (ts) j["ts"] = *ts;
  if (key) j["key"] = *key;
  j["has_under"] = report.has_under();
  j["has_over"] = report.has_over();
  j["under"] = ordered_json::array();
  for (const auto& v : report.under) {
    ordered_json t = ordered_json::array();
    for (const auto& trans : v.translations_checked) t.push_back(trans.item);
    j["under"].push_back({{"item", v.item},
                          {"error_rate", v.error_rate},
                          {"translations", std::move(t)}});
  }
  j["over"] = ordered_json::array();
  for (const auto& v : report.over) {
    j["over"].push_back({{"item", v.item},
                         {"count_source", v.count_source},
                         {"count_target", v.count_target},
                         {"positions", v.positions}});
  }
  return j.dump();
}

}  // namespace transcheck::detect
