#include "transcheck/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace transcheck::eval {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ViolationType type) {
  return type == ViolationType::under ? "under" : "over";
}

ViolationType violation_type_from_string(std::string_view s) {
  if (s == "under") return ViolationType::under;
  if (s == "over") return ViolationType::over;
  throw std::invalid_argument("unknown violation type: " + std::string(s));
}

std::vector<EvalRecord> load_eval_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open eval dataset: " + path);
  }
  std::vector<EvalRecord> records;
  std::string line;
  std::uint64_t record_number = 0;
  std::uint64_t next_id = 0;
  while (std::getline(in, line)) {
    ++record_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("eval dataset record " +
                               std::to_string(record_number) +
                               ": invalid JSON: " + e.what());
    }
    for (const char* field :
         {"source", "translation", "label_under", "label_over"}) {
      if (!j.contains(field)) {
        throw std::runtime_error("eval dataset record " +
                                 std::to_string(record_number) +
                                 ": missing field \"" + field + "\"");
      }
    }
    EvalRecord record;
    record.pair.id = next_id++;
    record.pair.source = corpus::normalize(j["source"].get<std::string>());
    record.pair.target = corpus::normalize(j["translation"].get<std::string>());
    record.label_under = j["label_under"].get<bool>();
    record.label_over = j["label_over"].get<bool>();
    if (j.contains("under_tokens")) {
      record.under_tokens = j["under_tokens"].get<std::vector<std::string>>();
    }
    if (j.contains("over_tokens")) {
      record.over_tokens = j["over_tokens"].get<std::vector<std::string>>();
    }
    records.push_back(std::move(record));
  }
  if (records.empty()) {
    throw std::runtime_error("empty dataset: " + path);
  }
  return records;
}

void save_eval_dataset(std::span<const EvalRecord> records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open eval dataset for writing: " + path);
  }
  for (const auto& record : records) {
    ordered_json j;
    j["source"] = corpus::join_tokens(record.pair.source);
    j["translation"] = corpus::join_tokens(record.pair.target);
    j["label_under"] = record.label_under;
    j["label_over"] = record.label_over;
    if (!record.under_tokens.empty()) j["under_tokens"] = record.under_tokens;
    if (!record.over_tokens.empty()) j["over_tokens"] = record.over_tokens;
    out << j.dump() << "\n";
  }
}

Metrics metrics_from_counts(std::uint64_t labeled, std::uint64_t flagged,
                            std::uint64_t hits,
                            std::uint64_t flagged_item_count) {
  Metrics m;
  m.labeled = labeled;
  m.flagged = flagged;
  m.hits = hits;
  m.flagged_item_count = flagged_item_count;
  m.precision =
      flagged == 0 ? 0.0
                   : static_cast<double>(hits) / static_cast<double>(flagged);
  m.recall =
      labeled == 0 ? 1.0
                   : static_cast<double>(hits) / static_cast<double>(labeled);
  m.f_measure = (m.precision + m.recall) > 0.0
                    ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
  return m;
}

Metrics evaluate(std::span<const EvalRecord> records,
                 const lexicon::Lexicon& lexicon,
                 const detect::CheckConfig& config, ViolationType type) {
  std::uint64_t labeled = 0, flagged = 0, hits = 0, items = 0;
  for (const auto& record : records) {
    const bool label =
        type == ViolationType::under ? record.label_under : record.label_over;
    auto report = detect::check(record.pair, lexicon, config);
    const bool is_flagged = type == ViolationType::under ? report.has_under()
                                                         : report.has_over();
    items += type == ViolationType::under ? report.under.size()
                                          : report.over.size();
    if (label) ++labeled;
    if (is_flagged) ++flagged;
    if (label && is_flagged) ++hits;
  }
  return metrics_from_counts(labeled, flagged, hits, items);
}

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<double> grid;
  std::string s(spec);
  if (s.find(':') != std::string::npos) {
    double start = 0, end = 0, step = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &start, &end, &step) != 3 ||
        step <= 0) {
      throw std::invalid_argument("bad grid spec: " + s);
    }
    // Inclusive end; tolerate float drift at the last point.
    for (double v = start; v <= end + step * 1e-9; v += step) {
      grid.push_back(std::min(v, end));
    }
  } else {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      grid.push_back(std::stod(part));
    }
  }
  if (grid.empty()) {
    throw std::invalid_argument("empty e_th grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0.0 || grid[i] > 1.0) {
      throw std::invalid_argument("e_th grid values must be in (0, 1]");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("e_th grid must be strictly increasing");
    }
  }
  return grid;
}

SweepResult sweep_e_th(std::span<const EvalRecord> records,
                       const lexicon::Lexicon& lexicon,
                       const detect::CheckConfig& base_config,
                       std::span<const double> grid,
                       std::string dataset_name) {
  SweepResult result;
  result.dataset = std::move(dataset_name);
  for (double e_th : grid) {
    detect::CheckConfig config = base_config;
    config.e_th = e_th;
    result.points.push_back(
        {e_th, evaluate(records, lexicon, config, ViolationType::under)});
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "dataset,e_th,precision,recall,f,count\n";
  char buf[160];
  for (const auto& point : result.points) {
    std::snprintf(buf, sizeof(buf), "%s,%.2f,%.6f,%.6f,%.6f,%llu\n",
                  result.dataset.c_str(), point.e_th, point.metrics.precision,
                  point.metrics.recall, point.metrics.f_measure,
                  static_cast<unsigned long long>(
                      point.metrics.flagged_item_count));
    out << buf;
  }
  return out.str();
}

std::string metrics_json(const Metrics& metrics, ViolationType type) {
  ordered_json j;
  j["type"] = std::string(to_string(type));
  j["precision"] = metrics.precision;
  j["recall"] = metrics.recall;
  j["f"] = metrics.f_measure;
  j["labeled"] = metrics.labeled;
  j["flagged"] = metrics.flagged;
  j["hits"] = metrics.hits;
  j["count"] = metrics.flagged_item_count;
  return j.dump(2);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

lexicon::Lexicon make_baseline_shell(lexicon::Direction direction,
                                     std::uint32_t c_tr) {
  lexicon::Lexicon lex;
  lex.direction = std::move(direction);
  lex.config = {};
  lex.config.c_tr = c_tr;
  lex.config.c_w = 1;
  lex.config.phrases_src = false;
  lex.config.phrases_dst = false;
  return lex;
}

}  // namespace

lexicon::Lexicon load_baseline_lexicon(const std::string& path,
                                       BaselineKind kind, std::uint32_t c_tr,
                                       lexicon::Direction direction) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open baseline file: " + path);
  }
  lexicon::Lexicon lex = make_baseline_shell(std::move(direction), c_tr);
  std::string line;
  std::uint64_t record = 0;

  if (kind == BaselineKind::std_dict) {
    while (std::getline(in, line)) {
      ++record;
      if (line.empty() || line[0] == '#') continue;
      auto fields = split_tabs(line);
      if (fields.size() < 2 || fields[0].empty()) {
        throw std::runtime_error("std-dict record " + std::to_string(record) +
                                 ": expected word<TAB>translation...");
      }
      auto norm_item = corpus::normalize(fields[0]);
      if (norm_item.size() != 1) {
        throw std::runtime_error("std-dict record " + std::to_string(record) +
                                 ": headword must be a single token");
      }
      lexicon::LexiconEntry& entry = lex.entries[norm_item[0]];
      entry.item = norm_item[0];
      for (std::size_t i = 1; i < fields.size(); ++i) {
        for (auto& token : corpus::normalize(fields[i])) {
          entry.translations.push_back({std::move(token), 1.0});
        }
      }
    }
  } else {
    // word-align: group alignment probabilities by source word, keep the
    // top c_tr.
    std::map<std::string, std::vector<lexicon::Translation>> grouped;
    while (std::getline(in, line)) {
      ++record;
      if (line.empty() || line[0] == '#') continue;
      auto fields = split_tabs(line);
      if (fields.size() != 3) {
        throw std::runtime_error("word-align record " +
                                 std::to_string(record) +
                                 ": expected src<TAB>dst<TAB>prob");
      }
      double prob = 0;
      try {
        prob = std::stod(fields[2]);
      } catch (const std::logic_error&) {
        throw std::runtime_error("word-align record " +
                                 std::to_string(record) + ": bad probability");
      }
      if (prob < 0.0 || prob > 1.0 || !std::isfinite(prob)) {
        throw std::runtime_error("word-align record " +
                                 std::to_string(record) +
                                 ": probability out of [0, 1]");
      }
      auto src = corpus::normalize(fields[0]);
      auto dst = corpus::normalize(fields[1]);
      if (src.size() != 1 || dst.size() != 1) {
        throw std::runtime_error("word-align record " +
                                 std::to_string(record) +
                                 ": sides must be single tokens");
      }
      grouped[src[0]].push_back({dst[0], prob});
    }
    for (auto& [src, candidates] : grouped) {
      std::sort(candidates.begin(), candidates.end(),
                [](const auto& a, const auto& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.item < b.item;
                });
      if (candidates.size() > c_tr) candidates.resize(c_tr);
      lexicon::LexiconEntry entry;
      entry.item = src;
      entry.translations = std::move(candidates);
      lex.entries.emplace(src, std::move(entry));
    }
  }
  lex.rebuild_reverse_index();
  return lex;
}

}  // namespace transcheck::eval
