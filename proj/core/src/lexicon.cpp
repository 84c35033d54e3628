#include "transcheck/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace transcheck::lexicon {

namespace {

// Round-trips a value through the 6-decimal on-disk representation so that
// in-memory lexicons compare equal to saved-and-reloaded ones.
double quantize6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return std::strtod(buf, nullptr);
}

std::string format6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

constexpr std::string_view kMagic = "transcheck-lexicon v1";

}  // namespace

std::uint32_t Interner::intern(std::string_view item) {
  auto it = index_.find(std::string(item));
  if (it != index_.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(items_.size());
  items_.emplace_back(item);
  index_.emplace(items_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view item) const {
  auto it = index_.find(std::string(item));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void CooccurrenceStore::add_task(const std::vector<std::string>& src_items,
                                 const std::vector<std::string>& dst_items) {
  // Dedupe defensively; presence is binary per task.
  std::vector<std::uint32_t> src_ids;
  std::vector<std::uint32_t> dst_ids;
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& item : src_items) {
      if (seen.insert(item).second) src_ids.push_back(src_.intern(item));
    }
    seen.clear();
    for (const auto& item : dst_items) {
      if (seen.insert(item).second) dst_ids.push_back(dst_.intern(item));
    }
  }
  presence_src_.resize(src_.size(), 0);
  presence_dst_.resize(dst_.size(), 0);
  for (auto s : src_ids) ++presence_src_[s];
  for (auto d : dst_ids) ++presence_dst_[d];
  for (auto s : src_ids) {
    for (auto d : dst_ids) {
      ++joint_[(static_cast<std::uint64_t>(s) << 32) | d];
    }
  }
  ++total_tasks_;
}

void CooccurrenceStore::merge(const CooccurrenceStore& other) {
  std::vector<std::uint32_t> src_map(other.src_.size());
  std::vector<std::uint32_t> dst_map(other.dst_.size());
  for (std::uint32_t i = 0; i < other.src_.size(); ++i) {
    src_map[i] = src_.intern(other.src_.str(i));
  }
  for (std::uint32_t i = 0; i < other.dst_.size(); ++i) {
    dst_map[i] = dst_.intern(other.dst_.str(i));
  }
  presence_src_.resize(src_.size(), 0);
  presence_dst_.resize(dst_.size(), 0);
  for (std::uint32_t i = 0; i < other.presence_src_.size(); ++i) {
    presence_src_[src_map[i]] += other.presence_src_[i];
  }
  for (std::uint32_t i = 0; i < other.presence_dst_.size(); ++i) {
    presence_dst_[dst_map[i]] += other.presence_dst_[i];
  }
  for (const auto& [key, count] : other.joint_) {
    std::uint32_t s = src_map[key >> 32];
    std::uint32_t d = dst_map[key & 0xFFFFFFFFu];
    joint_[(static_cast<std::uint64_t>(s) << 32) | d] += count;
  }
  total_tasks_ += other.total_tasks_;
}

std::uint64_t CooccurrenceStore::presence_src(std::string_view item) const {
  auto id = src_.find(item);
  return id ? presence_src_[*id] : 0;
}

std::uint64_t CooccurrenceStore::presence_dst(std::string_view item) const {
  auto id = dst_.find(item);
  return id ? presence_dst_[*id] : 0;
}

std::uint64_t CooccurrenceStore::joint(std::string_view ws,
                                       std::string_view wd) const {
  auto s = src_.find(ws);
  auto d = dst_.find(wd);
  if (!s || !d) return 0;
  auto it = joint_.find((static_cast<std::uint64_t>(*s) << 32) | *d);
  return it == joint_.end() ? 0 : it->second;
}

std::optional<double> CooccurrenceStore::relevance(std::string_view ws,
                                                   std::string_view wd) const {
  std::uint64_t ps = presence_src(ws);
  std::uint64_t pd = presence_dst(wd);
  if (ps == 0 || pd == 0) return std::nullopt;
  return static_cast<double>(joint(ws, wd)) /
         (std::sqrt(static_cast<double>(ps)) *
          std::sqrt(static_cast<double>(pd)));
}

void CooccurrenceStore::for_each_joint(
    const std::function<void(std::string_view, std::string_view,
                             std::uint64_t)>& fn) const {
  for (const auto& [key, count] : joint_) {
    fn(src_.str(static_cast<std::uint32_t>(key >> 32)),
       dst_.str(static_cast<std::uint32_t>(key & 0xFFFFFFFFu)), count);
  }
}

void CooccurrenceStore::for_each_src(
    const std::function<void(std::string_view, std::uint64_t)>& fn) const {
  for (std::uint32_t i = 0; i < src_.size(); ++i) {
    fn(src_.str(i), presence_src_[i]);
  }
}

namespace {

std::vector<std::string> task_items(const std::vector<corpus::Token>& tokens,
                                    const phrases::PhraseInventory& inventory,
                                    const phrases::PhraseConfig& config,
                                    bool phrases_enabled) {
  std::vector<std::string> items;
  std::unordered_set<std::string_view> seen;
  for (const auto& w : tokens) {
    if (seen.insert(w).second) items.push_back(w);
  }
  if (phrases_enabled && !inventory.empty()) {
    auto itemized = phrases::itemize(tokens, inventory, config);
    for (auto& occ : itemized.phrases) {
      if (seen.insert(occ.key).second) items.push_back(occ.key);
    }
  }
  return items;
}

}  // namespace

CooccurrenceStore accumulate(std::span<const corpus::SentencePair> pairs,
                             const phrases::PhraseInventory& inventory_src,
                             const phrases::PhraseInventory& inventory_dst,
                             const BuildConfig& config) {
  CooccurrenceStore store;
  const auto pc = config.phrase_config();
  for (const auto& pair : pairs) {
    store.add_task(
        task_items(pair.source, inventory_src, pc, config.phrases_src),
        task_items(pair.target, inventory_dst, pc, config.phrases_dst));
  }
  return store;
}

const LexiconEntry* Lexicon::find(std::string_view item) const {
  auto it = entries.find(std::string(item));
  return it == entries.end() ? nullptr : &it->second;
}

std::span<const std::string> Lexicon::reverse_lookup(
    std::string_view target_item) const {
  auto it = reverse_.find(std::string(target_item));
  if (it == reverse_.end()) return {};
  return it->second;
}

void Lexicon::rebuild_reverse_index() {
  reverse_.clear();
  for (const auto& [item, entry] : entries) {
    for (const auto& trans : entry.translations) {
      reverse_[trans.item].push_back(item);
    }
  }
  for (auto& [_, sources] : reverse_) {
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  }
}

std::unordered_map<std::string, LexiconEntry> build_translation_lists(
    const CooccurrenceStore& store, const BuildConfig& config) {
  // Bucket joint counts by source item.
  std::unordered_map<std::string, std::vector<std::pair<std::string, std::uint64_t>>>
      by_source;
  store.for_each_joint([&](std::string_view src, std::string_view dst,
                           std::uint64_t count) {
    if (store.presence_src(src) < config.c_w) return;
    if (store.presence_dst(dst) < config.c_w) return;
    by_source[std::string(src)].emplace_back(std::string(dst), count);
  });

  std::unordered_map<std::string, LexiconEntry> entries;
  for (auto& [src, candidates] : by_source) {
    const double ps = std::sqrt(static_cast<double>(store.presence_src(src)));
    std::vector<Translation> ranked;
    ranked.reserve(candidates.size());
    for (auto& [dst, count] : candidates) {
      const double pd = std::sqrt(static_cast<double>(store.presence_dst(dst)));
      ranked.push_back({std::move(dst), static_cast<double>(count) / (ps * pd)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.item < b.item;
    });
    if (ranked.size() > config.c_tr) ranked.resize(config.c_tr);
    for (auto& t : ranked) t.score = quantize6(t.score);

    LexiconEntry entry;
    entry.item = src;
    entry.translations = std::move(ranked);
    entry.support = store.presence_src(src);
    entries.emplace(src, std::move(entry));
  }
  return entries;
}

void compute_error_rates(std::span<const corpus::SentencePair> pairs,
                         Lexicon& draft) {
  const auto pc = draft.config.phrase_config();
  std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>>
      counts;  // item -> (N_ws, N_ws^e)
  for (const auto& pair : pairs) {
    auto itemized = draft.config.phrases_src
                        ? phrases::itemize(pair.source, draft.inventory_src, pc)
                        : phrases::ItemizedSentence{pair.source, {}};
    const phrases::TokenIndex target_index(pair.target);
    for (const auto& item : itemized.distinct_items()) {
      const LexiconEntry* entry = draft.find(item);
      if (entry == nullptr) continue;
      auto& [n, ne] = counts[item];
      ++n;
      bool present = false;
      for (const auto& trans : entry->translations) {
        if (target_index.contains_item(trans.item, draft.config.d_ph)) {
          present = true;
          break;
        }
      }
      if (!present) ++ne;
    }
  }
  for (auto& [item, entry] : draft.entries) {
    auto it = counts.find(item);
    if (it != counts.end() && it->second.first > 0) {
      entry.error_rate = quantize6(static_cast<double>(it->second.second) /
                                   static_cast<double>(it->second.first));
    }
  }
}

Lexicon build(std::span<const corpus::SentencePair> pairs, Direction direction,
              const BuildConfig& config, std::int64_t created_unix) {
  Lexicon lexicon;
  lexicon.direction = std::move(direction);
  lexicon.config = config;
  lexicon.created_unix = created_unix;
  const auto pc = config.phrase_config();
  if (config.phrases_src) {
    lexicon.inventory_src =
        phrases::build_phrase_inventory(pairs, phrases::Side::source, pc);
  }
  if (config.phrases_dst) {
    lexicon.inventory_dst =
        phrases::build_phrase_inventory(pairs, phrases::Side::target, pc);
  }
  CooccurrenceStore store =
      accumulate(pairs, lexicon.inventory_src, lexicon.inventory_dst, config);
  lexicon.entries = build_translation_lists(store, config);
  // An entry with no surviving candidates carries no evidence either way;
  // drop it so detection skips the item instead of always flagging it.
  for (auto it = lexicon.entries.begin(); it != lexicon.entries.end();) {
    if (it->second.translations.empty()) {
      it = lexicon.entries.erase(it);
    } else {
      ++it;
    }
  }
  compute_error_rates(pairs, lexicon);
  lexicon.rebuild_reverse_index();
  return lexicon;
}

std::string serialize_lexicon(const Lexicon& lexicon) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "direction\t" << lexicon.direction.source_lang << "\t"
      << lexicon.direction.target_lang << "\n";
  const auto& c = lexicon.config;
  out << "config\tc_tr=" << c.c_tr << "\tc_ph=" << c.c_ph
      << "\td_ph=" << c.d_ph << "\tc_w=" << c.c_w
      << "\te_th_default=" << format6(c.e_th_default)
      << "\tphrases_src=" << (c.phrases_src ? 1 : 0)
      << "\tphrases_dst=" << (c.phrases_dst ? 1 : 0) << "\n";
  out << "created\t" << lexicon.created_unix << "\n";

  auto write_inventory = [&out](const phrases::PhraseInventory& inv,
                                std::string_view header) {
    out << header << "\n";
    std::map<std::string, std::uint64_t> sorted(inv.counts().begin(),
                                                inv.counts().end());
    for (const auto& [key, count] : sorted) {
      out << key << "\t" << count << "\n";
    }
  };
  write_inventory(lexicon.inventory_src, "[phrases source]");
  write_inventory(lexicon.inventory_dst, "[phrases target]");

  out << "[entries]\n";
  std::map<std::string, const LexiconEntry*> sorted;
  for (const auto& [item, entry] : lexicon.entries) {
    sorted.emplace(item, &entry);
  }
  for (const auto& [item, entry] : sorted) {
    out << item << "\t" << entry->support << "\t" << format6(entry->error_rate);
    for (const auto& trans : entry->translations) {
      out << "\t" << trans.item << ":" << format6(trans.score);
    }
    out << "\n";
  }
  return out.str();
}

void save_lexicon(const Lexicon& lexicon, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open lexicon file for writing: " + path);
  }
  out << serialize_lexicon(lexicon);
  if (!out) {
    throw std::runtime_error("failed writing lexicon file: " + path);
  }
}

namespace {

[[noreturn]] void parse_fail(std::uint64_t record, const std::string& what) {
  throw std::runtime_error("lexicon parse error at record " +
                           std::to_string(record) + ": " + what);
}

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

std::uint64_t parse_u64(const std::string& s, std::uint64_t record,
                        const std::string& what) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) parse_fail(record, "bad " + what + ": " + s);
    return v;
  } catch (const std::logic_error&) {
    parse_fail(record, "bad " + what + ": " + s);
  }
}

double parse_double(const std::string& s, std::uint64_t record,
                    const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    parse_fail(record, "bad " + what + ": " + s);
  }
  return v;
}

}  // namespace

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open lexicon file: " + path);
  }
  Lexicon lexicon;
  std::string line;
  std::uint64_t record = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++record;
    return true;
  };

  if (!next_line() || line != kMagic) {
    throw std::runtime_error("lexicon version mismatch in " + path +
                             " (expected \"" + std::string(kMagic) + "\")");
  }
  if (!next_line()) parse_fail(record + 1, "missing direction");
  {
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0] != "direction") {
      parse_fail(record, "malformed direction record");
    }
    lexicon.direction = {fields[1], fields[2]};
  }
  if (!next_line()) parse_fail(record + 1, "missing config");
  {
    auto fields = split_tabs(line);
    if (fields.empty() || fields[0] != "config") {
      parse_fail(record, "malformed config record");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto eq = fields[i].find('=');
      if (eq == std::string::npos) parse_fail(record, "malformed config field");
      std::string key = fields[i].substr(0, eq);
      std::string value = fields[i].substr(eq + 1);
      if (key == "c_tr") {
        lexicon.config.c_tr =
            static_cast<std::uint32_t>(parse_u64(value, record, key));
      } else if (key == "c_ph") {
        lexicon.config.c_ph = parse_u64(value, record, key);
      } else if (key == "d_ph") {
        lexicon.config.d_ph =
            static_cast<std::uint32_t>(parse_u64(value, record, key));
      } else if (key == "c_w") {
        lexicon.config.c_w = parse_u64(value, record, key);
      } else if (key == "e_th_default") {
        lexicon.config.e_th_default = parse_double(value, record, key);
      } else if (key == "phrases_src") {
        lexicon.config.phrases_src = parse_u64(value, record, key) != 0;
      } else if (key == "phrases_dst") {
        lexicon.config.phrases_dst = parse_u64(value, record, key) != 0;
      } else {
        parse_fail(record, "unknown config key: " + key);
      }
    }
  }
  if (!next_line()) parse_fail(record + 1, "missing created");
  {
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0] != "created") {
      parse_fail(record, "malformed created record");
    }
    try {
      lexicon.created_unix = std::stoll(fields[1]);
    } catch (const std::logic_error&) {
      parse_fail(record, "bad created timestamp");
    }
  }

  enum class Section { none, phrases_src, phrases_dst, entries };
  Section section = Section::none;
  while (next_line()) {
    if (line.empty()) continue;
    if (line == "[phrases source]") {
      section = Section::phrases_src;
      continue;
    }
    if (line == "[phrases target]") {
      section = Section::phrases_dst;
      continue;
    }
    if (line == "[entries]") {
      section = Section::entries;
      continue;
    }
    auto fields = split_tabs(line);
    switch (section) {
      case Section::none:
        parse_fail(record, "record outside any section");
      case Section::phrases_src:
      case Section::phrases_dst: {
        if (fields.size() != 2) parse_fail(record, "malformed phrase record");
        auto& inv = section == Section::phrases_src ? lexicon.inventory_src
                                                    : lexicon.inventory_dst;
        if (inv.contains(fields[0])) {
          parse_fail(record, "duplicate phrase record: " + fields[0]);
        }
        inv.add_key(fields[0], parse_u64(fields[1], record, "phrase count"));
        break;
      }
      case Section::entries: {
        if (fields.size() < 3) parse_fail(record, "malformed entry record");
        LexiconEntry entry;
        entry.item = fields[0];
        entry.support = parse_u64(fields[1], record, "support");
        entry.error_rate = parse_double(fields[2], record, "error_rate");
        for (std::size_t i = 3; i < fields.size(); ++i) {
          auto colon = fields[i].rfind(':');
          if (colon == std::string::npos || colon == 0) {
            parse_fail(record, "malformed translation field: " + fields[i]);
          }
          Translation trans;
          trans.item = fields[i].substr(0, colon);
          trans.score =
              parse_double(fields[i].substr(colon + 1), record, "score");
          entry.translations.push_back(std::move(trans));
        }
        if (lexicon.entries.find(entry.item) != lexicon.entries.end()) {
          parse_fail(record, "duplicate entry: " + entry.item);
        }
        lexicon.entries.emplace(entry.item, std::move(entry));
        break;
      }
    }
  }
  lexicon.rebuild_reverse_index();
  return lexicon;
}

}  // namespace transcheck::lexicon
