#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "transcheck/corpus.hpp"
#include "transcheck/phrases.hpp"

namespace transcheck::lexicon {

struct BuildConfig {
  std::uint32_t c_tr = 10;       // translations kept per item
  std::uint64_t c_ph = 10;       // min phrase-pair occurrences
  std::uint32_t d_ph = 1;        // max keyword gap
  std::uint64_t c_w = 5;         // min item presence for an entry/candidate
  double e_th_default = 0.2;     // default error-rate tolerance
  bool phrases_src = false;
  bool phrases_dst = false;

  bool operator==(const BuildConfig&) const = default;

  phrases::PhraseConfig phrase_config() const { return {d_ph, c_ph}; }
};

// Bidirectional item <-> dense id map with deterministic ids (insertion
// order). Ids never change once assigned.
class Interner {
 public:
  std::uint32_t intern(std::string_view item);
  std::optional<std::uint32_t> find(std::string_view item) const;
  const std::string& str(std::uint32_t id) const { return items_[id]; }
  std::size_t size() const { return items_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> items_;
};

// Sparse realization of the binary task x item presence matrix: per-side
// presence counts plus joint counts, without materializing the matrix.
// Counts are per-task presence (an item repeated within one task counts
// once), so dot products of presence vectors reduce to these counts.
class CooccurrenceStore {
 public:
  // Items must already be deduplicated per call (one task's distinct items).
  void add_task(const std::vector<std::string>& src_items,
                const std::vector<std::string>& dst_items);

  void merge(const CooccurrenceStore& other);

  std::uint64_t total_tasks() const { return total_tasks_; }
  std::uint64_t presence_src(std::string_view item) const;
  std::uint64_t presence_dst(std::string_view item) const;
  std::uint64_t joint(std::string_view ws, std::string_view wd) const;

  // Cosine of the two presence vectors:
  //   joint(ws, wd) / (sqrt(presence(ws)) * sqrt(presence(wd))).
  // nullopt when either item has zero presence on its side.
  std::optional<double> relevance(std::string_view ws,
                                  std::string_view wd) const;

  std::size_t src_vocabulary_size() const { return src_.size(); }
  std::size_t dst_vocabulary_size() const { return dst_.size(); }

  void for_each_joint(
      const std::function<void(std::string_view src, std::string_view dst,
                               std::uint64_t count)>& fn) const;
  void for_each_src(const std::function<void(std::string_view item,
                                             std::uint64_t presence)>& fn) const;

 private:
  Interner src_;
  Interner dst_;
  std::vector<std::uint64_t> presence_src_;
  std::vector<std::uint64_t> presence_dst_;
  std::unordered_map<std::uint64_t, std::uint64_t> joint_;  // (src<<32|dst)
  std::uint64_t total_tasks_ = 0;
};

// One pass over the corpus; per-task distinct words plus in-inventory
// phrase items on each side.
CooccurrenceStore accumulate(std::span<const corpus::SentencePair> pairs,
                             const phrases::PhraseInventory& inventory_src,
                             const phrases::PhraseInventory& inventory_dst,
                             const BuildConfig& config);

struct Translation {
  std::string item;
  double score = 0.0;  // relevance in [0, 1]

  bool operator==(const Translation&) const = default;
};

struct LexiconEntry {
  std::string item;
  std::vector<Translation> translations;  // relevance desc, ties lexicographic
  double error_rate = 0.0;
  std::uint64_t support = 0;  // presence count N_ws

  bool operator==(const LexiconEntry&) const = default;
};

struct Direction {
  std::string source_lang;
  std::string target_lang;

  bool operator==(const Direction&) const = default;
  std::string str() const { return source_lang + "-" + target_lang; }
};

class Lexicon {
 public:
  Direction direction;
  BuildConfig config;
  std::int64_t created_unix = 0;
  phrases::PhraseInventory inventory_src;
  phrases::PhraseInventory inventory_dst;
  std::unordered_map<std::string, LexiconEntry> entries;

  const LexiconEntry* find(std::string_view item) const;

  // Source items whose translation lists contain `target_item`, sorted.
  // Empty when none do.
  std::span<const std::string> reverse_lookup(std::string_view target_item) const;

  // Derives the reverse index from `entries`; call after any mutation.
  void rebuild_reverse_index();

  // Compares the persisted state (the reverse index is derived).
  friend bool operator==(const Lexicon& a, const Lexicon& b) {
    return a.direction == b.direction && a.config == b.config &&
           a.created_unix == b.created_unix &&
           a.inventory_src == b.inventory_src &&
           a.inventory_dst == b.inventory_dst && a.entries == b.entries;
  }

 private:
  std::unordered_map<std::string, std::vector<std::string>> reverse_;
};

// Ranks, for every source item with presence >= c_w, all co-occurring
// target items with presence >= c_w by relevance and keeps the top c_tr.
std::unordered_map<std::string, LexiconEntry> build_translation_lists(
    const CooccurrenceStore& store, const BuildConfig& config);

// Second pass over the training corpus with error-rate filtering off:
// error_rate = (pairs containing the item with no listed translation in
// the target) / (pairs containing the item).
void compute_error_rates(std::span<const corpus::SentencePair> pairs,
                         Lexicon& draft);

// Full pipeline: inventories, co-occurrence accumulation, translation
// lists, error rates, reverse index.
Lexicon build(std::span<const corpus::SentencePair> pairs, Direction direction,
              const BuildConfig& config, std::int64_t created_unix = 0);

// Scores and error rates persist at 6 decimal digits; entries and
// inventories are written in sorted order, so identical lexicons produce
// byte-identical files.
std::string serialize_lexicon(const Lexicon& lexicon);
void save_lexicon(const Lexicon& lexicon, const std::string& path);
Lexicon load_lexicon(const std::string& path);

}  // namespace transcheck::lexicon
