#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "transcheck/corpus.hpp"

namespace transcheck::phrases {

// A phrase is abstracted as its ordered keyword pair: two tokens appearing
// in order with at most d_ph words between them.
struct KeywordPair {
  corpus::Token first;
  corpus::Token second;

  bool operator==(const KeywordPair&) const = default;
  auto operator<=>(const KeywordPair&) const = default;
};

struct PhraseConfig {
  std::uint32_t d_ph = 1;   // max words between the two keywords
  std::uint64_t c_ph = 10;  // min corpus occurrences for a pair to survive
};

// Item keys: a word item is its token; a phrase item is
// "first<kItemJoiner>second".
std::string phrase_key(const KeywordPair& pair);
std::string phrase_key(std::string_view first, std::string_view second);
bool is_phrase_key(std::string_view item);
KeywordPair split_phrase_key(std::string_view key);

// Every ordered position pair (a, b) with a < b and b - a <= d_ph + 1,
// in scan order. Duplicate surface pairs are distinct occurrences.
std::vector<KeywordPair> extract_keyword_pairs(
    std::span<const corpus::Token> sentence, const PhraseConfig& config);

class PhraseInventory {
 public:
  void add(const KeywordPair& pair, std::uint64_t n = 1);
  void add_key(const std::string& key, std::uint64_t n = 1);

  // Per-chunk count maps combine associatively.
  void merge(const PhraseInventory& other);

  // Keeps only pairs with count >= c_ph ("less than" is discarded,
  // equal survives).
  PhraseInventory filtered(std::uint64_t c_ph) const;

  bool contains(std::string_view key) const;
  std::uint64_t count(std::string_view key) const;
  bool operator==(const PhraseInventory&) const = default;
  bool empty() const { return counts_.empty(); }
  std::size_t size() const { return counts_.size(); }
  const std::unordered_map<std::string, std::uint64_t>& counts() const {
    return counts_;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

enum class Side { source, target };

// Counts keyword-pair occurrences over one side of the corpus and drops
// pairs below c_ph.
PhraseInventory build_phrase_inventory(
    std::span<const corpus::SentencePair> pairs, Side side,
    const PhraseConfig& config);

struct PhraseOccurrence {
  std::string key;
  std::size_t first_pos = 0;
  std::size_t second_pos = 0;
};

// Word items cover all tokens; phrase items are the in-inventory keyword
// pairs found within the gap constraint.
struct ItemizedSentence {
  std::vector<corpus::Token> words;
  std::vector<PhraseOccurrence> phrases;

  // Distinct item keys (words and phrases), in first-appearance order.
  std::vector<std::string> distinct_items() const;
};

ItemizedSentence itemize(std::span<const corpus::Token> sentence,
                         const PhraseInventory& inventory,
                         const PhraseConfig& config);

// Token positions indexed for repeated membership queries against one
// text. The text must outlive the index.
class TokenIndex {
 public:
  explicit TokenIndex(std::span<const corpus::Token> text);

  bool contains_word(std::string_view token) const;

  // A word item as an exact token; a phrase item as both keywords in
  // order within d_ph + 1 positions.
  bool contains_item(std::string_view item_key, std::uint32_t d_ph) const;

 private:
  std::unordered_map<std::string_view, std::vector<std::size_t>> positions_;
};

// One-shot form of TokenIndex::contains_item.
bool contains_item(std::span<const corpus::Token> text,
                   std::string_view item_key, std::uint32_t d_ph);

}  // namespace transcheck::phrases
