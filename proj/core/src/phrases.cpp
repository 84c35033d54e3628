#include "transcheck/phrases.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace transcheck::phrases {

std::string phrase_key(std::string_view first, std::string_view second) {
  std::string key;
  key.reserve(first.size() + corpus::kItemJoiner.size() + second.size());
  key += first;
  key += corpus::kItemJoiner;
  key += second;
  return key;
}

std::string phrase_key(const KeywordPair& pair) {
  return phrase_key(pair.first, pair.second);
}

bool is_phrase_key(std::string_view item) {
  return item.find(corpus::kItemJoiner) != std::string_view::npos;
}

KeywordPair split_phrase_key(std::string_view key) {
  auto pos = key.find(corpus::kItemJoiner);
  if (pos == std::string_view::npos) {
    throw std::invalid_argument("not a phrase key: " + std::string(key));
  }
  return KeywordPair{std::string(key.substr(0, pos)),
                     std::string(key.substr(pos + corpus::kItemJoiner.size()))};
}

std::vector<KeywordPair> extract_keyword_pairs(
    std::span<const corpus::Token> sentence, const PhraseConfig& config) {
  std::vector<KeywordPair> pairs;
  const std::size_t n = sentence.size();
  const std::size_t max_span = static_cast<std::size_t>(config.d_ph) + 1;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n && b - a <= max_span; ++b) {
      pairs.push_back({sentence[a], sentence[b]});
    }
  }
  return pairs;
}

void PhraseInventory::add(const KeywordPair& pair, std::uint64_t n) {
  counts_[phrase_key(pair)] += n;
}

void PhraseInventory::add_key(const std::string& key, std::uint64_t n) {
  counts_[key] += n;
}

void PhraseInventory::merge(const PhraseInventory& other) {
  for (const auto& [key, n] : other.counts_) {
    counts_[key] += n;
  }
}

PhraseInventory PhraseInventory::filtered(std::uint64_t c_ph) const {
  PhraseInventory kept;
  for (const auto& [key, n] : counts_) {
    if (n >= c_ph) kept.counts_.emplace(key, n);
  }
  return kept;
}

bool PhraseInventory::contains(std::string_view key) const {
  return counts_.find(std::string(key)) != counts_.end();
}

std::uint64_t PhraseInventory::count(std::string_view key) const {
  auto it = counts_.find(std::string(key));
  return it == counts_.end() ? 0 : it->second;
}

PhraseInventory build_phrase_inventory(
    std::span<const corpus::SentencePair> pairs, Side side,
    const PhraseConfig& config) {
  PhraseInventory raw;
  for (const auto& pair : pairs) {
    const auto& tokens = side == Side::source ? pair.source : pair.target;
    for (const auto& kp : extract_keyword_pairs(tokens, config)) {
      raw.add(kp);
    }
  }
  return raw.filtered(config.c_ph);
}

std::vector<std::string> ItemizedSentence::distinct_items() const {
  std::vector<std::string> items;
  std::unordered_set<std::string_view> seen;
  for (const auto& w : words) {
    if (seen.insert(w).second) items.push_back(w);
  }
  for (const auto& p : phrases) {
    if (seen.insert(p.key).second) items.push_back(p.key);
  }
  return items;
}

ItemizedSentence itemize(std::span<const corpus::Token> sentence,
                         const PhraseInventory& inventory,
                         const PhraseConfig& config) {
  ItemizedSentence itemized;
  itemized.words.assign(sentence.begin(), sentence.end());
  if (inventory.empty()) return itemized;

  const std::size_t n = sentence.size();
  const std::size_t max_span = static_cast<std::size_t>(config.d_ph) + 1;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n && b - a <= max_span; ++b) {
      std::string key = phrase_key(sentence[a], sentence[b]);
      if (inventory.contains(key)) {
        itemized.phrases.push_back({std::move(key), a, b});
      }
    }
  }
  return itemized;
}

TokenIndex::TokenIndex(std::span<const corpus::Token> text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    positions_[text[i]].push_back(i);
  }
}

bool TokenIndex::contains_word(std::string_view token) const {
  return positions_.find(token) != positions_.end();
}

bool TokenIndex::contains_item(std::string_view item_key,
                               std::uint32_t d_ph) const {
  auto joiner = item_key.find(corpus::kItemJoiner);
  if (joiner == std::string_view::npos) {
    return contains_word(item_key);
  }
  auto first = positions_.find(item_key.substr(0, joiner));
  if (first == positions_.end()) return false;
  auto second =
      positions_.find(item_key.substr(joiner + corpus::kItemJoiner.size()));
  if (second == positions_.end()) return false;

  // Positions are sorted by construction; look for b in (a, a + d_ph + 1].
  const auto& bs = second->second;
  const std::size_t max_span = static_cast<std::size_t>(d_ph) + 1;
  for (std::size_t a : first->second) {
    auto it = std::upper_bound(bs.begin(), bs.end(), a);
    if (it != bs.end() && *it - a <= max_span) return true;
  }
  return false;
}

bool contains_item(std::span<const corpus::Token> text,
                   std::string_view item_key, std::uint32_t d_ph) {
  return TokenIndex(text).contains_item(item_key, d_ph);
}

}  // namespace transcheck::phrases
