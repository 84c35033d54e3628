#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace transcheck::corpus {

// A token is one whitespace-delimited unit of pre-segmented text, already
// normalized: non-empty, no whitespace, no kItemJoiner, Latin letters folded
// to lowercase. CJK and punctuation pass through byte-exact.
using Token = std::string;

// Reserved joiner for phrase item keys ("first<joiner>second"). U+241F.
// Tokens containing this sequence are rejected at load time.
inline constexpr std::string_view kItemJoiner = "␟";

struct SentencePair {
  std::uint64_t id = 0;
  std::vector<Token> source;
  std::vector<Token> target;

  bool operator==(const SentencePair&) const = default;
};

struct StopWordSet {
  std::string language;
  std::unordered_set<Token> words;

  bool contains(const Token& t) const { return words.find(t) != words.end(); }
  std::size_t size() const { return words.size(); }
};

// Splits on whitespace and lowercases Latin letters (ASCII plus the
// Latin-1 supplement). Everything else, punctuation included, is kept as-is.
// Idempotent; empty input yields an empty sequence.
std::vector<Token> normalize(std::string_view raw);

// Joins tokens with single spaces; inverse of normalize for normalized input.
std::string join_tokens(const std::vector<Token>& tokens);

// Serializes a pair back to the on-disk "source<TAB>target" form.
std::string serialize_pair(const SentencePair& pair);

struct SkippedLine {
  std::uint64_t line_number = 0;  // 1-based
  std::string reason;
};

struct LoadedCorpus {
  std::vector<SentencePair> pairs;
  std::vector<SkippedLine> skipped;
};

// Streams "source<TAB>target" lines from a UTF-8 file. Pairs get sequential
// ids starting at 0. Malformed lines (no tab, an empty side, or a token
// containing the reserved joiner) are recorded and skipped, not fatal.
class CorpusReader {
 public:
  explicit CorpusReader(const std::string& path,
                        std::optional<std::uint64_t> limit = std::nullopt);

  // Fills `out` and returns true, or returns false at end of input / limit.
  bool next(SentencePair& out);

  const std::vector<SkippedLine>& skipped() const { return skipped_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::optional<std::uint64_t> limit_;
  std::uint64_t next_id_ = 0;
  std::uint64_t line_number_ = 0;
  std::vector<SkippedLine> skipped_;
};

// Reads a whole corpus into memory. Throws std::runtime_error if the file
// cannot be opened.
LoadedCorpus load_corpus(const std::string& path,
                         std::optional<std::uint64_t> limit = std::nullopt);

// One token per line, '#' comments, duplicates collapsed, tokens normalized.
StopWordSet load_stopwords(const std::string& path, std::string language = {});

}  // namespace transcheck::corpus
