#include "transcheck/corpus.hpp"

#include <sstream>
#include <stdexcept>

namespace transcheck::corpus {

namespace {

// Decodes one UTF-8 codepoint starting at i; returns its value and advances i.
// Invalid bytes are passed through as single-byte "codepoints" so that
// malformed input degrades gracefully instead of throwing.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char bk = static_cast<unsigned char>(s[i + k]);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space_cp(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x00A0:  // no-break space
    case 0x3000:  // ideographic space
      return true;
    default:
      return false;
  }
}

// ASCII A-Z plus the Latin-1 supplement uppercase range (except the
// multiplication sign U+00D7). Scripts without case are untouched.
char32_t fold_cp(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  return cp;
}

bool contains_joiner(std::string_view token) {
  return token.find(kItemJoiner) != std::string_view::npos;
}

}  // namespace

std::vector<Token> normalize(std::string_view raw) {
  std::vector<Token> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < raw.size()) {
    char32_t cp = decode_utf8(raw, i);
    if (is_space_cp(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      encode_utf8(fold_cp(cp), current);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join_tokens(const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string serialize_pair(const SentencePair& pair) {
  return join_tokens(pair.source) + "\t" + join_tokens(pair.target);
}

CorpusReader::CorpusReader(const std::string& path,
                           std::optional<std::uint64_t> limit)
    : in_(path), path_(path), limit_(limit) {
  if (!in_) {
    throw std::runtime_error("cannot open corpus file: " + path);
  }
}

bool CorpusReader::next(SentencePair& out) {
  std::string line;
  while (true) {
    if (limit_ && next_id_ >= *limit_) return false;
    if (!std::getline(in_, line)) return false;
    ++line_number_;

    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      skipped_.push_back({line_number_, "missing tab separator"});
      continue;
    }
    std::vector<Token> source = normalize(std::string_view(line).substr(0, tab));
    std::vector<Token> target = normalize(std::string_view(line).substr(tab + 1));
    if (source.empty() || target.empty()) {
      skipped_.push_back({line_number_, "empty source or target side"});
      continue;
    }
    bool bad_token = false;
    for (const auto& t : source)
      if (contains_joiner(t)) bad_token = true;
    for (const auto& t : target)
      if (contains_joiner(t)) bad_token = true;
    if (bad_token) {
      skipped_.push_back({line_number_, "token contains reserved joiner"});
      continue;
    }

    out.id = next_id_++;
    out.source = std::move(source);
    out.target = std::move(target);
    return true;
  }
}

LoadedCorpus load_corpus(const std::string& path,
                         std::optional<std::uint64_t> limit) {
  CorpusReader reader(path, limit);
  LoadedCorpus loaded;
  SentencePair pair;
  while (reader.next(pair)) {
    loaded.pairs.push_back(pair);
  }
  loaded.skipped = reader.skipped();
  return loaded;
}

StopWordSet load_stopwords(const std::string& path, std::string language) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open stop-word file: " + path);
  }
  StopWordSet set;
  set.language = std::move(language);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    for (auto& token : normalize(line)) {
      set.words.insert(std::move(token));
    }
  }
  return set;
}

}  // namespace transcheck::corpus
