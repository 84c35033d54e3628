#pragma once

// Shared fixtures: a small English-Chinese training corpus with a fully
// known presence matrix, hand-authored lexicon entries, and check pairs
// exercising both violation types.

#include <string>
#include <utility>
#include <vector>

#include "transcheck/corpus.hpp"
#include "transcheck/detect.hpp"
#include "transcheck/lexicon.hpp"

namespace fixtures {

inline std::vector<transcheck::corpus::SentencePair> make_pairs(
    const std::vector<std::pair<std::string, std::string>>& lines) {
  std::vector<transcheck::corpus::SentencePair> pairs;
  std::uint64_t id = 0;
  for (const auto& [src, dst] : lines) {
    transcheck::corpus::SentencePair pair;
    pair.id = id++;
    pair.source = transcheck::corpus::normalize(src);
    pair.target = transcheck::corpus::normalize(dst);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

// Four en->zh training tasks; en presence: i=3, love=1, have=3, .=4;
// zh presence: 我=3, 爱=1, 有=2, 。=4; joint(i, 我)=3.
inline std::vector<transcheck::corpus::SentencePair> en_zh_corpus() {
  return make_pairs({
      {"I love my family .", "我 爱 我 的 家人 。"},
      {"I have a lovely son .", "我 有 一个 可爱 的 儿子 。"},
      {"I have worked for seven years .", "我 工作 七年 了 。"},
      {"They have a big house .", "他们 有 一个 大 房子 。"},
  });
}

// Two zh->en entries with ten ranked translations each, in the lexicon
// line-record format.
inline std::string zh_en_fixture_lexicon_text() {
  return "transcheck-lexicon v1\n"
         "direction\tzh\ten\n"
         "config\tc_tr=10\tc_ph=10\td_ph=1\tc_w=5\te_th_default=0.200000\t"
         "phrases_src=0\tphrases_dst=0\n"
         "created\t0\n"
         "[phrases source]\n"
         "[phrases target]\n"
         "[entries]\n"
         "妈妈\t1000\t0.041160\tmother:0.900000\tmom:0.800000\tmum:0.700000\t"
         "mama:0.600000\tmommy:0.500000\tmoms:0.400000\tmothers:0.300000\t"
         "mummy:0.200000\tmy:0.100000\ther:0.050000\n"
         "桌\t1000\t0.072930\ttable:0.900000\tdesk:0.800000\tpapers:0.700000\t"
         "tables:0.600000\tcoffee:0.500000\tplaced:0.400000\tpiled:0.300000\t"
         "put:0.200000\tbreakfast:0.100000\tlaid:0.050000\n";
}

// zh->en pairs whose translations drop the words covered by the fixture
// entries ("mother", "desk").
inline transcheck::corpus::SentencePair missing_mother_pair() {
  transcheck::corpus::SentencePair pair;
  pair.id = 0;
  pair.source = transcheck::corpus::normalize(
      "三姑 给 你 的 红包 给 你 妈妈 了 ， 她 见 了 你 会 给 你 的 。");
  pair.target = transcheck::corpus::normalize(
      "third aunt gave you a red envelope . "
      "she'll give it to you when she sees you .");
  return pair;
}

inline transcheck::corpus::SentencePair missing_desk_pair() {
  transcheck::corpus::SentencePair pair;
  pair.id = 1;
  pair.source = transcheck::corpus::normalize(
      "放 寒假 一个月 宿舍 地上 桌 上 床上 全是 灰 ... "
      "都 不知道 该 从 哪里 开始 收拾 ..");
  pair.target = transcheck::corpus::normalize(
      "winter vacation a month dormitory on the floor of the bed is all "
      "gray ... i don't know where to start ..");
  return pair;
}

// en->zh lexicon with a phrase entry for <can, never> and a word entry for
// "changed", plus the repeated-translation pair they flag.
inline transcheck::lexicon::Lexicon en_zh_phrase_lexicon() {
  using namespace transcheck;
  lexicon::Lexicon lex;
  lex.direction = {"en", "zh"};
  lex.config.phrases_src = true;
  lex.config.d_ph = 1;
  lex.inventory_src.add_key(phrases::phrase_key("can", "never"), 25);

  lexicon::LexiconEntry can_never;
  can_never.item = phrases::phrase_key("can", "never");
  can_never.translations = {{"无法", 0.9}};
  can_never.error_rate = 0.01;
  can_never.support = 25;
  lex.entries.emplace(can_never.item, can_never);

  lexicon::LexiconEntry changed;
  changed.item = "changed";
  changed.translations = {{"改变", 0.9}};
  changed.error_rate = 0.02;
  changed.support = 40;
  lex.entries.emplace(changed.item, changed);

  lex.rebuild_reverse_index();
  return lex;
}

inline transcheck::corpus::SentencePair repeated_translation_pair() {
  transcheck::corpus::SentencePair pair;
  pair.id = 0;
  pair.source = transcheck::corpus::normalize(
      "u have to admit that something can never be changed , "
      "live with it or break with it !");
  pair.target = transcheck::corpus::normalize(
      "你 必须 承认 ， 有些 东西 是 永远 无法 改变 的 ， "
      "无法 改变 的 ， 无法 改变 的 ， 无法 改变 的 ！");
  return pair;
}

inline transcheck::corpus::StopWordSet zh_stopwords() {
  transcheck::corpus::StopWordSet set;
  set.language = "zh";
  set.words = {"的", "，", "！", "。"};
  return set;
}

}  // namespace fixtures
