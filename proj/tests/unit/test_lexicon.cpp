#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "../common/fixtures.hpp"
#include "../common/oracles.hpp"
#include "transcheck/lexicon.hpp"

using namespace transcheck;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

lexicon::CooccurrenceStore store_over(
    const std::vector<corpus::SentencePair>& pairs) {
  return lexicon::accumulate(pairs, {}, {}, lexicon::BuildConfig{});
}

std::vector<corpus::SentencePair> random_corpus(std::mt19937& rng,
                                                std::size_t tasks,
                                                std::size_t vocab) {
  std::vector<corpus::SentencePair> pairs;
  for (std::size_t k = 0; k < tasks; ++k) {
    corpus::SentencePair pair;
    pair.id = k;
    std::size_t src_len = 1 + rng() % 8;
    std::size_t dst_len = 1 + rng() % 8;
    for (std::size_t i = 0; i < src_len; ++i) {
      pair.source.push_back("s" + std::to_string(rng() % vocab));
    }
    for (std::size_t i = 0; i < dst_len; ++i) {
      pair.target.push_back("d" + std::to_string(rng() % vocab));
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace

TEST_CASE("accumulate reproduces the example presence matrix") {
  auto store = store_over(fixtures::en_zh_corpus());
  CHECK(store.total_tasks() == 4);
  CHECK(store.presence_src("i") == 3);
  CHECK(store.presence_src("love") == 1);
  CHECK(store.presence_src("have") == 3);
  CHECK(store.presence_src(".") == 4);
  CHECK(store.presence_dst("我") == 3);
  CHECK(store.presence_dst("爱") == 1);
  CHECK(store.presence_dst("有") == 2);
  CHECK(store.presence_dst("。") == 4);
  CHECK(store.joint("i", "我") == 3);
  CHECK(store.joint("love", "有") == 0);
}

TEST_CASE("accumulate counts presence once per task") {
  auto pairs = fixtures::make_pairs({{"i i i said", "我 说 我"}});
  auto store = store_over(pairs);
  CHECK(store.presence_src("i") == 1);
  CHECK(store.presence_dst("我") == 1);
  CHECK(store.joint("i", "我") == 1);
}

TEST_CASE("accumulate on an empty corpus is all zeros") {
  auto store = store_over({});
  CHECK(store.total_tasks() == 0);
  CHECK(store.presence_src("anything") == 0);
  CHECK(store.relevance("a", "b") == std::nullopt);
}

TEST_CASE("relevance matches the worked example values") {
  auto store = store_over(fixtures::en_zh_corpus());
  // Identical presence vectors give cosine 1.
  CHECK(*store.relevance("i", "我") == doctest::Approx(1.0).epsilon(1e-12));
  // [0,1,1,1] . [0,1,0,1] = 2, norms sqrt(3) and sqrt(2).
  CHECK(*store.relevance("have", "有") ==
        doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));
  // No joint task.
  CHECK(*store.relevance("love", "有") == doctest::Approx(0.0));
  // Unknown item on either side.
  CHECK(store.relevance("nope", "我") == std::nullopt);
  CHECK(store.relevance("i", "nope") == std::nullopt);
}

TEST_CASE("relevance equals the dense-matrix cosine on random corpora") {
  std::mt19937 rng(31);
  for (int round = 0; round < 5; ++round) {
    auto pairs = random_corpus(rng, 30 + rng() % 40, 25);
    auto store = store_over(pairs);
    oracles::DenseMatrix dense(pairs);
    for (const auto& ws : dense.src_items()) {
      for (const auto& wd : dense.dst_items()) {
        auto got = store.relevance(ws, wd);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(dense.cosine_src_dst(ws, wd))
                          .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("relevance is 1 exactly for identical task sets") {
  auto pairs = fixtures::make_pairs({
      {"uno x", "un y"},
      {"uno z", "un w"},
      {"other", "autre un"},
  });
  auto store = store_over(pairs);
  // "uno" tasks {0,1}; "un" tasks {0,1,2}: not identical.
  CHECK(*store.relevance("uno", "un") < 1.0);
  // "x" and "y" both exactly task {0}.
  CHECK(*store.relevance("x", "y") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relevance is symmetric across a direction-reversed store") {
  std::mt19937 rng(37);
  auto pairs = random_corpus(rng, 40, 15);
  std::vector<corpus::SentencePair> reversed = pairs;
  for (auto& pair : reversed) std::swap(pair.source, pair.target);
  auto store = store_over(pairs);
  auto rstore = store_over(reversed);
  for (const auto& pair : pairs) {
    for (const auto& ws : pair.source) {
      for (const auto& wd : pair.target) {
        CHECK(*store.relevance(ws, wd) ==
              doctest::Approx(*rstore.relevance(wd, ws)).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("adding a task never decreases a joint count") {
  lexicon::CooccurrenceStore store;
  store.add_task({"a", "b"}, {"x"});
  auto before = store.joint("a", "x");
  store.add_task({"a"}, {"x", "y"});
  CHECK(store.joint("a", "x") == before + 1);
  store.add_task({"b"}, {"y"});
  CHECK(store.joint("a", "x") == before + 1);
}

TEST_CASE("store merge equals single-pass accumulation") {
  std::mt19937 rng(41);
  auto pairs = random_corpus(rng, 60, 12);
  auto whole = store_over(pairs);

  std::vector<corpus::SentencePair> first(pairs.begin(), pairs.begin() + 25);
  std::vector<corpus::SentencePair> second(pairs.begin() + 25, pairs.end());
  auto left = store_over(first);
  left.merge(store_over(second));

  CHECK(left.total_tasks() == whole.total_tasks());
  whole.for_each_joint([&](std::string_view ws, std::string_view wd,
                           std::uint64_t count) {
    CHECK(left.joint(ws, wd) == count);
  });
  whole.for_each_src([&](std::string_view ws, std::uint64_t presence) {
    CHECK(left.presence_src(ws) == presence);
  });
}

TEST_CASE("build_translation_lists caps lists at c_tr and applies c_w") {
  std::vector<std::pair<std::string, std::string>> lines;
  // "big" co-occurs with 12 distinct targets, each 5 times.
  for (int t = 0; t < 12; ++t) {
    for (int i = 0; i < 5; ++i) {
      lines.push_back({"big", "t" + std::to_string(t)});
    }
  }
  // "rare" appears twice only (below c_w = 5).
  lines.push_back({"rare", "t0"});
  lines.push_back({"rare", "t1"});
  auto pairs = fixtures::make_pairs(lines);
  auto store = store_over(pairs);

  lexicon::BuildConfig config;
  config.c_tr = 10;
  config.c_w = 5;
  auto entries = lexicon::build_translation_lists(store, config);
  REQUIRE(entries.contains("big"));
  CHECK(entries.at("big").translations.size() == 10);
  CHECK(entries.at("big").support == 60);
  CHECK(!entries.contains("rare"));
}

TEST_CASE("translation ties break lexicographically") {
  // "w" co-occurs once with each of three targets appearing once: all
  // relevances equal.
  auto pairs = fixtures::make_pairs({{"w", "zc za zb"}});
  lexicon::BuildConfig config;
  config.c_w = 1;
  auto entries = lexicon::build_translation_lists(store_over(pairs), config);
  REQUIRE(entries.contains("w"));
  const auto& trans = entries.at("w").translations;
  REQUIRE(trans.size() == 3);
  CHECK(trans[0].item == "za");
  CHECK(trans[1].item == "zb");
  CHECK(trans[2].item == "zc");
}

TEST_CASE("a source item with one co-occurring target gets a length-1 list") {
  std::vector<std::pair<std::string, std::string>> lines(
      6, {"solo", "alone"});
  auto entries = lexicon::build_translation_lists(
      store_over(fixtures::make_pairs(lines)), lexicon::BuildConfig{});
  REQUIRE(entries.contains("solo"));
  CHECK(entries.at("solo").translations.size() == 1);
  CHECK(entries.at("solo").translations[0].item == "alone");
  CHECK(entries.at("solo").translations[0].score == doctest::Approx(1.0));
}

TEST_CASE("compute_error_rates counts pairs missing every listed translation") {
  // "w" -> "x" in 7 pairs; in 3 pairs the target drops "x".
  std::vector<std::pair<std::string, std::string>> lines;
  for (int i = 0; i < 7; ++i) lines.push_back({"w filler", "x pad"});
  for (int i = 0; i < 3; ++i) lines.push_back({"w filler", "pad"});
  auto pairs = fixtures::make_pairs(lines);

  lexicon::BuildConfig config;
  config.c_w = 1;
  auto lex = lexicon::build(pairs, {"a", "b"}, config);
  REQUIRE(lex.find("w") != nullptr);
  // Independent recount: pairs containing "w" = 10, misses = pairs whose
  // target lacks every listed translation.
  const auto& entry = *lex.find("w");
  std::uint64_t n = 0, misses = 0;
  for (const auto& pair : pairs) {
    bool has_w = false;
    for (const auto& t : pair.source) has_w |= (t == "w");
    if (!has_w) continue;
    ++n;
    bool any = false;
    for (const auto& trans : entry.translations) {
      for (const auto& t : pair.target) any |= (t == trans.item);
    }
    if (!any) ++misses;
  }
  CHECK(n == 10);
  CHECK(entry.error_rate ==
        doctest::Approx(static_cast<double>(misses) / 10.0).epsilon(1e-9));
  // "x" is listed for "w" ("pad" too), so only the x-less pairs could
  // miss; "pad" appears there, hence zero error.
  CHECK(entry.error_rate == doctest::Approx(0.0));
}

TEST_CASE("error rate reflects targets missing all translations") {
  // "w" maps to "x" (7 of 10 pairs) but 3 pairs carry no listed target
  // at all: unique filler per pair keeps fillers below c_w.
  std::vector<std::pair<std::string, std::string>> lines;
  for (int i = 0; i < 7; ++i) lines.push_back({"w", "x"});
  for (int i = 0; i < 3; ++i) {
    lines.push_back({"w", "junk" + std::to_string(i)});
  }
  auto pairs = fixtures::make_pairs(lines);
  lexicon::BuildConfig config;
  config.c_w = 5;
  auto lex = lexicon::build(pairs, {"a", "b"}, config);
  REQUIRE(lex.find("w") != nullptr);
  CHECK(lex.find("w")->error_rate == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("lexicon save/load round-trips exactly") {
  std::mt19937 rng(43);
  auto pairs = random_corpus(rng, 80, 10);
  lexicon::BuildConfig config;
  config.c_w = 2;
  config.phrases_src = true;
  config.c_ph = 3;
  auto lex = lexicon::build(pairs, {"en", "zh"}, config, 1723000000);

  auto path = write_temp("tc_lexicon_roundtrip.lex", "");
  lexicon::save_lexicon(lex, path.string());
  auto loaded = lexicon::load_lexicon(path.string());
  CHECK(loaded == lex);
  // Serialization is a fixpoint.
  CHECK(lexicon::serialize_lexicon(loaded) == lexicon::serialize_lexicon(lex));
}

TEST_CASE("hand-authored fixture entries load with full lists") {
  auto path =
      write_temp("tc_lexicon_fixture.lex", fixtures::zh_en_fixture_lexicon_text());
  auto lex = lexicon::load_lexicon(path.string());
  CHECK(lex.direction == lexicon::Direction{"zh", "en"});
  CHECK(lex.entries.size() == 2);
  REQUIRE(lex.find("妈妈") != nullptr);
  REQUIRE(lex.find("桌") != nullptr);
  CHECK(lex.find("妈妈")->translations.size() == 10);
  CHECK(lex.find("妈妈")->translations[0].item == "mother");
  CHECK(lex.find("妈妈")->error_rate == doctest::Approx(0.04116));
  CHECK(lex.find("桌")->translations.size() == 10);
  CHECK(lex.find("桌")->translations[1].item == "desk");
}

TEST_CASE("duplicate entry records are fatal") {
  std::string text = fixtures::zh_en_fixture_lexicon_text();
  text += "妈妈\t1\t0.000000\tdup:1.000000\n";
  auto path = write_temp("tc_lexicon_dup.lex", text);
  CHECK_THROWS_WITH_AS(lexicon::load_lexicon(path.string()),
                       doctest::Contains("duplicate entry"),
                       std::runtime_error);
}

TEST_CASE("version mismatch is fatal") {
  auto path = write_temp("tc_lexicon_badversion.lex",
                         "transcheck-lexicon v99\ndirection\ta\tb\n");
  CHECK_THROWS_WITH_AS(lexicon::load_lexicon(path.string()),
                       doctest::Contains("version mismatch"),
                       std::runtime_error);
}

TEST_CASE("malformed records are fatal with a record number") {
  std::string text = fixtures::zh_en_fixture_lexicon_text();
  text += "broken-entry-without-fields\n";
  auto path = write_temp("tc_lexicon_malformed.lex", text);
  CHECK_THROWS_WITH_AS(lexicon::load_lexicon(path.string()),
                       doctest::Contains("record 10"), std::runtime_error);
}

TEST_CASE("reverse index inverts the translation lists") {
  std::mt19937 rng(47);
  auto pairs = random_corpus(rng, 60, 12);
  lexicon::BuildConfig config;
  config.c_w = 2;
  auto lex = lexicon::build(pairs, {"en", "zh"}, config);

  // d in translations(s) implies s in reverse_lookup(d) and conversely.
  for (const auto& [item, entry] : lex.entries) {
    for (const auto& trans : entry.translations) {
      auto sources = lex.reverse_lookup(trans.item);
      CHECK(std::find(sources.begin(), sources.end(), item) != sources.end());
    }
  }
  std::size_t reverse_edges = 0;
  for (const auto& [item, entry] : lex.entries) {
    for (const auto& trans : entry.translations) {
      auto sources = lex.reverse_lookup(trans.item);
      reverse_edges +=
          std::count(sources.begin(), sources.end(), item) ? 1 : 0;
    }
  }
  std::size_t forward_edges = 0;
  for (const auto& [_, entry] : lex.entries) {
    forward_edges += entry.translations.size();
  }
  CHECK(reverse_edges == forward_edges);
}
