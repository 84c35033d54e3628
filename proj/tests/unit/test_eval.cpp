#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "../common/fixtures.hpp"
#include "../common/oracles.hpp"
#include "transcheck/eval.hpp"

using namespace transcheck;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

// Single-entry lexicon: "w" translates to "x"; a record is under-flagged
// exactly when its source has "w" and its target lacks "x".
lexicon::Lexicon toy_lexicon() {
  lexicon::Lexicon lex;
  lex.direction = {"a", "b"};
  lexicon::LexiconEntry entry;
  entry.item = "w";
  entry.translations = {{"x", 1.0}};
  lex.entries.emplace(entry.item, entry);
  lex.rebuild_reverse_index();
  return lex;
}

eval::EvalRecord make_record(std::uint64_t id, const std::string& src,
                             const std::string& dst, bool label_under,
                             bool label_over = false) {
  eval::EvalRecord record;
  record.pair.id = id;
  record.pair.source = corpus::normalize(src);
  record.pair.target = corpus::normalize(dst);
  record.label_under = label_under;
  record.label_over = label_over;
  return record;
}

}  // namespace

TEST_CASE("load_eval_dataset parses records and counts positives") {
  auto path = write_temp(
      "te_dataset.jsonl",
      R"({"source":"w a","translation":"y","label_under":true,"label_over":false})"
      "\n"
      R"({"source":"b","translation":"x x","label_under":false,"label_over":true})"
      "\n"
      R"({"source":"c","translation":"z","label_under":true,"label_over":true,"under_tokens":["c"]})"
      "\n");
  auto records = eval::load_eval_dataset(path.string());
  REQUIRE(records.size() == 3);
  CHECK(records[0].pair.id == 0);
  CHECK(records[0].pair.source == std::vector<corpus::Token>{"w", "a"});
  std::size_t under = 0, over = 0;
  for (const auto& r : records) {
    under += r.label_under ? 1 : 0;
    over += r.label_over ? 1 : 0;
  }
  CHECK(under == 2);
  CHECK(over == 2);
  CHECK(records[2].under_tokens == std::vector<std::string>{"c"});
}

TEST_CASE("a news-sized manifest loads with the expected positive counts") {
  // 200 records, 54 under-positives, 4 over-positives.
  std::string text;
  for (int i = 0; i < 200; ++i) {
    text += R"({"source":"s)" + std::to_string(i) + R"(","translation":"t",)" +
            R"("label_under":)" + (i < 54 ? "true" : "false") +
            R"(,"label_over":)" + (i < 4 ? "true" : "false") + "}\n";
  }
  auto path = write_temp("te_dataset_news.jsonl", text);
  auto records = eval::load_eval_dataset(path.string());
  REQUIRE(records.size() == 200);
  std::size_t under = 0, over = 0;
  for (const auto& r : records) {
    under += r.label_under ? 1 : 0;
    over += r.label_over ? 1 : 0;
  }
  CHECK(under == 54);
  CHECK(over == 4);
}

TEST_CASE("load_eval_dataset is fatal on a missing field") {
  auto path = write_temp(
      "te_dataset_missing.jsonl",
      R"({"source":"a","translation":"b","label_under":true,"label_over":false})"
      "\n"
      R"({"source":"a","translation":"b","label_under":true})"
      "\n");
  CHECK_THROWS_WITH_AS(eval::load_eval_dataset(path.string()),
                       doctest::Contains("record 2"), std::runtime_error);
}

TEST_CASE("load_eval_dataset is fatal on an empty dataset") {
  auto path = write_temp("te_dataset_empty.jsonl", "");
  CHECK_THROWS_WITH_AS(eval::load_eval_dataset(path.string()),
                       doctest::Contains("empty dataset"), std::runtime_error);
}

TEST_CASE("eval dataset round-trips through save") {
  std::vector<eval::EvalRecord> records{
      make_record(0, "w a", "y", true),
      make_record(1, "b", "x x", false, true),
  };
  records[0].under_tokens = {"w"};
  auto path = write_temp("te_dataset_rt.jsonl", "");
  eval::save_eval_dataset(records, path.string());
  auto reloaded = eval::load_eval_dataset(path.string());
  CHECK(reloaded == records);
}

TEST_CASE("metrics formulas and edge conventions") {
  // The (0.375, 0.75, 0.5) shape: |S| = 4, |S'| = 8, hits = 3.
  auto m = eval::metrics_from_counts(4, 8, 3);
  CHECK(m.precision == doctest::Approx(0.375));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f_measure == doctest::Approx(0.5));

  // Nothing flagged: precision 0 by convention.
  auto none = eval::metrics_from_counts(5, 0, 0);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f_measure == 0.0);

  // Nothing labeled: recall 1 by convention.
  auto empty_s = eval::metrics_from_counts(0, 3, 0);
  CHECK(empty_s.recall == 1.0);
  CHECK(empty_s.precision == 0.0);

  // Perfect detector.
  auto perfect = eval::metrics_from_counts(7, 7, 7);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f_measure == 1.0);
}

TEST_CASE("f-measure bounds hold on random counts") {
  std::mt19937 rng(53);
  for (int round = 0; round < 500; ++round) {
    std::uint64_t labeled = rng() % 50;
    std::uint64_t flagged = rng() % 50;
    std::uint64_t hits = std::min(labeled, flagged) == 0
                             ? 0
                             : rng() % std::min(labeled, flagged);
    auto m = eval::metrics_from_counts(labeled, flagged, hits);
    CHECK(m.f_measure <= 2.0 * m.precision + 1e-12);
    CHECK(m.f_measure <= 2.0 * m.recall + 1e-12);
    CHECK(m.f_measure <= std::max(m.precision, m.recall) + 1e-12);
  }
}

TEST_CASE("evaluate reconstructs the (0.375, 0.75, 0.5) dataset shape") {
  auto lex = toy_lexicon();
  std::vector<eval::EvalRecord> records;
  std::uint64_t id = 0;
  // 3 labeled and flagged ("w" present, "x" missing).
  for (int i = 0; i < 3; ++i) records.push_back(make_record(id++, "w", "y", true));
  // 1 labeled, not flagged ("x" present).
  records.push_back(make_record(id++, "w", "x", true));
  // 5 unlabeled but flagged.
  for (int i = 0; i < 5; ++i)
    records.push_back(make_record(id++, "w", "z", false));
  // 3 unlabeled, unflagged.
  for (int i = 0; i < 3; ++i)
    records.push_back(make_record(id++, "q", "x", false));

  auto m = eval::evaluate(records, lex, detect::CheckConfig{},
                          eval::ViolationType::under);
  CHECK(m.labeled == 4);
  CHECK(m.flagged == 8);
  CHECK(m.hits == 3);
  CHECK(m.precision == doctest::Approx(0.375));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f_measure == doctest::Approx(0.5));
  CHECK(m.flagged_item_count == 8);
}

TEST_CASE("evaluate matches the confusion oracle on random datasets") {
  std::mt19937 rng(59);
  auto lex = toy_lexicon();
  for (int round = 0; round < 20; ++round) {
    std::vector<eval::EvalRecord> records;
    std::vector<bool> labels, flags;
    for (int i = 0; i < 50; ++i) {
      bool has_w = rng() % 2 == 0;
      bool has_x = rng() % 2 == 0;
      bool label = rng() % 2 == 0;
      records.push_back(make_record(i, has_w ? "w pad" : "pad",
                                    has_x ? "x fill" : "fill", label));
      labels.push_back(label);
      flags.push_back(has_w && !has_x);
    }
    auto oracle = oracles::confusion_counts(labels, flags);
    auto m = eval::evaluate(records, lex, detect::CheckConfig{},
                            eval::ViolationType::under);
    CHECK(m.labeled == oracle.labeled);
    CHECK(m.flagged == oracle.flagged);
    CHECK(m.hits == oracle.hits);
  }
}

TEST_CASE("grid parsing accepts ranges and lists") {
  auto grid = eval::parse_grid("0.05:1.0:0.05");
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(1.0));

  auto list = eval::parse_grid("0.1,0.5,1");
  CHECK(list == std::vector<double>{0.1, 0.5, 1.0});

  CHECK_THROWS_AS(eval::parse_grid("0:1:0.1"), std::invalid_argument);   // 0 excluded
  CHECK_THROWS_AS(eval::parse_grid("0.5,0.4"), std::invalid_argument);   // not increasing
  CHECK_THROWS_AS(eval::parse_grid("0.5,1.5"), std::invalid_argument);   // above 1
  CHECK_THROWS_AS(eval::parse_grid(""), std::invalid_argument);
}

TEST_CASE("a single-point sweep equals evaluate") {
  auto lex = toy_lexicon();
  std::vector<eval::EvalRecord> records{
      make_record(0, "w", "y", true),
      make_record(1, "w", "x", false),
  };
  detect::CheckConfig config;
  config.e_th = 0.3;
  double grid[] = {0.3};
  auto sweep = eval::sweep_e_th(records, lex, config, grid, "toy");
  REQUIRE(sweep.points.size() == 1);
  CHECK(sweep.points[0].metrics ==
        eval::evaluate(records, lex, config, eval::ViolationType::under));

  auto csv = eval::sweep_csv(sweep);
  CHECK(csv.find("dataset,e_th,precision,recall,f,count") == 0);
  CHECK(csv.find("toy,0.30,") != std::string::npos);
}

TEST_CASE("std-dict baselines keep all listed translations") {
  auto path = write_temp("te_stddict.tsv",
                         "cold\t寒冷\t冷\n"
                         "warm\t暖\n");
  auto lex = eval::load_baseline_lexicon(path.string(),
                                         eval::BaselineKind::std_dict, 10,
                                         {"en", "zh"});
  REQUIRE(lex.find("cold") != nullptr);
  CHECK(lex.find("cold")->translations.size() == 2);
  REQUIRE(lex.find("warm") != nullptr);
  CHECK(lex.find("warm")->translations.size() == 1);
  CHECK(lex.find("warm")->error_rate == 0.0);
  CHECK(lex.find("warm")->translations[0].score == 1.0);
  // Reverse index serves the over-translation direction.
  auto sources = lex.reverse_lookup("冷");
  REQUIRE(sources.size() == 1);
  CHECK(sources[0] == "cold");
}

TEST_CASE("word-align baselines keep the top c_tr by probability") {
  std::string text;
  for (int i = 0; i < 15; ++i) {
    text += "word\tt" + std::to_string(i) + "\t0." +
            std::to_string(10 + i) + "\n";
  }
  auto path = write_temp("te_wordalign.tsv", text);
  auto lex = eval::load_baseline_lexicon(path.string(),
                                         eval::BaselineKind::word_align, 10,
                                         {"en", "zh"});
  REQUIRE(lex.find("word") != nullptr);
  const auto& trans = lex.find("word")->translations;
  REQUIRE(trans.size() == 10);
  CHECK(trans[0].item == "t14");  // highest probability first
  CHECK(trans[0].score == doctest::Approx(0.24));
  CHECK(trans[9].item == "t5");
}

TEST_CASE("word-align validation rejects bad probabilities") {
  auto negative = write_temp("te_wordalign_neg.tsv", "w\tt\t-0.5\n");
  CHECK_THROWS_WITH_AS(
      eval::load_baseline_lexicon(negative.string(),
                                  eval::BaselineKind::word_align, 10,
                                  {"en", "zh"}),
      doctest::Contains("probability"), std::runtime_error);
  auto above = write_temp("te_wordalign_above.tsv", "w\tt\t1.5\n");
  CHECK_THROWS_AS(
      eval::load_baseline_lexicon(above.string(),
                                  eval::BaselineKind::word_align, 10,
                                  {"en", "zh"}),
      std::runtime_error);
}

TEST_CASE("baseline adapters round-trip through the lexicon format") {
  auto dict_path = write_temp("te_baseline_rt.tsv", "w\tx\nv\ty\tz\n");
  auto lex = eval::load_baseline_lexicon(dict_path.string(),
                                         eval::BaselineKind::std_dict, 10,
                                         {"a", "b"});
  auto saved = write_temp("te_baseline_rt.lex", "");
  lexicon::save_lexicon(lex, saved.string());
  auto reloaded = lexicon::load_lexicon(saved.string());

  std::vector<eval::EvalRecord> records{
      make_record(0, "w", "q", true),   // flagged
      make_record(1, "w", "x", false),  // passes
      make_record(2, "v", "z", false),  // passes via second translation
  };
  detect::CheckConfig config;
  for (const auto& record : records) {
    auto before = detect::check(record.pair, lex, config);
    auto after = detect::check(record.pair, reloaded, config);
    CHECK(detect::report_to_json(before) == detect::report_to_json(after));
  }
  CHECK(detect::check(records[0].pair, reloaded, config).has_under());
  CHECK(!detect::check(records[1].pair, reloaded, config).has_under());
}
