// transcheck: reference-free translation-failure detection.
//
// Subcommands: synth (fixture corpora), build (learn a lexicon), import
// (adapt std-dict / word-align files), check (flag violations), eval
// (precision/recall/F against labels), sweep (e_th grid), serve (checking
// service), monitor (aggregate check output).

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "transcheck/corpus.hpp"
#include "transcheck/detect.hpp"
#include "transcheck/eval.hpp"
#include "transcheck/lexicon.hpp"
#include "transcheck/service.hpp"
#include "transcheck/synth.hpp"

namespace {

using namespace transcheck;

struct CommonOpts {
  std::string source_lang;
  std::string target_lang;
  std::uint64_t limit = 0;

  std::optional<std::uint64_t> limit_opt() const {
    return limit == 0 ? std::nullopt : std::optional<std::uint64_t>(limit);
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--source-lang", opts.source_lang, "Source language tag");
  cmd->add_option("--target-lang", opts.target_lang, "Target language tag");
  cmd->add_option("--limit", opts.limit,
                  "Process at most N input records (0 = all)");
}

// Langs given on the command line must agree with the lexicon direction.
void require_direction_match(const lexicon::Lexicon& lex,
                             const CommonOpts& opts) {
  if (!opts.source_lang.empty() &&
      lex.direction.source_lang != opts.source_lang) {
    throw std::runtime_error("direction mismatch: lexicon is " +
                             lex.direction.str() + ", requested source " +
                             opts.source_lang);
  }
  if (!opts.target_lang.empty() &&
      lex.direction.target_lang != opts.target_lang) {
    throw std::runtime_error("direction mismatch: lexicon is " +
                             lex.direction.str() + ", requested target " +
                             opts.target_lang);
  }
}

std::int64_t default_timestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    return std::strtoll(env, nullptr, 10);
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

// "300", "300s", "5m", "2h" -> seconds.
std::int64_t parse_duration(const std::string& text) {
  if (text.empty()) throw std::runtime_error("empty duration");
  char suffix = text.back();
  std::string digits = text;
  std::int64_t scale = 1;
  if (suffix == 's' || suffix == 'm' || suffix == 'h') {
    digits = text.substr(0, text.size() - 1);
    scale = suffix == 's' ? 1 : suffix == 'm' ? 60 : 3600;
  }
  std::size_t pos = 0;
  std::int64_t value = std::stoll(digits, &pos);
  if (pos != digits.size() || value <= 0) {
    throw std::runtime_error("bad duration: " + text);
  }
  return value * scale;
}

void report_skips(const std::vector<corpus::SkippedLine>& skipped) {
  for (const auto& skip : skipped) {
    std::cerr << "warning: skipped line " << skip.line_number << ": "
              << skip.reason << "\n";
  }
}

int run_build(const std::string& corpus_path, const std::string& out_path,
              const lexicon::BuildConfig& config, std::int64_t timestamp,
              const CommonOpts& common) {
  auto loaded = corpus::load_corpus(corpus_path, common.limit_opt());
  report_skips(loaded.skipped);
  if (loaded.pairs.empty()) {
    throw std::runtime_error("no training pairs in " + corpus_path);
  }
  lexicon::Direction direction{common.source_lang, common.target_lang};
  auto lex = lexicon::build(loaded.pairs, direction, config, timestamp);
  lexicon::save_lexicon(lex, out_path);
  std::cerr << "built " << lex.entries.size() << " entries from "
            << loaded.pairs.size() << " pairs -> " << out_path << "\n";
  return 0;
}

int run_import(const std::string& in_path, const std::string& out_path,
               const std::string& kind, std::uint32_t c_tr,
               const CommonOpts& common) {
  eval::BaselineKind baseline_kind;
  if (kind == "std-dict") {
    baseline_kind = eval::BaselineKind::std_dict;
  } else if (kind == "word-align") {
    baseline_kind = eval::BaselineKind::word_align;
  } else {
    throw std::runtime_error("unknown baseline kind: " + kind);
  }
  auto lex = eval::load_baseline_lexicon(
      in_path, baseline_kind, c_tr,
      {common.source_lang, common.target_lang});
  lex.created_unix = default_timestamp();
  lexicon::save_lexicon(lex, out_path);
  std::cerr << "imported " << lex.entries.size() << " entries -> " << out_path
            << "\n";
  return 0;
}

detect::CheckConfig make_check_config(double e_th, const std::string& preset,
                                      bool e_th_given,
                                      std::uint32_t proximity_window,
                                      const std::string& stopwords_path,
                                      const std::string& target_lang) {
  detect::CheckConfig config;
  config.e_th = e_th;
  if (!e_th_given && !preset.empty()) {
    if (preset == "news") {
      config.e_th = detect::kEthNews;
    } else if (preset == "oral") {
      config.e_th = detect::kEthOral;
    } else if (preset == "production") {
      config.e_th = detect::kEthDefault;
    } else {
      throw std::runtime_error("unknown preset: " + preset);
    }
  }
  config.proximity_window = proximity_window;
  if (!stopwords_path.empty()) {
    config.stopwords = corpus::load_stopwords(stopwords_path, target_lang);
  }
  return config;
}

int run_check(const std::string& lexicon_path, const std::string& input_path,
              const std::string& out_path, const detect::CheckConfig& config,
              const CommonOpts& common) {
  auto lex = lexicon::load_lexicon(lexicon_path);
  require_direction_match(lex, common);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output: " + out_path);
    out = &file;
  }

  corpus::CorpusReader reader(input_path, common.limit_opt());
  corpus::SentencePair pair;
  std::uint64_t checked = 0, flagged = 0;
  while (reader.next(pair)) {
    auto report = detect::check(pair, lex, config);
    std::uint64_t key = service::task_key(corpus::join_tokens(pair.source),
                                          corpus::join_tokens(pair.target));
    *out << detect::report_to_json(report, std::nullopt, key) << "\n";
    ++checked;
    if (report.has_under() || report.has_over()) ++flagged;
  }
  report_skips(reader.skipped());
  std::cerr << "checked " << checked << " tasks, flagged " << flagged << "\n";
  return 0;
}

int run_eval(const std::string& lexicon_path, const std::string& dataset_path,
             const std::string& type, const std::string& out_path,
             const detect::CheckConfig& config, const CommonOpts& common) {
  auto lex = lexicon::load_lexicon(lexicon_path);
  require_direction_match(lex, common);
  auto records = eval::load_eval_dataset(dataset_path);
  if (common.limit_opt() && records.size() > common.limit) {
    records.resize(common.limit);
  }
  auto metrics = eval::evaluate(records, lex, config,
                                eval::violation_type_from_string(type));
  std::string json = eval::metrics_json(
      metrics, eval::violation_type_from_string(type));
  if (out_path.empty() || out_path == "-") {
    std::cout << json << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output: " + out_path);
    out << json << "\n";
  }
  std::cerr << "P=" << metrics.precision << " R=" << metrics.recall
            << " F=" << metrics.f_measure << "\n";
  return 0;
}

int run_sweep(const std::string& lexicon_path, const std::string& dataset_path,
              const std::string& grid_spec, const std::string& out_path,
              const std::string& name, const detect::CheckConfig& config,
              const CommonOpts& common) {
  auto lex = lexicon::load_lexicon(lexicon_path);
  require_direction_match(lex, common);
  auto records = eval::load_eval_dataset(dataset_path);
  if (common.limit_opt() && records.size() > common.limit) {
    records.resize(common.limit);
  }
  auto grid = eval::parse_grid(grid_spec);
  std::string dataset_name = name.empty() ? dataset_path : name;
  auto result = eval::sweep_e_th(records, lex, config, grid, dataset_name);
  std::string csv = eval::sweep_csv(result);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output: " + out_path);
    out << csv;
  }
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              std::uint64_t seed_override, bool seed_given) {
  auto spec = synth::load_spec_toml(spec_path);
  if (seed_given) spec.seed = seed_override;
  auto output = synth::generate(spec);
  synth::write_outputs(output, spec, out_dir);
  std::cerr << "wrote " << output.train.size() << " training pairs, "
            << output.eval_set.size() << " eval records, "
            << output.dictionary.size() << " dictionary entries -> " << out_dir
            << "\n";
  return 0;
}

int run_serve(const std::vector<std::string>& lexicon_paths,
              const std::string& bind, const std::string& window,
              double e_th, std::uint32_t proximity_window,
              const std::vector<std::string>& stopword_specs) {
  std::vector<lexicon::Lexicon> lexicons;
  for (const auto& path : lexicon_paths) {
    lexicons.push_back(lexicon::load_lexicon(path));
  }
  std::map<std::string, corpus::StopWordSet> stopwords;
  for (const auto& spec : stopword_specs) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("--stopwords expects LANG:FILE, got " + spec);
    }
    std::string lang = spec.substr(0, colon);
    stopwords[lang] = corpus::load_stopwords(spec.substr(colon + 1), lang);
  }
  detect::CheckConfig config;
  config.e_th = e_th;
  config.proximity_window = proximity_window;

  auto host_port = bind;
  std::string host = "127.0.0.1";
  int port = 8787;
  auto colon = host_port.rfind(':');
  if (colon != std::string::npos) {
    host = host_port.substr(0, colon);
    port = std::stoi(host_port.substr(colon + 1));
  } else if (!host_port.empty()) {
    host = host_port;
  }

  service::CheckService svc(std::move(lexicons), config, std::move(stopwords),
                            parse_duration(window));
  auto server = service::start_server(svc, host, port);
  std::cerr << "serving on " << host << ":" << service::server_port(*server);
  for (const auto& direction : svc.directions()) std::cerr << " " << direction;
  std::cerr << "\n";
  service::wait_server(*server);
  return 0;
}

int run_monitor(const std::string& input_path, const std::string& window,
                const std::string& out_path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (!input_path.empty() && input_path != "-") {
    file.open(input_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open report: " + input_path);
    in = &file;
  }
  auto series = service::monitor_report(*in, parse_duration(window));
  std::string csv = service::monitor_csv(series);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output: " + out_path);
    out << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-free under-/over-translation detection"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "Learn a lexicon from a corpus");
  CommonOpts build_common;
  std::string build_corpus, build_out;
  lexicon::BuildConfig build_config;
  std::string phrases_src = "auto", phrases_dst = "auto";
  std::int64_t timestamp = default_timestamp();
  build->add_option("--corpus", build_corpus, "Parallel corpus TSV")
      ->required();
  build->add_option("--out", build_out, "Lexicon output path")->required();
  build->add_option("--c-tr", build_config.c_tr, "Translations kept per item");
  build->add_option("--c-ph", build_config.c_ph, "Min phrase pair count");
  build->add_option("--d-ph", build_config.d_ph, "Max keyword gap");
  build->add_option("--c-w", build_config.c_w, "Min item presence count");
  build->add_option("--e-th-default", build_config.e_th_default,
                    "Default error-rate tolerance stored in the lexicon");
  build->add_option("--phrases-src", phrases_src,
                    "Phrase identification on the source side "
                    "(on|off|auto; auto = on for 'en', segmented languages "
                    "rarely need it)");
  build->add_option("--phrases-dst", phrases_dst,
                    "Phrase identification on the target side (on|off|auto)");
  build->add_option("--timestamp", timestamp,
                    "Build timestamp recorded in the lexicon "
                    "(default: SOURCE_DATE_EPOCH or current time)");
  add_common(build, build_common);

  // import
  auto* import = app.add_subcommand(
      "import", "Adapt a std-dict or word-align file into a lexicon");
  CommonOpts import_common;
  std::string import_in, import_out, import_kind;
  std::uint32_t import_c_tr = 10;
  import->add_option("--kind", import_kind, "std-dict | word-align")
      ->required();
  import->add_option("--in", import_in, "Baseline input file")->required();
  import->add_option("--out", import_out, "Lexicon output path")->required();
  import->add_option("--c-tr", import_c_tr,
                     "Translations kept per item (word-align)");
  add_common(import, import_common);

  // check
  auto* check = app.add_subcommand("check", "Check tasks against a lexicon");
  CommonOpts check_common;
  std::string check_lexicon, check_input, check_out, check_stopwords;
  std::string check_preset;
  double check_e_th = detect::kEthDefault;
  std::uint32_t check_window = 10;
  check->add_option("--lexicon", check_lexicon, "Lexicon path")->required();
  check->add_option("--input", check_input, "Tasks TSV (source<TAB>translation)")
      ->required();
  auto* check_e_th_opt =
      check->add_option("--e-th", check_e_th, "Error-rate tolerance");
  check->add_option("--window", check_window,
                    "Proximity window for over-translation (tokens)");
  check->add_option("--stopwords", check_stopwords, "Stop-word file");
  check->add_option("--preset", check_preset,
                    "e_th preset: news (0.15) | oral (0.25) | production (0.2)");
  check->add_option("--out", check_out, "Report JSONL output (default stdout)");
  add_common(check, check_common);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate against labels");
  CommonOpts eval_common;
  std::string eval_lexicon, eval_dataset, eval_type = "under", eval_out;
  std::string eval_stopwords, eval_preset;
  double eval_e_th = detect::kEthDefault;
  std::uint32_t eval_window = 10;
  eval_cmd->add_option("--lexicon", eval_lexicon, "Lexicon path")->required();
  eval_cmd->add_option("--dataset", eval_dataset, "Labeled JSONL dataset")
      ->required();
  eval_cmd->add_option("--type", eval_type, "under | over");
  auto* eval_e_th_opt =
      eval_cmd->add_option("--e-th", eval_e_th, "Error-rate tolerance");
  eval_cmd->add_option("--window", eval_window, "Proximity window (tokens)");
  eval_cmd->add_option("--stopwords", eval_stopwords, "Stop-word file");
  eval_cmd->add_option("--preset", eval_preset, "news | oral | production");
  eval_cmd->add_option("--out", eval_out, "Metrics JSON output");
  add_common(eval_cmd, eval_common);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep e_th over a grid");
  CommonOpts sweep_common;
  std::string sweep_lexicon, sweep_dataset, sweep_out, sweep_name;
  std::string sweep_grid = "0.05:1.0:0.05", sweep_stopwords;
  std::uint32_t sweep_window = 10;
  sweep->add_option("--lexicon", sweep_lexicon, "Lexicon path")->required();
  sweep->add_option("--dataset", sweep_dataset, "Labeled JSONL dataset")
      ->required();
  sweep->add_option("--grid", sweep_grid,
                    "start:end:step or comma list, values in (0,1]");
  sweep->add_option("--stopwords", sweep_stopwords, "Stop-word file");
  sweep->add_option("--name", sweep_name, "Dataset name for the CSV");
  sweep->add_option("--window", sweep_window, "Proximity window (tokens)");
  sweep->add_option("--out", sweep_out, "Sweep CSV output (default stdout)");
  add_common(sweep, sweep_common);

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate synthetic fixture corpora");
  CommonOpts synth_common;
  std::string synth_spec, synth_out_dir;
  std::uint64_t synth_seed = 0;
  synth_cmd->add_option("--spec", synth_spec, "Spec file (flat TOML)")
      ->required();
  synth_cmd->add_option("--out-dir", synth_out_dir, "Output directory")
      ->required();
  auto* synth_seed_opt =
      synth_cmd->add_option("--seed", synth_seed, "Override the spec seed");
  add_common(synth_cmd, synth_common);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the checking service");
  CommonOpts serve_common;
  std::vector<std::string> serve_lexicons, serve_stopwords;
  std::string serve_bind = "127.0.0.1:8787", serve_window = "300s";
  double serve_e_th = detect::kEthDefault;
  std::uint32_t serve_proximity = 10;
  serve->add_option("--lexicon", serve_lexicons,
                    "Lexicon path (repeat for several directions)")
      ->required();
  serve->add_option("--bind", serve_bind, "host:port (port 0 = any)");
  serve->add_option("--window", serve_window, "Stats window, e.g. 300s or 5m");
  serve->add_option("--e-th", serve_e_th, "Error-rate tolerance");
  serve->add_option("--proximity-window", serve_proximity,
                    "Proximity window (tokens)");
  serve->add_option("--stopwords", serve_stopwords,
                    "LANG:FILE stop words per target language (repeatable)");
  add_common(serve, serve_common);

  // monitor
  auto* monitor =
      app.add_subcommand("monitor", "Aggregate check output into windows");
  CommonOpts monitor_common;
  std::string monitor_input, monitor_out, monitor_window = "300s";
  monitor->add_option("--input", monitor_input,
                      "Report JSONL ('-' or empty = stdin)");
  monitor->add_option("--window", monitor_window, "Window, e.g. 300s or 5m");
  monitor->add_option("--out", monitor_out, "CSV output (default stdout)");
  add_common(monitor, monitor_common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      auto phrase_toggle = [](const std::string& value,
                              const std::string& lang) {
        if (value == "on") return true;
        if (value == "off") return false;
        if (value == "auto") return lang == "en";
        throw std::runtime_error("bad phrase toggle: " + value);
      };
      build_config.phrases_src =
          phrase_toggle(phrases_src, build_common.source_lang);
      build_config.phrases_dst =
          phrase_toggle(phrases_dst, build_common.target_lang);
      return run_build(build_corpus, build_out, build_config, timestamp,
                       build_common);
    }
    if (import->parsed()) {
      return run_import(import_in, import_out, import_kind, import_c_tr,
                        import_common);
    }
    if (check->parsed()) {
      auto config = make_check_config(check_e_th, check_preset,
                                      check_e_th_opt->count() > 0,
                                      check_window, check_stopwords,
                                      check_common.target_lang);
      return run_check(check_lexicon, check_input, check_out, config,
                       check_common);
    }
    if (eval_cmd->parsed()) {
      auto config = make_check_config(eval_e_th, eval_preset,
                                      eval_e_th_opt->count() > 0, eval_window,
                                      eval_stopwords, eval_common.target_lang);
      return run_eval(eval_lexicon, eval_dataset, eval_type, eval_out, config,
                      eval_common);
    }
    if (sweep->parsed()) {
      auto config = make_check_config(detect::kEthDefault, "", true,
                                      sweep_window, sweep_stopwords,
                                      sweep_common.target_lang);
      return run_sweep(sweep_lexicon, sweep_dataset, sweep_grid, sweep_out,
                       sweep_name, config, sweep_common);
    }
    if (synth_cmd->parsed()) {
      return run_synth(synth_spec, synth_out_dir, synth_seed,
                       synth_seed_opt->count() > 0);
    }
    if (serve->parsed()) {
      return run_serve(serve_lexicons, serve_bind, serve_window, serve_e_th,
                       serve_proximity, serve_stopwords);
    }
    if (monitor->parsed()) {
      return run_monitor(monitor_input, monitor_window, monitor_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
