#include "transcheck/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace transcheck::service {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::uint64_t task_key(std::string_view source, std::string_view translation) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(source);
  mix("\x1f");
  mix(translation);
  return h;
}

StatsAccumulator::StatsAccumulator(std::int64_t window_seconds)
    : window_seconds_(window_seconds) {
  if (window_seconds_ < 1) {
    throw std::invalid_argument("window length must be >= 1 second");
  }
}

void StatsAccumulator::record(std::int64_t ts, bool has_under, bool has_over,
                              std::uint64_t dedup_key) {
  std::int64_t start = ts - (ts % window_seconds_ + window_seconds_) %
                                window_seconds_;  // floor for negatives too
  std::lock_guard lock(mu_);
  Bucket& bucket = buckets_[start];
  ++bucket.tasks;
  if (has_under) ++bucket.under;
  if (has_over) ++bucket.over;
  if (has_under || has_over) {
    ++bucket.flagged;
    bucket.unique_flagged.insert(dedup_key);
  }
}

MonitorSeries StatsAccumulator::series() const {
  MonitorSeries series;
  series.window_seconds = window_seconds_;
  std::lock_guard lock(mu_);
  for (const auto& [start, bucket] : buckets_) {
    WindowStats w;
    w.window_start = start;
    w.tasks_checked = bucket.tasks;
    w.under_count = bucket.under;
    w.over_count = bucket.over;
    w.flagged = bucket.flagged;
    w.unique_flagged = bucket.unique_flagged.size();
    series.windows.push_back(w);

    series.totals.tasks_checked += w.tasks_checked;
    series.totals.under_count += w.under_count;
    series.totals.over_count += w.over_count;
    series.totals.flagged += w.flagged;
    series.totals.unique_flagged += w.unique_flagged;
  }
  return series;
}

CheckService::CheckService(
    std::vector<lexicon::Lexicon> lexicons, detect::CheckConfig base_config,
    std::map<std::string, corpus::StopWordSet> stopwords_by_lang,
    std::int64_t window_seconds)
    : stats_(window_seconds) {
  if (lexicons.empty()) {
    throw std::invalid_argument("at least one lexicon required");
  }
  for (auto& lex : lexicons) {
    if (lex.direction.source_lang.empty() || lex.direction.target_lang.empty()) {
      throw std::invalid_argument(
          "service lexicons must carry a direction (source and target langs)");
    }
    std::string direction = lex.direction.str();
    detect::CheckConfig config = base_config;
    auto sw = stopwords_by_lang.find(lex.direction.target_lang);
    if (sw != stopwords_by_lang.end()) config.stopwords = sw->second;
    configs_.emplace(direction, std::move(config));
    if (!lexicons_.emplace(direction, std::move(lex)).second) {
      throw std::invalid_argument("duplicate lexicon direction: " + direction);
    }
  }
}

detect::ViolationReport CheckService::check(const CheckRequest& request) {
  auto lex = lexicons_.find(request.direction);
  if (lex == lexicons_.end()) {
    throw std::invalid_argument("unknown direction: " + request.direction);
  }
  corpus::SentencePair pair;
  pair.source = corpus::normalize(request.source);
  pair.target = corpus::normalize(request.translation);
  auto report = detect::check(pair, lex->second, configs_.at(request.direction));

  std::int64_t ts =
      request.ts.value_or(std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count());
  stats_.record(ts, report.has_under(), report.has_over(),
                task_key(request.source, request.translation));
  return report;
}

CheckService::Response CheckService::handle_check_json(
    const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return {400, json{{"error", std::string("invalid JSON: ") + e.what()}}.dump()};
  }
  for (const char* field : {"direction", "source", "translation"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      return {400,
              json{{"error", std::string("missing field: ") + field}}.dump()};
    }
  }
  CheckRequest request;
  request.direction = j["direction"].get<std::string>();
  request.source = j["source"].get<std::string>();
  request.translation = j["translation"].get<std::string>();
  if (j.contains("ts")) {
    if (!j["ts"].is_number_integer()) {
      return {400, json{{"error", "ts must be an integer"}}.dump()};
    }
    request.ts = j["ts"].get<std::int64_t>();
  }
  try {
    auto report = check(request);
    return {200, detect::report_to_json(
                     report, request.ts,
                     task_key(request.source, request.translation))};
  } catch (const std::invalid_argument& e) {
    return {400, json{{"error", e.what()}}.dump()};
  }
}

std::vector<std::string> CheckService::directions() const {
  std::vector<std::string> out;
  for (const auto& [direction, _] : lexicons_) out.push_back(direction);
  return out;
}

std::string CheckService::stats_json() const {
  return monitor_series_json(stats());
}

std::string monitor_series_json(const MonitorSeries& series) {
  ordered_json j;
  j["window_seconds"] = series.window_seconds;
  j["unique_dedup"] = "exact (source, translation) pair within one window";
  auto window_json = [](const WindowStats& w) {
    return ordered_json{{"window_start", w.window_start},
                        {"tasks_checked", w.tasks_checked},
                        {"under_count", w.under_count},
                        {"over_count", w.over_count},
                        {"flagged", w.flagged},
                        {"unique_flagged", w.unique_flagged}};
  };
  j["totals"] = window_json(series.totals);
  j["totals"].erase("window_start");
  j["windows"] = ordered_json::array();
  for (const auto& w : series.windows) j["windows"].push_back(window_json(w));
  return j.dump(2);
}

MonitorSeries monitor_report(std::istream& report_jsonl,
                             std::int64_t window_seconds) {
  struct Row {
    std::int64_t ts;
    bool has_under, has_over;
    std::uint64_t key;
  };
  std::vector<Row> rows;
  std::string line;
  std::uint64_t record_number = 0;
  while (std::getline(report_jsonl, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("report record " +
                               std::to_string(record_number + 1) +
                               ": invalid JSON: " + e.what());
    }
    Row row;
    row.ts = j.contains("ts") ? j["ts"].get<std::int64_t>()
                              : static_cast<std::int64_t>(record_number);
    row.has_under = j.value("has_under", false);
    row.has_over = j.value("has_over", false);
    row.key = j.contains("key") ? j["key"].get<std::uint64_t>()
                                : record_number;
    rows.push_back(row);
    ++record_number;
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.ts < b.ts; });

  StatsAccumulator acc(window_seconds);
  for (const auto& row : rows) {
    acc.record(row.ts, row.has_under, row.has_over, row.key);
  }
  return acc.series();
}

std::string monitor_csv(const MonitorSeries& series) {
  std::ostringstream out;
  out << "window_start,tasks_checked,under_count,over_count,unique_flagged,"
         "violation_pct\n";
  char buf[160];
  auto row = [&](const WindowStats& w, bool totals) {
    double pct = w.tasks_checked == 0
                     ? 0.0
                     : 100.0 * static_cast<double>(w.flagged) /
                           static_cast<double>(w.tasks_checked);
    if (totals) {
      out << "total";
    } else {
      out << w.window_start;
    }
    std::snprintf(buf, sizeof(buf), ",%llu,%llu,%llu,%llu,%.2f\n",
                  static_cast<unsigned long long>(w.tasks_checked),
                  static_cast<unsigned long long>(w.under_count),
                  static_cast<unsigned long long>(w.over_count),
                  static_cast<unsigned long long>(w.unique_flagged), pct);
    out << buf;
  };
  for (const auto& w : series.windows) row(w, false);
  if (!series.windows.empty()) row(series.totals, true);
  return out.str();
}

class RunningServer {
 public:
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

void RunningServerDeleter::operator()(RunningServer* server) const {
  if (server == nullptr) return;
  stop_server(*server);
  delete server;
}

ServerHandle start_server(CheckService& service, const std::string& host,
                          int port) {
  auto running = ServerHandle(new RunningServer());
  auto& svr = running->server;

  svr.Post("/check", [&service](const httplib::Request& req,
                                httplib::Response& res) {
    auto response = service.handle_check_json(req.body);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  });
  svr.Get("/stats", [&service](const httplib::Request&, httplib::Response& res) {
    res.set_content(service.stats_json(), "application/json");
  });
  svr.Get("/healthz", [&service](const httplib::Request&, httplib::Response& res) {
    json j;
    j["status"] = "ok";
    j["directions"] = service.directions();
    res.set_content(j.dump(), "application/json");
  });

  if (port == 0) {
    running->port = svr.bind_to_any_port(host);
    if (running->port < 0) {
      throw std::runtime_error("cannot bind to " + host);
    }
  } else {
    if (!svr.bind_to_port(host, port)) {
      throw std::runtime_error("cannot bind to " + host + ":" +
                               std::to_string(port));
    }
    running->port = port;
  }
  RunningServer* raw = running.get();
  running->thread = std::thread([raw]() { raw->server.listen_after_bind(); });
  svr.wait_until_ready();
  return running;
}

int server_port(const RunningServer& server) { return server.port; }

void wait_server(RunningServer& server) {
  if (server.thread.joinable()) server.thread.join();
}

void stop_server(RunningServer& server) {
  server.server.stop();
  if (server.thread.joinable()) server.thread.join();
}

}  // namespace transcheck::service
