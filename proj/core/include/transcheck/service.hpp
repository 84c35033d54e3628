#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "transcheck/detect.hpp"
#include "transcheck/lexicon.hpp"

namespace transcheck::service {

struct WindowStats {
  std::int64_t window_start = 0;  // unix seconds, window-aligned
  std::uint64_t tasks_checked = 0;
  std::uint64_t under_count = 0;
  std::uint64_t over_count = 0;
  std::uint64_t flagged = 0;         // tasks with any violation
  std::uint64_t unique_flagged = 0;  // distinct flagged (source, translation)

  bool operator==(const WindowStats&) const = default;
};

struct MonitorSeries {
  std::int64_t window_seconds = 300;
  std::vector<WindowStats> windows;  // chronological, non-overlapping
  WindowStats totals;

  bool operator==(const MonitorSeries&) const = default;
};

// Dedup key for "unique translation" counting (FNV-1a over both texts).
std::uint64_t task_key(std::string_view source, std::string_view translation);

// Thread-safe rolling statistics. Readers get a consistent snapshot.
class StatsAccumulator {
 public:
  explicit StatsAccumulator(std::int64_t window_seconds = 300);

  void record(std::int64_t ts, bool has_under, bool has_over,
              std::uint64_t dedup_key);
  MonitorSeries series() const;
  std::int64_t window_seconds() const { return window_seconds_; }

 private:
  struct Bucket {
    std::uint64_t tasks = 0, under = 0, over = 0, flagged = 0;
    std::unordered_set<std::uint64_t> unique_flagged;
  };
  std::int64_t window_seconds_;
  mutable std::mutex mu_;
  std::map<std::int64_t, Bucket> buckets_;
};

struct CheckRequest {
  std::string direction;  // "<source_lang>-<target_lang>"
  std::string source;
  std::string translation;
  // Window-binning override; defaults to the server clock. Carrying
  // explicit timestamps makes request-log replay reproducible.
  std::optional<std::int64_t> ts;
};

// The serving logic, independent of the socket layer: immutable lexicons,
// atomic stats, one check per request.
class CheckService {
 public:
  CheckService(std::vector<lexicon::Lexicon> lexicons,
               detect::CheckConfig base_config,
               std::map<std::string, corpus::StopWordSet> stopwords_by_lang,
               std::int64_t window_seconds = 300);

  // Throws std::invalid_argument on an unknown direction.
  detect::ViolationReport check(const CheckRequest& request);

  // JSON in, JSON out; status 200, 400 (bad request / unknown direction).
  struct Response {
    int status = 200;
    std::string body;
  };
  Response handle_check_json(const std::string& body);

  MonitorSeries stats() const { return stats_.series(); }
  std::string stats_json() const;

  std::vector<std::string> directions() const;

 private:
  std::map<std::string, lexicon::Lexicon> lexicons_;          // by direction
  std::map<std::string, detect::CheckConfig> configs_;        // by direction
  StatsAccumulator stats_;
};

std::string monitor_series_json(const MonitorSeries& series);

// Offline aggregation of `check` output (JSONL with has_under/has_over and
// optional ts/key fields). Records without a timestamp get their sequence
// position as synthetic seconds; records are sorted before binning.
MonitorSeries monitor_report(std::istream& report_jsonl,
                             std::int64_t window_seconds);

// CSV with one row per window plus percentage columns.
std::string monitor_csv(const MonitorSeries& series);

// HTTP server over the local socket: POST /check, GET /stats, GET /healthz.
// start_server binds and serves on a background thread; port 0 picks a free
// port. Destroying the handle stops the server.
class RunningServer;
struct RunningServerDeleter {
  void operator()(RunningServer*) const;
};
using ServerHandle = std::unique_ptr<RunningServer, RunningServerDeleter>;

ServerHandle start_server(CheckService& service, const std::string& host,
                          int port);
int server_port(const RunningServer& server);
void wait_server(RunningServer& server);  // blocks until stopped
void stop_server(RunningServer& server);

}  // namespace transcheck::service
