#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "grieferlens/detect.hpp"
#include "grieferlens/spatial.hpp"
#include "grieferlens/telemetry.hpp"

namespace grieferlens {

enum class AnnotationKind { label, note };
inline constexpr detail::NameTable<AnnotationKind, 2> kAnnotationKindNames{
    {{AnnotationKind::label, "label"}, {AnnotationKind::note, "note"}}};
constexpr std::string_view to_string(AnnotationKind k) { return detail::name_of(kAnnotationKindNames, k); }

struct AnnotationRecord {
  std::string annotation_id;
  std::string match_id;
  std::string author;
  std::string created_at;  // ISO-8601 UTC, millisecond precision
  std::string target_player;
  AnnotationKind kind = AnnotationKind::label;
  std::vector<GrieferType> griefer_types;  // kept sorted and unique
  std::optional<Interval> time_range;
  std::vector<std::string> tags;
  std::string text;
};

struct Response {
  int status = 200;
  std::string body;
};

using Query = std::map<std::string, std::string>;

/// Maps a library error to its HTTP status.
int http_status(ErrorCode code);
std::string error_body(const Error& e);

/// Match store and endpoint handlers. Handlers are plain functions of their
/// inputs so they can be exercised without a socket; HttpServer binds them.
///
/// Layout under the data directory:
///   matches/<match_id>/telemetry.json      canonical telemetry document
///   matches/<match_id>/summary.<hash>.json detector output for config <hash>
///   matches/<match_id>/annotations.ndjson  append-only create/delete log
class Service {
 public:
  Service(std::filesystem::path data_dir, DetectorConfig config = {}, ZoneLayout layout = default_layout());
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const std::string& config_hash() const { return config_hash_; }
  std::vector<std::string> match_ids() const;

  Response post_match(std::string_view body);
  Response list_matches() const;
  Response get_summary(const std::string& match_id) const;
  Response get_timeline(const std::string& match_id, const Query& query) const;
  Response get_heatmap(const std::string& match_id, const Query& query) const;
  Response get_trajectory(const std::string& match_id, const Query& query) const;
  Response post_annotation(const std::string& match_id, std::string_view body);
  Response list_annotations(const std::string& match_id) const;
  Response delete_annotation(const std::string& match_id, const std::string& annotation_id);
  Response export_labels(const std::string& match_id) const;

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& match_id) const;
  std::shared_ptr<Entry> require(const std::string& match_id) const;
  std::shared_ptr<Entry> load_entry(const std::filesystem::path& dir);
  std::vector<PlayerSummary> summaries_for(const MatchTelemetry& match, const std::filesystem::path& dir) const;

  std::filesystem::path root_;
  DetectorConfig config_;
  ZoneLayout layout_;
  std::string config_hash_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> matches_;
};

double heatmap_hot_threshold_s();

/// HTTP front end over a Service (JSON bodies, permissive CORS).
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace grieferlens
