#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "vmrank/model.hpp"
#include "vmrank/scoring.hpp"

namespace httplib {
class Server;
}

namespace vmrank::service {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  ScoringOptions scoring{};
  /// Value of Access-Control-Allow-Origin.
  std::string cors_origin = "*";
  /// Directory with the built UI bundle, served at "/". Empty = none.
  std::string ui_dir;
  /// Worker threads used for a cold sweep; 0 = hardware concurrency.
  unsigned sweep_threads = 0;
};

/// Read-only JSON facade over one immutable dataset snapshot.
///
///   GET  /api/vms
///   POST /api/rank       {"weights":[w1,w2,w3,w4], "mode":"sequential"}
///   GET  /api/sweep?k=3&mode=sequential
///   POST /api/validate   {"weights":[...], "mode":"...", "timings":[{"vm":..,"seconds":..}],
///                         "method":"pearson", "threshold":3, "top_k":3}
///
/// Errors come back as {"error":{"stage":..,"code":..,"message":..}} with
/// 400 for malformed requests and 422 when the dataset cannot answer.
class ApiService {
 public:
  explicit ApiService(MeasurementSet dataset, ServiceOptions options = {});

  /// Replaces the snapshot. Requests already running keep the old one.
  void reload(MeasurementSet dataset);

  Response get_vms() const;
  Response post_rank(std::string_view body) const;
  Response get_sweep(const std::optional<std::string>& k, const std::optional<std::string>& mode) const;
  Response post_validate(std::string_view body) const;

  /// Registers routes, CORS handling, JSON 404s and the static UI mount.
  void mount(httplib::Server& server) const;

  const ServiceOptions& options() const noexcept { return options_; }

 private:
  struct Snapshot;
  std::shared_ptr<const Snapshot> snapshot() const;

  ServiceOptions options_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace vmrank::service
