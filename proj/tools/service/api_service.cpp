#include "service/api_service.hpp"

#include <charconv>
#include <filesystem>

#include <httplib.h>

#include "vmrank/error.hpp"
#include "vmrank/json.hpp"
#include "vmrank/sweep.hpp"
#include "vmrank/validation.hpp"

namespace vmrank::service {

using nlohmann::json;

struct ApiService::Snapshot {
  MeasurementSet dataset;
  mutable std::mutex cache_mutex;
  mutable std::map<std::pair<int, ExecutionMode>, std::string> sweep_cache;
};

namespace {

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response error_response(int status, std::string_view stage, std::string_view code, const std::string& message) {
  return json_response(status, json{{"error", {{"stage", stage}, {"code", code}, {"message", message}}}});
}

/// 400 for problems with the request itself, 422 for datasets that cannot
/// answer a well-formed request.
int status_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidWeights:
    case ErrorCode::InvalidArgument:
    case ErrorCode::MalformedRow:
    case ErrorCode::NonPositiveSeconds:
      return 400;
    default:
      return e.stage() == Stage::Usage ? 400 : 422;
  }
}

Response from_error(const Error& e) {
  return error_response(status_for(e), to_string(e.stage()), to_string(e.code()), e.detail());
}

json parse_body(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Stage::Usage, ErrorCode::InvalidArgument, "request body must be a JSON object");
  }
  return j;
}

WeightVector weights_field(const json& j) {
  if (!j.contains("weights")) throw Error(Stage::Usage, ErrorCode::InvalidWeights, "field 'weights' is required");
  return weights_from_json(j.at("weights"));
}

ExecutionMode mode_field(const json& j) {
  if (!j.contains("mode")) return ExecutionMode::Sequential;
  if (!j.at("mode").is_string()) throw Error(Stage::Usage, ErrorCode::InvalidArgument, "field 'mode' must be a string");
  return parse_mode(j.at("mode").get<std::string>());
}

int int_field(const json& j, const char* name, int fallback) {
  if (!j.contains(name)) return fallback;
  if (!j.at(name).is_number_integer()) {
    throw Error(Stage::Usage, ErrorCode::InvalidArgument, std::string("field '") + name + "' must be an integer");
  }
  return j.at(name).get<int>();
}

template <typename Fn>
Response guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return error_response(400, "usage", "InvalidArgument", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", "Internal", e.what());
  }
}

}  // namespace

ApiService::ApiService(MeasurementSet dataset, ServiceOptions options) : options_(std::move(options)) {
  reload(std::move(dataset));
}

void ApiService::reload(MeasurementSet dataset) {
  auto snap = std::make_shared<Snapshot>();
  snap->dataset = std::move(dataset);
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const ApiService::Snapshot> ApiService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

Response ApiService::get_vms() const {
  const auto snap = snapshot();
  return json_response(200, json(snap->dataset.vms()));
}

Response ApiService::post_rank(std::string_view body) const {
  const auto snap = snapshot();
  return guarded([&] {
    const json req = parse_body(body);
    const WeightVector w = weights_field(req);
    const ExecutionMode mode = mode_field(req);
    const Ranker ranker(snap->dataset, mode, options_.scoring);
    const RankTable table = ranker.rank(w);
    json out = explained_ranking_json(table, ranker.groups(), w);
    out["mode"] = std::string(to_string(mode));
    return json_response(200, out);
  });
}

Response ApiService::get_sweep(const std::optional<std::string>& k_text,
                               const std::optional<std::string>& mode_text) const {
  const auto snap = snapshot();
  return guarded([&] {
    int k = 3;
    if (k_text) {
      auto [ptr, ec] = std::from_chars(k_text->data(), k_text->data() + k_text->size(), k);
      if (ec != std::errc{} || ptr != k_text->data() + k_text->size()) {
        throw Error(Stage::Usage, ErrorCode::InvalidArgument, "query parameter 'k' must be an integer");
      }
    }
    if (k < 1) throw Error(Stage::Usage, ErrorCode::InvalidArgument, "query parameter 'k' must be >= 1");
    const ExecutionMode mode = mode_text ? parse_mode(*mode_text) : ExecutionMode::Sequential;

    const auto key = std::make_pair(k, mode);
    {
      std::lock_guard lock(snap->cache_mutex);
      if (auto it = snap->sweep_cache.find(key); it != snap->sweep_cache.end()) {
        return Response{200, it->second, "application/json"};
      }
    }
    // Computed outside the lock; the sweep is deterministic, so a racing
    // request for the same key produces an identical body and try_emplace
    // keeps whichever landed first.
    SweepOptions opts;
    opts.scoring = options_.scoring;
    opts.threads = options_.sweep_threads;
    const std::string computed = json(top_k_frequency(snap->dataset, k, mode, opts)).dump();
    std::lock_guard lock(snap->cache_mutex);
    const auto& cached = snap->sweep_cache.try_emplace(key, computed).first->second;
    return Response{200, cached, "application/json"};
  });
}

Response ApiService::post_validate(std::string_view body) const {
  const auto snap = snapshot();
  return guarded([&] {
    const json req = parse_body(body);
    const WeightVector w = weights_field(req);
    const ExecutionMode mode = mode_field(req);
    if (!req.contains("timings") || !req.at("timings").is_array()) {
      throw Error(Stage::Usage, ErrorCode::InvalidArgument, "field 'timings' must be an array");
    }
    TimingSet timings;
    for (const auto& t : req.at("timings")) {
      if (!t.is_object() || !t.contains("vm") || !t.contains("seconds") || !t.at("seconds").is_number()) {
        throw Error(Stage::Usage, ErrorCode::InvalidArgument,
                    "each timing needs string 'vm' and numeric 'seconds'");
      }
      TimingRecord r;
      r.vm_id = t.at("vm").get<std::string>();
      r.mode = t.contains("mode") ? parse_mode(t.at("mode").get<std::string>()) : mode;
      r.seconds = t.at("seconds").get<double>();
      timings.records.push_back(std::move(r));
    }
    timings.validate(snap->dataset.vms());

    CompareOptions copt;
    if (req.contains("method")) copt.method = parse_method(req.at("method").get<std::string>());
    copt.top_k = int_field(req, "top_k", 3);
    const int threshold = int_field(req, "threshold", 3);

    const Ranker ranker(snap->dataset, mode, options_.scoring);
    const RankTable bench = ranker.rank(w);
    const RankTable empirical = rank_empirical(timings, mode, options_.scoring.tie_tolerance);
    const ComparisonReport report = compare(bench, empirical, copt);
    json out = report;
    out["divergence"] = divergence_report(bench, empirical, threshold, &ranker.groups());
    return json_response(200, out);
  });
}

void ApiService::mount(httplib::Server& server) const {
  const std::string origin = options_.cors_origin;
  server.set_default_headers({{"Access-Control-Allow-Origin", origin}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/api/vms", [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_vms()); });
  server.Post("/api/rank", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_rank(req.body));
  });
  server.Get("/api/sweep", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> k, mode;
    if (req.has_param("k")) k = req.get_param_value("k");
    if (req.has_param("mode")) mode = req.get_param_value("mode");
    send(res, get_sweep(k, mode));
  });
  server.Post("/api/validate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_validate(req.body));
  });

  if (!options_.ui_dir.empty() && std::filesystem::is_directory(options_.ui_dir)) {
    server.set_mount_point("/", options_.ui_dir);
  }
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const json body{{"error", {{"stage", "usage"}, {"code", "NotFound"}, {"message", "no route for " + req.path}}}};
    res.set_content(body.dump(), "application/json");
  });
}

}  // namespace vmrank::service
