#include "cli/cli.hpp"

#include <pthread.h>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "service/api_service.hpp"
#include "vmrank/error.hpp"
#include "vmrank/fixtures.hpp"
#include "vmrank/extraction.hpp"
#include "vmrank/ingest.hpp"
#include "vmrank/json.hpp"
#include "vmrank/render.hpp"
#include "vmrank/scoring.hpp"
#include "vmrank/sweep.hpp"
#include "vmrank/validation.hpp"

namespace vmrank::cli {

namespace {

struct CommonOptions {
  std::string measurements;
  std::string format = "table";
  std::string mode = "sequential";
  std::string aggregation = "median";
  std::string reduction = "mean";
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_mode = true) {
  cmd->add_option("-m,--measurements", o.measurements,
                  std::string("Measurement file (default: $") + kDatasetEnv + ")");
  cmd->add_option("-f,--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  if (with_mode) {
    cmd->add_option("--mode", o.mode, "sequential or parallel")
        ->check(CLI::IsMember({"sequential", "parallel"}))
        ->capture_default_str();
  }
  cmd->add_option("--aggregation", o.aggregation, "How repetitions combine")
      ->check(CLI::IsMember({"median", "mean", "min"}))
      ->capture_default_str();
  cmd->add_option("--group-reduction", o.reduction, "How attribute z-scores combine within a group")
      ->check(CLI::IsMember({"mean", "sum"}))
      ->capture_default_str();
}

ScoringOptions scoring_from(const CommonOptions& o) {
  ScoringOptions s;
  s.aggregation = parse_aggregation(o.aggregation);
  s.reduction = o.reduction == "sum" ? GroupReduction::Sum : GroupReduction::Mean;
  return s;
}

MeasurementSet load_dataset(const CommonOptions& o) {
  std::string path = o.measurements;
  if (path.empty()) {
    if (const char* env = std::getenv(kDatasetEnv)) path = env;
  }
  if (path.empty()) {
    throw Error(Stage::Usage, ErrorCode::InvalidArgument,
                std::string("no measurement file: pass --measurements or set ") + kDatasetEnv);
  }
  return load_measurements(read_text_file(path));
}

int cmd_rank(const CommonOptions& o, const std::string& weights, std::ostream& out) {
  const WeightVector w = WeightVector::parse(weights);
  const auto format = parse_format(o.format);
  const auto set = load_dataset(o);
  const auto table = rank_pipeline(set, w, parse_mode(o.mode), scoring_from(o));
  out << render(table, format);
  return kOk;
}

int cmd_sweep(const CommonOptions& o, int k, unsigned threads, const std::string& plot_csv,
              std::ostream& out) {
  if (k < 1) throw Error(Stage::Usage, ErrorCode::InvalidArgument, "--top must be >= 1");
  const auto format = parse_format(o.format);
  const auto set = load_dataset(o);
  SweepOptions opts;
  opts.scoring = scoring_from(o);
  opts.threads = threads;
  const auto result = top_k_frequency(set, k, parse_mode(o.mode), opts);
  out << render(result, format);
  if (!plot_csv.empty()) {
    std::ofstream f(plot_csv);
    if (!f) throw Error(Stage::Usage, ErrorCode::InvalidArgument, "cannot write '" + plot_csv + "'");
    f << render_sweep_plot_csv(result);
  }
  return kOk;
}

struct ValidateArgs {
  std::string timings;
  std::string weights;
  std::string method = "pearson";
  std::string fixture;
  int threshold = 3;
  int top = 3;
};

int cmd_validate(const CommonOptions& o, const ValidateArgs& v, std::ostream& out) {
  const auto format = parse_format(o.format);
  const auto mode = parse_mode(o.mode);
  CompareOptions copt;
  copt.method = parse_method(v.method);
  copt.top_k = v.top;

  RankTable bench;
  RankTable empirical;
  std::optional<Ranker> ranker;
  if (!v.fixture.empty()) {
    const auto ds = load_fixture_dataset(v.fixture);
    bench = ds.table(benchmark_kind(mode));
    empirical = ds.table(empirical_kind(mode));
  } else {
    if (v.weights.empty()) throw Error(Stage::Usage, ErrorCode::InvalidWeights, "--weights is required");
    if (v.timings.empty()) throw Error(Stage::Usage, ErrorCode::InvalidArgument, "--timings is required");
    const WeightVector w = WeightVector::parse(v.weights);
    const auto set = load_dataset(o);
    const auto timings = load_timings(read_text_file(v.timings));
    timings.validate(set.vms());
    ranker.emplace(set, mode, scoring_from(o));
    bench = ranker->rank(w);
    empirical = rank_empirical(timings, mode);
  }
  const auto report = compare(bench, empirical, copt);
  const auto divergence =
      divergence_report(bench, empirical, v.threshold, ranker ? &ranker->groups() : nullptr);

  if (format == OutputFormat::Json) {
    nlohmann::json j = report;
    j["divergence"] = divergence;
    out << j.dump(2) << '\n';
  } else {
    out << render(report, format);
    if (format == OutputFormat::Table) out << '\n' << render_divergence(divergence);
  }
  return kOk;
}

int cmd_fixture(const std::string& name, const std::string& format, std::ostream& out) {
  const auto ds = load_fixture_dataset(name);
  if (format == "json") {
    nlohmann::json j{{"name", ds.name}, {"description", ds.description}, {"vms", ds.vms}};
    if (ds.weights) j["weights"] = *ds.weights;
    j["tables"] = ds.tables;
    out << j.dump(2) << '\n';
  } else {
    out << fixture_text(name);
  }
  return kOk;
}

int cmd_extract(const CommonOptions& o, const std::string& spec_path, const std::string& input,
                const std::string& vm, std::ostream& out, std::ostream& err) {
  const auto declarations = [&] {
    std::string path = o.measurements;
    if (path.empty()) {
      if (const char* env = std::getenv(kDatasetEnv)) path = env;
    }
    if (path.empty()) {
      throw Error(Stage::Usage, ErrorCode::InvalidArgument,
                  "extract needs --measurements for VM and attribute declarations");
    }
    return load_measurements(read_text_file(path));
  }();
  const auto spec = ExtractionSpec::parse(read_text_file(spec_path));
  const auto result = apply_extraction_spec(read_text_file(input), spec, vm, declarations);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  out << to_canonical_text(result.set);
  return kOk;
}

std::atomic<bool> g_stop_requested{false};

int cmd_serve(const CommonOptions& o, const std::string& bind, const std::string& ui_dir,
              const std::string& cors, std::ostream& out) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw Error(Stage::Usage, ErrorCode::InvalidArgument, "--bind must be host:port");
  }
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(Stage::Usage, ErrorCode::InvalidArgument, "--bind port is not a number");
  }

  service::ServiceOptions sopts;
  sopts.scoring = scoring_from(o);
  sopts.ui_dir = ui_dir;
  sopts.cors_origin = cors;
  service::ApiService api(load_dataset(o), sopts);

  httplib::Server server;
  api.mount(server);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    throw Error(Stage::Usage, ErrorCode::InvalidArgument, "cannot bind to " + bind);
  }
  out << "vmrank: listening on http://" << host << ':' << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    g_stop_requested = true;
    server.stop();
  });
  server.listen_after_bind();
  if (!g_stop_requested) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  out << "vmrank: stopped" << std::endl;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank cloud VM types by weighted micro-benchmark scores", "vmrank"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string weights;
  int top = 3;
  unsigned threads = 0;
  std::string plot_csv;
  ValidateArgs vargs;
  std::string fixture_name;
  std::string fixture_format = "text";
  std::string bind = "127.0.0.1:8080";
  std::string ui_dir;
  std::string cors = "*";
  std::string spec_path, input_path, vm_id;

  auto* rank = app.add_subcommand("rank", "Rank VMs for one weight vector");
  add_common(rank, common);
  rank->add_option("-w,--weights", weights, "Four group weights 0-5, e.g. 5,3,5,0")->required();

  auto* sweep = app.add_subcommand("sweep", "Top-k frequencies over all 1295 weight vectors");
  add_common(sweep, common);
  sweep->add_option("-k,--top", top, "Rank positions counted")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--plot-csv", plot_csv, "Also write per-position frequencies to this CSV file");

  auto* validate = app.add_subcommand("validate", "Compare benchmark ranks with empirical timings");
  add_common(validate, common);
  validate->add_option("-t,--timings", vargs.timings, "Timing file (<vm>, <mode>, <seconds>)");
  validate->add_option("-w,--weights", vargs.weights, "Four group weights 0-5");
  validate->add_option("--method", vargs.method, "pearson, spearman or kendall")->capture_default_str();
  validate->add_option("--threshold", vargs.threshold, "Rank delta above which a VM is flagged")
      ->capture_default_str();
  validate->add_option("-k,--top", vargs.top, "k for the top-k overlap")->capture_default_str();
  validate->add_option("--fixture", vargs.fixture,
                       "Compare the bundled reference rank tables instead (casestudy1-ranks, casestudy2-ranks)");

  auto* serve = app.add_subcommand("serve", "Serve the JSON API (and UI bundle) over HTTP");
  add_common(serve, common, false);
  serve->add_option("--bind", bind, "host:port (port 0 picks a free port)")->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "Directory of the built UI bundle to serve at /");
  serve->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value")->capture_default_str();

  auto* fixture = app.add_subcommand("fixture", "Print a bundled reference fixture");
  fixture->add_option("name", fixture_name, "vm-specs, casestudy1-ranks or casestudy2-ranks")->required();
  fixture->add_option("-f,--format", fixture_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  auto* extract = app.add_subcommand("extract", "Turn raw benchmark tool output into measurement rows");
  add_common(extract, common, false);
  extract->add_option("--spec", spec_path, "Extraction spec file")->required();
  extract->add_option("--input", input_path, "Raw tool output")->required();
  extract->add_option("--vm", vm_id, "VM id the output belongs to")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*rank) return cmd_rank(common, weights, out);
    if (*sweep) return cmd_sweep(common, top, threads, plot_csv, out);
    if (*validate) return cmd_validate(common, vargs, out);
    if (*serve) return cmd_serve(common, bind, ui_dir, cors, out);
    if (*fixture) return cmd_fixture(fixture_name, fixture_format, out);
    if (*extract) return cmd_extract(common, spec_path, input_path, vm_id, out, err);
  } catch (const Error& e) {
    err << "vmrank: " << e.what() << '\n';
    return e.stage() == Stage::Usage ? kUsage : kDataError;
  } catch (const std::exception& e) {
    err << "vmrank: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace vmrank::cli
