#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "service/api_service.hpp"
#include "vmrank/ingest.hpp"
#include "vmrank/scoring.hpp"
#include "vmrank/validation.hpp"

using nlohmann::json;
using vmrank::service::ApiService;

namespace {

std::string data_path(const std::string& rel) { return std::string(VMRANK_DATA_DIR) + "/" + rel; }

vmrank::MeasurementSet demo() { return vmrank::load_measurements(vmrank::read_text_file(data_path("demo.measurements"))); }

json timings_json(vmrank::ExecutionMode mode) {
  json out = json::array();
  for (const auto& r : vmrank::load_timings(vmrank::read_text_file(data_path("casestudy1.timings"))).records) {
    if (r.mode == mode) out.push_back({{"vm", r.vm_id}, {"seconds", r.seconds}});
  }
  return out;
}

std::vector<std::string> order_of(const json& ranking) {
  std::vector<std::string> ids;
  for (const auto& e : ranking.at("entries")) ids.push_back(e.at("vm").get<std::string>());
  return ids;
}

}  // namespace

TEST(ApiService, Vms) {
  const ApiService api(demo());
  const auto r = api.get_vms();
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "application/json");
  const auto j = json::parse(r.body);
  ASSERT_EQ(j.size(), 12u);
  EXPECT_TRUE(j[0].contains("vcpus"));
  EXPECT_TRUE(j[0].contains("memory_gib"));
  EXPECT_EQ(ApiService(vmrank::MeasurementSet{}).get_vms().body, "[]");
}

TEST(ApiService, RankMatchesPipeline) {
  const auto set = demo();
  const ApiService api(set);
  const auto r = api.post_rank(R"({"weights":[5,3,5,0],"mode":"sequential"})");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  const auto expect = vmrank::rank_pipeline(set, vmrank::WeightVector({5, 3, 5, 0}), vmrank::ExecutionMode::Sequential);
  ASSERT_EQ(j.at("entries").size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto& e = j["entries"][i];
    EXPECT_EQ(e.at("vm"), expect.entries()[i].vm_id);
    EXPECT_EQ(e.at("rank"), expect.entries()[i].rank);
    EXPECT_EQ(e.at("rank"), static_cast<int>(i) + 1);
    double sum = 0;
    for (const auto& [g, c] : e.at("contributions").items()) sum += c.get<double>();
    EXPECT_NEAR(sum, e.at("score").get<double>(), 1e-9);
    EXPECT_EQ(e.at("contributions").at("storage"), 0.0);
  }
}

TEST(ApiService, RankErrors) {
  const ApiService api(demo());
  const auto zero = api.post_rank(R"({"weights":[0,0,0,0]})");
  EXPECT_EQ(zero.status, 400);
  EXPECT_EQ(json::parse(zero.body)["error"]["code"], "InvalidWeights");
  EXPECT_EQ(api.post_rank(R"({"weights":[1,2,3]})").status, 400);
  EXPECT_EQ(api.post_rank("not json").status, 400);
  EXPECT_EQ(api.post_rank(R"({"weights":[1,1,1,1],"mode":"diagonal"})").status, 400);

  vmrank::MeasurementSet partial;
  partial.add_vm({"a", 1, 1, "x", 1});
  partial.add_vm({"b", 1, 1, "x", 1});
  partial.add_attribute({"m", "m", vmrank::AttributeGroup::MemoryProcess, vmrank::Polarity::HigherBetter, "u"});
  partial.add_observation("a", "m", 1);
  partial.add_observation("b", "m", 2);
  const auto missing = ApiService(partial).post_rank(R"({"weights":[1,0,0,1]})");
  EXPECT_EQ(missing.status, 422);
  EXPECT_EQ(json::parse(missing.body)["error"]["stage"], "score");
}

TEST(ApiService, ScalingWeightsKeepsOrder) {
  const ApiService api(demo());
  const auto a = json::parse(api.post_rank(R"({"weights":[1,1,1,1]})").body);
  const auto b = json::parse(api.post_rank(R"({"weights":[5,5,5,5]})").body);
  EXPECT_EQ(order_of(a), order_of(b));
}

TEST(ApiService, SweepIsCachedAndDeterministic) {
  const ApiService api(demo());
  const auto first = api.get_sweep(std::string("3"), std::string("sequential"));
  ASSERT_EQ(first.status, 200) << first.body;
  EXPECT_EQ(json::parse(first.body).at("total_vectors"), 1295);
  EXPECT_EQ(api.get_sweep(std::string("3"), std::nullopt).body, first.body);
  EXPECT_EQ(ApiService(demo()).get_sweep(std::string("3"), std::nullopt).body, first.body);
  EXPECT_EQ(api.get_sweep(std::string("0"), std::nullopt).status, 400);
  EXPECT_EQ(api.get_sweep(std::string("three"), std::nullopt).status, 400);
  EXPECT_EQ(json::parse(api.get_sweep(std::nullopt, std::string("parallel")).body).at("k"), 3);
}

TEST(ApiService, ConcurrentSweepsAgree) {
  const ApiService api(demo());
  std::vector<std::string> bodies(4);
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    workers.emplace_back([&, i] { bodies[i] = api.get_sweep(std::string("2"), std::string("parallel")).body; });
  }
  for (auto& t : workers) t.join();
  for (const auto& b : bodies) EXPECT_EQ(b, bodies[0]);
}

TEST(ApiService, Validate) {
  const ApiService api(demo());
  const json req{{"weights", {5, 3, 5, 0}}, {"mode", "sequential"}, {"timings", timings_json(vmrank::ExecutionMode::Sequential)}};
  const auto r = api.post_validate(req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_NEAR(j.at("coefficient").get<double>(), 0.925, 0.005);
  EXPECT_EQ(j.at("per_vm_delta").size(), 12u);
  EXPECT_TRUE(j.contains("divergence"));
  EXPECT_EQ(api.post_validate(req.dump()).body, r.body);
}

TEST(ApiService, ValidateIdenticalRankingIsOne) {
  const auto set = demo();
  const ApiService api(set);
  const auto bench = vmrank::rank_pipeline(set, vmrank::WeightVector({5, 3, 5, 0}), vmrank::ExecutionMode::Parallel);
  json timings = json::array();
  for (const auto& e : bench.entries()) timings.push_back({{"vm", e.vm_id}, {"seconds", 10.0 * e.rank}});
  const json req{{"weights", {5, 3, 5, 0}}, {"mode", "parallel"}, {"timings", timings}};
  const auto r = api.post_validate(req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(json::parse(r.body).at("coefficient"), 1.0);
}

TEST(ApiService, ValidateErrors) {
  const ApiService api(demo());
  const json two{{"weights", {5, 3, 5, 0}},
                 {"timings", {{{"vm", "m1.xlarge"}, {"seconds", 565}}, {{"vm", "cr1.8xlarge"}, {"seconds", 295}}}}};
  const auto r = api.post_validate(two.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(json::parse(r.body)["error"]["code"], "TooFewShared");

  const json ghost{{"weights", {5, 3, 5, 0}}, {"timings", {{{"vm", "t2.micro"}, {"seconds", 1}}}}};
  EXPECT_EQ(api.post_validate(ghost.dump()).status, 422);
  const json negative{{"weights", {5, 3, 5, 0}}, {"timings", {{{"vm", "m1.xlarge"}, {"seconds", -1}}}}};
  EXPECT_EQ(api.post_validate(negative.dump()).status, 400);
  EXPECT_EQ(api.post_validate(R"({"weights":[5,3,5,0]})").status, 400);
}

TEST(ApiService, ReloadSwapsSnapshot) {
  ApiService api(demo());
  const auto before = api.get_sweep(std::string("1"), std::nullopt).body;
  vmrank::MeasurementSet small;
  for (const char* id : {"x", "y"}) small.add_vm({id, 2, 4, "cpu", 2});
  int a = 0;
  for (auto g : vmrank::kAllGroups) {
    const std::string id = "a" + std::to_string(a++);
    small.add_attribute({id, id, g, vmrank::Polarity::HigherBetter, "u"});
    small.add_observation("x", id, 2);
    small.add_observation("y", id, 1);
  }
  api.reload(small);
  EXPECT_EQ(json::parse(api.get_vms().body).size(), 2u);
  const auto after = json::parse(api.get_sweep(std::string("1"), std::nullopt).body);
  EXPECT_NE(after.dump(), before);
  EXPECT_EQ(after.at("vms").size(), 2u);
}

TEST(ApiServiceHttp, RoutesOverRealSockets) {
  namespace fs = std::filesystem;
  const auto ui = fs::temp_directory_path() / ("vmrank_ui_" + std::to_string(::getpid()));
  fs::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>explorer</html>";

  vmrank::service::ServiceOptions opts;
  opts.ui_dir = ui.string();
  opts.cors_origin = "http://localhost:5173";
  const ApiService api(demo(), opts);
  httplib::Server server;
  api.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto vms = client.Get("/api/vms");
  ASSERT_TRUE(vms);
  EXPECT_EQ(vms->status, 200);
  EXPECT_EQ(json::parse(vms->body).size(), 12u);
  EXPECT_EQ(vms->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");

  auto rank = client.Post("/api/rank", R"({"weights":[5,3,5,0]})", "application/json");
  ASSERT_TRUE(rank);
  EXPECT_EQ(rank->status, 200);
  EXPECT_EQ(rank->body, api.post_rank(R"({"weights":[5,3,5,0]})").body);

  auto bad = client.Post("/api/rank", R"({"weights":[0,0,0,0]})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto sweep = client.Get("/api/sweep?k=3&mode=parallel");
  ASSERT_TRUE(sweep);
  EXPECT_EQ(json::parse(sweep->body).at("total_vectors"), 1295);
  auto sweep0 = client.Get("/api/sweep?k=0");
  ASSERT_TRUE(sweep0);
  EXPECT_EQ(sweep0->status, 400);

  const json req{{"weights", {5, 3, 5, 0}}, {"timings", timings_json(vmrank::ExecutionMode::Sequential)}};
  auto validate = client.Post("/api/validate", req.dump(), "application/json");
  ASSERT_TRUE(validate);
  EXPECT_EQ(validate->status, 200);

  auto missing = client.Get("/api/nothing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["error"]["code"], "NotFound");

  auto preflight = client.Options("/api/rank");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

  auto index = client.Get("/index.html");
  ASSERT_TRUE(index);
  EXPECT_EQ(index->status, 200);
  EXPECT_NE(index->body.find("explorer"), std::string::npos);

  server.stop();
  listener.join();
  fs::remove_all(ui);
}
