#include <doctest.h>

#include <thread>

#include "auirl/config.hpp"
#include "auirl/error.hpp"
#include "auirl/harness.hpp"
#include "auirl/serve.hpp"

#include <httplib.h>

using namespace auirl;
using nlohmann::json;

namespace {

const QTable &trained_table() {
  static const QTable table = [] {
    auto e = load_experiment_file(AUIRL_SOURCE_DIR "/configs/small.json");
    e.env.reward.sigma = 1.0;
    return train(e).qtable;
  }();
  return table;
}

PolicyService small_service() {
  return PolicyService(load_domain(trained_table().metadata().domain), trained_table());
}

}  // namespace

TEST_CASE("decision for a matching state is to keep the ui") {
  const auto service = small_service();
  const auto reply =
      service.decide(R"({"ui": {"theme": "dark", "font_size": "big"},
                         "prefs": {"theme": "dark", "font_size": "big"}})");
  CHECK(reply.status == 200);
  CHECK(reply.body["action"] == "no_op");
  CHECK(reply.body["kind"]["type"] == "no_op");
  CHECK(reply.body["action_index"] == 5);
}

TEST_CASE("decisions are executable and stateless") {
  const auto service = small_service();
  const std::string body = R"({"ui": {"theme": "light", "font_size": "small"},
                               "prefs": {"theme": "dark", "font_size": "big"}})";
  const auto a = service.decide(body);
  const auto b = service.decide(body);
  CHECK(a.status == 200);
  CHECK(a.body == b.body);
  CHECK(a.body["kind"]["type"] == "set_variable");
  const auto index = a.body["action_index"].get<std::size_t>();
  CHECK(index < service.domain().action_count());
  CHECK(a.body["q_value"].get<double>() ==
        trained_table().max_value(encode_state({UiConfig{{0, 0}}, UserPrefs{{1, 2}}}, service.domain())));
  const auto next = apply_action(UiConfig{{0, 0}}, service.domain().actions()[index]);
  CHECK(next != UiConfig{{0, 0}});
}

TEST_CASE("request errors") {
  const auto service = small_service();
  auto status = [&](const std::string &body) { return service.decide(body).status; };
  const auto unknown = service.decide(R"({"ui": {"theme": "sepia", "font_size": "big"},
                                          "prefs": {"theme": "dark", "font_size": "big"}})");
  CHECK(unknown.status == 400);
  CHECK(unknown.body["path"] == "ui.theme");
  CHECK(status(R"({"ui": {"theme": "dark", "font_size": "big", "color": "red"},
                   "prefs": {"theme": "dark", "font_size": "big"}})") == 400);
  CHECK(status(R"({"ui": {"theme": "dark"}, "prefs": {"theme": "dark", "font_size": "big"}})") ==
        400);
  CHECK(status("not json") == 422);
  CHECK(status("[1, 2]") == 422);
  CHECK(status(R"({"ui": {"theme": "dark", "font_size": "big"}})") == 422);
  CHECK(status(R"({"ui": {"theme": 1, "font_size": "big"}, "prefs": {}})") == 422);
  CHECK(status(R"({"ui": {"theme": "dark", "font_size": "big"},
                   "prefs": {"theme": "dark", "font_size": "big"},
                   "domain_hash": "0000000000000000"})") == 409);
  const std::string ok = R"({"ui": {"theme": "dark", "font_size": "big"},
                             "prefs": {"theme": "dark", "font_size": "big"}, "domain_hash": ")" +
                         service.domain().hash_hex() + "\"}";
  CHECK(status(ok) == 200);
}

TEST_CASE("metadata and health") {
  const auto service = small_service();
  const auto meta = service.metadata();
  CHECK(meta.status == 200);
  CHECK(meta.body["domain_hash"] == hex64(trained_table().metadata().domain_hash));
  CHECK(meta.body["domain"] == "small");
  CHECK(meta.body["action_count"] == 6);
  CHECK(meta.body["episodes_trained"] == 20000);
  CHECK(service.metadata().body == meta.body);
  CHECK(service.health().status == 200);
}

TEST_CASE("service refuses a table from another domain") {
  CHECK_THROWS_AS(PolicyService(adaptive_ui_domain(), trained_table()), Error);
}

TEST_CASE("http endpoints") {
  const auto service = small_service();
  auto server = make_server(service);
  const int port = server->bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server->listen_after_bind(); });
  server->wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto meta = client.Get("/v1/metadata");
  REQUIRE(meta);
  CHECK(json::parse(meta->body)["domain_hash"] == service.domain().hash_hex());

  auto action = client.Post("/v1/action",
                            R"({"ui": {"theme": "dark", "font_size": "big"},
                                "prefs": {"theme": "dark", "font_size": "big"}})",
                            "application/json");
  REQUIRE(action);
  CHECK(action->status == 200);
  CHECK(json::parse(action->body)["action"] == "no_op");

  auto bad = client.Post("/v1/action", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 422);

  std::vector<std::thread> callers;
  std::vector<std::string> bodies(8);
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    callers.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/v1/action",
                      R"({"ui": {"theme": "light", "font_size": "small"},
                          "prefs": {"theme": "dark", "font_size": "default"}})",
                      "application/json");
      if (r) bodies[i] = r->body;
    });
  }
  for (auto &t : callers) t.join();
  for (const auto &b : bodies) CHECK(b == bodies[0]);

  server->stop();
  thread.join();
}
