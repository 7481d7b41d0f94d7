#include "auirl/serve.hpp"

#include <httplib.h>

#include "auirl/config.hpp"
#include "auirl/error.hpp"

namespace auirl {

using nlohmann::json;

namespace {

HttpReply error_reply(int status, const std::string &message, const std::string &path = {}) {
  json body = {{"error", message}};
  if (!path.empty()) body["path"] = path;
  return {status, std::move(body)};
}

// Shape checks only; label resolution happens afterwards and maps to 400.
const char *shape_problem(const json &labels) {
  if (!labels.is_object()) return "expected an object of variable -> value label";
  for (const auto &[name, label] : labels.items()) {
    if (!label.is_string()) return "value labels must be strings";
  }
  return nullptr;
}

}  // namespace

json ActionResponse::to_json() const {
  return {{"action_index", action_index}, {"action", action}, {"kind", kind}, {"q_value", q_value}};
}

PolicyService::PolicyService(DomainSpec domain, QTable table)
    : domain_(std::move(domain)), table_(std::move(table)) {
  table_.check_domain(domain_);
}

ActionResponse PolicyService::decide(const StateVector &state) const {
  const auto s = encode_state(state, domain_);
  const auto greedy = table_.greedy_action(s);
  auto a = greedy;
  // Setting a variable to the value it already has changes nothing for the
  // client, so it is reported as the no-op.
  if (apply_action(state.ui, domain_.actions()[a]) == state.ui) a = domain_.action_count() - 1;
  const auto &spec = domain_.actions()[a];
  ActionResponse out;
  out.action_index = a;
  out.action = action_name(domain_, spec);
  if (spec.is_noop()) {
    out.kind = {{"type", "no_op"}};
  } else {
    const auto &var = domain_.variables()[spec.variable];
    out.kind = {{"type", "set_variable"},
                {"variable", var.name},
                {"value", var.values[static_cast<std::size_t>(spec.value)]}};
  }
  out.q_value = table_(s, greedy);
  return out;
}

HttpReply PolicyService::decide(std::string_view request_body) const {
  json request = json::parse(request_body, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded()) return error_reply(422, "request body is not valid JSON");
  if (!request.is_object()) return error_reply(422, "request body must be a JSON object");
  for (const char *block : {"ui", "prefs"}) {
    if (!request.contains(block)) return error_reply(422, "missing field", block);
    if (const char *problem = shape_problem(request[block])) return error_reply(422, problem, block);
  }
  if (request.contains("domain_hash")) {
    const auto &declared = request["domain_hash"];
    if (!declared.is_string()) return error_reply(422, "expected a hex string", "domain_hash");
    if (declared.get<std::string>() != domain_.hash_hex()) {
      return error_reply(409, "domain hash mismatch: service runs " + domain_.hash_hex(),
                         "domain_hash");
    }
  }
  try {
    StateVector state{UiConfig{indices_from_labels(request["ui"], domain_, "ui")},
                      UserPrefs{indices_from_labels(request["prefs"], domain_, "prefs")}};
    return {200, decide(state).to_json()};
  } catch (const Error &e) {
    return error_reply(400, e.what(), e.path());
  }
}

HttpReply PolicyService::metadata() const {
  const auto &meta = table_.metadata();
  json actions = json::array();
  for (const auto &a : domain_.actions()) actions.push_back(action_name(domain_, a));
  return {200,
          {{"domain", domain_.name()},
           {"domain_hash", domain_.hash_hex()},
           {"variables", domain_.to_json()["variables"]},
           {"actions", actions},
           {"state_count", domain_.state_count()},
           {"action_count", domain_.action_count()},
           {"sigma", meta.reward.sigma},
           {"bonus_rule", to_string(meta.reward.bonus_rule)},
           {"episodes_trained", meta.episodes_trained},
           {"seed", meta.seed}}};
}

HttpReply PolicyService::health() const {
  return {200, {{"status", "ok"}, {"domain_hash", domain_.hash_hex()}}};
}

std::unique_ptr<httplib::Server> make_server(const PolicyService &service) {
  auto server = std::make_unique<httplib::Server>();
  auto send = [](httplib::Response &res, const HttpReply &reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json; charset=utf-8");
  };
  server->Post("/v1/action", [&service, send](const httplib::Request &req, httplib::Response &res) {
    send(res, service.decide(req.body));
  });
  server->Get("/v1/metadata", [&service, send](const httplib::Request &, httplib::Response &res) {
    send(res, service.metadata());
  });
  server->Get("/v1/health", [&service, send](const httplib::Request &, httplib::Response &res) {
    send(res, service.health());
  });
  return server;
}

}  // namespace auirl
