#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "auirl/agent.hpp"
#include "auirl/domain.hpp"

namespace httplib {
class Server;
}

namespace auirl {

struct ActionResponse {
  ActionIndex action_index = 0;
  std::string action;  // e.g. "theme=dark" or "no_op"
  nlohmann::json kind;
  double q_value = 0.0;  // greedy value of the state

  nlohmann::json to_json() const;
};

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

/**
 * Read-only decision service over a frozen Q-table. Every method is const and
 * the table is never written, so one instance can serve concurrent requests.
 */
class PolicyService {
public:
  /** Throws DomainMismatch if the table was not trained on `domain`. */
  PolicyService(DomainSpec domain, QTable table);

  const DomainSpec &domain() const { return domain_; }
  const QTable &table() const { return table_; }

  ActionResponse decide(const StateVector &state) const;

  /** POST /v1/action body -> reply (200, 400, 409 or 422). */
  HttpReply decide(std::string_view request_body) const;
  HttpReply metadata() const;
  HttpReply health() const;

private:
  DomainSpec domain_;
  QTable table_;
};

/** Routes /v1/action, /v1/metadata and /v1/health to `service`, which must
 *  outlive the server. */
std::unique_ptr<httplib::Server> make_server(const PolicyService &service);

}  // namespace auirl
