#pragma once

#include "fate421/advice.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace fate421 {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Session endpoints over a SessionStore:
///   POST   /sessions                  {config, policy, utility} -> {id, state, advice}
///   POST   /sessions/{id}/events      {event}                   -> {state, advice}
///   POST   /sessions/{id}/decisions   {keep}                    -> {state, advice}
///   GET    /sessions/{id}                                       -> session
///   DELETE /sessions/{id}                                       -> {deleted}
/// Rule violations answer 422 with the rule named, unknown sessions 404,
/// malformed requests 400.
class HttpApi {
 public:
  explicit HttpApi(std::shared_ptr<SessionStore> store) : store_(std::move(store)) {}

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);
  /// Routes every request of `server` through handle().
  void mount(httplib::Server& server);

 private:
  ApiResponse dispatch(std::string_view method, std::string_view path, std::string_view body);

  std::shared_ptr<SessionStore> store_;
};

/// Blocks serving the API on host:port.
void serve(std::shared_ptr<SessionStore> store, const std::string& host, int port);

}  // namespace fate421
