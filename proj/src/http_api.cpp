#include "fate421/http_api.hpp"

#include "fate421/errors.hpp"

#include <httplib.h>

#include <vector>

namespace fate421 {

namespace {

std::vector<std::string_view> segments(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    auto slash = path.find('/');
    out.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash);
  }
  return out;
}

ApiResponse error(int status, const std::string& message, const std::string& rule = {}) {
  nlohmann::json body = {{"error", message}};
  if (!rule.empty()) body["rule"] = rule;
  return {status, body};
}

nlohmann::json parse_body(std::string_view body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON body: ") + e.what());
  }
}

std::string string_field(const nlohmann::json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string())
    throw FormatError(std::string("body needs a string field '") + key + "'");
  return body.at(key).get<std::string>();
}

}  // namespace

ApiResponse HttpApi::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return dispatch(method, path, body);
  } catch (const RuleViolation& e) {
    return error(422, e.what(), e.rule());
  } catch (const NotFound& e) {
    return error(404, e.what());
  } catch (const Error& e) {
    return error(400, e.what());
  }
}

ApiResponse HttpApi::dispatch(std::string_view method, std::string_view path, std::string_view body) {
  const auto parts = segments(path);
  if (parts.empty() || parts[0] != "sessions") return error(404, "no route " + std::string(path));

  if (parts.size() == 1) {
    if (method != "POST") return error(405, "use POST /sessions");
    auto session = store_->create(parse_body(body));
    store_->persist();
    return {201, {{"id", session->id()}, {"state", session->state_json()}, {"advice", session->advice()}}};
  }

  const std::string id(parts[1]);
  if (parts.size() == 2) {
    if (method == "GET") return {200, store_->find(id)->to_json()};
    if (method == "DELETE") {
      if (!store_->erase(id)) throw NotFound("no session '" + id + "'");
      store_->persist();
      return {200, {{"deleted", id}}};
    }
    return error(405, "use GET or DELETE on a session");
  }

  if (parts.size() == 3 && method == "POST") {
    auto session = store_->find(id);
    const auto request = parse_body(body);
    nlohmann::json out;
    if (parts[2] == "events") {
      out = session->cast(string_field(request, "event"));
    } else if (parts[2] == "decisions") {
      out = session->keep(string_field(request, "keep"));
    } else {
      return error(404, "no route " + std::string(path));
    }
    store_->persist();
    return {200, out};
  }
  return error(404, "no route " + std::string(path));
}

void HttpApi::mount(httplib::Server& server) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string pattern = R"(/sessions(/.*)?)";
  server.Post(pattern, route);
  server.Get(pattern, route);
  server.Delete(pattern, route);
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(pattern, [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

void serve(std::shared_ptr<SessionStore> store, const std::string& host, int port) {
  httplib::Server server;
  HttpApi api(std::move(store));
  api.mount(server);
  if (!server.listen(host, port)) throw InvalidConfig("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace fate421
