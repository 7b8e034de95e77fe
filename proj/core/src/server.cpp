#include "cie/server.hpp"

#include <random>

#include <httplib.h>

#include "cie/agent/prompts.hpp"
#include "cie/engine/protocol.hpp"
#include "cie/error.hpp"

namespace cie {

using json = nlohmann::json;
using oj = nlohmann::ordered_json;

namespace {

std::string random_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(16, '0');
  auto bits = rng();
  for (auto& c : id) {
    c = kHex[bits & 0xF];
    bits >>= 4;
  }
  return id;
}

ParsedCalls calls_from_body(const json& body) {
  const json* list = &body;
  if (body.is_object()) {
    if (!body.contains("actions")) throw ProtocolError("request body needs an \"actions\" array");
    list = &body.at("actions");
  }
  if (!list->is_array()) throw ProtocolError("actions must be an array");
  ParsedCalls out;
  for (const auto& item : *list) {
    std::string name;
    try {
      if (!item.is_object() || !item.contains("name") || !item.at("name").is_string()) {
        throw ProtocolError("missing tool name");
      }
      name = item.at("name").get<std::string>();
      const json args = item.value("arguments", json::object());
      out.calls.emplace_back(action_from_call(name, args.is_string() ? json::parse(args.get<std::string>()) : args));
    } catch (const ProtocolError& e) {
      out.calls.emplace_back(ParseFailure{e.what(), name, item.dump()});
    } catch (const json::exception& e) {
      out.calls.emplace_back(ParseFailure{std::string("malformed arguments: ") + e.what(), name, item.dump()});
    }
  }
  return out;
}

void reply_json(httplib::Response& res, int status, const oj& body) {
  res.status = status;
  res.set_content(body.dump(2, ' ', false, json::error_handler_t::replace), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, oj{{"error", message}});
}

}  // namespace

std::string SessionRegistry::create() {
  std::lock_guard lock(mu_);
  std::string id;
  do {
    id = random_id();
  } while (sessions_.contains(id));
  sessions_.emplace(id, std::make_shared<Entry>(engine_));
  return id;
}

bool SessionRegistry::erase(const std::string& id) {
  std::lock_guard lock(mu_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionRegistry::Entry> SessionRegistry::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session " + id);
  return it->second;
}

ToolResponse SessionRegistry::submit(const std::string& id, const json& body) {
  auto entry = find(id);
  const auto calls = calls_from_body(body);
  std::lock_guard lock(entry->mu);
  return entry->session.submit(calls);
}

SessionSummary SessionRegistry::state(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  return SessionSummary::of(entry->session.state());
}

oj session_summary_json(const SessionSummary& s) {
  return tool_response_json(ToolResponse{{}, s}).at("session");
}

struct Server::Impl {
  httplib::Server http;
};

Server::Server(const Engine& engine) : registry_(engine), impl_(std::make_unique<Impl>()) {
  auto& http = impl_->http;

  http.Get("/tools", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(tool_schema().dump(2), "application/json");
  });

  http.Post("/session", [this](const httplib::Request&, httplib::Response& res) {
    const auto id = registry_.create();
    reply_json(res, 201, oj{{"session_id", id}, {"session", session_summary_json(registry_.state(id))}});
  });

  http.Post(R"(/session/([0-9a-f]+)/suite)", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("body is not JSON: ") + e.what());
    }
    try {
      reply_json(res, 200, tool_response_json(registry_.submit(req.matches[1], body)));
    } catch (const NotFound& e) {
      reply_error(res, 404, e.what());
    } catch (const ProtocolError& e) {
      reply_error(res, 400, e.what());
    }
  });

  http.Get(R"(/session/([0-9a-f]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      reply_json(res, 200, session_summary_json(registry_.state(req.matches[1])));
    } catch (const NotFound& e) {
      reply_error(res, 404, e.what());
    }
  });

  http.Delete(R"(/session/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
    if (registry_.erase(req.matches[1])) {
      res.status = 204;
    } else {
      reply_error(res, 404, "unknown session " + std::string(req.matches[1]));
    }
  });

  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    } catch (...) {
      reply_error(res, 500, "internal error");
    }
  });
}

Server::~Server() { stop(); }

void Server::listen(const std::string& host, int port) {
  if (!impl_->http.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

int Server::bind_any_port(const std::string& host) {
  const int port = impl_->http.bind_to_any_port(host);
  if (port < 0) throw Error("cannot bind " + host);
  return port;
}

void Server::listen_after_bind() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace cie
