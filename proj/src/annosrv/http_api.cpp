#include <charconv>
#include <condition_variable>
#include <cstdio>

#include <httplib.h>
#include <json.hpp>

#include "ssbench/annosrv.hpp"
#include "ssbench/lint.hpp"

namespace ssbench::annosrv {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kDefaultPageSize = 50;
constexpr std::size_t kMaxPageSize = 500;

const std::map<std::string, int, std::less<>>& status_table() {
  static const std::map<std::string, int, std::less<>> table = {
      {"BadRequest", 400},        {"Unauthorized", 401},      {"InvalidCredentials", 401},
      {"Forbidden", 403},         {"NotOwner", 403},          {"NotFound", 404},
      {"DuplicateUsername", 409}, {"AlreadyAssigned", 409},   {"EmptyBatch", 409},
      {"ValidationError", 422},   {"IncompleteForm", 422},    {"IncompleteRanking", 422},
      {"OutOfRangeScore", 422},   {"NoAssignees", 422},       {"UnknownAccount", 422},
  };
  return table;
}

json account_json(const Account& a) {
  return {{"id", a.id}, {"username", a.username}, {"role", std::string(to_string(a.role))}};
}

json batch_info_json(const BatchInfo& b) {
  return {{"id", b.id},           {"label", b.label},       {"n_items", b.n_items},
          {"n_groups", b.n_groups}, {"assigned", b.assigned}, {"created_at", b.created_at}};
}

json rating_json(const RatingForm& f) {
  return {{"sc_q1", f.sc_q1},   {"sc_q2", f.sc_q2},   {"sc_q3", f.sc_q3}, {"sc_q4", f.sc_q4},
          {"do_q1", f.do_q1},   {"ss_q1a", f.ss_q1a}, {"ss_q1b", f.ss_q1b}, {"ss_q2", f.ss_q2},
          {"ss_q3", f.ss_q3},   {"ss_q4", f.ss_q4}};
}

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw ValidationError("BadRequest", "request body must be a JSON object");
  return body;
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw ValidationError("ValidationError", std::string("'") + key + "' must be a string");
  }
  return it->get<std::string>();
}

RatingForm parse_rating(const json& body) {
  RatingForm f;
  std::vector<std::string> missing;
  auto score = [&](const char* key, int& out) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
      missing.emplace_back(key);
    } else if (!it->is_number_integer()) {
      throw ValidationError("OutOfRangeScore", std::string(key) + " must be an integer in 1..5");
    } else {
      auto v = it->get<long long>();
      out = v < -1000 || v > 1000 ? 0 : static_cast<int>(v);
    }
  };
  auto flag = [&](const char* key, bool& out) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
      missing.emplace_back(key);
    } else if (!it->is_boolean()) {
      throw ValidationError("ValidationError", std::string(key) + " must be true or false");
    } else {
      out = it->get<bool>();
    }
  };
  score("sc_q1", f.sc_q1);
  score("sc_q2", f.sc_q2);
  score("sc_q3", f.sc_q3);
  score("sc_q4", f.sc_q4);
  flag("do_q1", f.do_q1);
  flag("ss_q1a", f.ss_q1a);
  flag("ss_q1b", f.ss_q1b);
  flag("ss_q2", f.ss_q2);
  flag("ss_q3", f.ss_q3);
  flag("ss_q4", f.ss_q4);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("IncompleteForm", "missing fields: " + list);
  }
  return f;
}

std::vector<BatchItem> parse_items(const json& body) {
  auto it = body.find("items");
  if (it == body.end() || !it->is_array()) throw ValidationError("ValidationError", "'items' must be an array");
  std::vector<BatchItem> items;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& raw = (*it)[i];
    if (!raw.is_object()) throw ItemError(i, "item must be an object");
    auto field = [&](const char* key) {
      auto f = raw.find(key);
      if (f == raw.end() || !f->is_string()) throw ItemError(i, std::string(key) + " is required");
      return f->get<std::string>();
    };
    items.push_back({field("item_id"), field("source_model"), field("title"), field("content"), field("group_key")});
  }
  return items;
}

std::int64_t parse_id(const std::string& text) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw ValidationError("NotFound", "no resource '" + text + "'");
  return v;
}

std::size_t query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  std::string text = req.get_param_value(key);
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError("BadRequest", std::string("query parameter '") + key + "' must be a non-negative integer");
  }
  return v;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

const std::vector<Endpoint>& endpoint_table() {
  static const std::vector<Endpoint> table = {
      {"POST", "/auth/register", "public"},
      {"POST", "/auth/login", "public"},
      {"GET", "/batches", "administrator"},
      {"POST", "/batches", "administrator"},
      {"DELETE", "/batches", "administrator"},
      {"GET", "/batches/{id}", "administrator"},
      {"DELETE", "/batches/{id}", "administrator"},
      {"POST", "/batches/{id}/assign", "administrator"},
      {"GET", "/batches/{id}/summary", "administrator"},
      {"GET", "/tasks/mine", "user"},
      {"POST", "/tasks/{id}/rating", "user"},
      {"POST", "/groups/{key}/ranking", "user"},
  };
  return table;
}

int http_status_for(std::string_view code) {
  const auto& table = status_table();
  auto it = table.find(code);
  return it == table.end() ? 500 : it->second;
}

std::string error_body(std::string_view code, std::string_view detail) {
  return json{{"error", std::string(code)}, {"detail", std::string(detail)}}.dump();
}

std::string summary_json(const HumanEvalSummary& summary) {
  json models = json::array();
  for (const auto& m : summary.models) {
    json dist = json::object();
    for (const auto& [pos, pct] : m.sort_distribution) dist[std::to_string(pos)] = pct;
    models.push_back({{"source_model", m.source_model},
                      {"n", m.n},
                      {"sc_mean", m.sc_mean},
                      {"do_qualified_pct", m.do_qualified_pct},
                      {"ss_qualified_pct", m.ss_qualified_pct},
                      {"sort_distribution", dist}});
  }
  return json{{"batch_id", summary.batch_id},
              {"submitted", summary.submitted},
              {"unsubmitted", summary.unsubmitted},
              {"models", models}}
      .dump();
}

std::string format_summary_table(const HumanEvalSummary& summary) {
  int max_rank = 0;
  for (const auto& m : summary.models) {
    if (!m.sort_distribution.empty()) max_rank = std::max(max_rank, m.sort_distribution.rbegin()->first);
  }
  std::string out = "Model                 N   SC mean   DO%     SS%   ";
  for (int r = 1; r <= max_rank; ++r) out += "  Sort " + std::to_string(r);
  out += "\n";
  char buf[128];
  for (const auto& m : summary.models) {
    std::snprintf(buf, sizeof buf, "%-18.18s %4zu   %6.2f  %6.2f  %6.2f  ", m.source_model.c_str(), m.n, m.sc_mean,
                  m.do_qualified_pct, m.ss_qualified_pct);
    out += buf;
    for (int r = 1; r <= max_rank; ++r) {
      auto it = m.sort_distribution.find(r);
      std::snprintf(buf, sizeof buf, " %6.2f", it == m.sort_distribution.end() ? 0.0 : it->second);
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof buf, "submitted %zu, unsubmitted %zu (excluded)\n", summary.submitted, summary.unsubmitted);
  out += buf;
  return out;
}

struct ApiServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {}

  Account caller(const httplib::Request& req) {
    std::string header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) {
      throw ValidationError("Unauthorized", "missing bearer token");
    }
    return service.authenticate(std::string_view(header).substr(prefix.size()));
  }

  // Role is checked before the body is looked at.
  Account admin_caller(const httplib::Request& req) {
    Account me = caller(req);
    if (me.role != Role::administrator) throw ValidationError("Forbidden", "administrator role required");
    return me;
  }

  template <typename Fn>
  httplib::Server::Handler wrap(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const ItemError& e) {
        res.status = http_status_for(e.code());
        res.set_content(json{{"error", e.code()}, {"detail", e.what()}, {"index", e.index()}}.dump(),
                        "application/json");
      } catch (const Error& e) {
        res.status = http_status_for(e.code());
        res.set_content(error_body(e.code(), e.what()), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(error_body("InternalError", e.what()), "application/json");
      }
    };
  }

  void routes() {
    server.Post("/api/v1/auth/register", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      std::string role = body.contains("role") ? required_string(body, "role") : "user";
      auto account = service.register_account(required_string(body, "username"), required_string(body, "password"),
                                              role_from_string(role));
      send_json(res, 201, account_json(account));
    }));
    server.Post("/api/v1/auth/login", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      auto s = service.login(required_string(body, "username"), required_string(body, "password"));
      send_json(res, 200, {{"token", s.token}, {"expires_at", s.expires_at}, {"account", account_json(s.account)}});
    }));

    server.Get("/api/v1/batches", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      std::size_t offset = query_size(req, "offset", 0);
      std::size_t limit = std::min(query_size(req, "limit", kDefaultPageSize), kMaxPageSize);
      std::size_t total = 0;
      auto page = service.list_batches(me, offset, limit, &total);
      json list = json::array();
      for (const auto& b : page) list.push_back(batch_info_json(b));
      send_json(res, 200, {{"total", total}, {"offset", offset}, {"limit", limit}, {"batches", list}});
    }));
    server.Post("/api/v1/batches", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      auto body = parse_body(req);
      auto b = service.upload_batch(me, required_string(body, "label"), parse_items(body));
      send_json(res, 201, batch_info_json({b.id, b.label, b.items.size(), b.group_count(), b.assigned, b.created_at}));
    }));
    server.Delete("/api/v1/batches", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      if (!req.has_param("id")) throw ValidationError("BadRequest", "query parameter 'id' is required");
      service.delete_batch(me, parse_id(req.get_param_value("id")));
      res.status = 204;
    }));
    server.Get(R"(/api/v1/batches/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      auto b = service.get_batch(me, parse_id(req.matches[1]));
      json items = json::array();
      for (const auto& i : b.items) {
        items.push_back({{"item_id", i.item_id}, {"source_model", i.source_model}, {"title", i.title},
                         {"content", i.content}, {"group_key", i.group_key}});
      }
      send_json(res, 200, {{"id", b.id}, {"label", b.label}, {"assigned", b.assigned}, {"created_at", b.created_at},
                           {"n_groups", b.group_count()}, {"items", items}});
    }));
    server.Delete(R"(/api/v1/batches/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      service.delete_batch(me, parse_id(req.matches[1]));
      res.status = 204;
    }));
    server.Post(R"(/api/v1/batches/([^/]+)/assign)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      auto id = parse_id(req.matches[1]);
      auto body = parse_body(req);
      std::vector<std::string> assignees;
      auto list = body.find("assignees");
      if (list == body.end() || !list->is_array()) throw ValidationError("ValidationError", "'assignees' must be an array");
      for (const auto& a : *list) {
        if (a.is_string()) {
          assignees.push_back(a.get<std::string>());
        } else if (a.is_number_integer()) {
          assignees.push_back(std::to_string(a.get<std::int64_t>()));
        } else {
          throw ValidationError("ValidationError", "assignees are account ids or usernames");
        }
      }
      bool reassign = body.value("reassign", false);
      std::uint64_t seed = body.value("seed", std::uint64_t{0});
      auto tasks = service.assign_tasks(me, id, assignees, reassign, seed);
      json out = json::array();
      for (const auto& t : tasks) {
        out.push_back({{"id", t.id}, {"assignee", t.assignee}, {"item_id", t.item_id}, {"group_key", t.group_key}});
      }
      send_json(res, 200, {{"batch_id", id}, {"tasks", out}});
    }));
    server.Get(R"(/api/v1/batches/([^/]+)/summary)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = admin_caller(req);
      res.status = 200;
      res.set_content(summary_json(service.aggregate(me, parse_id(req.matches[1]))), "application/json");
    }));

    server.Get("/api/v1/tasks/mine", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto mine = service.my_tasks(caller(req));
      json groups = json::array();
      for (const auto& g : mine.groups) {
        json entries = json::array();
        for (const auto& e : g.entries) {
          entries.push_back({{"task_id", e.task.id},
                             {"item_id", e.task.item_id},
                             {"title", e.title},
                             {"content", e.content},
                             {"status", std::string(to_string(e.task.status))},
                             {"rating", e.task.rating ? rating_json(*e.task.rating) : json(nullptr)},
                             {"rank_position", e.task.rank_position ? json(*e.task.rank_position) : json(nullptr)}});
        }
        groups.push_back(
            {{"batch_id", g.batch_id}, {"group_key", g.group_key}, {"ranked", g.ranked}, {"items", entries}});
      }
      send_json(res, 200, {{"submitted", mine.submitted}, {"total", mine.total}, {"groups", groups}});
    }));
    server.Post(R"(/api/v1/tasks/([^/]+)/rating)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = caller(req);
      auto id = parse_id(req.matches[1]);
      service.submit_rating(me, id, parse_rating(parse_body(req)));
      send_json(res, 200, {{"task_id", id}, {"ok", true}});
    }));
    server.Post(R"(/api/v1/groups/(.+)/ranking)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto me = caller(req);
      auto body = parse_body(req);
      auto batch = body.find("batch_id");
      if (batch == body.end() || !batch->is_number_integer()) {
        throw ValidationError("ValidationError", "'batch_id' must be an integer");
      }
      auto ids = body.find("item_ids");
      if (ids == body.end() || !ids->is_array()) throw ValidationError("ValidationError", "'item_ids' must be an array");
      std::vector<std::string> order;
      for (const auto& i : *ids) {
        if (!i.is_string()) throw ValidationError("ValidationError", "item ids must be strings");
        order.push_back(i.get<std::string>());
      }
      std::string key = req.matches[1];
      service.submit_ranking(me, batch->get<std::int64_t>(), key, order);
      send_json(res, 200, {{"group_key", key}, {"ok", true}});
    }));

    server.Get("/rubric.json", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(lint::rubric_json(), "application/json");
    });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.body.empty() && req.path.rfind("/api/", 0) == 0) {
        res.set_content(error_body("NotFound", "no route for " + req.method + " " + req.path), "application/json");
      }
    });
  }
};

ApiServer::ApiServer(Service& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  impl_->routes();
  if (static_dir && !impl_->server.set_mount_point("/", static_dir->string())) {
    throw IoError("NotFound", "static directory " + static_dir->string() + " does not exist");
  }
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ApiServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ApiServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace ssbench::annosrv
