#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssbench/config.hpp"
#include "ssbench/error.hpp"

struct sqlite3;
struct sqlite3_stmt;

namespace ssbench::annosrv {

// ---------------------------------------------------------------------------
// Storage

class Statement {
 public:
  Statement(sqlite3* db, std::string_view sql);
  ~Statement();
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, std::int64_t value);
  Statement& bind(int index, std::string_view value);
  Statement& bind_null(int index);
  bool step();  // true while a row is available
  void run();   // step to completion
  void reset();

  std::int64_t int_at(int col) const;
  std::string text_at(int col) const;
  bool null_at(int col) const;

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

// One SQLite connection guarded by a mutex. Every public Service call runs
// inside transaction(), so readers see a consistent snapshot.
class Store {
 public:
  explicit Store(const std::filesystem::path& path);  // ":memory:" allowed
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  void exec(std::string_view sql);
  Statement prepare(std::string_view sql) { return Statement(db_, sql); }
  std::int64_t last_insert_id() const;

  template <typename Fn>
  auto transaction(Fn&& fn) {
    std::lock_guard lock(mu_);
    exec("BEGIN IMMEDIATE");
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        exec("COMMIT");
      } else {
        auto result = fn();
        exec("COMMIT");
        return result;
      }
    } catch (...) {
      exec("ROLLBACK");
      throw;
    }
  }

  static std::string_view schema_sql();

 private:
  sqlite3* db_ = nullptr;
  std::recursive_mutex mu_;
};

// ---------------------------------------------------------------------------
// Domain

enum class Role { administrator, user };
std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct Account {
  std::int64_t id = 0;
  std::string username;
  Role role = Role::user;
};

struct Session {
  std::string token;
  std::int64_t expires_at = 0;  // unix seconds
  Account account;
};

struct BatchItem {
  std::string item_id;
  std::string source_model;
  std::string title;
  std::string content;
  std::string group_key;
};

struct StoryBatch {
  std::int64_t id = 0;
  std::string label;
  std::vector<BatchItem> items;
  bool assigned = false;
  std::string created_at;

  std::size_t group_count() const;
};

struct BatchInfo {
  std::int64_t id = 0;
  std::string label;
  std::size_t n_items = 0;
  std::size_t n_groups = 0;
  bool assigned = false;
  std::string created_at;
};

struct RatingForm {
  int sc_q1 = 0, sc_q2 = 0, sc_q3 = 0, sc_q4 = 0;
  bool do_q1 = false;
  bool ss_q1a = false, ss_q1b = false, ss_q2 = false, ss_q3 = false, ss_q4 = false;

  void validate() const;  // throws ValidationError("OutOfRangeScore")
  double sc_mean() const { return (sc_q1 + sc_q2 + sc_q3 + sc_q4) / 4.0; }
  bool ss_qualified() const { return ss_q1a && ss_q1b && ss_q2 && ss_q3 && ss_q4; }
  bool operator==(const RatingForm&) const = default;
};

enum class TaskStatus { pending, submitted };
std::string_view to_string(TaskStatus s);

struct AnnotationTask {
  std::int64_t id = 0;
  std::int64_t batch_id = 0;
  std::int64_t assignee = 0;
  std::string item_id;
  std::string group_key;
  TaskStatus status = TaskStatus::pending;
  std::optional<RatingForm> rating;
  std::optional<int> rank_position;
};

struct TaskGroupView {
  std::int64_t batch_id = 0;
  std::string group_key;
  bool ranked = false;
  struct Entry {
    AnnotationTask task;
    std::string title;
    std::string content;
  };
  std::vector<Entry> entries;
};

struct MyTasks {
  std::vector<TaskGroupView> groups;
  std::size_t submitted = 0;
  std::size_t total = 0;
};

// Per-model roll-up; rank positions start at 1.
struct ModelSummary {
  std::string source_model;
  std::size_t n = 0;  // submitted tasks
  double sc_mean = 0.0;
  double do_qualified_pct = 0.0;
  double ss_qualified_pct = 0.0;
  std::map<int, double> sort_distribution;
};

struct HumanEvalSummary {
  std::int64_t batch_id = 0;
  std::size_t submitted = 0;
  std::size_t unsubmitted = 0;
  std::vector<ModelSummary> models;  // sorted by source_model
};

// The raw inputs to the summary: one per submitted task.
struct SubmittedRecord {
  std::string source_model;
  RatingForm rating;
  int rank_position = 0;
};

HumanEvalSummary summarize(std::int64_t batch_id, const std::vector<SubmittedRecord>& records,
                           std::size_t unsubmitted);

// ---------------------------------------------------------------------------
// Allocation

enum class AssignmentMode { replicated, exclusive };
AssignmentMode assignment_mode_from_string(std::string_view s);

// Group indices for each user. Replicated: every user gets every group.
// Exclusive: groups shuffled with `seed`, then dealt round-robin, so per-user
// counts differ by at most one and no group is split.
std::vector<std::vector<std::size_t>> allocate_groups(std::size_t n_groups, std::size_t n_users, AssignmentMode mode,
                                                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Service

enum class PasswordHashing { interactive, fast };

struct ServiceOptions {
  std::int64_t session_ttl_minutes = 720;
  PasswordHashing hashing = PasswordHashing::interactive;
  AssignmentMode assignment_mode = AssignmentMode::replicated;
  bool allow_admin_signup = true;
  std::function<std::int64_t()> clock;  // unix seconds; defaults to system clock
};

// Batch payload problem tied to one item.
class ItemError : public ValidationError {
 public:
  ItemError(std::size_t index, const std::string& detail)
      : ValidationError("ValidationError", "items[" + std::to_string(index) + "]: " + detail), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class Service {
 public:
  Service(Store& store, ServiceOptions options = {});

  Account register_account(std::string_view username, std::string_view password, Role role);
  Session login(std::string_view username, std::string_view password);
  void logout(std::string_view token);
  Account authenticate(std::string_view token);  // throws ValidationError("Unauthorized")

  StoryBatch upload_batch(const Account& caller, std::string_view label, const std::vector<BatchItem>& items);
  std::vector<BatchInfo> list_batches(const Account& caller, std::size_t offset, std::size_t limit,
                                      std::size_t* total = nullptr);
  StoryBatch get_batch(const Account& caller, std::int64_t batch_id);
  void delete_batch(const Account& caller, std::int64_t batch_id);

  // Assignees by account id or username.
  std::vector<AnnotationTask> assign_tasks(const Account& caller, std::int64_t batch_id,
                                           const std::vector<std::string>& assignees, bool reassign = false,
                                           std::uint64_t seed = 0);

  MyTasks my_tasks(const Account& caller);
  void submit_rating(const Account& caller, std::int64_t task_id, const RatingForm& form);
  void submit_ranking(const Account& caller, std::int64_t batch_id, std::string_view group_key,
                      const std::vector<std::string>& item_ids);

  HumanEvalSummary aggregate(const Account& caller, std::int64_t batch_id);

  const ServiceOptions& options() const { return options_; }

 private:
  void require_admin(const Account& caller) const;
  std::int64_t now() const;
  void refresh_status(std::int64_t task_id);

  Store& store_;
  ServiceOptions options_;
};

ServiceOptions service_options_from(const Config& config);

// ---------------------------------------------------------------------------
// HTTP

struct Endpoint {
  std::string method;
  std::string path;  // under /api/v1, `{x}` marks a path parameter
  std::string role;  // "public", "user" (any signed-in account) or "administrator"
};

// Every route the API serves, with the role it requires.
const std::vector<Endpoint>& endpoint_table();

// HTTP status for an error code.
int http_status_for(std::string_view code);

std::string error_body(std::string_view code, std::string_view detail);
std::string summary_json(const HumanEvalSummary& summary);
std::string format_summary_table(const HumanEvalSummary& summary);

class ApiServer {
 public:
  ApiServer(Service& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ApiServer();

  // Binds and serves until stop(); returns false when the bind fails.
  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port for tests; serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ssbench::annosrv
