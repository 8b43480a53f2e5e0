#include <sqlite3.h>

#include "ssbench/annosrv.hpp"

namespace ssbench::annosrv {

namespace {

[[noreturn]] void fail(sqlite3* db, std::string_view what) {
  throw IoError("StoreError", std::string(what) + ": " + sqlite3_errmsg(db));
}

}  // namespace

Statement::Statement(sqlite3* db, std::string_view sql) : db_(db) {
  if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
    fail(db, "prepare");
  }
}

Statement::~Statement() { sqlite3_finalize(stmt_); }

Statement& Statement::bind(int index, std::int64_t value) {
  if (sqlite3_bind_int64(stmt_, index, value) != SQLITE_OK) fail(db_, "bind");
  return *this;
}

Statement& Statement::bind(int index, std::string_view value) {
  if (sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT) != SQLITE_OK) {
    fail(db_, "bind");
  }
  return *this;
}

Statement& Statement::bind_null(int index) {
  if (sqlite3_bind_null(stmt_, index) != SQLITE_OK) fail(db_, "bind");
  return *this;
}

bool Statement::step() {
  int rc = sqlite3_step(stmt_);
  if (rc == SQLITE_ROW) return true;
  if (rc == SQLITE_DONE) return false;
  fail(db_, "step");
}

void Statement::run() {
  while (step()) {
  }
}

void Statement::reset() {
  sqlite3_reset(stmt_);
  sqlite3_clear_bindings(stmt_);
}

std::int64_t Statement::int_at(int col) const { return sqlite3_column_int64(stmt_, col); }

std::string Statement::text_at(int col) const {
  const auto* p = sqlite3_column_text(stmt_, col);
  return p ? std::string(reinterpret_cast<const char*>(p), sqlite3_column_bytes(stmt_, col)) : std::string();
}

bool Statement::null_at(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

std::string_view Store::schema_sql() {
  return R"sql(
CREATE TABLE IF NOT EXISTS accounts (
  id INTEGER PRIMARY KEY,
  username TEXT NOT NULL UNIQUE,
  password_digest TEXT NOT NULL,
  role TEXT NOT NULL CHECK (role IN ('administrator', 'user')),
  created_at TEXT NOT NULL DEFAULT (strftime('%Y-%m-%dT%H:%M:%SZ', 'now'))
);
CREATE TABLE IF NOT EXISTS sessions (
  token_hash TEXT PRIMARY KEY,
  account_id INTEGER NOT NULL REFERENCES accounts(id) ON DELETE CASCADE,
  expires_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS batches (
  id INTEGER PRIMARY KEY,
  label TEXT NOT NULL,
  assigned INTEGER NOT NULL DEFAULT 0,
  created_at TEXT NOT NULL DEFAULT (strftime('%Y-%m-%dT%H:%M:%SZ', 'now'))
);
CREATE TABLE IF NOT EXISTS batch_items (
  batch_id INTEGER NOT NULL REFERENCES batches(id) ON DELETE CASCADE,
  item_id TEXT NOT NULL,
  position INTEGER NOT NULL,
  source_model TEXT NOT NULL,
  title TEXT NOT NULL,
  content TEXT NOT NULL,
  group_key TEXT NOT NULL,
  PRIMARY KEY (batch_id, item_id)
);
CREATE TABLE IF NOT EXISTS tasks (
  id INTEGER PRIMARY KEY,
  batch_id INTEGER NOT NULL REFERENCES batches(id) ON DELETE CASCADE,
  assignee INTEGER NOT NULL REFERENCES accounts(id),
  item_id TEXT NOT NULL,
  group_key TEXT NOT NULL,
  status TEXT NOT NULL DEFAULT 'pending' CHECK (status IN ('pending', 'submitted')),
  rank_position INTEGER,
  UNIQUE (batch_id, assignee, item_id)
);
CREATE TABLE IF NOT EXISTS ratings (
  id INTEGER PRIMARY KEY,
  task_id INTEGER NOT NULL REFERENCES tasks(id) ON DELETE CASCADE,
  sc_q1 INTEGER NOT NULL, sc_q2 INTEGER NOT NULL, sc_q3 INTEGER NOT NULL, sc_q4 INTEGER NOT NULL,
  do_q1 INTEGER NOT NULL,
  ss_q1a INTEGER NOT NULL, ss_q1b INTEGER NOT NULL, ss_q2 INTEGER NOT NULL, ss_q3 INTEGER NOT NULL,
  ss_q4 INTEGER NOT NULL,
  active INTEGER NOT NULL DEFAULT 1,
  submitted_at TEXT NOT NULL DEFAULT (strftime('%Y-%m-%dT%H:%M:%SZ', 'now'))
);
CREATE UNIQUE INDEX IF NOT EXISTS one_active_rating ON ratings(task_id) WHERE active = 1;
CREATE TABLE IF NOT EXISTS rankings (
  id INTEGER PRIMARY KEY,
  batch_id INTEGER NOT NULL REFERENCES batches(id) ON DELETE CASCADE,
  assignee INTEGER NOT NULL REFERENCES accounts(id),
  group_key TEXT NOT NULL,
  item_ids TEXT NOT NULL,
  active INTEGER NOT NULL DEFAULT 1,
  submitted_at TEXT NOT NULL DEFAULT (strftime('%Y-%m-%dT%H:%M:%SZ', 'now'))
);
CREATE INDEX IF NOT EXISTS tasks_by_assignee ON tasks(assignee, batch_id, group_key);
)sql";
}

Store::Store(const std::filesystem::path& path) {
  if (sqlite3_open(path.string().c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw IoError("StoreError", "cannot open " + path.string() + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  exec("PRAGMA foreign_keys = ON");
  exec("PRAGMA journal_mode = WAL");
  exec(schema_sql());
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(std::string_view sql) {
  std::lock_guard lock(mu_);
  char* err = nullptr;
  std::string text(sql);
  if (sqlite3_exec(db_, text.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw IoError("StoreError", msg);
  }
}

std::int64_t Store::last_insert_id() const { return sqlite3_last_insert_rowid(db_); }

}  // namespace ssbench::annosrv
