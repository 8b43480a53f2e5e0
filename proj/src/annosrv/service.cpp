#include <algorithm>
#include <chrono>
#include <set>

#include <sodium.h>

#include "ssbench/annosrv.hpp"
#include "ssbench/util.hpp"

namespace ssbench::annosrv {

namespace {

constexpr std::size_t kMinPasswordLength = 8;

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw IoError("CryptoInit", "libsodium failed to initialise");
}

std::string hex(const unsigned char* data, std::size_t n) {
  std::string out(n * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), data, n);
  out.pop_back();
  return out;
}

std::string token_hash(std::string_view token) {
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(token.data()), token.size());
  return hex(digest, sizeof digest);
}

std::string hash_password(std::string_view password, PasswordHashing mode) {
  char out[crypto_pwhash_STRBYTES];
  auto ops = mode == PasswordHashing::fast ? crypto_pwhash_OPSLIMIT_MIN : crypto_pwhash_OPSLIMIT_INTERACTIVE;
  auto mem = mode == PasswordHashing::fast ? crypto_pwhash_MEMLIMIT_MIN : crypto_pwhash_MEMLIMIT_INTERACTIVE;
  if (crypto_pwhash_str(out, password.data(), password.size(), ops, mem) != 0) {
    throw IoError("CryptoError", "password hashing ran out of memory");
  }
  return out;
}

[[noreturn]] void not_found(const std::string& what) { throw ValidationError("NotFound", what + " not found"); }

bool batch_exists(Store& store, std::int64_t id) {
  auto st = store.prepare("SELECT 1 FROM batches WHERE id = ?");
  st.bind(1, id);
  return st.step();
}

std::optional<RatingForm> active_rating(Store& store, std::int64_t task_id) {
  auto st = store.prepare(
      "SELECT sc_q1, sc_q2, sc_q3, sc_q4, do_q1, ss_q1a, ss_q1b, ss_q2, ss_q3, ss_q4 FROM ratings "
      "WHERE task_id = ? AND active = 1");
  st.bind(1, task_id);
  if (!st.step()) return std::nullopt;
  RatingForm f;
  f.sc_q1 = static_cast<int>(st.int_at(0));
  f.sc_q2 = static_cast<int>(st.int_at(1));
  f.sc_q3 = static_cast<int>(st.int_at(2));
  f.sc_q4 = static_cast<int>(st.int_at(3));
  f.do_q1 = st.int_at(4) != 0;
  f.ss_q1a = st.int_at(5) != 0;
  f.ss_q1b = st.int_at(6) != 0;
  f.ss_q2 = st.int_at(7) != 0;
  f.ss_q3 = st.int_at(8) != 0;
  f.ss_q4 = st.int_at(9) != 0;
  return f;
}

}  // namespace

std::string_view to_string(Role r) { return r == Role::administrator ? "administrator" : "user"; }

Role role_from_string(std::string_view s) {
  if (s == "administrator") return Role::administrator;
  if (s == "user") return Role::user;
  throw ValidationError("ValidationError", "role must be 'administrator' or 'user'");
}

std::string_view to_string(TaskStatus s) { return s == TaskStatus::submitted ? "submitted" : "pending"; }

std::size_t StoryBatch::group_count() const {
  std::set<std::string> keys;
  for (const auto& i : items) keys.insert(i.group_key);
  return keys.size();
}

void RatingForm::validate() const {
  const int scores[] = {sc_q1, sc_q2, sc_q3, sc_q4};
  for (int i = 0; i < 4; ++i) {
    if (scores[i] < 1 || scores[i] > 5) {
      throw ValidationError("OutOfRangeScore",
                            "sc_q" + std::to_string(i + 1) + " = " + std::to_string(scores[i]) + " is outside 1..5");
    }
  }
}

ServiceOptions service_options_from(const Config& config) {
  ServiceOptions o;
  o.session_ttl_minutes = config.get_int("server.session_ttl_minutes", o.session_ttl_minutes);
  std::string hashing = config.get_string("server.password_hashing", "interactive");
  if (hashing == "fast") {
    o.hashing = PasswordHashing::fast;
  } else if (hashing != "interactive") {
    throw ValidationError("InvalidConfig", "server.password_hashing must be 'interactive' or 'fast'");
  }
  o.assignment_mode = assignment_mode_from_string(config.get_string("server.assignment_mode", "replicated"));
  o.allow_admin_signup = config.get_bool("server.allow_admin_signup", true);
  return o;
}

Service::Service(Store& store, ServiceOptions options) : store_(store), options_(std::move(options)) {
  ensure_sodium();
  if (options_.session_ttl_minutes <= 0) throw ValidationError("InvalidConfig", "session TTL must be positive");
}

std::int64_t Service::now() const {
  if (options_.clock) return options_.clock();
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

void Service::require_admin(const Account& caller) const {
  if (caller.role != Role::administrator) throw ValidationError("Forbidden", "administrator role required");
}

Account Service::register_account(std::string_view username, std::string_view password, Role role) {
  std::string name = trim(username);
  if (name.empty() || name.size() > 64) throw ValidationError("ValidationError", "username must be 1-64 characters");
  if (password.size() < kMinPasswordLength) {
    throw ValidationError("ValidationError", "password must be at least 8 characters");
  }
  if (role == Role::administrator && !options_.allow_admin_signup) {
    throw ValidationError("Forbidden", "administrator sign-up is disabled");
  }
  std::string digest = hash_password(password, options_.hashing);
  return store_.transaction([&] {
    auto exists = store_.prepare("SELECT 1 FROM accounts WHERE username = ?");
    exists.bind(1, name);
    if (exists.step()) throw ValidationError("DuplicateUsername", "username '" + name + "' is taken");
    auto ins = store_.prepare("INSERT INTO accounts (username, password_digest, role) VALUES (?, ?, ?)");
    ins.bind(1, name).bind(2, digest).bind(3, to_string(role));
    ins.run();
    return Account{store_.last_insert_id(), name, role};
  });
}

Session Service::login(std::string_view username, std::string_view password) {
  std::string name = trim(username);
  Account account;
  std::string digest;
  {
    auto found = store_.transaction([&] {
      auto st = store_.prepare("SELECT id, role, password_digest FROM accounts WHERE username = ?");
      st.bind(1, name);
      if (!st.step()) return false;
      account = {st.int_at(0), name, role_from_string(st.text_at(1))};
      digest = st.text_at(2);
      return true;
    });
    if (!found) throw ValidationError("InvalidCredentials", "unknown username or wrong password");
  }
  if (crypto_pwhash_str_verify(digest.c_str(), password.data(), password.size()) != 0) {
    throw ValidationError("InvalidCredentials", "unknown username or wrong password");
  }
  unsigned char raw[32];
  randombytes_buf(raw, sizeof raw);
  Session s{hex(raw, sizeof raw), now() + options_.session_ttl_minutes * 60, account};
  store_.transaction([&] {
    store_.prepare("DELETE FROM sessions WHERE expires_at <= ?").bind(1, now()).run();
    auto ins = store_.prepare("INSERT INTO sessions (token_hash, account_id, expires_at) VALUES (?, ?, ?)");
    ins.bind(1, token_hash(s.token)).bind(2, account.id).bind(3, s.expires_at);
    ins.run();
  });
  return s;
}

void Service::logout(std::string_view token) {
  store_.transaction([&] { store_.prepare("DELETE FROM sessions WHERE token_hash = ?").bind(1, token_hash(token)).run(); });
}

Account Service::authenticate(std::string_view token) {
  if (token.empty()) throw ValidationError("Unauthorized", "missing bearer token");
  return store_.transaction([&] {
    auto st = store_.prepare(
        "SELECT a.id, a.username, a.role FROM sessions s JOIN accounts a ON a.id = s.account_id "
        "WHERE s.token_hash = ? AND s.expires_at > ?");
    st.bind(1, token_hash(token)).bind(2, now());
    if (!st.step()) throw ValidationError("Unauthorized", "invalid or expired session");
    return Account{st.int_at(0), st.text_at(1), role_from_string(st.text_at(2))};
  });
}

StoryBatch Service::upload_batch(const Account& caller, std::string_view label, const std::vector<BatchItem>& items) {
  require_admin(caller);
  if (trim(label).empty()) throw ValidationError("ValidationError", "batch label is required");
  if (items.empty()) throw ValidationError("ValidationError", "batch has no items");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (trim(it.item_id).empty()) throw ItemError(i, "item_id is required");
    if (trim(it.source_model).empty()) throw ItemError(i, "source_model is required");
    if (trim(it.title).empty()) throw ItemError(i, "title is required");
    if (trim(it.content).empty()) throw ItemError(i, "content is required");
    if (trim(it.group_key).empty()) throw ItemError(i, "group_key is required");
    if (!ids.insert(it.item_id).second) throw ItemError(i, "duplicate item_id '" + it.item_id + "'");
  }
  return store_.transaction([&] {
    store_.prepare("INSERT INTO batches (label) VALUES (?)").bind(1, trim(label)).run();
    StoryBatch b;
    b.id = store_.last_insert_id();
    b.label = trim(label);
    b.items = items;
    auto ins = store_.prepare(
        "INSERT INTO batch_items (batch_id, item_id, position, source_model, title, content, group_key) "
        "VALUES (?, ?, ?, ?, ?, ?, ?)");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      ins.bind(1, b.id).bind(2, it.item_id).bind(3, static_cast<std::int64_t>(i)).bind(4, it.source_model);
      ins.bind(5, it.title).bind(6, it.content).bind(7, it.group_key);
      ins.run();
      ins.reset();
    }
    auto st = store_.prepare("SELECT created_at FROM batches WHERE id = ?");
    st.bind(1, b.id);
    if (st.step()) b.created_at = st.text_at(0);
    return b;
  });
}

std::vector<BatchInfo> Service::list_batches(const Account& caller, std::size_t offset, std::size_t limit,
                                             std::size_t* total) {
  require_admin(caller);
  return store_.transaction([&] {
    if (total) {
      auto c = store_.prepare("SELECT COUNT(*) FROM batches");
      c.step();
      *total = static_cast<std::size_t>(c.int_at(0));
    }
    auto st = store_.prepare(
        "SELECT b.id, b.label, b.assigned, b.created_at, "
        "(SELECT COUNT(*) FROM batch_items i WHERE i.batch_id = b.id), "
        "(SELECT COUNT(DISTINCT group_key) FROM batch_items i WHERE i.batch_id = b.id) "
        "FROM batches b ORDER BY b.id LIMIT ? OFFSET ?");
    st.bind(1, static_cast<std::int64_t>(limit)).bind(2, static_cast<std::int64_t>(offset));
    std::vector<BatchInfo> out;
    while (st.step()) {
      out.push_back({st.int_at(0), st.text_at(1), static_cast<std::size_t>(st.int_at(4)),
                     static_cast<std::size_t>(st.int_at(5)), st.int_at(2) != 0, st.text_at(3)});
    }
    return out;
  });
}

StoryBatch Service::get_batch(const Account& caller, std::int64_t batch_id) {
  require_admin(caller);
  return store_.transaction([&] {
    auto st = store_.prepare("SELECT label, assigned, created_at FROM batches WHERE id = ?");
    st.bind(1, batch_id);
    if (!st.step()) not_found("batch " + std::to_string(batch_id));
    StoryBatch b;
    b.id = batch_id;
    b.label = st.text_at(0);
    b.assigned = st.int_at(1) != 0;
    b.created_at = st.text_at(2);
    auto items = store_.prepare(
        "SELECT item_id, source_model, title, content, group_key FROM batch_items WHERE batch_id = ? "
        "ORDER BY position");
    items.bind(1, batch_id);
    while (items.step()) {
      b.items.push_back({items.text_at(0), items.text_at(1), items.text_at(2), items.text_at(3), items.text_at(4)});
    }
    return b;
  });
}

void Service::delete_batch(const Account& caller, std::int64_t batch_id) {
  require_admin(caller);
  store_.transaction([&] {
    if (!batch_exists(store_, batch_id)) not_found("batch " + std::to_string(batch_id));
    store_.prepare("DELETE FROM batches WHERE id = ?").bind(1, batch_id).run();
  });
}

std::vector<AnnotationTask> Service::assign_tasks(const Account& caller, std::int64_t batch_id,
                                                  const std::vector<std::string>& assignees, bool reassign,
                                                  std::uint64_t seed) {
  require_admin(caller);
  if (assignees.empty()) throw ValidationError("NoAssignees", "no assignees selected");
  return store_.transaction([&] {
    auto b = store_.prepare("SELECT assigned FROM batches WHERE id = ?");
    b.bind(1, batch_id);
    if (!b.step()) not_found("batch " + std::to_string(batch_id));
    if (b.int_at(0) != 0 && !reassign) {
      throw ValidationError("AlreadyAssigned", "batch " + std::to_string(batch_id) + " is already assigned");
    }

    std::vector<std::int64_t> users;
    for (const auto& a : assignees) {
      std::string key = trim(a);
      bool numeric = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
      auto st = store_.prepare(numeric ? "SELECT id FROM accounts WHERE id = ?" : "SELECT id FROM accounts WHERE username = ?");
      if (numeric) {
        st.bind(1, static_cast<std::int64_t>(std::stoll(key)));
      } else {
        st.bind(1, key);
      }
      if (!st.step()) throw ValidationError("UnknownAccount", "no account '" + key + "'");
      std::int64_t id = st.int_at(0);
      if (std::find(users.begin(), users.end(), id) == users.end()) users.push_back(id);
    }

    std::vector<std::string> groups;
    std::map<std::string, std::vector<std::string>> members;
    auto items = store_.prepare("SELECT item_id, group_key FROM batch_items WHERE batch_id = ? ORDER BY position");
    items.bind(1, batch_id);
    while (items.step()) {
      std::string g = items.text_at(1);
      if (!members.count(g)) groups.push_back(g);
      members[g].push_back(items.text_at(0));
    }

    store_.prepare("DELETE FROM tasks WHERE batch_id = ?").bind(1, batch_id).run();
    store_.prepare("DELETE FROM rankings WHERE batch_id = ?").bind(1, batch_id).run();

    auto plan = allocate_groups(groups.size(), users.size(), options_.assignment_mode, seed);
    auto ins = store_.prepare(
        "INSERT INTO tasks (batch_id, assignee, item_id, group_key, rank_position) VALUES (?, ?, ?, ?, ?)");
    std::vector<AnnotationTask> out;
    for (std::size_t u = 0; u < users.size(); ++u) {
      for (auto g : plan[u]) {
        const auto& ids = members[groups[g]];
        for (const auto& item : ids) {
          ins.bind(1, batch_id).bind(2, users[u]).bind(3, item).bind(4, groups[g]);
          if (ids.size() == 1) {
            ins.bind(5, std::int64_t{1});
          } else {
            ins.bind_null(5);
          }
          ins.run();
          ins.reset();
          AnnotationTask t;
          t.id = store_.last_insert_id();
          t.batch_id = batch_id;
          t.assignee = users[u];
          t.item_id = item;
          t.group_key = groups[g];
          if (ids.size() == 1) t.rank_position = 1;
          out.push_back(std::move(t));
        }
      }
    }
    store_.prepare("UPDATE batches SET assigned = 1 WHERE id = ?").bind(1, batch_id).run();
    return out;
  });
}

MyTasks Service::my_tasks(const Account& caller) {
  return store_.transaction([&] {
    auto st = store_.prepare(
        "SELECT t.id, t.batch_id, t.item_id, t.group_key, t.status, t.rank_position, i.title, i.content "
        "FROM tasks t JOIN batch_items i ON i.batch_id = t.batch_id AND i.item_id = t.item_id "
        "WHERE t.assignee = ? ORDER BY t.batch_id, i.position");
    st.bind(1, caller.id);
    MyTasks out;
    std::map<std::pair<std::int64_t, std::string>, std::size_t> index;
    while (st.step()) {
      AnnotationTask t;
      t.id = st.int_at(0);
      t.batch_id = st.int_at(1);
      t.assignee = caller.id;
      t.item_id = st.text_at(2);
      t.group_key = st.text_at(3);
      t.status = st.text_at(4) == "submitted" ? TaskStatus::submitted : TaskStatus::pending;
      if (!st.null_at(5)) t.rank_position = static_cast<int>(st.int_at(5));
      auto key = std::make_pair(t.batch_id, t.group_key);
      auto [it, fresh] = index.emplace(key, out.groups.size());
      if (fresh) out.groups.push_back({t.batch_id, t.group_key, true, {}});
      auto& group = out.groups[it->second];
      ++out.total;
      out.submitted += t.status == TaskStatus::submitted;
      group.ranked = group.ranked && t.rank_position.has_value();
      group.entries.push_back({std::move(t), st.text_at(6), st.text_at(7)});
    }
    for (auto& g : out.groups) {
      for (auto& e : g.entries) e.task.rating = active_rating(store_, e.task.id);
    }
    return out;
  });
}

void Service::refresh_status(std::int64_t task_id) {
  store_
      .prepare(
          "UPDATE tasks SET status = CASE WHEN rank_position IS NOT NULL AND EXISTS "
          "(SELECT 1 FROM ratings r WHERE r.task_id = tasks.id AND r.active = 1) "
          "THEN 'submitted' ELSE 'pending' END WHERE id = ?")
      .bind(1, task_id)
      .run();
}

void Service::submit_rating(const Account& caller, std::int64_t task_id, const RatingForm& form) {
  form.validate();
  store_.transaction([&] {
    auto st = store_.prepare("SELECT assignee FROM tasks WHERE id = ?");
    st.bind(1, task_id);
    if (!st.step()) not_found("task " + std::to_string(task_id));
    if (st.int_at(0) != caller.id) throw ValidationError("NotOwner", "task " + std::to_string(task_id) + " belongs to another annotator");
    store_.prepare("UPDATE ratings SET active = 0 WHERE task_id = ? AND active = 1").bind(1, task_id).run();
    auto ins = store_.prepare(
        "INSERT INTO ratings (task_id, sc_q1, sc_q2, sc_q3, sc_q4, do_q1, ss_q1a, ss_q1b, ss_q2, ss_q3, ss_q4) "
        "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
    ins.bind(1, task_id).bind(2, std::int64_t{form.sc_q1}).bind(3, std::int64_t{form.sc_q2});
    ins.bind(4, std::int64_t{form.sc_q3}).bind(5, std::int64_t{form.sc_q4}).bind(6, std::int64_t{form.do_q1});
    ins.bind(7, std::int64_t{form.ss_q1a}).bind(8, std::int64_t{form.ss_q1b}).bind(9, std::int64_t{form.ss_q2});
    ins.bind(10, std::int64_t{form.ss_q3}).bind(11, std::int64_t{form.ss_q4});
    ins.run();
    refresh_status(task_id);
  });
}

void Service::submit_ranking(const Account& caller, std::int64_t batch_id, std::string_view group_key,
                             const std::vector<std::string>& item_ids) {
  store_.transaction([&] {
    auto g = store_.prepare("SELECT COUNT(*) FROM batch_items WHERE batch_id = ? AND group_key = ?");
    g.bind(1, batch_id).bind(2, group_key);
    g.step();
    if (g.int_at(0) == 0) not_found("group '" + std::string(group_key) + "' in batch " + std::to_string(batch_id));

    auto st = store_.prepare("SELECT id, item_id FROM tasks WHERE batch_id = ? AND group_key = ? AND assignee = ?");
    st.bind(1, batch_id).bind(2, group_key).bind(3, caller.id);
    std::map<std::string, std::int64_t> mine;
    while (st.step()) mine[st.text_at(1)] = st.int_at(0);
    if (mine.empty()) throw ValidationError("NotOwner", "group '" + std::string(group_key) + "' is not assigned to you");

    std::set<std::string> seen(item_ids.begin(), item_ids.end());
    bool exact = seen.size() == item_ids.size() && seen.size() == mine.size() &&
                 std::all_of(seen.begin(), seen.end(), [&](const std::string& id) { return mine.count(id) > 0; });
    if (!exact) {
      throw ValidationError("IncompleteRanking", "ranking must list each of the group's " +
                                                     std::to_string(mine.size()) + " items exactly once");
    }
    auto upd = store_.prepare("UPDATE tasks SET rank_position = ? WHERE id = ?");
    for (std::size_t i = 0; i < item_ids.size(); ++i) {
      upd.bind(1, static_cast<std::int64_t>(i + 1)).bind(2, mine[item_ids[i]]);
      upd.run();
      upd.reset();
    }
    store_.prepare("UPDATE rankings SET active = 0 WHERE batch_id = ? AND assignee = ? AND group_key = ? AND active = 1")
        .bind(1, batch_id)
        .bind(2, caller.id)
        .bind(3, group_key)
        .run();
    std::string list = "[";
    for (std::size_t i = 0; i < item_ids.size(); ++i) {
      if (i) list += ",";
      list += "\"" + item_ids[i] + "\"";
    }
    list += "]";
    auto ins = store_.prepare("INSERT INTO rankings (batch_id, assignee, group_key, item_ids) VALUES (?, ?, ?, ?)");
    ins.bind(1, batch_id).bind(2, caller.id).bind(3, group_key).bind(4, list);
    ins.run();
    for (const auto& [item, task] : mine) refresh_status(task);
  });
}

HumanEvalSummary Service::aggregate(const Account& caller, std::int64_t batch_id) {
  require_admin(caller);
  return store_.transaction([&] {
    if (!batch_exists(store_, batch_id)) not_found("batch " + std::to_string(batch_id));
    auto st = store_.prepare(
        "SELECT i.source_model, r.sc_q1, r.sc_q2, r.sc_q3, r.sc_q4, r.do_q1, r.ss_q1a, r.ss_q1b, r.ss_q2, r.ss_q3, "
        "r.ss_q4, t.rank_position FROM tasks t "
        "JOIN batch_items i ON i.batch_id = t.batch_id AND i.item_id = t.item_id "
        "JOIN ratings r ON r.task_id = t.id AND r.active = 1 "
        "WHERE t.batch_id = ? AND t.status = 'submitted' ORDER BY t.id");
    st.bind(1, batch_id);
    std::vector<SubmittedRecord> records;
    while (st.step()) {
      SubmittedRecord r;
      r.source_model = st.text_at(0);
      r.rating = {static_cast<int>(st.int_at(1)), static_cast<int>(st.int_at(2)), static_cast<int>(st.int_at(3)),
                  static_cast<int>(st.int_at(4)), st.int_at(5) != 0,  st.int_at(6) != 0,
                  st.int_at(7) != 0,              st.int_at(8) != 0,  st.int_at(9) != 0,
                  st.int_at(10) != 0};
      r.rank_position = static_cast<int>(st.int_at(11));
      records.push_back(std::move(r));
    }
    auto pending = store_.prepare("SELECT COUNT(*) FROM tasks WHERE batch_id = ? AND status = 'pending'");
    pending.bind(1, batch_id);
    pending.step();
    if (records.empty()) {
      throw ValidationError("EmptyBatch", "batch " + std::to_string(batch_id) + " has no submitted tasks");
    }
    return summarize(batch_id, records, static_cast<std::size_t>(pending.int_at(0)));
  });
}

}  // namespace ssbench::annosrv
