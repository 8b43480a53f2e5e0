#include <algorithm>
#include <numeric>

#include "ssbench/annosrv.hpp"
#include "ssbench/util.hpp"

namespace ssbench::annosrv {

AssignmentMode assignment_mode_from_string(std::string_view s) {
  if (s == "replicated") return AssignmentMode::replicated;
  if (s == "exclusive") return AssignmentMode::exclusive;
  throw ValidationError("InvalidConfig", "assignment mode must be 'replicated' or 'exclusive'");
}

std::vector<std::vector<std::size_t>> allocate_groups(std::size_t n_groups, std::size_t n_users, AssignmentMode mode,
                                                      std::uint64_t seed) {
  if (n_users == 0) throw ValidationError("NoAssignees", "no assignees selected");
  std::vector<std::size_t> order(n_groups);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<std::size_t>> out(n_users);
  if (mode == AssignmentMode::replicated) {
    for (auto& user : out) user = order;
    return out;
  }
  Rng rng = derive_rng(seed, "assign");
  shuffle_in_place(order, rng);
  for (std::size_t i = 0; i < order.size(); ++i) out[i % n_users].push_back(order[i]);
  for (auto& user : out) std::sort(user.begin(), user.end());
  return out;
}

HumanEvalSummary summarize(std::int64_t batch_id, const std::vector<SubmittedRecord>& records,
                           std::size_t unsubmitted) {
  struct Acc {
    std::size_t n = 0, ranked = 0, do_yes = 0, ss_yes = 0;
    double sc = 0.0;
    std::map<int, std::size_t> ranks;
  };
  std::map<std::string, Acc> by_model;
  for (const auto& r : records) {
    auto& a = by_model[r.source_model];
    ++a.n;
    a.sc += r.rating.sc_mean();
    a.do_yes += r.rating.do_q1;
    a.ss_yes += r.rating.ss_qualified();
    if (r.rank_position > 0) {
      ++a.ranked;
      ++a.ranks[r.rank_position];
    }
  }
  HumanEvalSummary s;
  s.batch_id = batch_id;
  s.submitted = records.size();
  s.unsubmitted = unsubmitted;
  for (const auto& [model, a] : by_model) {
    ModelSummary m;
    m.source_model = model;
    m.n = a.n;
    m.sc_mean = a.sc / static_cast<double>(a.n);
    m.do_qualified_pct = 100.0 * static_cast<double>(a.do_yes) / static_cast<double>(a.n);
    m.ss_qualified_pct = 100.0 * static_cast<double>(a.ss_yes) / static_cast<double>(a.n);
    for (const auto& [pos, count] : a.ranks) {
      m.sort_distribution[pos] = 100.0 * static_cast<double>(count) / static_cast<double>(a.ranked);
    }
    s.models.push_back(std::move(m));
  }
  return s;
}

}  // namespace ssbench::annosrv
