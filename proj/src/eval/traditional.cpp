#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <json.hpp>

#include "ssbench/error.hpp"
#include "ssbench/eval.hpp"
#include "ssbench/parallel.hpp"
#include "ssbench/util.hpp"

namespace ssbench::eval {

using nlohmann::ordered_json;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("text") || !j["id"].is_string() ||
        !j["text"].is_string()) {
      throw ValidationError("MalformedRecord", "predictions line " + std::to_string(line_no) +
                                                   ": expected {\"id\": string, \"text\": string}");
    }
    out.push_back({j["id"].get<std::string>(), j["text"].get<std::string>()});
  }
  return out;
}

MetricRow eval_traditional(std::string model, const std::vector<Prediction>& predictions,
                           const corpus::Corpus& references, metrics::TokenMode mode, std::size_t jobs) {
  std::vector<const corpus::StoryPair*> refs;
  for (const auto& p : predictions) {
    const auto* ref = references.find_pair(p.id);
    if (!ref) throw ValidationError("UnmatchedId", "prediction id '" + p.id + "' has no reference pair");
    refs.push_back(ref);
  }
  struct Scores {
    double b4, r1, r2, rl;
  };
  std::vector<Scores> per(predictions.size());
  parallel_for(predictions.size(), jobs, [&](std::size_t i) {
    auto cand = metrics::tokenize(predictions[i].text, mode);
    auto ref = metrics::tokenize(refs[i]->content.joined(), mode);
    per[i] = {metrics::bleu4(cand, std::span<const metrics::TokenSequence>(&ref, 1)),
              metrics::rouge_n(cand, ref, 1).f1, metrics::rouge_n(cand, ref, 2).f1, metrics::rouge_l(cand, ref).f1};
  });
  MetricRow row;
  row.model = std::move(model);
  row.n = per.size();
  if (per.empty()) return row;
  for (const auto& s : per) {
    row.bleu4 += s.b4;
    row.rouge1_f1 += s.r1;
    row.rouge2_f1 += s.r2;
    row.rougeL_f1 += s.rl;
  }
  double scale = 100.0 / static_cast<double>(per.size());
  row.bleu4 *= scale;
  row.rouge1_f1 *= scale;
  row.rouge2_f1 *= scale;
  row.rougeL_f1 *= scale;
  return row;
}

std::string serialize_metric_table(const MetricTable& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"model", r.model},
                    {"n", r.n},
                    {"bleu4", round2(r.bleu4)},
                    {"rouge1_f1", round2(r.rouge1_f1)},
                    {"rouge2_f1", round2(r.rouge2_f1)},
                    {"rougeL_f1", round2(r.rougeL_f1)}});
  }
  return ordered_json{{"rows", rows}}.dump(2) + "\n";
}

std::string format_metric_table(const MetricTable& table) {
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %6s %8s %8s %8s %8s\n", "model", "n", "B-4", "R-1", "R-2", "R-L");
  std::string out = line;
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof line, "%-24s %6zu %8s %8s %8s %8s\n", r.model.c_str(), r.n, fixed2(r.bleu4).c_str(),
                  fixed2(r.rouge1_f1).c_str(), fixed2(r.rouge2_f1).c_str(), fixed2(r.rougeL_f1).c_str());
    out += line;
  }
  return out;
}

}  // namespace ssbench::eval
