#include <json.hpp>

#include "ssbench/corpus.hpp"
#include "ssbench/error.hpp"
#include "ssbench/util.hpp"

namespace ssbench::corpus {

SplitSizes split_sizes(std::size_t n) {
  // Integer round-half-up of 0.8n and 0.1n.
  SplitSizes s;
  s.train = (8 * n + 5) / 10;
  s.validation = (n + 5) / 10;
  s.test = n - s.train - s.validation;
  return s;
}

SplitDataset split_dataset(const Corpus& corpus, std::uint64_t seed) {
  const std::size_t n = corpus.pairs().size();
  if (n < 10) {
    throw ValidationError("CorpusTooSmall", "splitting needs at least 10 pairs, corpus has " + std::to_string(n));
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& p : corpus.pairs()) ids.push_back(p.id);
  Rng rng(seed);
  shuffle_in_place(ids, rng);

  const SplitSizes sizes = split_sizes(n);
  SplitDataset out;
  out.seed = seed;
  auto begin = ids.begin();
  out.train.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.train));
  begin += static_cast<std::ptrdiff_t>(sizes.train);
  out.validation.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.validation));
  begin += static_cast<std::ptrdiff_t>(sizes.validation);
  out.test.assign(begin, ids.end());
  return out;
}

std::string serialize_split(const SplitDataset& split) {
  nlohmann::ordered_json j{{"seed", split.seed},
                           {"train", split.train},
                           {"validation", split.validation},
                           {"test", split.test}};
  return j.dump() + "\n";
}

SplitDataset parse_split(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    SplitDataset s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.train = j.at("train").get<std::vector<std::string>>();
    s.validation = j.at("validation").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("MalformedRecord", std::string("split manifest: ") + e.what());
  }
}

}  // namespace ssbench::corpus
