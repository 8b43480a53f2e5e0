// Regenerates tests/fixtures/mock_llm.jsonl by running the offline workloads
// against the synthetic model and recording every reply.
//
//   record_fixtures <fixtures-dir>

#include <cstdio>

#include "ssbench/config.hpp"
#include "ssbench/eval.hpp"
#include "ssbench/starsow.hpp"
#include "synthetic_llm.hpp"

using namespace ssbench;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: record_fixtures <fixtures-dir>\n");
    return 1;
  }
  std::filesystem::path dir = argv[1];
  try {
    auto cfg = Config::load(dir / "tiny.toml");
    auto synthetic = testing::synthetic_backend();
    llm::RecordingBackend recorder(*synthetic);

    auto pc = starsow::PipelineConfig::from(cfg);
    auto seed = corpus::load_corpus(dir / "seed_corpus.jsonl");
    auto grown = starsow::run_pipeline(seed, pc, recorder);

    auto subset = corpus::load_corpus(dir / "judge_subset.jsonl");
    eval::judge_pairs(subset.pairs(), {eval::kAllDimensions.begin(), eval::kAllDimensions.end()}, recorder, 2);

    auto compliant = corpus::load_corpus(dir / "compliant.jsonl");
    auto sample = eval::sample_pairs(compliant, 10, pc.rng_seed);
    eval::regenerate_and_rate(sample, compliant, recorder, pc);

    recorder.save(dir / "mock_llm.jsonl");
    std::printf("%zu replies recorded; grow produced %zu generated stories\n", recorder.size(),
                grown.pool.stories.size());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "record_fixtures: %s\n", e.what());
    return 2;
  }
  return 0;
}
