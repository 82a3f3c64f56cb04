#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lbm/infer.hpp"
#include "lbm/normalize.hpp"

namespace lbm {
namespace bench {

// Formula family x1 & ... & xM & (x_{M+1} | ... | x_{M+N}) over M+N
// variables; exactly 2^N - 1 assignments satisfy it.
struct PipelineFormula {
  int conjoined = 0;  // M
  int disjoined = 0;  // N
};

// The strict DNF of the family: N clauses, clause j holding the M-variable
// prefix, x_j itself, and the negations of every disjunct above j. Variables
// are named x1..x_{M+N}.
ClauseSet build_class_sdnf(int M, int N);
VarTable class_var_table(int M, int N);

// Analytic satisfying-set membership: all-ones prefix and non-zero suffix.
// No enumeration, so coverage stays exact when 2^(M+N) is huge.
bool class_satisfies(int M, int N, const Assignment& a);
std::uint64_t class_satisfying_count(int N);

struct Checkpoint {
  std::uint64_t samples = 0;
  double coverage = 0;
  double accuracy = 1.0;  // 1.0 by convention while the accepted set is empty
  std::uint64_t accepted = 0;  // distinct accepted assignments so far
  double wall_time_sec = 0;
};

struct CoverageRun {
  std::vector<Checkpoint> checkpoints;
  std::vector<Assignment> accepted;  // distinct, sorted
  std::uint64_t samples_total = 0;
  bool full_coverage = false;
};

struct CoverageReport {
  int M = 0;
  int N = 0;
  int runs = 0;
  std::vector<CoverageRun> per_run;
  // Aggregates across runs on the checkpoint grid; runs that terminated early
  // carry their final values forward.
  std::vector<Checkpoint> mean;
  std::vector<Checkpoint> stddev;
};

// Compiles the family, then runs `search` with no evidence `runs` times
// (run r uses seed cfg.seed + r), recording coverage
// |accepted ∩ satisfying| / (2^N - 1) and accuracy |accepted ∩ satisfying| /
// |accepted| every `checkpoint_every` samples. Each run stops at full
// coverage or cfg.max_samples.
CoverageReport run_coverage(int M, int N, const SamplerConfig& cfg, int runs,
                            std::uint64_t checkpoint_every = 10'000);

struct TimingPoint {
  int M = 0;
  int N = 0;
  int run_id = 0;
  double seconds = 0;
  std::uint64_t samples = 0;
  bool censored = false;  // timed out / hit max_samples before full coverage
};

// Wall-clock time to full coverage for each N (runs repetitions each);
// points that exceed timeout_sec or cfg.max_samples are recorded censored.
std::vector<TimingPoint> run_timing(int M, std::span<const int> n_values,
                                    const SamplerConfig& cfg, int runs,
                                    double timeout_sec);

// Plot-ready long-format CSV output.
void write_coverage_csv(const CoverageReport& report, std::ostream& os);
void write_timing_csv(std::span<const TimingPoint> points, std::ostream& os);

}  // namespace bench
}  // namespace lbm
