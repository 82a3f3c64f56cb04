#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lbm/formula.hpp"
#include "lbm/rbm.hpp"
#include "lbm/rng.hpp"

namespace lbm {

// Partition of the visible variables into clamped evidence (x_A, held fixed)
// and free variables (x_B, searched).
class Evidence {
 public:
  Evidence() = default;
  explicit Evidence(int n) : values_(static_cast<std::size_t>(n), -1) {}

  int n() const { return static_cast<int>(values_.size()); }
  void clamp(int var, bool value);
  bool clamped(int var) const { return values_[static_cast<std::size_t>(var)] >= 0; }
  bool value(int var) const { return values_[static_cast<std::size_t>(var)] == 1; }
  int clamped_count() const;
  std::vector<int> free_indices() const;

  // Forces the clamped bits of `a` to their evidence values.
  void apply(Assignment& a) const;

 private:
  std::vector<std::int8_t> values_;  // -1 free, 0/1 clamped
};

struct SamplerConfig {
  std::uint64_t seed = 1;
  std::uint64_t max_samples = 1'000'000;
  std::uint64_t burn_in = 0;           // per chain, samples discarded up front
  int chains = 1;
  double temperature = 1.0;            // tau for the Gibbs conditionals
  double confidence = 5.0;             // c in the acceptance free energy
  double epsilon = 0.5;                // acceptance margin
  std::uint64_t target_accepted = 0;   // stop once this many distinct accepts (0 = off)
};

struct SampleLog {
  std::vector<Assignment> accepted;  // distinct, sorted lexicographically
  std::uint64_t samples_drawn = 0;
  double wall_time_sec = 0;
};

// Acceptance cut-off: -log(1 + exp(c * epsilon)). A sample is accepted as a
// satisfying assignment iff its free energy is <= this (+1e-9 slack).
double acceptance_threshold(double confidence, double epsilon);

// One block-Gibbs sweep: h_j ~ p(h_j | x) for all hidden units, then
// x_b ~ p(x_b | h) for free visible units only; clamped bits never change.
// Conditionals use the model's temperature.
Assignment gibbs_step(const RbmModel& m, const Assignment& x, const Evidence& ev,
                      Rng& rng);

struct SampleEvent {
  std::uint64_t index = 0;           // 1-based, across all chains
  int chain = 0;
  const Assignment& x;
  double free_energy = 0;
  bool accepted = false;
  bool newly_accepted = false;       // first time this assignment was accepted
};

// Return false to stop the search early.
using SampleObserver = std::function<bool(const SampleEvent&)>;

// Runs `chains` Gibbs chains round-robin from (seed, chain_id), testing every
// visited assignment against the acceptance threshold. Deterministic given
// the config. An empty accepted set is a valid result.
SampleLog search(const RbmModel& m, const Evidence& ev, const SamplerConfig& cfg,
                 const SampleObserver& observer = {});

struct Ranked {
  Assignment x;          // full assignment (clamped bits included)
  double probability = 0;
  double free_energy = 0;
};

// Exact conditional ranking: enumerates all completions of the free
// variables (guard: 20), P(x_B | x_A) = exp(-F)/sum exp(-F), descending by
// probability (ties broken toward the lexicographically smaller assignment).
std::vector<Ranked> rank_exact(const RbmModel& m, const Evidence& ev,
                               double confidence);

}  // namespace lbm
