#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lbm/infer.hpp"
#include "lbm/rbm.hpp"

namespace lbm {

// One training example: the full visible vector (inputs and target bits at
// their variable-table positions).
struct LabeledExample {
  Assignment visible;
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 1;
  int batch_size = 16;
  int n_extra_hidden = 50;
  std::uint64_t seed = 1;
  double init_scale = 0.01;
  double epsilon = 0.5;  // compile margin for the knowledge block
};

// Compiles the knowledge base and appends n_extra_hidden randomly initialized
// hidden units (weights uniform in [-init_scale, init_scale], biases zero).
// All parameters, including the compiled block, are trainable afterwards.
// An empty knowledge base yields a purely random model.
RbmModel init_from_knowledge(const WeightedClauseSet& kb, const TrainConfig& cfg);

struct TrainResult {
  RbmModel model;
  std::vector<double> epoch_loss;  // mean -log p(y|x) per epoch, for monitoring
};

// Gradient ascent on log p(y|x) with the expectation over target states
// computed exactly by enumeration (targets are a handful of bits). Training
// is bit-reproducible given (seed, data, config).
TrainResult train_discriminative(RbmModel model,
                                 std::span<const LabeledExample> data,
                                 std::span<const int> targets,
                                 const TrainConfig& cfg);

struct Prediction {
  Assignment completion;  // full assignment with predicted target bits
  double probability = 0;

  bool target_bit(int var) const { return completion.bit(var); }
};

// Ranks the target-variable completions given the input bits (all non-target
// variables clamped); ties break toward all-false targets.
Prediction predict(const RbmModel& m, const Assignment& inputs,
                   std::span<const int> targets, double confidence);

// Fraction of rows whose targets are predicted exactly.
double accuracy(const RbmModel& m, std::span<const LabeledExample> rows,
                std::span<const int> targets, double confidence);

// CSV dataset with a header row naming the variables; target columns are
// flagged in a JSON sidecar: {"targets": ["y"]}.
struct Dataset {
  std::vector<LabeledExample> rows;
  VarTable vars;
  std::vector<int> targets;
};

Dataset load_dataset_csv(std::istream& data, std::istream& sidecar);
void save_dataset_csv(const Dataset& ds, std::ostream& data, std::ostream& sidecar);

}  // namespace lbm
