#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lbm/clause.hpp"
#include "lbm/formula.hpp"

namespace lbm {

// Restricted Boltzmann Machine parameters. E(x,h) = -sum_ij w_ij x_i h_j
// - sum_i a_i x_i - sum_j b_j h_j, with Boltzmann distribution
// p(x,h) = exp(-E/temperature)/Z.
struct RbmModel {
  int n_visible = 0;
  int n_hidden = 0;
  std::vector<double> weights;       // row-major, [i * n_hidden + j]
  std::vector<double> visible_bias;  // a_i
  std::vector<double> hidden_bias;   // b_j
  double epsilon = 0.5;
  double temperature = 1.0;
  std::vector<std::string> var_names;  // optional, size n_visible when present

  double w(int i, int j) const { return weights[static_cast<std::size_t>(i) * n_hidden + j]; }
  double& w(int i, int j) { return weights[static_cast<std::size_t>(i) * n_hidden + j]; }

  // sum_i w_ij x_i + b_j
  double preactivation(int j, const Assignment& x) const;

  static RbmModel zeros(int n_visible, int n_hidden);
};

// A model compiled from a clause set, remembering which clause (and weight)
// each hidden unit encodes.
struct CompiledRbm {
  RbmModel model;
  std::vector<WeightedClause> clause_map;  // size model.n_hidden for compiled units
};

// One hidden unit per clause: w_tj = w', w_kj = -w', b_j = w'(-|S_T_j| + e),
// visible biases zero. An empty clause set compiles to a zero-hidden model
// (energy identically zero, i.e. an unsatisfiable source formula).
CompiledRbm compile(const ClauseSet& cs, double epsilon = 0.5,
                    double default_weight = 1.0);
CompiledRbm compile(const WeightedClauseSet& wcs, double epsilon = 0.5);

double energy(const RbmModel& m, const Assignment& x,
              std::span<const std::uint8_t> h);

struct MinEnergy {
  double energy = 0;
  std::vector<std::uint8_t> h;  // the minimizing hidden vector
};

// min over h of E(x, h); decomposes per hidden unit (h_j = 1 iff its
// pre-activation is positive). For a compiled model this equals
// -epsilon * (weighted count of satisfied clauses).
MinEnergy min_energy(const RbmModel& m, const Assignment& x);

// F(x) = sum_j -log(1 + exp(c * (sum_i w_ij x_i + b_j))); the confidence
// value c >= 0 scales each hidden unit's pre-activation.
double free_energy(const RbmModel& m, const Assignment& x, double confidence);

// Numerically stable log(1 + exp(z)).
double softplus(double z);

// JSON model file, round-trip exact (shortest round-trip double encoding).
void save_model(const CompiledRbm& m, std::ostream& os);
CompiledRbm load_model(std::istream& is);
void save_model_file(const CompiledRbm& m, const std::string& path);
CompiledRbm load_model_file(const std::string& path);

}  // namespace lbm
