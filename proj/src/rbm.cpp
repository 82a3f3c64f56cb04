#include "lbm/rbm.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace lbm {

double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

RbmModel RbmModel::zeros(int n_visible, int n_hidden) {
  RbmModel m;
  m.n_visible = n_visible;
  m.n_hidden = n_hidden;
  m.weights.assign(static_cast<std::size_t>(n_visible) * n_hidden, 0.0);
  m.visible_bias.assign(n_visible, 0.0);
  m.hidden_bias.assign(n_hidden, 0.0);
  return m;
}

double RbmModel::preactivation(int j, const Assignment& x) const {
  double pre = hidden_bias[j];
  for (int i = 0; i < n_visible; ++i)
    if (x.bit(i)) pre += w(i, j);
  return pre;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie strictly in (0, 1)");
}

CompiledRbm compile_entries(std::span<const WeightedClause> entries,
                            int var_count, double epsilon) {
  check_epsilon(epsilon);
  CompiledRbm out;
  out.model = RbmModel::zeros(var_count, static_cast<int>(entries.size()));
  out.model.epsilon = epsilon;
  for (int j = 0; j < static_cast<int>(entries.size()); ++j) {
    const auto& [weight, clause] = entries[j];
    if (!std::isfinite(weight))
      throw std::invalid_argument("clause weight must be finite");
    for (int t : clause.pos()) out.model.w(t, j) = weight;
    for (int k : clause.neg()) out.model.w(k, j) = -weight;
    out.model.hidden_bias[j] =
        weight * (-static_cast<double>(clause.pos().size()) + epsilon);
  }
  out.clause_map.assign(entries.begin(), entries.end());
  return out;
}

}  // namespace

CompiledRbm compile(const ClauseSet& cs, double epsilon, double default_weight) {
  std::vector<WeightedClause> entries;
  entries.reserve(cs.size());
  for (const Clause& c : cs.clauses()) entries.push_back({default_weight, c});
  return compile_entries(entries, cs.var_count(), epsilon);
}

CompiledRbm compile(const WeightedClauseSet& wcs, double epsilon) {
  return compile_entries(wcs.entries(), wcs.var_count(), epsilon);
}

double energy(const RbmModel& m, const Assignment& x,
              std::span<const std::uint8_t> h) {
  if (x.size() != m.n_visible ||
      static_cast<int>(h.size()) != m.n_hidden)
    throw std::invalid_argument("energy: dimension mismatch");
  double e = 0;
  for (int j = 0; j < m.n_hidden; ++j)
    if (h[j]) e -= m.preactivation(j, x);
  for (int i = 0; i < m.n_visible; ++i)
    if (x.bit(i)) e -= m.visible_bias[i];
  return e;
}

MinEnergy min_energy(const RbmModel& m, const Assignment& x) {
  if (x.size() != m.n_visible)
    throw std::invalid_argument("min_energy: dimension mismatch");
  MinEnergy out;
  out.h.assign(m.n_hidden, 0);
  for (int j = 0; j < m.n_hidden; ++j) {
    double pre = m.preactivation(j, x);
    if (pre > 0) {
      out.h[j] = 1;
      out.energy -= pre;
    }
  }
  for (int i = 0; i < m.n_visible; ++i)
    if (x.bit(i)) out.energy -= m.visible_bias[i];
  return out;
}

double free_energy(const RbmModel& m, const Assignment& x, double confidence) {
  if (confidence < 0)
    throw std::invalid_argument("confidence value must be non-negative");
  if (x.size() != m.n_visible)
    throw std::invalid_argument("free_energy: dimension mismatch");
  double f = 0;
  for (int j = 0; j < m.n_hidden; ++j)
    f -= softplus(confidence * m.preactivation(j, x));
  return f;
}

// ---------------------------------------------------------------------------
// Model files

void save_model(const CompiledRbm& m, std::ostream& os) {
  nlohmann::json j;
  j["n_visible"] = m.model.n_visible;
  j["n_hidden"] = m.model.n_hidden;
  j["epsilon"] = m.model.epsilon;
  j["temperature"] = m.model.temperature;
  j["weights"] = m.model.weights;
  j["visible_bias"] = m.model.visible_bias;
  j["hidden_bias"] = m.model.hidden_bias;
  if (!m.model.var_names.empty()) j["var_table"] = m.model.var_names;
  if (!m.clause_map.empty()) {
    nlohmann::json cm = nlohmann::json::array();
    for (const WeightedClause& wc : m.clause_map) {
      cm.push_back({{"weight", wc.weight},
                    {"pos", wc.clause.pos()},
                    {"neg", wc.clause.neg()}});
    }
    j["clause_map"] = std::move(cm);
  }
  os << j.dump(2) << "\n";
}

CompiledRbm load_model(std::istream& is) {
  nlohmann::json j = nlohmann::json::parse(is);
  CompiledRbm out;
  RbmModel& m = out.model;
  m.n_visible = j.at("n_visible").get<int>();
  m.n_hidden = j.at("n_hidden").get<int>();
  m.epsilon = j.at("epsilon").get<double>();
  m.temperature = j.at("temperature").get<double>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.visible_bias = j.at("visible_bias").get<std::vector<double>>();
  m.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
  if (j.contains("var_table"))
    m.var_names = j.at("var_table").get<std::vector<std::string>>();

  if (m.n_visible < 0 || m.n_hidden < 0 ||
      m.weights.size() !=
          static_cast<std::size_t>(m.n_visible) * static_cast<std::size_t>(m.n_hidden) ||
      m.visible_bias.size() != static_cast<std::size_t>(m.n_visible) ||
      m.hidden_bias.size() != static_cast<std::size_t>(m.n_hidden) ||
      (!m.var_names.empty() &&
       m.var_names.size() != static_cast<std::size_t>(m.n_visible)))
    throw std::invalid_argument("model file has inconsistent dimensions");

  if (j.contains("clause_map")) {
    for (const auto& e : j.at("clause_map")) {
      auto c = Clause::make(e.at("pos").get<std::vector<int>>(),
                            e.at("neg").get<std::vector<int>>());
      if (!c) throw std::invalid_argument("model file has a contradictory clause");
      out.clause_map.push_back({e.at("weight").get<double>(), std::move(*c)});
    }
  }
  return out;
}

void save_model_file(const CompiledRbm& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_model(m, os);
}

CompiledRbm load_model_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return load_model(is);
}

}  // namespace lbm
