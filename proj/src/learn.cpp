#include "lbm/learn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lbm {

RbmModel init_from_knowledge(const WeightedClauseSet& kb, const TrainConfig& cfg) {
  RbmModel base = kb.empty() ? RbmModel::zeros(kb.var_count(), 0)
                             : compile(kb, cfg.epsilon).model;
  if (cfg.n_extra_hidden < 0)
    throw std::invalid_argument("n_extra_hidden must be non-negative");
  if (cfg.n_extra_hidden == 0) return base;

  RbmModel out = RbmModel::zeros(base.n_visible, base.n_hidden + cfg.n_extra_hidden);
  out.epsilon = base.epsilon;
  out.temperature = base.temperature;
  out.var_names = base.var_names;
  for (int i = 0; i < base.n_visible; ++i)
    for (int j = 0; j < base.n_hidden; ++j) out.w(i, j) = base.w(i, j);
  std::copy(base.hidden_bias.begin(), base.hidden_bias.end(),
            out.hidden_bias.begin());

  Rng rng(cfg.seed);
  for (int j = base.n_hidden; j < out.n_hidden; ++j)
    for (int i = 0; i < out.n_visible; ++i)
      out.w(i, j) = (2.0 * rng.uniform01() - 1.0) * cfg.init_scale;
  return out;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_targets(const RbmModel& m, std::span<const int> targets) {
  if (targets.empty())
    throw std::invalid_argument("no designated target variable");
  for (int t : targets)
    if (t < 0 || t >= m.n_visible)
      throw std::out_of_range("target variable index out of range");
  if (targets.size() > 16)
    throw GuardError("target enumeration limited to 16 bits");
}

void set_target_bits(Assignment& v, std::span<const int> targets,
                     std::uint64_t state) {
  for (std::size_t b = 0; b < targets.size(); ++b)
    v.set(targets[b], (state >> (targets.size() - 1 - b)) & 1u);
}

}  // namespace

TrainResult train_discriminative(RbmModel model,
                                 std::span<const LabeledExample> data,
                                 std::span<const int> targets,
                                 const TrainConfig& cfg) {
  check_targets(model, targets);
  if (data.empty()) throw std::invalid_argument("empty training data");
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(cfg.learning_rate >= 0))
    throw std::invalid_argument("learning rate must be non-negative");
  for (const LabeledExample& ex : data)
    if (ex.visible.size() != model.n_visible)
      throw std::invalid_argument("example size does not match the model");

  const int n_vis = model.n_visible;
  const int n_hid = model.n_hidden;
  const std::uint64_t n_states = std::uint64_t{1} << targets.size();
  const int batch_size = std::max(1, cfg.batch_size);

  Rng rng(cfg.seed, 0x1ea51eull);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  std::vector<double> grad_w(model.weights.size());
  std::vector<double> grad_a(static_cast<std::size_t>(n_vis));
  std::vector<double> grad_b(static_cast<std::size_t>(n_hid));
  std::vector<double> scores(n_states);
  std::vector<double> probs(n_states);
  std::vector<double> sig(static_cast<std::size_t>(n_hid) * n_states);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own generator; keeps epochs reproducible.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);

    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_a.begin(), grad_a.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);

      for (std::size_t o = start; o < stop; ++o) {
        const LabeledExample& ex = data[order[o]];
        Assignment v = ex.visible;
        std::uint64_t true_state = 0;
        for (int t : targets) true_state = (true_state << 1) | (ex.visible.bit(t) ? 1 : 0);

        // Score every target state: G(v) = a.v + sum_j softplus(pre_j(v)).
        for (std::uint64_t s = 0; s < n_states; ++s) {
          set_target_bits(v, targets, s);
          double g = 0;
          for (int i = 0; i < n_vis; ++i)
            if (v.bit(i)) g += model.visible_bias[i];
          for (int j = 0; j < n_hid; ++j) {
            double pre = model.preactivation(j, v);
            g += softplus(pre);
            sig[static_cast<std::size_t>(j) * n_states + s] = sigmoid(pre);
          }
          scores[s] = g;
        }
        const double gmax = *std::max_element(scores.begin(), scores.end());
        double z = 0;
        for (std::uint64_t s = 0; s < n_states; ++s) {
          probs[s] = std::exp(scores[s] - gmax);
          z += probs[s];
        }
        for (std::uint64_t s = 0; s < n_states; ++s) probs[s] /= z;
        loss_sum += -(scores[true_state] - gmax - std::log(z));

        // d log p / d theta = dG(true)/d theta - E_{s~p}[dG(s)/d theta].
        for (std::uint64_t s = 0; s < n_states; ++s) {
          const double coeff = (s == true_state ? 1.0 : 0.0) - probs[s];
          if (coeff == 0.0) continue;
          set_target_bits(v, targets, s);
          for (int i = 0; i < n_vis; ++i)
            if (v.bit(i)) grad_a[static_cast<std::size_t>(i)] += coeff;
          for (int j = 0; j < n_hid; ++j) {
            const double sj = sig[static_cast<std::size_t>(j) * n_states + s];
            grad_b[static_cast<std::size_t>(j)] += coeff * sj;
            for (int i = 0; i < n_vis; ++i)
              if (v.bit(i)) grad_w[static_cast<std::size_t>(i) * n_hid + j] += coeff * sj;
          }
        }
      }

      if (cfg.learning_rate == 0) continue;
      const double step = cfg.learning_rate / static_cast<double>(stop - start);
      for (std::size_t k = 0; k < model.weights.size(); ++k)
        model.weights[k] += step * grad_w[k];
      for (int i = 0; i < n_vis; ++i) model.visible_bias[i] += step * grad_a[i];
      for (int j = 0; j < n_hid; ++j) model.hidden_bias[j] += step * grad_b[j];
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(data.size()));
  }

  result.model = std::move(model);
  return result;
}

Prediction predict(const RbmModel& m, const Assignment& inputs,
                   std::span<const int> targets, double confidence) {
  check_targets(m, targets);
  if (inputs.size() != m.n_visible)
    throw std::invalid_argument("input size does not match the model");
  Evidence ev(m.n_visible);
  for (int i = 0; i < m.n_visible; ++i)
    if (std::find(targets.begin(), targets.end(), i) == targets.end())
      ev.clamp(i, inputs.bit(i));
  auto ranked = rank_exact(m, ev, confidence);
  return {ranked.front().x, ranked.front().probability};
}

double accuracy(const RbmModel& m, std::span<const LabeledExample> rows,
                std::span<const int> targets, double confidence) {
  if (rows.empty()) return 0;
  int hits = 0;
  for (const LabeledExample& ex : rows) {
    Prediction p = predict(m, ex.visible, targets, confidence);
    bool ok = true;
    for (int t : targets)
      if (p.completion.bit(t) != ex.visible.bit(t)) {
        ok = false;
        break;
      }
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

// ---------------------------------------------------------------------------
// Dataset files

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{}
                                         : field.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

Dataset load_dataset_csv(std::istream& data, std::istream& sidecar) {
  Dataset ds;
  std::string line;
  if (!std::getline(data, line))
    throw ParseError("dataset is empty (missing header row)", 0, 1);
  for (const std::string& name : split_csv_line(line)) ds.vars.intern(name);

  int line_no = 1;
  while (std::getline(data, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != ds.vars.size())
      throw ParseError("row has " + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(ds.vars.size()),
                       0, line_no);
    Assignment row(ds.vars.size());
    for (int i = 0; i < ds.vars.size(); ++i) {
      if (fields[i] == "0") row.set(i, false);
      else if (fields[i] == "1") row.set(i, true);
      else
        throw ParseError("expected 0 or 1, got '" + fields[i] + "'", 0, line_no);
    }
    ds.rows.push_back({std::move(row)});
  }

  nlohmann::json j = nlohmann::json::parse(sidecar);
  for (const auto& name : j.at("targets")) {
    auto idx = ds.vars.find(name.get<std::string>());
    if (!idx)
      throw ParseError("sidecar target '" + name.get<std::string>() +
                           "' is not a dataset column",
                       0);
    ds.targets.push_back(*idx);
  }
  if (ds.targets.empty()) throw ParseError("sidecar declares no targets", 0);
  return ds;
}

void save_dataset_csv(const Dataset& ds, std::ostream& data, std::ostream& sidecar) {
  for (int i = 0; i < ds.vars.size(); ++i)
    data << (i ? "," : "") << ds.vars.name(i);
  data << "\n";
  for (const LabeledExample& ex : ds.rows) {
    for (int i = 0; i < ds.vars.size(); ++i)
      data << (i ? "," : "") << (ex.visible.bit(i) ? 1 : 0);
    data << "\n";
  }
  nlohmann::json j;
  j["targets"] = nlohmann::json::array();
  for (int t : ds.targets) j["targets"].push_back(ds.vars.name(t));
  sidecar << j.dump(2) << "\n";
}

}  // namespace lbm
