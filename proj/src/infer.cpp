#include "lbm/infer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace lbm {

void Evidence::clamp(int var, bool value) {
  if (var < 0 || var >= n())
    throw std::out_of_range("evidence index out of range");
  values_[static_cast<std::size_t>(var)] = value ? 1 : 0;
}

int Evidence::clamped_count() const {
  int c = 0;
  for (auto v : values_) c += v >= 0;
  return c;
}

std::vector<int> Evidence::free_indices() const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i)
    if (values_[static_cast<std::size_t>(i)] < 0) out.push_back(i);
  return out;
}

void Evidence::apply(Assignment& a) const {
  for (int i = 0; i < n(); ++i)
    if (clamped(i)) a.set(i, value(i));
}

double acceptance_threshold(double confidence, double epsilon) {
  return -softplus(confidence * epsilon);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// In-place sweep with explicit temperature; h is scratch of size n_hidden.
void gibbs_sweep(const RbmModel& m, Assignment& x, const Evidence& ev,
                 double temperature, Rng& rng, std::vector<std::uint8_t>& h) {
  const double inv_tau = 1.0 / temperature;
  for (int j = 0; j < m.n_hidden; ++j)
    h[j] = rng.bernoulli(sigmoid(inv_tau * m.preactivation(j, x))) ? 1 : 0;
  for (int i = 0; i < m.n_visible; ++i) {
    if (ev.clamped(i)) continue;
    double act = m.visible_bias[i];
    for (int j = 0; j < m.n_hidden; ++j)
      if (h[j]) act += m.w(i, j);
    x.set(i, rng.bernoulli(sigmoid(inv_tau * act)));
  }
}

void validate(const RbmModel& m, const Evidence& ev) {
  if (ev.n() != m.n_visible)
    throw std::invalid_argument("evidence size does not match the model");
}

}  // namespace

Assignment gibbs_step(const RbmModel& m, const Assignment& x, const Evidence& ev,
                      Rng& rng) {
  validate(m, ev);
  if (x.size() != m.n_visible)
    throw std::invalid_argument("assignment size does not match the model");
  if (!(m.temperature > 0))
    throw std::invalid_argument("temperature must be positive");
  Assignment out = x;
  std::vector<std::uint8_t> h(static_cast<std::size_t>(m.n_hidden));
  gibbs_sweep(m, out, ev, m.temperature, rng, h);
  return out;
}

SampleLog search(const RbmModel& m, const Evidence& ev, const SamplerConfig& cfg,
                 const SampleObserver& observer) {
  validate(m, ev);
  if (cfg.chains < 1) throw std::invalid_argument("need at least one chain");
  if (!(cfg.temperature > 0))
    throw std::invalid_argument("temperature must be positive");
  if (cfg.confidence < 0)
    throw std::invalid_argument("confidence value must be non-negative");

  const auto t0 = std::chrono::steady_clock::now();
  const double threshold = acceptance_threshold(cfg.confidence, cfg.epsilon);
  const double tol = 1e-9;

  struct Chain {
    Assignment x;
    Rng rng;
  };
  std::vector<Chain> chains;
  chains.reserve(static_cast<std::size_t>(cfg.chains));
  std::vector<std::uint8_t> h(static_cast<std::size_t>(m.n_hidden));
  for (int c = 0; c < cfg.chains; ++c) {
    Chain chain{Assignment(m.n_visible), Rng(cfg.seed, static_cast<std::uint64_t>(c))};
    for (int i = 0; i < m.n_visible; ++i) chain.x.set(i, chain.rng.bernoulli(0.5));
    ev.apply(chain.x);
    for (std::uint64_t b = 0; b < cfg.burn_in; ++b)
      gibbs_sweep(m, chain.x, ev, cfg.temperature, chain.rng, h);
    chains.push_back(std::move(chain));
  }

  SampleLog log;
  std::unordered_set<Assignment, AssignmentHash> accepted;
  bool stop = false;
  while (!stop && log.samples_drawn < cfg.max_samples) {
    for (int c = 0; c < cfg.chains && log.samples_drawn < cfg.max_samples; ++c) {
      Chain& chain = chains[static_cast<std::size_t>(c)];
      gibbs_sweep(m, chain.x, ev, cfg.temperature, chain.rng, h);
      ++log.samples_drawn;

      const double f = free_energy(m, chain.x, cfg.confidence);
      const bool ok = f <= threshold + tol;
      bool newly = false;
      if (ok) newly = accepted.insert(chain.x).second;

      if (observer) {
        SampleEvent ev_out{log.samples_drawn, c, chain.x, f, ok, newly};
        if (!observer(ev_out)) {
          stop = true;
          break;
        }
      }
      if (cfg.target_accepted > 0 && accepted.size() >= cfg.target_accepted) {
        stop = true;
        break;
      }
    }
  }

  log.accepted.assign(accepted.begin(), accepted.end());
  std::sort(log.accepted.begin(), log.accepted.end());
  log.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return log;
}

std::vector<Ranked> rank_exact(const RbmModel& m, const Evidence& ev,
                               double confidence) {
  validate(m, ev);
  if (confidence < 0)
    throw std::invalid_argument("confidence value must be non-negative");
  const std::vector<int> free = ev.free_indices();
  if (free.size() > 20)
    throw GuardError("rank_exact over " + std::to_string(free.size()) +
                     " free variables exceeds the 20-variable enumeration guard");

  Assignment base(m.n_visible);
  ev.apply(base);

  std::vector<Ranked> out;
  const std::uint64_t total = std::uint64_t{1} << free.size();
  out.reserve(total);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Assignment x = base;
    for (std::size_t b = 0; b < free.size(); ++b)
      x.set(free[b], (mask >> (free.size() - 1 - b)) & 1u);
    // For learned models with visible biases the conditional includes the
    // bias term; compiled models have a = 0 so this reduces to the plain
    // hidden-unit free energy.
    double f = free_energy(m, x, confidence);
    for (int i = 0; i < m.n_visible; ++i)
      if (x.bit(i)) f -= confidence * m.visible_bias[i];
    out.push_back({std::move(x), 0.0, f});
  }

  double fmin = out.front().free_energy;
  for (const Ranked& r : out) fmin = std::min(fmin, r.free_energy);
  double z = 0;
  for (Ranked& r : out) {
    r.probability = std::exp(-(r.free_energy - fmin));
    z += r.probability;
  }
  for (Ranked& r : out) r.probability /= z;

  std::stable_sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.x < b.x;
  });
  return out;
}

}  // namespace lbm
