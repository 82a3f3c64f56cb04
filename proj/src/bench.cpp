#include "lbm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lbm {
namespace bench {

namespace {

void validate_mn(int M, int N) {
  if (M < 0) throw std::invalid_argument("M must be non-negative");
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (M + N > 62) throw std::invalid_argument("M + N too large");
}

void write_double(std::ostream& os, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

}  // namespace

VarTable class_var_table(int M, int N) {
  validate_mn(M, N);
  VarTable vt;
  for (int i = 1; i <= M + N; ++i) vt.intern("x" + std::to_string(i));
  return vt;
}

ClauseSet build_class_sdnf(int M, int N) {
  validate_mn(M, N);
  ClauseSet cs(M + N);
  for (int j = M + 1; j <= M + N; ++j) {
    std::vector<int> pos;
    pos.reserve(static_cast<std::size_t>(M) + 1);
    for (int i = 1; i <= M; ++i) pos.push_back(i - 1);
    pos.push_back(j - 1);
    std::vector<int> neg;
    for (int jp = j + 1; jp <= M + N; ++jp) neg.push_back(jp - 1);
    cs.add(Clause::make(std::move(pos), std::move(neg)));
  }
  cs.set_strict(true);
  return cs;
}

bool class_satisfies(int M, int N, const Assignment& a) {
  if (a.size() != M + N)
    throw std::invalid_argument("assignment size does not match M + N");
  for (int i = 0; i < M; ++i)
    if (!a.bit(i)) return false;
  for (int j = M; j < M + N; ++j)
    if (a.bit(j)) return true;
  return false;
}

std::uint64_t class_satisfying_count(int N) {
  return (std::uint64_t{1} << N) - 1;
}

CoverageReport run_coverage(int M, int N, const SamplerConfig& cfg, int runs,
                            std::uint64_t checkpoint_every) {
  validate_mn(M, N);
  if (runs < 1) throw std::invalid_argument("need at least one run");
  if (checkpoint_every < 1) checkpoint_every = 1;

  const CompiledRbm compiled = compile(build_class_sdnf(M, N), cfg.epsilon, 1.0);
  const std::uint64_t sat_total = class_satisfying_count(N);
  const Evidence no_evidence(M + N);

  CoverageReport report;
  report.M = M;
  report.N = N;
  report.runs = runs;

  for (int r = 0; r < runs; ++r) {
    SamplerConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);

    CoverageRun run;
    std::uint64_t found_sat = 0;
    std::uint64_t accepted_distinct = 0;
    const auto t0 = std::chrono::steady_clock::now();

    auto checkpoint_now = [&](std::uint64_t samples) {
      Checkpoint cp;
      cp.samples = samples;
      cp.accepted = accepted_distinct;
      cp.coverage = static_cast<double>(found_sat) / static_cast<double>(sat_total);
      cp.accuracy = accepted_distinct == 0
                        ? 1.0
                        : static_cast<double>(found_sat) /
                              static_cast<double>(accepted_distinct);
      cp.wall_time_sec =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      run.checkpoints.push_back(cp);
    };

    auto observer = [&](const SampleEvent& ev) {
      if (ev.newly_accepted) {
        ++accepted_distinct;
        if (class_satisfies(M, N, ev.x)) ++found_sat;
      }
      if (ev.index % checkpoint_every == 0) checkpoint_now(ev.index);
      return found_sat < sat_total;
    };

    SampleLog log = search(compiled.model, no_evidence, run_cfg, observer);
    if (run.checkpoints.empty() ||
        run.checkpoints.back().samples != log.samples_drawn)
      checkpoint_now(log.samples_drawn);

    run.accepted = std::move(log.accepted);
    run.samples_total = log.samples_drawn;
    run.full_coverage = found_sat == sat_total;
    report.per_run.push_back(std::move(run));
  }

  // Align runs on the checkpoint grid, carrying final values forward for
  // runs that stopped early.
  std::size_t grid = 0;
  for (const CoverageRun& run : report.per_run)
    grid = std::max(grid, run.checkpoints.size());
  for (std::size_t k = 0; k < grid; ++k) {
    Checkpoint mean, dev;
    std::vector<double> cov, acc;
    std::uint64_t samples = 0;
    for (const CoverageRun& run : report.per_run) {
      const Checkpoint& cp =
          run.checkpoints[std::min(k, run.checkpoints.size() - 1)];
      cov.push_back(cp.coverage);
      acc.push_back(cp.accuracy);
      samples = std::max(samples, cp.samples);
    }
    auto mean_of = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto std_of = [&](const std::vector<double>& v, double mu) {
      double s = 0;
      for (double x : v) s += (x - mu) * (x - mu);
      return std::sqrt(s / static_cast<double>(v.size()));
    };
    mean.samples = dev.samples = samples;
    mean.coverage = mean_of(cov);
    mean.accuracy = mean_of(acc);
    dev.coverage = std_of(cov, mean.coverage);
    dev.accuracy = std_of(acc, mean.accuracy);
    report.mean.push_back(mean);
    report.stddev.push_back(dev);
  }
  return report;
}

std::vector<TimingPoint> run_timing(int M, std::span<const int> n_values,
                                    const SamplerConfig& cfg, int runs,
                                    double timeout_sec) {
  std::vector<TimingPoint> points;
  for (int N : n_values) {
    validate_mn(M, N);
    const CompiledRbm compiled = compile(build_class_sdnf(M, N), cfg.epsilon, 1.0);
    const std::uint64_t sat_total = class_satisfying_count(N);
    const Evidence no_evidence(M + N);

    for (int r = 0; r < runs; ++r) {
      SamplerConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);

      std::uint64_t found_sat = 0;
      const auto t0 = std::chrono::steady_clock::now();
      bool timed_out = false;

      auto observer = [&](const SampleEvent& ev) {
        if (ev.newly_accepted && class_satisfies(M, N, ev.x)) ++found_sat;
        if (found_sat >= sat_total) return false;
        if (timeout_sec > 0 && (ev.index & 1023u) == 0) {
          double elapsed =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
          if (elapsed > timeout_sec) {
            timed_out = true;
            return false;
          }
        }
        return true;
      };

      SampleLog log = search(compiled.model, no_evidence, run_cfg, observer);
      TimingPoint p;
      p.M = M;
      p.N = N;
      p.run_id = r;
      p.samples = log.samples_drawn;
      p.seconds = log.wall_time_sec;
      p.censored = timed_out || found_sat < sat_total;
      points.push_back(p);
    }
  }
  return points;
}

void write_coverage_csv(const CoverageReport& report, std::ostream& os) {
  os << "run_id,samples,coverage,accuracy\n";
  for (int r = 0; r < report.runs; ++r) {
    for (const Checkpoint& cp : report.per_run[static_cast<std::size_t>(r)].checkpoints) {
      os << r << ',' << cp.samples << ',';
      write_double(os, cp.coverage);
      os << ',';
      write_double(os, cp.accuracy);
      os << '\n';
    }
  }
}

void write_timing_csv(std::span<const TimingPoint> points, std::ostream& os) {
  os << "M,N,run_id,seconds,censored\n";
  for (const TimingPoint& p : points) {
    os << p.M << ',' << p.N << ',' << p.run_id << ',';
    write_double(os, p.seconds);
    os << ',' << (p.censored ? 1 : 0) << '\n';
  }
}

}  // namespace bench
}  // namespace lbm
