// Command-line front end: compile knowledge bases to model files, search for
// satisfying assignments by Gibbs sampling, rank completions exactly,
// enumerate truth/energy tables, train from CSV datasets, and run the
// coverage/timing benchmarks. Machine-readable output (CSV/JSON) goes to
// stdout, human summaries to stderr.
//
// Exit codes: 0 success, 1 usage/parse error, 2 no result, 3 guard exceeded.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbm/bench.hpp"
#include "lbm/infer.hpp"
#include "lbm/learn.hpp"
#include "lbm/normalize.hpp"
#include "lbm/rbm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoResult = 2;
constexpr int kExitGuard = 3;

bool log_enabled() {
  const char* v = std::getenv("LBM_LOG");
  return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// "n=1,q=0" -> Evidence over the model's variable table.
lbm::Evidence parse_clamp(const std::string& spec, const lbm::RbmModel& model) {
  lbm::VarTable vt;
  for (const std::string& name : model.var_names) vt.intern(name);
  lbm::Evidence ev(model.n_visible);
  if (spec.empty()) return ev;

  std::istringstream is(spec);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw lbm::ParseError("malformed clamp '" + item + "' (expected name=0|1)", 0);
    std::string name = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    auto idx = vt.find(name);
    if (!idx) {
      // Models without a variable table accept bare indices.
      if (!model.var_names.empty())
        throw lbm::ParseError("unknown variable '" + name + "' in clamp", 0);
      int i = -1;
      auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), i);
      if (ec != std::errc{} || p != name.data() + name.size())
        throw lbm::ParseError("unknown variable '" + name + "' in clamp", 0);
      idx = i;
    }
    if (value == "0") ev.clamp(*idx, false);
    else if (value == "1") ev.clamp(*idx, true);
    else
      throw lbm::ParseError("clamp value for '" + name + "' must be 0 or 1", 0);
  }
  return ev;
}

void print_header(const lbm::RbmModel& model, std::ostream& os,
                  const char* extra) {
  for (int i = 0; i < model.n_visible; ++i) {
    if (i) os << ',';
    os << (model.var_names.empty() ? ("x" + std::to_string(i))
                                   : model.var_names[i]);
  }
  os << extra << '\n';
}

struct CompileArgs {
  std::string kb_path;
  std::string out_path;
  double epsilon = 0.5;
  double default_weight = 1.0;
};

int cmd_compile(const CompileArgs& args) {
  lbm::KnowledgeBase kb = lbm::parse_kb(read_file(args.kb_path));
  if (kb.rules.empty()) {
    std::cerr << "error: no rules in '" << args.kb_path << "'\n";
    return kExitUsage;
  }
  std::vector<std::pair<double, lbm::ClauseSet>> sets;
  for (const lbm::KbRule& rule : kb.rules) {
    sets.emplace_back(rule.weight.value_or(args.default_weight),
                      lbm::to_sdnf(rule.formula, kb.vars.size()));
  }
  lbm::WeightedClauseSet merged = lbm::merge_weighted(sets);
  lbm::CompiledRbm compiled = lbm::compile(merged, args.epsilon);
  compiled.model.var_names = kb.vars.names();
  lbm::save_model_file(compiled, args.out_path);

  std::size_t raw = 0;
  for (const auto& [w, cs] : sets) raw += cs.size();
  std::cerr << "compiled " << kb.rules.size() << " rules -> " << raw
            << " clauses, " << merged.size() << " after merging; model: "
            << compiled.model.n_visible << " visible x "
            << compiled.model.n_hidden << " hidden, epsilon "
            << fmt(args.epsilon) << " -> " << args.out_path << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string model_path;
  std::string clamp;
  std::string stream_log;
  lbm::SamplerConfig cfg;
  bool epsilon_set = false;
};

int cmd_solve(const SolveArgs& args) {
  lbm::CompiledRbm compiled = lbm::load_model_file(args.model_path);
  lbm::SamplerConfig cfg = args.cfg;
  if (!args.epsilon_set) cfg.epsilon = compiled.model.epsilon;
  lbm::Evidence ev = parse_clamp(args.clamp, compiled.model);
  std::cerr << "seed: " << cfg.seed << "\n";

  std::ofstream stream;
  lbm::SampleObserver observer;
  if (!args.stream_log.empty()) {
    stream.open(args.stream_log);
    if (!stream)
      throw std::runtime_error("cannot open '" + args.stream_log + "' for writing");
    stream << "sample_index,chain_id,free_energy,accepted_flag,coverage_so_far\n";
    std::uint64_t distinct = 0;
    observer = [&stream, &cfg, distinct](const lbm::SampleEvent& e) mutable {
      if (e.newly_accepted) ++distinct;
      // coverage_so_far: fraction of the requested target when one is set,
      // otherwise the distinct-accept count.
      double cov = cfg.target_accepted
                       ? static_cast<double>(distinct) /
                             static_cast<double>(cfg.target_accepted)
                       : static_cast<double>(distinct);
      stream << e.index << ',' << e.chain << ',' << fmt(e.free_energy) << ','
             << (e.accepted ? 1 : 0) << ',' << fmt(cov) << '\n';
      return true;
    };
  }

  lbm::SampleLog log = lbm::search(compiled.model, ev, cfg, observer);
  print_header(compiled.model, std::cout, ",free_energy");
  for (const lbm::Assignment& a : log.accepted) {
    for (int i = 0; i < a.size(); ++i) std::cout << (i ? "," : "") << (a.bit(i) ? 1 : 0);
    std::cout << ',' << fmt(lbm::free_energy(compiled.model, a, cfg.confidence))
              << '\n';
  }
  std::cerr << "samples: " << log.samples_drawn << ", accepted: "
            << log.accepted.size() << ", wall: " << fmt(log.wall_time_sec)
            << " s\n";
  return log.accepted.empty() ? kExitNoResult : kExitOk;
}

struct RankArgs {
  std::string model_path;
  std::string clamp;
  double confidence = 5.0;
  int top = 0;  // 0 = all
};

int cmd_rank(const RankArgs& args) {
  lbm::CompiledRbm compiled = lbm::load_model_file(args.model_path);
  lbm::Evidence ev = parse_clamp(args.clamp, compiled.model);
  auto ranked = lbm::rank_exact(compiled.model, ev, args.confidence);
  print_header(compiled.model, std::cout, ",free_energy,probability");
  int limit = args.top > 0 ? args.top : static_cast<int>(ranked.size());
  for (int r = 0; r < limit && r < static_cast<int>(ranked.size()); ++r) {
    const lbm::Ranked& row = ranked[static_cast<std::size_t>(r)];
    for (int i = 0; i < row.x.size(); ++i)
      std::cout << (i ? "," : "") << (row.x.bit(i) ? 1 : 0);
    std::cout << ',' << fmt(row.free_energy) << ',' << fmt(row.probability)
              << '\n';
  }
  return kExitOk;
}

struct EnumerateArgs {
  std::string formula_path;
  std::string model_path;
  std::string by = "none";
  double epsilon = 0.5;
  double confidence = 5.0;
  bool check = false;
};

int cmd_enumerate(const EnumerateArgs& args) {
  std::optional<lbm::Formula> formula;
  lbm::VarTable vars;
  if (!args.formula_path.empty()) {
    std::string text = read_file(args.formula_path);
    // The file holds one formula; comment lines are stripped.
    std::string joined;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      joined += line;
      joined += ' ';
    }
    formula = lbm::parse(joined, vars);
  }

  lbm::CompiledRbm compiled;
  if (!args.model_path.empty()) {
    compiled = lbm::load_model_file(args.model_path);
    if (formula && compiled.model.n_visible != vars.size())
      throw std::invalid_argument(
          "model and formula disagree on the variable count");
  } else {
    if (!formula) {
      std::cerr << "error: enumerate needs a formula file and/or --model\n";
      return kExitUsage;
    }
    compiled = lbm::compile(lbm::to_sdnf(*formula, vars.size()), args.epsilon);
    compiled.model.var_names = vars.names();
  }
  const lbm::RbmModel& model = compiled.model;
  if (model.n_visible > 20)
    throw lbm::GuardError("enumerate is limited to 20 variables");

  struct Row {
    lbm::Assignment x;
    int truth = -1;
    double min_e = 0;
    double free_e = 0;
  };
  std::vector<Row> rows;
  for (std::uint64_t ix = 0; ix < (std::uint64_t{1} << model.n_visible); ++ix) {
    Row row{lbm::Assignment::from_index(ix, model.n_visible)};
    if (formula) row.truth = lbm::evaluate(*formula, row.x) ? 1 : 0;
    row.min_e = lbm::min_energy(model, row.x).energy;
    row.free_e = lbm::free_energy(model, row.x, args.confidence);
    rows.push_back(std::move(row));
  }

  if (args.by == "truth") {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.truth > b.truth; });
  } else if (args.by == "energy") {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.min_e < b.min_e; });
  } else if (args.by == "free-energy") {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.free_e < b.free_e; });
  }

  print_header(model, std::cout,
               formula ? ",truth,min_energy,free_energy"
                       : ",min_energy,free_energy");
  for (const Row& row : rows) {
    for (int i = 0; i < row.x.size(); ++i)
      std::cout << (i ? "," : "") << (row.x.bit(i) ? 1 : 0);
    if (formula) std::cout << ',' << row.truth;
    std::cout << ',' << fmt(row.min_e) << ',' << fmt(row.free_e) << '\n';
  }

  if (args.check) {
    if (!formula || args.model_path.empty()) {
      std::cerr << "error: --check needs both a formula file and --model\n";
      return kExitUsage;
    }
    int mismatches = 0;
    for (const Row& row : rows) {
      double implied = -row.min_e / model.epsilon;
      if (std::abs(implied - row.truth) > 1e-9) ++mismatches;
    }
    std::cerr << "mismatches: " << mismatches << "\n";
    if (mismatches > 0) return kExitNoResult;
  }
  return kExitOk;
}

struct TrainArgs {
  std::string data_path;
  std::string sidecar_path;
  std::string kb_path;
  std::string out_path;
  lbm::TrainConfig cfg;
  double confidence = 5.0;
};

int cmd_train(const TrainArgs& args) {
  std::ifstream data(args.data_path);
  if (!data) throw std::runtime_error("cannot open '" + args.data_path + "'");
  std::ifstream sidecar(args.sidecar_path);
  if (!sidecar) throw std::runtime_error("cannot open '" + args.sidecar_path + "'");
  lbm::Dataset ds = lbm::load_dataset_csv(data, sidecar);

  lbm::WeightedClauseSet kb_clauses(ds.vars.size());
  if (!args.kb_path.empty()) {
    std::vector<lbm::KbRule> rules = lbm::parse_kb(read_file(args.kb_path), ds.vars);
    if (ds.rows.empty() || ds.rows.front().visible.size() != ds.vars.size())
      throw std::invalid_argument(
          "knowledge base introduces variables missing from the dataset");
    std::vector<std::pair<double, lbm::ClauseSet>> sets;
    for (const lbm::KbRule& rule : rules)
      sets.emplace_back(rule.weight.value_or(1.0),
                        lbm::to_sdnf(rule.formula, ds.vars.size()));
    kb_clauses = lbm::merge_weighted(sets);
  }

  lbm::RbmModel model = lbm::init_from_knowledge(kb_clauses, args.cfg);
  model.var_names = ds.vars.names();
  lbm::TrainResult result =
      lbm::train_discriminative(std::move(model), ds.rows, ds.targets, args.cfg);

  if (log_enabled()) {
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
      std::cerr << "epoch " << e + 1 << ": loss " << fmt(result.epoch_loss[e])
                << "\n";
  }
  double acc = lbm::accuracy(result.model, ds.rows, ds.targets, args.confidence);
  std::cerr << "seed: " << args.cfg.seed << "\n";
  std::cerr << "train accuracy: " << fmt(acc) << " (" << ds.rows.size()
            << " examples, " << result.model.n_hidden << " hidden units)\n";

  lbm::CompiledRbm out;
  out.model = std::move(result.model);
  lbm::save_model_file(out, args.out_path);
  return kExitOk;
}

struct BenchArgs {
  int M = 8;
  int N = 4;
  int runs = 10;
  std::uint64_t checkpoint_every = 10'000;
  std::string coverage_out;
  std::string timing_out;
  std::vector<int> timing_n;
  double timeout_sec = 60.0;
  bool full_scale = false;
  lbm::SamplerConfig cfg;
};

int cmd_bench(const BenchArgs& args) {
  if (!args.full_scale && (args.M > 12 || args.N > 6)) {
    std::cerr << "error: M=" << args.M << ", N=" << args.N
              << " is a large-scale run; pass --full-scale to allow it\n";
    return kExitUsage;
  }
  std::cerr << "seed: " << args.cfg.seed << "\n";

  if (!args.timing_n.empty()) {
    auto points = lbm::bench::run_timing(args.M, args.timing_n, args.cfg,
                                         args.runs, args.timeout_sec);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!args.timing_out.empty()) {
      file.open(args.timing_out);
      if (!file)
        throw std::runtime_error("cannot open '" + args.timing_out + "'");
      os = &file;
    }
    lbm::bench::write_timing_csv(points, *os);
    return kExitOk;
  }

  auto report =
      lbm::bench::run_coverage(args.M, args.N, args.cfg, args.runs,
                               args.checkpoint_every);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!args.coverage_out.empty()) {
    file.open(args.coverage_out);
    if (!file)
      throw std::runtime_error("cannot open '" + args.coverage_out + "'");
    os = &file;
  }
  lbm::bench::write_coverage_csv(report, *os);

  int full = 0;
  std::uint64_t max_samples_used = 0;
  for (const auto& run : report.per_run) {
    full += run.full_coverage;
    max_samples_used = std::max(max_samples_used, run.samples_total);
  }
  std::cerr << "full coverage in " << full << "/" << report.runs << " runs\n";
  const double space = std::pow(2.0, args.M + args.N);
  const double ratio = static_cast<double>(max_samples_used) / space;
  std::cerr << "sample/search-space ratio at termination: " << fmt(ratio * 100)
            << "%\n";
  if (args.full_scale && full == report.runs && ratio < 0.05)
    std::cerr << "full-scale soft check: ratio below 5% (ok)\n";
  return full > 0 ? kExitOk : kExitNoResult;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propositional reasoning with compiled restricted Boltzmann machines"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile_cmd =
      app.add_subcommand("compile", "Compile a knowledge-base file to a model");
  compile_cmd->add_option("kb", compile_args.kb_path, "Knowledge-base file")
      ->required();
  compile_cmd->add_option("--out", compile_args.out_path, "Output model JSON")
      ->required();
  compile_cmd->add_option("--epsilon", compile_args.epsilon,
                          "Compile margin in (0,1)");
  compile_cmd->add_option("--default-weight", compile_args.default_weight,
                          "Weight for unweighted rules");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand(
      "solve", "Search for satisfying assignments by Gibbs sampling");
  solve_cmd->add_option("model", solve_args.model_path, "Model JSON file")
      ->required();
  solve_cmd->add_option("--clamp", solve_args.clamp, "Evidence, e.g. \"n=1,q=0\"");
  solve_cmd->add_option("--max-samples", solve_args.cfg.max_samples, "Sample budget");
  solve_cmd->add_option("--seed", solve_args.cfg.seed, "RNG seed");
  solve_cmd->add_option("--confidence", solve_args.cfg.confidence,
                        "Acceptance confidence value c");
  auto* solve_eps = solve_cmd->add_option("--epsilon", solve_args.cfg.epsilon,
                                          "Acceptance margin (default: model's)");
  solve_cmd->add_option("--temperature", solve_args.cfg.temperature, "Gibbs temperature");
  solve_cmd->add_option("--chains", solve_args.cfg.chains, "Number of chains");
  solve_cmd->add_option("--burn-in", solve_args.cfg.burn_in, "Discarded sweeps per chain");
  solve_cmd->add_option("--target", solve_args.cfg.target_accepted,
                        "Stop after this many distinct accepts");
  solve_cmd->add_option("--log", solve_args.stream_log,
                        "Stream per-sample CSV to this file");

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand(
      "rank", "Exact conditional ranking of completions by free energy");
  rank_cmd->add_option("model", rank_args.model_path, "Model JSON file")->required();
  rank_cmd->add_option("--clamp", rank_args.clamp, "Evidence, e.g. \"n=1\"");
  rank_cmd->add_option("--confidence", rank_args.confidence, "Confidence value c");
  rank_cmd->add_option("--top", rank_args.top, "Print only the top K rows");

  EnumerateArgs enum_args;
  auto* enum_cmd = app.add_subcommand(
      "enumerate", "Truth/energy/free-energy table over all assignments");
  enum_cmd->add_option("formula", enum_args.formula_path, "Formula file");
  enum_cmd->add_option("--model", enum_args.model_path, "Model JSON file");
  enum_cmd->add_option("--by", enum_args.by, "Sort order")
      ->check(CLI::IsMember({"none", "truth", "energy", "free-energy"}));
  enum_cmd->add_option("--epsilon", enum_args.epsilon, "Compile margin");
  enum_cmd->add_option("--confidence", enum_args.confidence, "Confidence value c");
  enum_cmd->add_flag("--check", enum_args.check,
                     "Cross-check the model's min-energy column against the formula");

  TrainArgs train_args;
  auto* train_cmd =
      app.add_subcommand("train", "Discriminative training from a CSV dataset");
  train_cmd->add_option("--data", train_args.data_path, "Dataset CSV")->required();
  train_cmd->add_option("--sidecar", train_args.sidecar_path,
                        "Sidecar JSON flagging target columns")
      ->required();
  train_cmd->add_option("--out", train_args.out_path, "Output model JSON")->required();
  train_cmd->add_option("--kb", train_args.kb_path, "Optional knowledge base");
  train_cmd->add_option("--lr", train_args.cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "Training epochs");
  train_cmd->add_option("--batch", train_args.cfg.batch_size, "Batch size");
  train_cmd->add_option("--extra-hidden", train_args.cfg.n_extra_hidden,
                        "Randomly initialized hidden units to add");
  train_cmd->add_option("--seed", train_args.cfg.seed, "RNG seed");
  train_cmd->add_option("--init-scale", train_args.cfg.init_scale,
                        "Random init range");
  train_cmd->add_option("--epsilon", train_args.cfg.epsilon, "Compile margin");
  train_cmd->add_option("--confidence", train_args.confidence,
                        "Confidence value used for the accuracy report");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Coverage and timing benchmarks on the pipeline formula family");
  bench_cmd->add_option("--M", bench_args.M, "Conjoined variable count");
  bench_cmd->add_option("--N", bench_args.N, "Disjoined variable count");
  bench_cmd->add_option("--runs", bench_args.runs, "Repetitions");
  bench_cmd->add_option("--checkpoint-every", bench_args.checkpoint_every,
                        "Checkpoint cadence in samples");
  bench_cmd->add_option("--coverage-out", bench_args.coverage_out,
                        "Coverage CSV path (default stdout)");
  bench_cmd->add_option("--timing-n", bench_args.timing_n,
                        "Run the timing benchmark over these N values");
  bench_cmd->add_option("--timing-out", bench_args.timing_out,
                        "Timing CSV path (default stdout)");
  bench_cmd->add_option("--timeout", bench_args.timeout_sec,
                        "Per-point timing timeout in seconds");
  bench_cmd->add_flag("--full-scale", bench_args.full_scale,
                      "Allow large-scale runs (e.g. M=20..30, N=10)");
  bench_cmd->add_option("--max-samples", bench_args.cfg.max_samples, "Sample budget");
  bench_cmd->add_option("--seed", bench_args.cfg.seed, "RNG seed");
  bench_cmd->add_option("--confidence", bench_args.cfg.confidence, "Confidence value c");
  bench_cmd->add_option("--epsilon", bench_args.cfg.epsilon, "Acceptance margin");
  bench_cmd->add_option("--temperature", bench_args.cfg.temperature,
                        "Gibbs temperature");
  bench_cmd->add_option("--chains", bench_args.cfg.chains, "Chains per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (compile_cmd->parsed()) return cmd_compile(compile_args);
    if (solve_cmd->parsed()) {
      solve_args.epsilon_set = solve_eps->count() > 0;
      return cmd_solve(solve_args);
    }
    if (rank_cmd->parsed()) return cmd_rank(rank_args);
    if (enum_cmd->parsed()) return cmd_enumerate(enum_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const lbm::GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const lbm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
