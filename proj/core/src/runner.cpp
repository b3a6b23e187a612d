#include "mpslab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mpslab/quench.hpp"
#include "mpslab/table.hpp"
#include "mpslab/verify.hpp"

namespace mpslab {

namespace fs = std::filesystem;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// --------------------------------------------------------- state spec keys

namespace {

// "ghz(8)", "magic(4,0.25)", "pair_ring(8,2)", "all_up(6)", "basis(6,2,3)"
MatrixProductState parse_state_spec(const std::string& spec) {
  const auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')') {
    throw ValidationError("state spec '" + spec + "' must look like name(args)");
  }
  const std::string name = spec.substr(0, open);
  std::vector<double> args;
  {
    std::string body = spec.substr(open + 1, spec.size() - open - 2);
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        args.push_back(std::stod(tok));
      } catch (...) {
        throw ValidationError("state spec '" + spec + "': bad argument '" + tok + "'");
      }
    }
  }
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ValidationError("state spec '" + spec + "': wrong argument count");
    }
  };
  if (name == "ghz") {
    want(1, 2);
    return elementary_state(ElementaryKind::ghz, static_cast<int>(args[0]),
                            args.size() > 1 ? static_cast<int>(args[1]) : 2);
  }
  if (name == "all_up") {
    want(1, 2);
    return elementary_state(ElementaryKind::all_up, static_cast<int>(args[0]),
                            args.size() > 1 ? static_cast<int>(args[1]) : 2);
  }
  if (name == "basis") {
    want(3, 3);
    return elementary_state(ElementaryKind::basis, static_cast<int>(args[0]),
                            static_cast<int>(args[1]), static_cast<long long>(args[2]));
  }
  if (name == "magic") {
    want(2, 2);
    return magic_state(static_cast<int>(args[0]), args[1]);
  }
  if (name == "pair_ring") {
    want(2, 2);
    return pair_ring(static_cast<int>(args[0]), static_cast<int>(args[1]));
  }
  throw ValidationError("state spec '" + spec + "': unknown family '" + name + "'");
}

// state specs carry commas; CSV cells cannot
std::string csv_safe_label(std::string s) {
  for (char& ch : s) {
    if (ch == ',') ch = ';';
  }
  return s;
}

RenyiOrder parse_order(const std::string& s) {
  if (s == "inf" || s == "infinity") return RenyiOrder::min_entropy();
  try {
    return RenyiOrder{std::stod(s)};
  } catch (...) {
    throw ValidationError("bad Renyi order '" + s + "'");
  }
}

struct ExperimentContext {
  const ExperimentConfig& cfg;
  fs::path outdir;
  std::vector<std::string>* artifacts;
  long long violations = 0;
  std::string note;

  std::uint64_t seed() const { return cfg.seed.value_or(0); }

  void emit(Table& t) {
    const fs::path path = outdir / (t.name + ".csv");
    write_table(t, path);
    artifacts->push_back(path.filename().string());
    artifacts->push_back(path.stem().string() + ".json");
  }
};

using ExperimentRunner = std::function<void(ExperimentContext&)>;

struct ExperimentDef {
  ExperimentInfo info;
  std::function<void(const ExperimentConfig&, std::vector<ConfigError>&)> validate;
  ExperimentRunner run;
};

void no_validate(const ExperimentConfig&, std::vector<ConfigError>&) {}

// ------------------------------------------------------------- eps_bounds

void run_eps_bounds(ExperimentContext& ctx) {
  const auto states = ctx.cfg.get_string_list(
      "states", {"ghz(8)", "magic(4,0.25)", "pair_ring(8,2)"});
  const auto d_grid = ctx.cfg.get_int_list("D", {1, 2, 4, 8, 17});
  const int trials = static_cast<int>(ctx.cfg.get_int("trials", 1000));

  Table t;
  t.name = "eps_bounds";
  t.metadata = {{"experiment", "eps_bounds"}, {"seed", std::to_string(ctx.seed())},
                {"trials", std::to_string(trials)}};
  t.header = {"state", "D", "eps_max", "eps_sum", "upper_bound", "realized_error",
              "min_candidate_margin", "lower_violations", "upper_violations"};

  struct Row {
    std::vector<Table::Cell> cells;
    long long violations = 0;
  };
  std::vector<std::vector<Row>> results(states.size());

  parallel_for(static_cast<int>(states.size()), ctx.cfg.thread_count, [&](int si) {
    MatrixProductState psi = parse_state_spec(states[si]);
    auto spectra = schmidt_spectra(psi);
    std::vector<Row> rows;
    for (std::size_t di = 0; di < d_grid.size(); ++di) {
      const long D = d_grid[di];
      const std::uint64_t sub_seed = trial_seed(ctx.seed(), si * 1000 + di);
      BoundReport lower = verify_eps_lower(psi, D, trials, sub_seed);
      auto [phi, rep] = compress(psi, D);
      const long long upper_viol =
          rep.realized_error > rep.upper_bound + BoundReport::kViolationTol ? 1 : 0;
      Row row;
      row.cells = {csv_safe_label(states[si]),
                   static_cast<long long>(D),
                   lower.bound_value,
                   rep.eps_sum,
                   rep.upper_bound,
                   rep.realized_error,
                   lower.worst_margin,
                   static_cast<long long>(lower.violations),
                   upper_viol};
      row.violations = lower.violations + upper_viol;
      rows.push_back(std::move(row));
    }
    results[si] = std::move(rows);
  });

  for (const auto& rows : results) {
    for (const auto& row : rows) {
      t.add_row(row.cells);
      ctx.violations += row.violations;
    }
  }
  ctx.emit(t);
}

// -------------------------------------------------------------- audenaert

void run_audenaert(ExperimentContext& ctx) {
  const int trials = static_cast<int>(ctx.cfg.get_int("trials", 1000));
  const auto dims = ctx.cfg.get_int_list("dims", {2, 4, 8, 16});

  Table t;
  t.name = "audenaert";
  t.metadata = {{"experiment", "audenaert"}, {"seed", std::to_string(ctx.seed())}};
  t.header = {"dim", "trials", "violations", "worst_margin"};

  std::vector<BoundReport> reports(dims.size());
  parallel_for(static_cast<int>(dims.size()), ctx.cfg.thread_count, [&](int i) {
    reports[i] = verify_audenaert(trials, static_cast<int>(dims[i]),
                                  trial_seed(ctx.seed(), 7000 + i));
  });
  for (std::size_t i = 0; i < dims.size(); ++i) {
    t.add_row({dims[i], static_cast<long long>(reports[i].trials),
               static_cast<long long>(reports[i].violations), reports[i].worst_margin});
    ctx.violations += reports[i].violations;
  }
  ctx.emit(t);
}

// ----------------------------------------------------------- majorization

void run_majorization(ExperimentContext& ctx) {
  const auto d_grid = ctx.cfg.get_int_list("D", {2, 4});
  const auto eps_grid = ctx.cfg.get_real_list("eps", {0.05, 0.1, 0.3});
  const auto l_grid = ctx.cfg.get_int_list("L", {3, 6});
  const auto alpha_grid = ctx.cfg.get_real_list("alpha", {1.5, 2.0, 3.0});
  const int samples = static_cast<int>(ctx.cfg.get_int("samples", 10000));

  struct Combo {
    long D;
    double eps;
    int L;
    double alpha;
  };
  std::vector<Combo> combos;
  for (long D : d_grid) {
    for (double eps : eps_grid) {
      for (long L : l_grid) {
        for (double alpha : alpha_grid) {
          if (D < (1L << L)) combos.push_back({D, eps, static_cast<int>(L), alpha});
        }
      }
    }
  }
  std::vector<BoundReport> reports(combos.size());
  parallel_for(static_cast<int>(combos.size()), ctx.cfg.thread_count, [&](int i) {
    const auto& c = combos[i];
    reports[i] = verify_majorization(c.eps, c.D, c.L, RenyiOrder{c.alpha}, samples,
                                     trial_seed(ctx.seed(), 11000 + i));
  });

  Table t;
  t.name = "majorization";
  t.metadata = {{"experiment", "majorization"}, {"seed", std::to_string(ctx.seed())},
                {"samples", std::to_string(samples)}};
  t.header = {"D", "eps", "L", "alpha", "bound_bits", "violations", "worst_margin"};
  for (std::size_t i = 0; i < combos.size(); ++i) {
    t.add_row({static_cast<long long>(combos[i].D), combos[i].eps,
               static_cast<long long>(combos[i].L), combos[i].alpha, reports[i].bound_value,
               static_cast<long long>(reports[i].violations), reports[i].worst_margin});
    ctx.violations += reports[i].violations;
  }
  ctx.emit(t);
}

// ------------------------------------------------------- multiplicativity

void run_multiplicativity(ExperimentContext& ctx) {
  const auto k_grid = ctx.cfg.get_int_list("K", {2, 4, 8, 16, 32, 64, 128, 256});
  const int t_points = static_cast<int>(ctx.cfg.get_int("t_points", 16));

  Table t;
  t.name = "multiplicativity";
  t.metadata = {{"experiment", "multiplicativity"}};
  t.header = {"K", "T", "valid", "bound", "T_K", "margin"};
  for (long long K : k_grid) {
    for (int j = 1; j <= t_points; ++j) {
      const double T = std::sqrt(2.0 / static_cast<double>(K)) * j / t_points;
      BoundReport r = verify_multiplicativity(std::min(1.0, T), static_cast<int>(K));
      double t_k = 0.0;
      if (!r.note.empty() && r.note.rfind("T_K=", 0) == 0) t_k = std::stod(r.note.substr(4));
      t.add_row({K, T, std::string(to_string(r.satisfied)), r.bound_value, t_k, r.worst_margin});
      if (r.satisfied == BoundStatus::violated) ctx.violations += r.violations;
    }
  }
  ctx.emit(t);
}

// ----------------------------------------------------- product_structure

void run_product_structure(ExperimentContext& ctx) {
  const int trials = static_cast<int>(ctx.cfg.get_int("trials", 1000));
  const long D = ctx.cfg.get_int("D", 2);
  const std::string spec_a = ctx.cfg.get_string("state_a", "pair_ring(2,1)");
  const std::string spec_b = ctx.cfg.get_string("state_b", "pair_ring(2,1)");

  MatrixProductState a = parse_state_spec(spec_a);
  MatrixProductState b = parse_state_spec(spec_b);
  BoundReport r = verify_product_structure(a, b, D, trials, ctx.seed(), ctx.cfg.dense_threshold);

  Table t;
  t.name = "product_structure";
  t.metadata = {{"experiment", "product_structure"}, {"seed", std::to_string(ctx.seed())}};
  t.header = {"state_a", "state_b", "D", "trials", "violations", "worst_margin", "note"};
  t.add_row({csv_safe_label(spec_a), csv_safe_label(spec_b), static_cast<long long>(D),
             static_cast<long long>(r.trials), static_cast<long long>(r.violations),
             r.worst_margin, r.note});
  ctx.violations += r.violations;
  ctx.emit(t);
}

// inverse rules like "1/N" / "1/N^2" / explicit numbers
double apply_p_rule(const std::string& rule, int N) {
  if (rule == "1/N") return 1.0 / N;
  if (rule == "1/N^2") return 1.0 / (static_cast<double>(N) * N);
  try {
    return std::stod(rule);
  } catch (...) {
    throw ValidationError("bad p rule '" + rule + "'");
  }
}

int apply_nu_rule(const std::string& rule, int N, double kappa) {
  if (rule == "logN") return std::max(1, static_cast<int>(std::lround(std::log2(N))));
  if (rule == "N^kappa") return std::max(1, static_cast<int>(std::lround(std::pow(N, kappa))));
  try {
    return std::max(1, static_cast<int>(std::stol(rule)));
  } catch (...) {
    throw ValidationError("bad nu rule '" + rule + "'");
  }
}

// -------------------------------------------------------------- table1_scan

void run_table1_scan(ExperimentContext& ctx) {
  const std::string family = ctx.cfg.get_string("family", "magic");
  const auto n_grid = ctx.cfg.get_int_list("N", {2, 4, 6, 8, 10});
  const std::string p_rule = ctx.cfg.get_string("p_rule", "1/N");
  const std::string nu_rule = ctx.cfg.get_string("nu_rule", "logN");
  const double kappa = ctx.cfg.get_real("kappa", 0.5);
  const int copies = static_cast<int>(ctx.cfg.get_int("copies", 2));
  const auto alpha_strs =
      ctx.cfg.get_string_list("alpha", {"0", "0.25", "0.5", "1", "2", "inf"});
  const auto deltas = ctx.cfg.get_real_list("delta", {0.05, 0.1, 0.3, 0.58});
  const bool cache_states = ctx.cfg.get_bool("cache_states", true);

  std::vector<RenyiOrder> alphas;
  for (const auto& s : alpha_strs) alphas.push_back(parse_order(s));

  std::vector<FamilyParams> grid;
  for (long long n : n_grid) {
    FamilyParams fp;
    fp.N = static_cast<int>(n);
    fp.p = family == "pair_ring" ? 0.0 : apply_p_rule(p_rule, fp.N);
    fp.nu = family == "pair_ring" ? apply_nu_rule(nu_rule, fp.N, kappa) : 0;
    fp.kappa = kappa;
    fp.copies = copies;
    grid.push_back(fp);
  }

  std::vector<std::vector<ScalingRow>> per_delta(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), ctx.cfg.thread_count, [&](int i) {
    per_delta[i] = scaling_experiment(family, grid, alphas, deltas[i]);
  });

  Table t;
  t.name = "table1_" + family;
  t.metadata = {{"experiment", "table1_scan"}, {"family", family}};
  t.header = {"family", "N", "L", "alpha", "entropy_bits", "D_required", "delta", "skipped", "note"};
  long long skipped = 0;
  for (const auto& rows : per_delta) {
    for (const auto& row : rows) {
      t.add_row({row.family, static_cast<long long>(row.N), static_cast<long long>(row.L),
                 row.alpha, row.entropy_bits, row.D_required, row.delta_target,
                 static_cast<long long>(row.skipped ? 1 : 0), row.note});
      if (row.skipped) ++skipped;
    }
  }
  ctx.emit(t);
  if (skipped > 0) ctx.note = std::to_string(skipped) + " rows skipped (resource thresholds)";

  if (cache_states && family == "magic") {
    const fs::path cache = ctx.outdir / "cache";
    fs::create_directories(cache);
    for (const auto& fp : grid) {
      try {
        MatrixProductState m = magic_state(fp.N, fp.p);
        std::ostringstream name;
        name << "magic_N" << fp.N << ".mps";
        save_mps_file(m, (cache / name.str()).string());
        ctx.artifacts->push_back("cache/" + name.str());
      } catch (const ResourceLimitError&) {
        // skipped rows already recorded above
      }
    }
  }
}

// -------------------------------------------------------- smooth_renyi_check

void run_smooth_renyi_check(ExperimentContext& ctx) {
  const auto n_grid = ctx.cfg.get_int_list("N", {8, 12, 16, 20});
  const auto alpha_strs = ctx.cfg.get_string_list("alpha", {"0.5"});
  std::vector<RenyiOrder> alphas;
  for (const auto& s : alpha_strs) alphas.push_back(parse_order(s));

  Table t;
  t.name = "smooth_renyi";
  t.metadata = {{"experiment", "smooth_renyi_check"}, {"p_rule", "1/N^2"}, {"eps_rule", "5/N"}};
  t.header = {"N", "L", "alpha", "eps", "S_bits", "S_smooth_bits"};
  for (long long n : n_grid) {
    const int N = static_cast<int>(n);
    const double p = 1.0 / (static_cast<double>(N) * N);
    const double eps = 5.0 / N;
    for (int L = 1; L <= N; ++L) {
      Spectrum s = magic_block_spectrum(N, p, L);
      for (const auto& a : alphas) {
        t.add_row({n, static_cast<long long>(L), a.alpha, eps, renyi_entropy(s, a),
                   smooth_renyi(s, a, eps)});
      }
    }
  }
  ctx.emit(t);
}

// ------------------------------------------------------------ quench runs

IsingSpec quench_spec(const ExperimentConfig& cfg, int default_n, Boundary default_boundary) {
  IsingSpec spec;
  spec.N = static_cast<int>(cfg.get_int("N", default_n));
  spec.g = cfg.get_real("g", 1.0);
  const std::string b = cfg.get_string("boundary", default_boundary == Boundary::periodic
                                                       ? "periodic"
                                                       : "open");
  if (b == "periodic") spec.boundary = Boundary::periodic;
  else if (b == "open") spec.boundary = Boundary::open;
  else throw ValidationError("boundary must be open or periodic, got '" + b + "'");
  const std::string c = cfg.get_string("coupling", "xx");
  if (c == "xx") spec.coupling = Coupling::xx;
  else if (c == "zz") spec.coupling = Coupling::zz;
  else throw ValidationError("coupling must be xx or zz, got '" + c + "'");
  return spec;
}

Table quench_table(const std::string& name, const QuenchResult& r,
                   std::vector<std::pair<std::string, std::string>> metadata) {
  Table t;
  t.name = name;
  t.metadata = std::move(metadata);
  t.header = {"time", "entropy_bits", "max_bond", "cum_truncation", "exact_error"};
  double cum = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    cum += r.per_step_truncation[i];
    t.add_row({r.times[i], r.half_chain_entropy_bits[i], static_cast<long long>(r.max_bond[i]),
               cum, r.exact_error.empty() ? 0.0 : r.exact_error[i]});
  }
  return t;
}

void run_quench_exact(ExperimentContext& ctx) {
  IsingSpec spec = quench_spec(ctx.cfg, 12, Boundary::periodic);
  const double t_max = ctx.cfg.get_real("t_max", 2.0);
  const double dt = ctx.cfg.get_real("dt", 0.05);
  if (dt <= 0 || t_max <= 0) throw ValidationError("quench_exact: dt and t_max must be positive");

  std::vector<double> times;
  for (double t = 0.0; t <= t_max + 1e-12; t += dt) times.push_back(t);
  Eigen::VectorXcd psi0 = to_dense(elementary_state(ElementaryKind::all_up, spec.N, 2));
  QuenchResult r = exact_evolve(psi0, spec, times);

  Table t = quench_table("quench_exact", r,
                         {{"experiment", "quench_exact"},
                          {"boundary", spec.boundary == Boundary::periodic ? "periodic" : "open"},
                          {"g", format_real(spec.g)}});
  ctx.emit(t);
}

void run_quench_tebd(ExperimentContext& ctx) {
  IsingSpec spec = quench_spec(ctx.cfg, 12, Boundary::open);
  if (spec.boundary != Boundary::open) {
    throw ValidationError("quench_tebd: the sweep runs on open boundaries");
  }
  const double t_max = ctx.cfg.get_real("t_max", 2.0);
  const double dt = ctx.cfg.get_real("dt", 0.01);
  TebdPolicy policy;
  policy.step_budget = ctx.cfg.get_real("eps_budget", 1e-8);
  const long max_bond = ctx.cfg.get_int("max_bond", 0);
  if (max_bond > 0) policy.max_bond = max_bond;
  policy.hard_cap = ctx.cfg.get_int("hard_cap", 1024);
  const bool compare = ctx.cfg.get_bool("compare_exact", spec.N <= 13);

  const int steps = static_cast<int>(std::lround(t_max / dt));
  MatrixProductState psi0 = elementary_state(ElementaryKind::all_up, spec.N, 2);
  std::optional<ExactPropagator> prop;
  if (compare) prop.emplace(spec);
  TebdRun run = tebd_evolve(psi0, spec, dt, steps, policy, compare ? &*prop : nullptr);

  Table t = quench_table("quench_tebd", run.result,
                         {{"experiment", "quench_tebd"},
                          {"boundary", "open"},
                          {"dt", format_real(dt)},
                          {"eps_budget", format_real(policy.step_budget)}});
  ctx.emit(t);
  if (run.result.truncated_run) ctx.note = "run truncated at the hard bond cap";
}

void run_quench_hardness(ExperimentContext& ctx) {
  IsingSpec spec = quench_spec(ctx.cfg, 32, Boundary::open);
  const double dt = ctx.cfg.get_real("dt", 0.02);
  const double t_max = ctx.cfg.get_real("t_max", 6.0);
  const double w0 = ctx.cfg.get_real("window_start", 0.5);
  const double w1 = ctx.cfg.get_real("window_end", 2.5);
  const long bond_stop = ctx.cfg.get_int("bond_stop", 160);
  TebdPolicy policy;
  policy.step_budget = ctx.cfg.get_real("eps_budget", 1e-6);
  policy.hard_cap = ctx.cfg.get_int("hard_cap", 512);

  const int chunk = 25;
  MatrixProductState state = elementary_state(ElementaryKind::all_up, spec.N, 2);
  QuenchResult series;
  double t_now = 0.0;
  while (t_now < t_max - 1e-12) {
    TebdRun run = tebd_evolve(state, spec, dt, chunk, policy, nullptr, t_now);
    state = std::move(run.final_state);
    auto& r = run.result;
    series.times.insert(series.times.end(), r.times.begin(), r.times.end());
    series.half_chain_entropy_bits.insert(series.half_chain_entropy_bits.end(),
                                          r.half_chain_entropy_bits.begin(),
                                          r.half_chain_entropy_bits.end());
    series.max_bond.insert(series.max_bond.end(), r.max_bond.begin(), r.max_bond.end());
    series.per_step_truncation.insert(series.per_step_truncation.end(),
                                      r.per_step_truncation.begin(),
                                      r.per_step_truncation.end());
    series.cumulative_truncation += r.cumulative_truncation;
    t_now += chunk * dt;
    if (r.truncated_run) {
      series.truncated_run = true;
      break;
    }
    const long max_seen = *std::max_element(series.max_bond.begin(), series.max_bond.end());
    if (t_now >= w1 + dt && max_seen >= bond_stop) break;
  }

  Table t = quench_table("quench_hardness", series,
                         {{"experiment", "quench_hardness"},
                          {"boundary", "open"},
                          {"dt", format_real(dt)},
                          {"eps_budget", format_real(policy.step_budget)}});
  ctx.emit(t);

  GrowthReport g = entropy_growth_report(series, w0, w1);
  Table gt;
  gt.name = "quench_hardness_growth";
  gt.metadata = {{"experiment", "quench_hardness"},
                 {"note", "reference slope 4/(3 pi) printed in both log bases"}};
  gt.header = {"window_start", "window_end", "slope_bits_per_time", "slope_nats_per_time",
               "reference_4_over_3pi"};
  gt.add_row({w0, w1, g.slope_bits_per_time, g.slope_nats_per_time, 4.0 / (3.0 * M_PI)});
  ctx.emit(gt);

  Table dt_table;
  dt_table.name = "quench_hardness_doubling";
  dt_table.metadata = {{"experiment", "quench_hardness"}};
  dt_table.header = {"bond_threshold", "first_time"};
  for (std::size_t i = 0; i < g.bond_thresholds.size(); ++i) {
    dt_table.add_row({static_cast<long long>(g.bond_thresholds[i]), g.bond_doubling_times[i]});
  }
  ctx.emit(dt_table);
  ctx.note = "entropy-growth argument is usually stated with periodic boundaries; sweep uses open";
}

// ---------------------------------------------------------------- registry

const std::vector<ExperimentDef>& registry_impl() {
  static const std::vector<ExperimentDef> defs = [] {
    std::vector<ExperimentDef> v;

    auto int_list_min = [](const std::string& key, std::int64_t lo, const std::string& what) {
      return [key, lo, what](const ExperimentConfig& cfg, std::vector<ConfigError>& errors) {
        try {
          for (auto x : cfg.get_int_list(key, {})) {
            if (x < lo) errors.push_back({0, key, what});
          }
        } catch (const ValidationError& e) {
          errors.push_back({0, key, e.what()});
        }
      };
    };

    v.push_back({{"eps_bounds",
                  "truncation lower/upper bound checks on named states over a bond grid",
                  true,
                  {{"states", "state specs, default [ghz(8), magic(4,0.25), pair_ring(8,2)]"},
                   {"D", "bond grid, default [1,2,4,8,17]"},
                   {"trials", "random candidates per (state, D), default 1000"}}},
                 [il = int_list_min("D", 1, "D >= 1"), tl = int_list_min("trials", 1, "trials >= 1")](
                     const ExperimentConfig& cfg, std::vector<ConfigError>& errors) {
                   il(cfg, errors);
                   tl(cfg, errors);
                   try {
                     for (const auto& s : cfg.get_string_list("states", {})) parse_state_spec(s);
                   } catch (const ValidationError& e) {
                     errors.push_back({0, "states", e.what()});
                   }
                 },
                 run_eps_bounds});

    v.push_back({{"audenaert",
                  "entropy continuity bound on random density-matrix pairs",
                  true,
                  {{"trials", "pairs per dimension, default 1000"},
                   {"dims", "Hilbert space dimensions, default [2,4,8,16]"}}},
                 [il = int_list_min("dims", 2, "dims >= 2"),
                  tl = int_list_min("trials", 1, "trials >= 1")](const ExperimentConfig& cfg,
                                                                std::vector<ConfigError>& errors) {
                   il(cfg, errors);
                   tl(cfg, errors);
                 },
                 run_audenaert});

    v.push_back({{"majorization",
                  "extremal-distribution entropy bound under a fixed truncation tail",
                  true,
                  {{"D", "head sizes, default [2,4]"},
                   {"eps", "tail masses, default [0.05,0.1,0.3]"},
                   {"L", "qubit block sizes, default [3,6]"},
                   {"alpha", "orders > 1, default [1.5,2,3]"},
                   {"samples", "distributions per point, default 10000"}}},
                 no_validate, run_majorization});

    v.push_back({{"multiplicativity",
                  "K-copy measure amplification sweep",
                  false,
                  {{"K", "copy counts, default powers of two up to 256"},
                   {"t_points", "T samples per K inside the validity window, default 16"}}},
                 no_validate, run_multiplicativity});

    v.push_back({{"product_structure",
                  "factorized-candidate fidelity improvement on random candidates",
                  true,
                  {{"state_a", "left factor, default pair_ring(2,1)"},
                   {"state_b", "right factor, default pair_ring(2,1)"},
                   {"D", "candidate bond dimension, default 2"},
                   {"trials", "candidates, default 1000"}}},
                 no_validate, run_product_structure});

    v.push_back({{"table1_scan",
                  "block entropies and bond obstructions over a family grid",
                  false,
                  {{"family", "magic | pair_ring | chi, default magic"},
                   {"N", "size grid, default [2,4,6,8,10]"},
                   {"p_rule", "1/N | 1/N^2 | number, default 1/N"},
                   {"nu_rule", "logN | N^kappa | number, default logN"},
                   {"kappa", "exponent for nu_rule, default 0.5"},
                   {"copies", "copies for the chi family, default 2"},
                   {"alpha", "orders, default [0,0.25,0.5,1,2,inf]"},
                   {"delta", "target errors, default [0.05,0.1,0.3,0.58]"},
                   {"cache_states", "save family states under cache/, default true"}}},
                 [](const ExperimentConfig& cfg, std::vector<ConfigError>& errors) {
                   try {
                     for (auto n : cfg.get_int_list("N", {})) {
                       if (n < 1) errors.push_back({0, "N", "N >= 1"});
                     }
                     const std::string fam = cfg.get_string("family", "magic");
                     if (fam != "magic" && fam != "pair_ring" && fam != "chi") {
                       errors.push_back({0, "family", "unknown family '" + fam + "'"});
                     }
                   } catch (const ValidationError& e) {
                     errors.push_back({0, "N", e.what()});
                   }
                 },
                 run_table1_scan});

    v.push_back({{"smooth_renyi_check",
                  "plain vs smooth block entropies for the p = 1/N^2 family",
                  false,
                  {{"N", "sizes, default [8,12,16,20]"},
                   {"alpha", "orders, default [0.5]"}}},
                 no_validate, run_smooth_renyi_check});

    v.push_back({{"quench_exact",
                  "exact critical-quench reference evolution",
                  false,
                  {{"N", "sites, default 12"},
                   {"g", "transverse field, default 1.0"},
                   {"boundary", "open | periodic, default periodic"},
                   {"coupling", "xx | zz, default xx"},
                   {"t_max", "final time, default 2.0"},
                   {"dt", "sample spacing, default 0.05"}}},
                 [](const ExperimentConfig& cfg, std::vector<ConfigError>& errors) {
                   try {
                     if (cfg.get_int("N", 12) < 2) errors.push_back({0, "N", "N >= 2"});
                   } catch (const ValidationError& e) {
                     errors.push_back({0, "N", e.what()});
                   }
                 },
                 run_quench_exact});

    v.push_back({{"quench_tebd",
                  "Trotterized MPS quench with per-step retruncation",
                  false,
                  {{"N", "sites, default 12"},
                   {"g", "transverse field, default 1.0"},
                   {"coupling", "xx | zz, default xx"},
                   {"t_max", "final time, default 2.0"},
                   {"dt", "Trotter step, default 0.01"},
                   {"eps_budget", "per-step discarded weight, default 1e-8"},
                   {"max_bond", "bond cap (0 = none), default 0"},
                   {"hard_cap", "halt threshold, default 1024"},
                   {"compare_exact", "record error vs exact reference, default N <= 13"}}},
                 no_validate, run_quench_tebd});

    v.push_back({{"quench_hardness",
                  "bond-growth signature of the critical quench at large N",
                  false,
                  {{"N", "sites, default 32"},
                   {"g", "transverse field, default 1.0"},
                   {"dt", "Trotter step, default 0.02"},
                   {"t_max", "latest time, default 6.0"},
                   {"eps_budget", "per-step discarded weight, default 1e-6"},
                   {"window_start", "slope window start, default 0.5"},
                   {"window_end", "slope window end, default 2.5"},
                   {"bond_stop", "stop once max bond reaches this, default 160"},
                   {"hard_cap", "halt threshold, default 512"}}},
                 no_validate, run_quench_hardness});

    return v;
  }();
  return defs;
}

const ExperimentDef* find_def(const std::string& name) {
  for (const auto& def : registry_impl()) {
    if (def.info.name == name) return &def;
  }
  return nullptr;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& def : registry_impl()) v.push_back(def.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& info : experiment_registry()) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

std::optional<ExperimentConfig> build_config(const ConfigDoc& doc, std::vector<ConfigError>& errors) {
  ExperimentConfig cfg;

  const ConfigValue* exp = doc.find("experiment");
  if (!exp) {
    errors.push_back({0, "experiment", "missing required key"});
  } else if (exp->kind != ConfigValue::Kind::string) {
    errors.push_back({exp->line, "experiment", "must be a string"});
  } else {
    cfg.experiment = exp->s;
  }
  const ExperimentDef* def = cfg.experiment.empty() ? nullptr : find_def(cfg.experiment);
  if (!cfg.experiment.empty() && !def) {
    errors.push_back({exp ? exp->line : 0, "experiment",
                      "unknown experiment '" + cfg.experiment + "'"});
  }

  if (const ConfigValue* v = doc.find("seed")) {
    if (v->kind != ConfigValue::Kind::integer || v->i < 0) {
      errors.push_back({v->line, "seed", "must be a nonnegative integer"});
    } else {
      cfg.seed = static_cast<std::uint64_t>(v->i);
    }
  }
  if (def && def->info.stochastic && !cfg.seed) {
    errors.push_back({0, "seed", "required for stochastic experiment '" + cfg.experiment + "'"});
  }

  if (const ConfigValue* v = doc.find("output_dir")) {
    if (v->kind != ConfigValue::Kind::string) {
      errors.push_back({v->line, "output_dir", "must be a string"});
    } else {
      cfg.output_dir = v->s;
    }
  } else if (const char* env = std::getenv("MPSLAB_OUTPUT_DIR")) {
    cfg.output_dir = env;
  }

  if (const ConfigValue* v = doc.find("dense_threshold")) {
    if (v->kind != ConfigValue::Kind::integer || v->i < 2) {
      errors.push_back({v->line, "dense_threshold", "must be an integer >= 2"});
    } else {
      cfg.dense_threshold = v->i;
    }
  }
  if (const ConfigValue* v = doc.find("thread_count")) {
    if (v->kind != ConfigValue::Kind::integer || v->i < 1 || v->i > 256) {
      errors.push_back({v->line, "thread_count", "must be an integer in [1, 256]"});
    } else {
      cfg.thread_count = static_cast<int>(v->i);
    }
  }

  // remaining keys belong to the experiment schema; section "<experiment>."
  // qualified spellings are accepted
  static const char* kCommon[] = {"experiment", "seed", "output_dir", "dense_threshold",
                                  "thread_count"};
  for (const auto& [key, value] : doc.entries()) {
    bool common = false;
    for (const char* c : kCommon) {
      if (key == c) common = true;
    }
    if (common) continue;
    std::string bare = key;
    if (!cfg.experiment.empty() && key.rfind(cfg.experiment + ".", 0) == 0) {
      bare = key.substr(cfg.experiment.size() + 1);
    }
    if (def) {
      bool known = false;
      for (const auto& [k, doc_str] : def->info.keys) {
        if (bare == k) known = true;
      }
      if (!known) {
        errors.push_back({value.line, key, "unknown key for experiment '" + cfg.experiment + "'"});
        continue;
      }
    }
    cfg.params.set(bare, value);
  }

  if (def) def->validate(cfg, errors);
  if (!errors.empty()) return std::nullopt;
  return cfg;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  RunOutcome outcome;
  const auto started = std::chrono::steady_clock::now();
  const ExperimentDef* def = find_def(cfg.experiment);
  fs::path outdir(cfg.output_dir);

  std::string status_note;
  try {
    if (!def) throw ValidationError("unknown experiment '" + cfg.experiment + "'");
    fs::create_directories(outdir);
    ExperimentContext ctx{cfg, outdir, &outcome.artifacts, 0, std::string()};
    def->run(ctx);
    outcome.violations = ctx.violations;
    status_note = ctx.note;
    outcome.status = ctx.violations > 0 ? RunStatus::violations : RunStatus::ok;
    if (ctx.violations > 0) {
      outcome.message = std::to_string(ctx.violations) + " inequality violation(s)";
    }
  } catch (const ResourceLimitError& e) {
    outcome.status = RunStatus::resource_limit;
    outcome.message = e.what();
  } catch (const ValidationError& e) {
    outcome.status = RunStatus::config_error;
    outcome.message = e.what();
  } catch (const NumericalFailure& e) {
    outcome.status = RunStatus::numerical_failure;
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.status = RunStatus::numerical_failure;
    outcome.message = e.what();
  }

  // manifest (best effort; never masks the run status)
  try {
    fs::create_directories(outdir);
    nlohmann::ordered_json j;
    j["experiment"] = cfg.experiment;
    j["status"] = static_cast<int>(outcome.status);
    j["violations"] = outcome.violations;
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["thread_count"] = cfg.thread_count;
    j["dense_threshold"] = cfg.dense_threshold;
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.params.entries()) echo[k] = v.describe();
    j["config"] = std::move(echo);
    j["artifacts"] = outcome.artifacts;
    if (!outcome.message.empty()) j["message"] = outcome.message;
    if (!status_note.empty()) j["note"] = status_note;
    j["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ofstream os(outdir / "manifest.json");
    os << j.dump(1) << "\n";
  } catch (...) {
  }
  return outcome;
}

// ------------------------------------------------------------------ selftest

int run_selftest(std::ostream& os) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    os << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };

  try {
    {
      auto f = linalg::svd(Eigen::MatrixXcd::Identity(2, 2));
      check("svd identity has unit singular values",
            near(f.s(0), 1.0, 1e-12) && near(f.s(1), 1.0, 1e-12));
    }
    {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
      m(0, 0) = 3.0;
      m(1, 1) = 4.0;
      auto f = linalg::svd(m);
      check("svd sorts singular values", near(f.s(0), 4.0, 1e-12) && near(f.s(1), 3.0, 1e-12));
    }
    {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
      m(0, 0) = 0.2;
      m(1, 1) = 0.8;
      auto e = linalg::hermitian_eig(m);
      check("hermitian_eig sorts nonincreasing",
            near(e.eigenvalues(0), 0.8, 1e-12) && near(e.eigenvalues(1), 0.2, 1e-12));
    }
    check("uniform spectrum entropy is L bits",
          near(renyi_entropy(Spectrum({0.25, 0.25, 0.25, 0.25}), RenyiOrder{0.7}), 2.0, 1e-12));
    check("min-entropy of (0.5,0.25,0.25) is 1 bit",
          near(renyi_entropy(Spectrum({0.5, 0.25, 0.25}), RenyiOrder::min_entropy()), 1.0, 1e-12));
    check("truncation error keeps the head",
          near(truncation_error(Spectrum({0.5, 0.3, 0.2}), 2), 0.2, 1e-12));
    check("audenaert bound at T=0 vanishes", near(audenaert_bound(0.0, 8), 0.0, 1e-15));
    check("audenaert bound at K=2 is binary entropy", near(audenaert_bound(0.5, 2), 1.0, 1e-12));
    check("smooth entropy at eps=0 is plain",
          near(smooth_renyi(Spectrum({0.6, 0.4}), RenyiOrder{2.0}, 0.0),
               renyi_entropy(Spectrum({0.6, 0.4}), RenyiOrder{2.0}), 1e-12));
    check("von Neumann bond bound at delta=0 is S-1",
          near(bond_bound_von_neumann(10.0, 0.0, 20, 2).bound_value, 9.0, 1e-12));
    {
      MatrixProductState ghz = elementary_state(ElementaryKind::ghz, 5, 2);
      check("ghz interior bonds are 2", ghz.bond_dim(2) == 2);
      check("ghz middle spectrum is (1/2, 1/2)",
            near(schmidt_spectrum(ghz, 2)[0], 0.5, 1e-12));
      check("ghz norm is 1", near(norm(ghz), 1.0, 1e-12));
    }
    {
      MatrixProductState up = elementary_state(ElementaryKind::all_up, 5, 2);
      check("all_up bonds are 1", up.max_bond_dim() == 1);
      Eigen::VectorXcd v = to_dense(up);
      check("all_up amplitude sits at index 0", near(std::abs(v(0)), 1.0, 1e-12));
    }
    {
      MatrixProductState m = magic_state(1, 0.0);
      Eigen::VectorXcd v = to_dense(m);
      check("magic p=0 is the |22> product", near(std::abs(v(8)), 1.0, 1e-12));
      MatrixProductState bell = magic_state(1, 1.0);
      Eigen::VectorXcd w = to_dense(bell);
      check("magic p=1 is the embedded pair",
            near(std::abs(w(0)), 1.0 / std::sqrt(2.0), 1e-12) &&
                near(std::abs(w(4)), 1.0 / std::sqrt(2.0), 1e-12));
    }
    {
      MatrixProductState ring = pair_ring(2, 1);
      check("single pair middle spectrum is flat",
            near(schmidt_spectrum(ring, 1)[0], 0.5, 1e-12));
    }
    {
      MatrixProductState a = elementary_state(ElementaryKind::basis, 3, 2, 1);
      MatrixProductState b = elementary_state(ElementaryKind::basis, 3, 2, 5);
      check("orthogonal basis states have zero overlap", std::abs(overlap(a, b)) < 1e-14);
      check("normalized overlap is 1", near(std::abs(overlap(a, a)), 1.0, 1e-12));
      auto rep = distances(a, a);
      check("distances(a,a) vanish", near(rep.theta, 0.0, 1e-9) && near(rep.T, 0.0, 1e-9));
    }
    {
      IsingSpec spec;
      spec.N = 2;
      spec.g = 0.0;
      Eigen::MatrixXcd h = ising_hamiltonian(spec);
      Eigen::VectorXd ev = linalg::hermitian_eigvals(h);
      check("two-site XX spectrum is (+1,+1,-1,-1)",
            near(ev(0), 1.0, 1e-12) && near(ev(3), -1.0, 1e-12));
      spec.g = 1.0;
      check("critical two-site Hamiltonian is traceless",
            std::abs(ising_hamiltonian(spec).trace()) < 1e-12);
    }
    {
      MatrixProductState one = elementary_state(ElementaryKind::basis, 2, 2, 2);  // |10>
      MatrixProductState ti = translate_superposition(one);
      Eigen::VectorXcd v = to_dense(ti);
      check("translate_superposition of |10> is the flat pair state",
            near(std::abs(v(1)), 1.0 / std::sqrt(2.0), 1e-10) &&
                near(std::abs(v(2)), 1.0 / std::sqrt(2.0), 1e-10));
    }
  } catch (const std::exception& e) {
    os << "[FAIL] selftest aborted: " << e.what() << "\n";
    ++failures;
  }
  os << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures;
}

}  // namespace mpslab
