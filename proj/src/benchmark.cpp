#include "axyb/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "axyb/error.hpp"

namespace axyb {

Method method_from_string(const std::string& name) {
  if (name == "si-ah") return Method::SIAH;
  if (name == "l-hed") return Method::LHED;
  if (name == "ual-hed") return Method::UALHED;
  if (name == "dq") return Method::DQ;
  if (name == "kron" || name == "kp") return Method::KP;
  throw_error(ErrorKind::InvalidArgument, "unknown method: " + name);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::SIAH: return "si-ah";
    case Method::LHED: return "l-hed";
    case Method::UALHED: return "ual-hed";
    case Method::DQ: return "dq";
    case Method::KP: return "kron";
  }
  return "?";
}

std::vector<Method> all_methods() {
  return {Method::SIAH, Method::LHED, Method::UALHED, Method::DQ, Method::KP};
}

void CampaignSpec::validate() const {
  if (trials < 1) throw_error(ErrorKind::InvalidArgument, "CampaignSpec: trials must be >= 1");
  if (methods.empty()) throw_error(ErrorKind::InvalidArgument, "CampaignSpec: no methods");
  if (scenarios.empty()) throw_error(ErrorKind::InvalidArgument, "CampaignSpec: no scenarios");
  solver.validate();
}

namespace {

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  a.min = std::numeric_limits<double>::infinity();
  a.max = -a.min;
  for (double v : values) {
    a.mean += v;
    a.min = std::min(a.min, v);
    a.max = std::max(a.max, v);
  }
  a.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    for (double v : values) a.variance += (v - a.mean) * (v - a.mean);
    a.variance /= static_cast<double>(values.size() - 1);
  }
  return a;
}

CalibEstimate solve_with(Method m, const PosePairSet& pairs, const SolverConfig& solver,
                         const CalibEstimate* init) {
  switch (m) {
    case Method::SIAH:
      return si_ah_solve(pairs, solver);
    case Method::DQ:
      return dq_solve(pairs);
    case Method::KP:
      return kron_solve(pairs);
    case Method::LHED:
      return l_hed_solve(pairs, init->x, init->y, solver);
    case Method::UALHED:
      return ual_hed_solve(pairs, init->x, init->y, solver);
  }
  throw_error(ErrorKind::InvalidArgument, "solve_with: bad method");
}

bool needs_init(Method m) { return m == Method::LHED || m == Method::UALHED; }

NoiseConfig config_for(const CampaignSpec& spec, std::size_t scenario_idx) {
  const std::string& name = spec.scenarios[scenario_idx];
  if (name == "custom") {
    if (scenario_idx >= spec.custom_configs.size()) {
      throw_error(ErrorKind::InvalidArgument, "custom scenario without a NoiseConfig");
    }
    return spec.custom_configs[scenario_idx];
  }
  return scenario_config(name);
}

std::vector<TrialRecord> run_trial(const CampaignSpec& spec, std::size_t scenario_idx,
                                   std::size_t trial) {
  const std::string& name = spec.scenarios[scenario_idx];
  std::uint64_t seed = spec.seed0 + trial;
  GroundTruth gt = generate_truth(spec.n_pairs, spec.workspace, seed);
  NoiseConfig noise = config_for(spec, scenario_idx);
  noise.seed = seed + 0x5DEECE66DULL;
  PosePairSet pairs = inject_uncertainty(gt, noise);

  std::vector<TrialRecord> records;
  CalibEstimate init;
  bool have_init = false;
  std::string init_failure;
  bool want_init = std::any_of(spec.methods.begin(), spec.methods.end(), needs_init);
  if (want_init) {
    try {
      init = si_ah_solve(pairs, spec.solver);
      have_init = true;
    } catch (const Error& e) {
      init_failure = e.what();
    }
  }

  for (Method m : spec.methods) {
    TrialRecord rec;
    rec.scenario = name;
    rec.trial = trial;
    rec.method = m;
    try {
      if (needs_init(m) && !have_init) {
        throw_error(ErrorKind::RankDeficientMotion,
                    "initial solve failed: " + init_failure);
      }
      SolverConfig solver = spec.solver;
      solver.seed = seed;
      CalibEstimate est =
          (m == Method::SIAH && have_init) ? init : solve_with(m, pairs, solver, &init);
      ErrorPair err = estimation_errors(est.x, est.y, gt.x_opt, gt.y_opt);
      rec.ok = true;
      rec.err_x = err.x;
      rec.err_y = err.y;
      rec.iterations = est.iterations;
      rec.objective = est.objective;
    } catch (const Error& e) {
      rec.ok = false;
      rec.message = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

void CampaignResult::recompute_summaries() {
  summaries.clear();
  std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> grouped;
  for (const TrialRecord& rec : records) {
    if (rec.ok) grouped[{rec.scenario, to_string(rec.method)}].push_back(&rec);
  }
  for (const auto& [key, recs] : grouped) {
    MethodSummary s;
    auto collect = [&](auto getter) {
      std::vector<double> vals;
      vals.reserve(recs.size());
      for (const TrialRecord* r : recs) vals.push_back(getter(*r));
      return aggregate(vals);
    };
    s.err_total_x = collect([](const TrialRecord& r) { return r.err_x.err_total; });
    s.err_total_y = collect([](const TrialRecord& r) { return r.err_y.err_total; });
    s.err_r_x = collect([](const TrialRecord& r) { return r.err_x.err_r; });
    s.err_r_y = collect([](const TrialRecord& r) { return r.err_y.err_r; });
    s.err_t_x = collect([](const TrialRecord& r) { return r.err_x.err_t; });
    s.err_t_y = collect([](const TrialRecord& r) { return r.err_y.err_t; });
    summaries[key] = s;
  }
}

CampaignResult run_campaign(const CampaignSpec& spec) {
  spec.validate();
  struct Unit {
    std::size_t scenario_idx;
    std::size_t trial;
  };
  std::vector<Unit> units;
  for (std::size_t s = 0; s < spec.scenarios.size(); ++s) {
    for (std::size_t t = 0; t < spec.trials; ++t) units.push_back({s, t});
  }

  std::vector<std::vector<TrialRecord>> per_unit(units.size());
  std::size_t jobs = std::max<std::size_t>(1, spec.jobs);
  if (jobs == 1) {
    for (std::size_t u = 0; u < units.size(); ++u) {
      per_unit[u] = run_trial(spec, units[u].scenario_idx, units[u].trial);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t u = next.fetch_add(1);
        if (u >= units.size()) break;
        per_unit[u] = run_trial(spec, units[u].scenario_idx, units[u].trial);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  CampaignResult result;
  std::size_t failures = 0, total = 0;
  for (std::vector<TrialRecord>& recs : per_unit) {
    for (TrialRecord& rec : recs) {
      total += 1;
      failures += rec.ok ? 0 : 1;
      result.records.push_back(std::move(rec));
    }
  }
  result.degraded = total > 0 && 5 * failures > total;  // > 20%
  result.recompute_summaries();
  return result;
}

std::vector<CountSweepRow> data_count_sweep(const std::vector<std::size_t>& counts,
                                            const std::string& scenario, std::size_t trials,
                                            const CampaignSpec& base) {
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] <= counts[i - 1]) {
      throw_error(ErrorKind::InvalidArgument, "data_count_sweep: counts must be ascending");
    }
  }
  std::vector<CountSweepRow> rows;
  for (std::size_t count : counts) {
    CampaignSpec spec = base;
    spec.scenarios = {scenario};
    spec.trials = trials;
    spec.n_pairs = count;
    CampaignResult res = run_campaign(spec);
    for (Method m : spec.methods) {
      auto it = res.summaries.find({scenario, to_string(m)});
      if (it == res.summaries.end()) continue;
      rows.push_back({count, to_string(m), it->second.err_total_x.mean,
                      it->second.err_total_y.mean});
    }
  }
  return rows;
}

std::vector<SelectionStrategy> selection_strategies(std::size_t n) {
  auto clampn = [n](std::size_t v) { return std::min(v, n); };
  return {
      {1, clampn(10)}, {1, clampn(20)}, {1, clampn(50)},  {1, n},
      {10, clampn(20)}, {10, clampn(50)}, {10, n},        {clampn(50), n},
  };
}

std::vector<SelectionRow> selection_study(const std::string& scenario,
                                          const std::vector<Method>& methods,
                                          std::size_t trials, const CampaignSpec& base) {
  std::vector<SelectionStrategy> strategies = selection_strategies(base.n_pairs);
  struct Acc {
    double sum_x = 0, sum_y = 0;
    std::size_t n = 0;
  };
  std::vector<std::vector<Acc>> acc(strategies.size(), std::vector<Acc>(methods.size()));

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::uint64_t seed = base.seed0 + trial;
    GroundTruth gt = generate_truth(base.n_pairs, base.workspace, seed);
    NoiseConfig noise = scenario_config(scenario);
    noise.seed = seed + 0x5DEECE66DULL;
    PosePairSet pairs = inject_uncertainty(gt, noise);
    UncertaintyReport rep = srm_metric(pairs);

    for (std::size_t s = 0; s < strategies.size(); ++s) {
      PosePairSet subset = select_pairs(pairs, rep.per_pair_metric, strategies[s]);
      CalibEstimate subset_init;
      bool have_subset_init = false;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        try {
          if (needs_init(methods[m]) && !have_subset_init) {
            subset_init = si_ah_solve(subset, base.solver);
            have_subset_init = true;
          }
          CalibEstimate est = solve_with(methods[m], subset, base.solver,
                                         have_subset_init ? &subset_init : nullptr);
          ErrorPair err = estimation_errors(est.x, est.y, gt.x_opt, gt.y_opt);
          acc[s][m].sum_x += err.x.err_total;
          acc[s][m].sum_y += err.y.err_total;
          acc[s][m].n += 1;
        } catch (const Error&) {
          // failed solves leave the row present with fewer samples
        }
      }
    }
  }

  std::vector<SelectionRow> rows;
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      SelectionRow row;
      row.strategy = s + 1;
      row.range = strategies[s];
      row.method = to_string(methods[m]);
      row.ok = acc[s][m].n > 0;
      if (row.ok) {
        row.mean_err_total_x = acc[s][m].sum_x / static_cast<double>(acc[s][m].n);
        row.mean_err_total_y = acc[s][m].sum_y / static_cast<double>(acc[s][m].n);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<LadderRow> metric_ladder(std::size_t steps, std::size_t seeds,
                                     std::size_t n_pairs, const Workspace& ws,
                                     std::uint64_t seed0) {
  if (steps < 2) throw_error(ErrorKind::InvalidArgument, "metric_ladder: steps must be >= 2");
  NoiseConfig maxima = injection_range_maxima();
  std::vector<LadderRow> rows;
  for (std::size_t step = 1; step <= steps; ++step) {
    double f = static_cast<double>(step) / static_cast<double>(steps);
    double sum = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      std::uint64_t seed = seed0 + s;
      GroundTruth gt = generate_truth(n_pairs, ws, seed);
      NoiseConfig noise = maxima.scaled(f);
      noise.seed = seed + 0x5DEECE66DULL;
      PosePairSet pairs = inject_uncertainty(gt, noise);
      sum += srm_metric(pairs).scalar_metric;
    }
    rows.push_back({step, f, sum / static_cast<double>(seeds)});
  }
  return rows;
}

}  // namespace axyb
