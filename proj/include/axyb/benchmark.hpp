#ifndef AXYB_BENCHMARK_HPP
#define AXYB_BENCHMARK_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "axyb/eval.hpp"
#include "axyb/solvers.hpp"
#include "axyb/synth.hpp"
#include "axyb/uncertainty.hpp"

namespace axyb {

enum class Method { SIAH, LHED, UALHED, DQ, KP };

Method method_from_string(const std::string& name);
std::string to_string(Method m);
std::vector<Method> all_methods();

struct CampaignSpec {
  std::vector<std::string> scenarios;  // named scenarios or "custom"
  std::vector<NoiseConfig> custom_configs;  // used when scenarios[i] == "custom"
  std::vector<Method> methods = all_methods();
  std::size_t trials = 30;
  std::size_t n_pairs = 100;
  std::uint64_t seed0 = 1;
  Workspace workspace = Workspace::large_box();
  SolverConfig solver;
  std::size_t jobs = 1;

  void validate() const;
};

struct TrialRecord {
  std::string scenario;
  std::size_t trial = 0;
  Method method = Method::DQ;
  bool ok = false;
  std::string message;
  ErrorTriple err_x;
  ErrorTriple err_y;
  std::size_t iterations = 0;
  double objective = 0.0;
};

struct Aggregate {
  double mean = 0, max = 0, min = 0, variance = 0;
  std::size_t count = 0;
};

struct MethodSummary {
  Aggregate err_total_x, err_total_y, err_r_x, err_r_y, err_t_x, err_t_y;
};

struct CampaignResult {
  std::vector<TrialRecord> records;
  // keyed by (scenario, method name)
  std::map<std::pair<std::string, std::string>, MethodSummary> summaries;
  bool degraded = false;  // more than 20% of trials failed

  void recompute_summaries();
};

/// One synthesized dataset per (scenario, trial), shared across methods;
/// iterative methods start from the SI-AH estimate. Deterministic in
/// (spec, seed0) regardless of the number of jobs.
CampaignResult run_campaign(const CampaignSpec& spec);

struct CountSweepRow {
  std::size_t count = 0;
  std::string method;
  double mean_err_total_x = 0;
  double mean_err_total_y = 0;
};

std::vector<CountSweepRow> data_count_sweep(const std::vector<std::size_t>& counts,
                                            const std::string& scenario, std::size_t trials,
                                            const CampaignSpec& base);

/// The eight rank-range strategies of the data-selection study.
std::vector<SelectionStrategy> selection_strategies(std::size_t n);

struct SelectionRow {
  std::size_t strategy = 0;  // 1-based
  SelectionStrategy range;
  std::string method;
  bool ok = false;
  double mean_err_total_x = 0;
  double mean_err_total_y = 0;
};

std::vector<SelectionRow> selection_study(const std::string& scenario,
                                          const std::vector<Method>& methods,
                                          std::size_t trials, const CampaignSpec& base);

struct LadderRow {
  std::size_t step = 0;
  double noise_fraction = 0;
  double mean_metric = 0;
};

/// Mean relative-uncertainty metric across a ladder of noise levels scaled
/// from zero to the reference injection maxima.
std::vector<LadderRow> metric_ladder(std::size_t steps, std::size_t seeds,
                                     std::size_t n_pairs, const Workspace& ws,
                                     std::uint64_t seed0);

}  // namespace axyb

#endif  // AXYB_BENCHMARK_HPP
