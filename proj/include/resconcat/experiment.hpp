#pragma once

// End-to-end experiment protocols behind the rcbench CLI: per-trial
// train/test runs, sweeps over Q, P or N*, hyperparameter tuning, IPC runs
// and the memory-cost table.

#include "resconcat/datasets.hpp"
#include "resconcat/hypersearch.hpp"
#include "resconcat/ipc.hpp"
#include "resconcat/reservoir.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace resconcat::bench {

enum class TaskKind { henon, narma, ipc };
enum class TuneMode { off, global, per_point };

std::string to_string(TaskKind kind);
std::string to_string(TuneMode mode);
TaskKind parse_task(const std::string& s);
TuneMode parse_tune(const std::string& s);

struct HyperParams {
    double rho_in = 0.1;
    double rho_res = 0.9;
    double rho_drift = 0.9;
};

struct ExperimentConfig {
    TaskKind task = TaskKind::narma;
    int m = 10;
    std::string scheme = "standard"; // standard | delay | drift | transient
    int p = 0;
    int q = 1;
    int n_tran = 1;
    int n_star = 100;
    /// Reservoir size used as-is instead of floor(N* / (P+1)).
    std::optional<int> n_res_override;
    int trials = 10;
    int train_len = 2000;
    int test_len = 3000;
    int washout = 200;
    double noise_std = 0.05;
    bool bias = true;
    HyperParams hyper;
    TuneMode tune = TuneMode::off;
    int search_budget = 64;
    int validation_seeds = 3;
    std::uint64_t master_seed = 0;

    // IPC runs
    long ipc_t_steps = 100000;
    int tau_max = 25;
    int max_order = 5;
    double threshold_scale = 1.0;

    // sweeps
    std::string axis = "Q"; // Q | P | n_star
    std::vector<int> values;

    int n_res() const;
    Scheme make_scheme() const;
    void validate() const;

    /// Applies every key present in `j` on top of the current values.
    void merge_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Label of a sweep point ("Q=4"), or "-" outside sweeps. Part of the seed.
std::string axis_label(const std::string& axis, int value);

std::uint64_t trial_seed(const ExperimentConfig& cfg, const std::string& label, int trial);
std::uint64_t validation_seed(const ExperimentConfig& cfg, const std::string& label, int index);

struct EvalResult {
    double nmse = 0.0;
    Eigen::Index train_rows = 0;
    Eigen::Index effective_test_len = 0;
};

/// Fits a readout on `train` and scores it on `test`. Each segment starts
/// from the zero state; its first `washout` outputs are excluded from the
/// regression and from the NMSE.
EvalResult evaluate(const WeightSet& w, const Scheme& scheme, const datasets::Dataset& train,
                    const datasets::Dataset& test, bool bias);

datasets::Dataset make_dataset(const ExperimentConfig& cfg, long length, std::uint64_t seed);

/// One trial fully determined by (cfg, params, seed): fresh dataset and
/// reservoir, washout + train, washout + test.
EvalResult run_trial_with_seed(const ExperimentConfig& cfg, const HyperParams& params, std::uint64_t seed);

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double nmse = 0.0;
    Eigen::Index effective_test_len = 0;
};

TrialResult run_trial(const ExperimentConfig& cfg, const HyperParams& params, int trial_index,
                      const std::string& label = "-");

/// Random search over (rho_in, rho_res[, rho_drift]) scored by mean
/// validation NMSE.
search::SearchResult tune(const ExperimentConfig& cfg, const std::string& label);
HyperParams params_from_point(const ExperimentConfig& cfg, std::span<const double> point);

struct PointReport {
    std::string axis;
    int value = 0;
    ExperimentConfig cfg; // the configuration this point ran with
    HyperParams params;
    std::optional<double> validation_nmse;
    std::vector<TrialResult> trials;
    double mean_nmse = 0.0;
    double std_nmse = 0.0;
};

struct SweepReport {
    std::string axis;
    std::vector<PointReport> points;
};

/// All trials of one configuration, in trial order. Trials run in parallel.
PointReport run_point(const ExperimentConfig& cfg, const std::string& axis, int value, const HyperParams& params);

/// Tuned according to cfg.tune, then run_point. axis "-" means no sweep.
PointReport run_benchmark(const ExperimentConfig& cfg);

SweepReport sweep(const ExperimentConfig& cfg, const std::string& axis, const std::vector<int>& values);

/// Mean and sample standard deviation (n-1; 0 for a single value).
std::pair<double, double> mean_std(std::span<const double> values);

std::uint64_t ipc_weight_seed(const ExperimentConfig& cfg);
std::uint64_t ipc_input_seed(const ExperimentConfig& cfg);
ReservoirConfig ipc_reservoir_config(const ExperimentConfig& cfg);
ipc::IpcConfig ipc_config(const ExperimentConfig& cfg);
ipc::IpcReport run_ipc(const ExperimentConfig& cfg);

struct MemcostRow {
    int p = 0;
    int q = 1;
    int n_out = 1;
    int n_res = 1;
    std::uint64_t memory_cost = 0;
    std::uint64_t concat_dim = 0;
};

std::vector<MemcostRow> memcost_table(const std::vector<int>& ps, const std::vector<int>& qs, int n_out, int n_res);

// CSV writers; schemas are versioned through csv_schema_version.
inline constexpr const char* csv_schema_version = "1";
void write_trials_csv(std::ostream& out, const std::vector<PointReport>& points);
void write_summary_csv(std::ostream& out, const std::vector<PointReport>& points);
void write_memcost_csv(std::ostream& out, const std::vector<MemcostRow>& rows);
nlohmann::json to_json(const PointReport& point);

}  // namespace resconcat::bench
