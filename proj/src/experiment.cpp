#include "resconcat/experiment.hpp"

#include "parallel.hpp"
#include "resconcat/error.hpp"
#include "resconcat/readout.hpp"
#include "resconcat/rng.hpp"

#include <cmath>
#include <ostream>

namespace resconcat::bench {

std::string to_string(TaskKind kind)
{
    switch (kind) {
    case TaskKind::henon: return "henon";
    case TaskKind::narma: return "narma";
    case TaskKind::ipc: return "ipc";
    }
    return "?";
}

std::string to_string(TuneMode mode)
{
    switch (mode) {
    case TuneMode::off: return "off";
    case TuneMode::global: return "global";
    case TuneMode::per_point: return "per-point";
    }
    return "?";
}

TaskKind parse_task(const std::string& s)
{
    if (s == "henon") return TaskKind::henon;
    if (s == "narma") return TaskKind::narma;
    if (s == "ipc") return TaskKind::ipc;
    throw Error(ErrorKind::invalid_argument, "unknown task '" + s + "'");
}

TuneMode parse_tune(const std::string& s)
{
    if (s == "off") return TuneMode::off;
    if (s == "global") return TuneMode::global;
    if (s == "per-point") return TuneMode::per_point;
    throw Error(ErrorKind::invalid_argument, "unknown tune mode '" + s + "'");
}

Scheme ExperimentConfig::make_scheme() const
{
    if (scheme == "standard") return Scheme::standard();
    if (scheme == "delay") return Scheme::delay(p, q);
    if (scheme == "drift") return Scheme::drift(p);
    if (scheme == "transient") return Scheme::transient(p, q, n_tran);
    throw Error(ErrorKind::invalid_argument, "unknown scheme '" + scheme + "'");
}

int ExperimentConfig::n_res() const
{
    if (n_res_override) return *n_res_override;
    return n_star / make_scheme().concat_factor();
}

void ExperimentConfig::validate() const
{
    make_scheme(); // throws on an unknown scheme or invalid P, Q, N_tran
    require(n_res() >= 1, ErrorKind::invalid_argument,
            "reservoir size floor(N*/(P+1)) must be >= 1 (N* = " + std::to_string(n_star) + ")");
    require(trials >= 1, ErrorKind::invalid_argument, "trials must be >= 1");
    require(washout >= 0 && train_len > washout && test_len > washout, ErrorKind::invalid_argument,
            "train_len and test_len must exceed washout");
    require(search_budget >= 1 && validation_seeds >= 1, ErrorKind::invalid_argument,
            "search budget and validation seed count must be >= 1");
    require(hyper.rho_in > 0 && hyper.rho_res > 0 && hyper.rho_drift > 0, ErrorKind::invalid_argument,
            "spectral scales must be positive");
    if (task == TaskKind::henon) require(m >= 2, ErrorKind::invalid_argument, "Henon order m must be >= 2");
    if (task == TaskKind::narma) require(m == 5 || m == 10, ErrorKind::invalid_argument, "NARMA order must be 5 or 10");
    require(axis == "Q" || axis == "P" || axis == "n_star", ErrorKind::invalid_argument,
            "sweep axis must be Q, P or n_star");
}

namespace {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& into)
{
    if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::merge_json(const nlohmann::json& j)
{
    require(j.is_object(), ErrorKind::invalid_argument, "config must be a JSON object");
    try {
        if (j.contains("task")) task = parse_task(j.at("task").get<std::string>());
        take(j, "m", m);
        take(j, "scheme", scheme);
        take(j, "P", p);
        take(j, "Q", q);
        take(j, "ntran", n_tran);
        take(j, "nstar", n_star);
        if (j.contains("nres")) {
            if (j.at("nres").is_null())
                n_res_override.reset();
            else
                n_res_override = j.at("nres").get<int>();
        }
        take(j, "trials", trials);
        take(j, "train_len", train_len);
        take(j, "test_len", test_len);
        take(j, "washout", washout);
        take(j, "noise_std", noise_std);
        take(j, "bias", bias);
        take(j, "rho_in", hyper.rho_in);
        take(j, "rho_res", hyper.rho_res);
        take(j, "rho_drift", hyper.rho_drift);
        if (j.contains("tune")) tune = parse_tune(j.at("tune").get<std::string>());
        take(j, "budget", search_budget);
        take(j, "validation_seeds", validation_seeds);
        take(j, "seed", master_seed);
        take(j, "T", ipc_t_steps);
        take(j, "tau_max", tau_max);
        take(j, "max_order", max_order);
        take(j, "threshold_scale", threshold_scale);
        take(j, "axis", axis);
        take(j, "values", values);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::invalid_argument, std::string("bad config value: ") + e.what());
    }
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json j;
    j["task"] = to_string(task);
    j["m"] = m;
    j["scheme"] = scheme;
    j["P"] = p;
    j["Q"] = q;
    j["ntran"] = n_tran;
    j["nstar"] = n_star;
    j["nres"] = n_res_override ? nlohmann::json(*n_res_override) : nlohmann::json(nullptr);
    j["trials"] = trials;
    j["train_len"] = train_len;
    j["test_len"] = test_len;
    j["washout"] = washout;
    j["noise_std"] = noise_std;
    j["bias"] = bias;
    j["rho_in"] = hyper.rho_in;
    j["rho_res"] = hyper.rho_res;
    j["rho_drift"] = hyper.rho_drift;
    j["tune"] = to_string(tune);
    j["budget"] = search_budget;
    j["validation_seeds"] = validation_seeds;
    j["seed"] = master_seed;
    j["T"] = ipc_t_steps;
    j["tau_max"] = tau_max;
    j["max_order"] = max_order;
    j["threshold_scale"] = threshold_scale;
    j["axis"] = axis;
    j["values"] = values;
    return j;
}

std::string axis_label(const std::string& axis, int value) { return axis + "=" + std::to_string(value); }

namespace {

std::string task_tag(const ExperimentConfig& cfg) { return to_string(cfg.task) + std::to_string(cfg.m); }

}  // namespace

std::uint64_t trial_seed(const ExperimentConfig& cfg, const std::string& label, int trial)
{
    return stable_hash({"trial", std::to_string(cfg.master_seed), task_tag(cfg), cfg.scheme, label,
                        std::to_string(trial)});
}

std::uint64_t validation_seed(const ExperimentConfig& cfg, const std::string& label, int index)
{
    return stable_hash({"validation", std::to_string(cfg.master_seed), task_tag(cfg), cfg.scheme, label,
                        std::to_string(index)});
}

EvalResult evaluate(const WeightSet& w, const Scheme& scheme, const datasets::Dataset& train,
                    const datasets::Dataset& test, bool bias)
{
    auto aligned_targets = [](const datasets::Dataset& d, const ConcatTrajectory& x) {
        Matrix y(x.size(), d.targets.cols());
        for (Eigen::Index r = 0; r < x.size(); ++r) y.row(r) = d.targets.row(x.time_index[r]);
        return y;
    };

    const ConcatTrajectory x_train = simulate(w, scheme, train.inputs).drop_before(train.washout);
    require(x_train.size() >= 2, ErrorKind::insufficient_history, "no training rows left after washout");
    const auto [readout, fit] = fit_readout(x_train, aligned_targets(train, x_train), bias);

    const ConcatTrajectory x_test = simulate(w, scheme, test.inputs).drop_before(test.washout);
    require(x_test.size() >= 2, ErrorKind::insufficient_history, "no test rows left after washout");
    const Matrix pred = predict(readout, x_test);
    const Matrix target = aligned_targets(test, x_test);

    // average over output channels
    double total = 0.0;
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
        const Vector pc = pred.col(c);
        const Vector tc = target.col(c);
        total += nmse(std::span<const double>(pc.data(), pc.size()), std::span<const double>(tc.data(), tc.size()));
    }
    return {total / static_cast<double>(target.cols()), x_train.size(), x_test.size()};
}

datasets::Dataset make_dataset(const ExperimentConfig& cfg, long length, std::uint64_t seed)
{
    switch (cfg.task) {
    case TaskKind::henon: return datasets::henon(cfg.m, length, cfg.noise_std, seed);
    case TaskKind::narma: return datasets::narma(cfg.m, length, seed);
    case TaskKind::ipc: break;
    }
    throw Error(ErrorKind::invalid_argument, "the ipc task has no prediction dataset");
}

EvalResult run_trial_with_seed(const ExperimentConfig& cfg, const HyperParams& params, std::uint64_t seed)
{
    cfg.validate();
    const Scheme scheme = cfg.make_scheme();
    const datasets::Dataset data = make_dataset(cfg, cfg.train_len + cfg.test_len, derive_seed(seed, 1));

    ReservoirConfig rc;
    rc.n_in = static_cast<int>(data.inputs.cols());
    rc.n_out = static_cast<int>(data.targets.cols());
    rc.n_res = cfg.n_res();
    rc.rho_in = params.rho_in;
    rc.rho_res = params.rho_res;
    if (scheme.needs_drift()) rc.rho_drift = params.rho_drift;
    rc.seed = derive_seed(seed, 2);
    const WeightSet w = init_weights(rc);

    return evaluate(w, scheme, data.slice(0, cfg.train_len, cfg.washout),
                    data.slice(cfg.train_len, cfg.test_len, cfg.washout), cfg.bias);
}

TrialResult run_trial(const ExperimentConfig& cfg, const HyperParams& params, int trial_index, const std::string& label)
{
    const std::uint64_t seed = trial_seed(cfg, label, trial_index);
    const EvalResult r = run_trial_with_seed(cfg, params, seed);
    return {trial_index, seed, r.nmse, r.effective_test_len};
}

HyperParams params_from_point(const ExperimentConfig& cfg, std::span<const double> point)
{
    HyperParams p = cfg.hyper;
    p.rho_in = point[0];
    p.rho_res = point[1];
    if (point.size() > 2) p.rho_drift = point[2];
    return p;
}

search::SearchResult tune(const ExperimentConfig& cfg, const std::string& label)
{
    cfg.validate();
    const bool drift = cfg.make_scheme().needs_drift();
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < cfg.validation_seeds; ++i) seeds.push_back(validation_seed(cfg, label, i));
    const search::Objective objective = [&](std::span<const double> point) {
        const HyperParams params = params_from_point(cfg, point);
        double sum = 0.0;
        for (std::uint64_t s : seeds) sum += run_trial_with_seed(cfg, params, s).nmse;
        return sum / static_cast<double>(seeds.size());
    };
    const std::uint64_t search_seed =
      stable_hash({"search", std::to_string(cfg.master_seed), task_tag(cfg), cfg.scheme, label});
    return search::random_search(objective, search::SearchSpace::reservoir(drift), cfg.search_budget, search_seed);
}

std::pair<double, double> mean_std(std::span<const double> values)
{
    require(!values.empty(), ErrorKind::invalid_argument, "mean_std of an empty set");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

PointReport run_point(const ExperimentConfig& cfg, const std::string& axis, int value, const HyperParams& params)
{
    cfg.validate();
    PointReport point;
    point.axis = axis;
    point.value = value;
    point.cfg = cfg;
    point.params = params;
    const std::string label = axis == "-" ? "-" : axis_label(axis, value);
    point.trials.resize(static_cast<std::size_t>(cfg.trials));
    detail::parallel_for(cfg.trials, [&](long t) { point.trials[t] = run_trial(cfg, params, static_cast<int>(t), label); });
    std::vector<double> values;
    for (const TrialResult& t : point.trials) values.push_back(t.nmse);
    std::tie(point.mean_nmse, point.std_nmse) = mean_std(values);
    return point;
}

PointReport run_benchmark(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.tune == TuneMode::off) return run_point(cfg, "-", 0, cfg.hyper);
    const search::SearchResult best = tune(cfg, "-");
    PointReport point = run_point(cfg, "-", 0, params_from_point(cfg, best.best_params));
    point.validation_nmse = best.best_objective;
    return point;
}

namespace {

ExperimentConfig with_axis(ExperimentConfig cfg, const std::string& axis, int value)
{
    if (axis == "Q")
        cfg.q = value;
    else if (axis == "P")
        cfg.p = value;
    else if (axis == "n_star")
        cfg.n_star = value;
    else
        throw Error(ErrorKind::invalid_argument, "sweep axis must be Q, P or n_star");
    return cfg;
}

}  // namespace

SweepReport sweep(const ExperimentConfig& cfg, const std::string& axis, const std::vector<int>& values)
{
    require(!values.empty(), ErrorKind::invalid_argument, "sweep needs at least one value");
    SweepReport report;
    report.axis = axis;

    std::optional<search::SearchResult> global;
    if (cfg.tune == TuneMode::global) global = tune(cfg, "global");

    for (int value : values) {
        const ExperimentConfig point_cfg = with_axis(cfg, axis, value);
        point_cfg.validate();
        HyperParams params = cfg.hyper;
        std::optional<double> validation;
        if (cfg.tune == TuneMode::global) {
            params = params_from_point(point_cfg, global->best_params);
            validation = global->best_objective;
        } else if (cfg.tune == TuneMode::per_point) {
            const search::SearchResult best = tune(point_cfg, axis_label(axis, value));
            params = params_from_point(point_cfg, best.best_params);
            validation = best.best_objective;
        }
        PointReport point = run_point(point_cfg, axis, value, params);
        point.validation_nmse = validation;
        report.points.push_back(std::move(point));
    }
    return report;
}

std::uint64_t ipc_weight_seed(const ExperimentConfig& cfg)
{
    return stable_hash({"ipc-weights", std::to_string(cfg.master_seed)});
}

std::uint64_t ipc_input_seed(const ExperimentConfig& cfg)
{
    return stable_hash({"ipc-inputs", std::to_string(cfg.master_seed)});
}

ReservoirConfig ipc_reservoir_config(const ExperimentConfig& cfg)
{
    ReservoirConfig rc;
    rc.n_in = 1;
    rc.n_out = 1;
    rc.n_res = cfg.n_res();
    rc.rho_in = cfg.hyper.rho_in;
    rc.rho_res = cfg.hyper.rho_res;
    if (cfg.make_scheme().needs_drift()) rc.rho_drift = cfg.hyper.rho_drift;
    rc.seed = ipc_weight_seed(cfg);
    return rc;
}

ipc::IpcConfig ipc_config(const ExperimentConfig& cfg)
{
    ipc::IpcConfig ic;
    ic.t_steps = cfg.ipc_t_steps;
    ic.tau_max = cfg.tau_max;
    ic.max_order = cfg.max_order;
    ic.threshold_scale = cfg.threshold_scale;
    ic.input_seed = ipc_input_seed(cfg);
    return ic;
}

ipc::IpcReport run_ipc(const ExperimentConfig& cfg)
{
    cfg.validate();
    const WeightSet w = init_weights(ipc_reservoir_config(cfg));
    return ipc::ipc_report(w, cfg.make_scheme(), ipc_config(cfg));
}

std::vector<MemcostRow> memcost_table(const std::vector<int>& ps, const std::vector<int>& qs, int n_out, int n_res)
{
    require(n_res >= 1, ErrorKind::invalid_argument, "n_res must be >= 1");
    std::vector<MemcostRow> rows;
    for (int p : ps)
        for (int q : qs)
            rows.push_back({p, q, n_out, n_res, memory_cost(p, q, n_out),
                            static_cast<std::uint64_t>(p + 1) * static_cast<std::uint64_t>(n_res)});
    return rows;
}

void write_trials_csv(std::ostream& out, const std::vector<PointReport>& points)
{
    out << "task,scheme,P,Q,n_star,n_res,trial,seed,nmse\n";
    const auto precision = out.precision(17);
    for (const PointReport& pt : points) {
        const ExperimentConfig& c = pt.cfg;
        const Scheme s = c.make_scheme();
        for (const TrialResult& t : pt.trials)
            out << to_string(c.task) << c.m << ',' << c.scheme << ',' << s.p() << ',' << s.q() << ',' << c.n_star << ','
                << c.n_res() << ',' << t.trial << ',' << t.seed << ',' << t.nmse << '\n';
    }
    out.precision(precision);
}

void write_summary_csv(std::ostream& out, const std::vector<PointReport>& points)
{
    out << "axis,value,mean_nmse,std_nmse,trials\n";
    const auto precision = out.precision(17);
    for (const PointReport& pt : points)
        out << pt.axis << ',' << pt.value << ',' << pt.mean_nmse << ',' << pt.std_nmse << ',' << pt.trials.size() << '\n';
    out.precision(precision);
}

void write_memcost_csv(std::ostream& out, const std::vector<MemcostRow>& rows)
{
    out << "P,Q,n_out,n_res,memory_cost,concat_dim,below_concat_dim\n";
    for (const MemcostRow& r : rows)
        out << r.p << ',' << r.q << ',' << r.n_out << ',' << r.n_res << ',' << r.memory_cost << ',' << r.concat_dim << ','
            << (r.memory_cost < r.concat_dim ? 1 : 0) << '\n';
}

nlohmann::json to_json(const PointReport& point)
{
    nlohmann::json j;
    j["axis"] = point.axis;
    j["value"] = point.value;
    j["n_res"] = point.cfg.n_res();
    j["rho_in"] = point.params.rho_in;
    j["rho_res"] = point.params.rho_res;
    if (point.cfg.make_scheme().needs_drift()) j["rho_drift"] = point.params.rho_drift;
    j["validation_nmse"] = point.validation_nmse ? nlohmann::json(*point.validation_nmse) : nlohmann::json(nullptr);
    j["mean_nmse"] = point.mean_nmse;
    j["std_nmse"] = point.std_nmse;
    j["trials"] = point.trials.size();
    j["effective_test_len"] = point.trials.empty() ? 0 : point.trials.front().effective_test_len;
    return j;
}

}  // namespace resconcat::bench
