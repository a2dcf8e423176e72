// rcbench: command-line driver for the reservoir size-reduction experiments.
//
//   rcbench bench henon|narma   trials at one configuration
//   rcbench sweep               trials over a list of Q, P or N* values
//   rcbench ipc                 information processing capacity spectrum
//   rcbench memcost             delay-concatenation memory cost table
//   rcbench search              hyperparameter search trace
//
// Every flag mirrors a key of the JSON config; flags override --config.

#include "resconcat/error.hpp"
#include "resconcat/experiment.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using resconcat::Error;
using resconcat::ErrorKind;
using namespace resconcat::bench;

namespace {

struct Overrides {
    std::optional<std::string> config;
    std::string out = ".";
    std::optional<std::string> task;
    std::optional<int> m;
    std::optional<std::string> scheme;
    std::optional<int> p;
    std::optional<int> q;
    std::optional<int> ntran;
    std::optional<int> nstar;
    std::optional<int> nres;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> tune;
    std::optional<int> budget;
    std::optional<int> validation_seeds;
    std::optional<int> train_len;
    std::optional<int> test_len;
    std::optional<int> washout;
    std::optional<double> noise_std;
    std::optional<double> rho_in;
    std::optional<double> rho_res;
    std::optional<double> rho_drift;
    std::optional<long> t_steps;
    std::optional<int> tau_max;
    std::optional<int> max_order;
    std::optional<double> threshold_scale;
    std::optional<std::string> axis;
    std::vector<int> values;

    nlohmann::json to_json() const
    {
        nlohmann::json j = nlohmann::json::object();
        auto put = [&j](const char* key, const auto& v) {
            if (v) j[key] = *v;
        };
        put("task", task);
        put("m", m);
        put("scheme", scheme);
        put("P", p);
        put("Q", q);
        put("ntran", ntran);
        put("nstar", nstar);
        put("nres", nres);
        put("trials", trials);
        put("seed", seed);
        put("tune", tune);
        put("budget", budget);
        put("validation_seeds", validation_seeds);
        put("train_len", train_len);
        put("test_len", test_len);
        put("washout", washout);
        put("noise_std", noise_std);
        put("rho_in", rho_in);
        put("rho_res", rho_res);
        put("rho_drift", rho_drift);
        put("T", t_steps);
        put("tau_max", tau_max);
        put("max_order", max_order);
        put("threshold_scale", threshold_scale);
        put("axis", axis);
        if (!values.empty()) j["values"] = values;
        return j;
    }
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("--config", o.config, "JSON config file");
    app->add_option("--out", o.out, "output directory")->capture_default_str();
    app->add_option("--m", o.m, "Henon order m or NARMA order (5, 10)");
    app->add_option("--scheme", o.scheme, "standard | delay | drift | transient")
      ->check(CLI::IsMember({"standard", "delay", "drift", "transient"}));
    app->add_option("--P", o.p, "additional concatenated blocks");
    app->add_option("--Q", o.q, "delay unit");
    app->add_option("--ntran", o.ntran, "transient states per input");
    app->add_option("--nstar", o.nstar, "target dimension N*; N_res = floor(N*/(P+1))");
    app->add_option("--nres", o.nres, "explicit reservoir size (overrides N*)");
    app->add_option("--trials", o.trials, "trials per configuration");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--tune", o.tune, "off | global | per-point")->check(CLI::IsMember({"off", "global", "per-point"}));
    app->add_option("--budget", o.budget, "random search budget");
    app->add_option("--validation-seeds", o.validation_seeds, "validation runs per search sample");
    app->add_option("--train-len", o.train_len, "training steps");
    app->add_option("--test-len", o.test_len, "test steps");
    app->add_option("--washout", o.washout, "discarded steps at the start of each phase");
    app->add_option("--noise-std", o.noise_std, "Henon noise standard deviation");
    app->add_option("--rho-in", o.rho_in, "input weight scale");
    app->add_option("--rho-res", o.rho_res, "reservoir spectral radius");
    app->add_option("--rho-drift", o.rho_drift, "drift matrix spectral radius");
}

ExperimentConfig resolve(const Overrides& o)
{
    ExperimentConfig cfg;
    if (o.config) {
        std::ifstream in(*o.config);
        if (!in) throw Error(ErrorKind::io, "cannot open config " + *o.config);
        nlohmann::json file;
        try {
            in >> file;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::io, std::string("config is not valid JSON: ") + e.what());
        }
        cfg.merge_json(file);
    }
    cfg.merge_json(o.to_json());
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const Overrides& o)
{
    fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + o.out);
    return dir;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    return out;
}

void write_points(const fs::path& dir, const ExperimentConfig& cfg, const std::vector<PointReport>& points)
{
    auto trials = open_out(dir / "trials.csv");
    write_trials_csv(trials, points);
    auto summary = open_out(dir / "summary.csv");
    write_summary_csv(summary, points);

    nlohmann::json j;
    j["csv_schema"] = csv_schema_version;
    j["config"] = cfg.to_json();
    j["points"] = nlohmann::json::array();
    for (const PointReport& p : points) j["points"].push_back(to_json(p));
    auto json_out = open_out(dir / "summary.json");
    json_out << j.dump(2) << '\n';

    for (const PointReport& p : points)
        std::cout << p.axis << '=' << p.value << "  n_res=" << p.cfg.n_res() << "  mean_nmse=" << p.mean_nmse
                  << "  std_nmse=" << p.std_nmse << "  trials=" << p.trials.size()
                  << "  effective_test_len=" << (p.trials.empty() ? 0 : p.trials.front().effective_test_len) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reservoir computing with concatenated reservoir states: benchmarks, IPC, memory cost"};
    app.require_subcommand(1);

    Overrides o;
    std::vector<int> memcost_p;
    std::vector<int> memcost_q;
    int memcost_nout = 1;
    int memcost_nres = 100;

    auto* bench = app.add_subcommand("bench", "trials of one benchmark configuration");
    bench->require_subcommand(1);
    auto* henon = bench->add_subcommand("henon", "generalized Henon-map one-step prediction");
    auto* narma = bench->add_subcommand("narma", "NARMA prediction");
    add_common(henon, o);
    add_common(narma, o);

    auto* sweep_cmd = app.add_subcommand("sweep", "trials over a list of Q, P or N* values");
    add_common(sweep_cmd, o);
    sweep_cmd->add_option("--task", o.task, "henon | narma")->check(CLI::IsMember({"henon", "narma"}));
    sweep_cmd->add_option("--axis", o.axis, "Q | P | n_star")->check(CLI::IsMember({"Q", "P", "n_star"}));
    sweep_cmd->add_option("--values", o.values, "axis values")->delimiter(',');

    auto* ipc_cmd = app.add_subcommand("ipc", "information processing capacity");
    add_common(ipc_cmd, o);
    ipc_cmd->add_option("--T", o.t_steps, "measured steps");
    ipc_cmd->add_option("--tau-max", o.tau_max, "maximum delay");
    ipc_cmd->add_option("--max-order", o.max_order, "maximum total degree (1,3,5; 7,9 use pruning)");
    ipc_cmd->add_option("--threshold-scale", o.threshold_scale, "multiplier on the capacity threshold");

    auto* memcost_cmd = app.add_subcommand("memcost", "memory cost of delay-state concatenation");
    memcost_cmd->add_option("--P", memcost_p, "P values")->delimiter(',')->required();
    memcost_cmd->add_option("--Q", memcost_q, "Q values")->delimiter(',')->required();
    memcost_cmd->add_option("--nout", memcost_nout, "output dimension")->capture_default_str();
    memcost_cmd->add_option("--nres", memcost_nres, "reservoir size for the comparison")->capture_default_str();
    memcost_cmd->add_option("--out", o.out, "output directory")->capture_default_str();

    auto* search_cmd = app.add_subcommand("search", "hyperparameter random search");
    add_common(search_cmd, o);
    search_cmd->add_option("--task", o.task, "henon | narma")->check(CLI::IsMember({"henon", "narma"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (henon->parsed() || narma->parsed()) {
            o.task = henon->parsed() ? "henon" : "narma";
            if (!o.m) o.m = henon->parsed() ? 6 : 10;
            const ExperimentConfig cfg = resolve(o);
            const fs::path dir = prepare_out(o);
            write_points(dir, cfg, {run_benchmark(cfg)});
        } else if (sweep_cmd->parsed()) {
            const ExperimentConfig cfg = resolve(o);
            if (cfg.values.empty()) throw Error(ErrorKind::invalid_argument, "sweep needs --values");
            const fs::path dir = prepare_out(o);
            write_points(dir, cfg, sweep(cfg, cfg.axis, cfg.values).points);
        } else if (ipc_cmd->parsed()) {
            o.task = "ipc";
            const ExperimentConfig cfg = resolve(o);
            const fs::path dir = prepare_out(o);
            const resconcat::ipc::IpcReport report = run_ipc(cfg);
            nlohmann::json j = resconcat::ipc::to_json(report);
            j["config"] = cfg.to_json();
            auto json_out = open_out(dir / "ipc.json");
            json_out << j.dump(2) << '\n';
            auto csv = open_out(dir / "ipc_orders.csv");
            resconcat::ipc::write_order_delay_csv(csv, report);
            std::cout << "total=" << report.total << "  dim=" << report.dim << "  threshold=" << report.threshold_used
                      << (report.pruned_orders.empty() ? "" : "  (lower bound: pruned orders)") << '\n';
            for (const auto& [order, c] : report.per_order) std::cout << "  order " << order << ": " << c << '\n';
        } else if (memcost_cmd->parsed()) {
            const fs::path dir = prepare_out(o);
            const auto rows = memcost_table(memcost_p, memcost_q, memcost_nout, memcost_nres);
            auto csv = open_out(dir / "memcost.csv");
            write_memcost_csv(csv, rows);
            write_memcost_csv(std::cout, rows);
        } else if (search_cmd->parsed()) {
            if (!o.task) o.task = "narma";
            const ExperimentConfig cfg = resolve(o);
            const fs::path dir = prepare_out(o);
            const auto result = tune(cfg, "-");
            const auto space = resconcat::search::SearchSpace::reservoir(cfg.make_scheme().needs_drift());
            auto csv = open_out(dir / "search_trace.csv");
            resconcat::search::write_trace_csv(csv, space, result);
            nlohmann::json j;
            j["config"] = cfg.to_json();
            j["best_objective"] = result.best_objective;
            for (std::size_t i = 0; i < space.dim(); ++i) j["best"][space.axes[i].name] = result.best_params[i];
            auto json_out = open_out(dir / "search.json");
            json_out << j.dump(2) << '\n';
            std::cout << j["best"].dump() << "  validation_nmse=" << result.best_objective << '\n';
        }
    } catch (const Error& e) {
        std::cerr << nlohmann::json{{"error", resconcat::to_string(e.kind())}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 3;
    }
    return 0;
}
