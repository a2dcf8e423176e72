#include "resconcat/datasets.hpp"
#include "resconcat/error.hpp"
#include "resconcat/ipc.hpp"

#include <iomanip>
#include <ostream>
#include <string>

namespace resconcat::ipc {

void IpcConfig::validate(Eigen::Index concat_dim) const
{
    require(max_order >= 1 && max_order <= 9 && max_order % 2 == 1, ErrorKind::invalid_argument,
            "max_order must be one of 1, 3, 5, 7, 9");
    require(tau_max >= 0, ErrorKind::invalid_argument, "tau_max must be >= 0");
    require(t_steps >= 100 * concat_dim, ErrorKind::invalid_argument,
            "t_steps must be at least 100 * (P+1) * N_res = " + std::to_string(100 * concat_dim));
    require(threshold_scale > 0.0, ErrorKind::invalid_argument, "threshold_scale must be positive");
    require(washout >= tau_max, ErrorKind::invalid_argument, "washout must cover tau_max steps of input history");
    require(prune_above >= 1, ErrorKind::invalid_argument, "prune_above must be >= 1");
    require(batch_size >= 1, ErrorKind::invalid_argument, "batch_size must be >= 1");
}

IpcProblem prepare_ipc_problem(const WeightSet& w, const Scheme& scheme, const IpcConfig& cfg)
{
    const Eigen::Index dim = static_cast<Eigen::Index>(scheme.concat_factor()) * w.n_res();
    cfg.validate(dim);
    require(w.n_in() == 1, ErrorKind::dimension, "IPC is measured for scalar-input reservoirs");

    IpcProblem problem;
    const long len = cfg.washout + cfg.t_steps;
    problem.inputs = datasets::uniform_inputs(len, cfg.input_seed, -1.0, 1.0);
    const RowMatrix inputs = Eigen::Map<const RowMatrix>(problem.inputs.data(), len, 1);

    const ConcatTrajectory x_hat = simulate(w, scheme, inputs).drop_before(cfg.washout);
    require(x_hat.size() == cfg.t_steps && x_hat.time_index.front() == cfg.washout, ErrorKind::insufficient_history,
            "washout does not cover the history the scheme needs");
    problem.design = x_hat.rows;
    problem.first_time = cfg.washout;
    problem.legendre = legendre_table(problem.inputs, cfg.max_order);
    return problem;
}

namespace detail {

// Shared enumeration, thresholding and aggregation. `evaluate` maps a list of
// bases to raw (unthresholded) capacities.
template <typename Evaluate>
IpcReport measure(const IpcProblem& problem, const IpcConfig& cfg, Evaluate evaluate)
{
    IpcReport report;
    report.dim = problem.design.cols();
    report.t_steps = cfg.t_steps;
    report.tau_max = cfg.tau_max;
    report.max_order = cfg.max_order;
    report.threshold_used = capacity_threshold(cfg.threshold_scale, report.dim, cfg.t_steps);

    std::map<int, std::vector<Basis>> survivors;
    for (int order = 1; order <= cfg.max_order; ++order) {
        for (int tau = 0; tau <= cfg.tau_max; ++tau) report.per_order_delay[{order, tau}] = 0.0;

        std::vector<Basis> bases;
        if (order <= cfg.prune_above || order <= 2) {
            bases = enumerate_basis(order, cfg.tau_max);
        } else {
            bases = extend_basis(survivors[order - 2], cfg.tau_max);
            report.pruned_orders.push_back(order);
        }
        const std::vector<double> raw = evaluate(std::span<const Basis>(bases));
        report.bases_evaluated += static_cast<long>(bases.size());

        for (std::size_t i = 0; i < bases.size(); ++i) {
            if (raw[i] < report.threshold_used) continue;
            report.per_basis.emplace(bases[i], raw[i]);
            report.per_order_delay[{order, bases[i].max_delay()}] += raw[i];
            survivors[order].push_back(bases[i]);
        }
    }

    for (int order = 1; order <= cfg.max_order; ++order) {
        double sum = 0.0;
        for (int tau = 0; tau <= cfg.tau_max; ++tau) sum += report.per_order_delay.at({order, tau});
        report.per_order[order] = sum;
        report.total += sum;
    }
    report.exceeds_bound = report.total > 1.02 * static_cast<double>(report.dim);
    return report;
}

}  // namespace detail

IpcReport ipc_report(const WeightSet& w, const Scheme& scheme, const IpcConfig& cfg)
{
    const IpcProblem problem = prepare_ipc_problem(w, scheme, cfg);
    const CapacityKernel kernel(problem.design);
    return detail::measure(problem, cfg, [&](std::span<const Basis> bases) {
        return kernel.capacities(problem.legendre, problem.first_time, bases, cfg.batch_size);
    });
}

// Defined in ipc_reference.cpp; shares the aggregation above.
std::vector<double> reference_capacities(const IpcProblem& problem, std::span<const Basis> bases);

IpcReport ipc_report_reference(const WeightSet& w, const Scheme& scheme, const IpcConfig& cfg)
{
    const IpcProblem problem = prepare_ipc_problem(w, scheme, cfg);
    return detail::measure(problem, cfg,
                           [&](std::span<const Basis> bases) { return reference_capacities(problem, bases); });
}

nlohmann::json to_json(const IpcReport& report)
{
    nlohmann::json j;
    j["total"] = report.total;
    j["dim"] = report.dim;
    j["t_steps"] = report.t_steps;
    j["tau_max"] = report.tau_max;
    j["max_order"] = report.max_order;
    j["threshold"] = report.threshold_used;
    j["bases_evaluated"] = report.bases_evaluated;
    j["pruned_orders"] = report.pruned_orders;
    j["lower_bound"] = !report.pruned_orders.empty();
    j["exceeds_bound"] = report.exceeds_bound;
    nlohmann::json orders = nlohmann::json::object();
    for (const auto& [order, c] : report.per_order) orders[std::to_string(order)] = c;
    j["per_order"] = orders;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [key, c] : report.per_order_delay)
        if (c > 0.0) cells.push_back({{"order", key.first}, {"tau", key.second}, {"capacity", c}});
    j["per_order_delay"] = cells;
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& [basis, c] : report.per_basis)
        bases.push_back({{"basis", basis.to_string()}, {"order", basis.order()}, {"capacity", c}});
    j["per_basis"] = bases;
    return j;
}

void write_order_delay_csv(std::ostream& out, const IpcReport& report)
{
    out << "order,tau,capacity\n";
    const auto precision = out.precision(17);
    for (const auto& [key, c] : report.per_order_delay) out << key.first << ',' << key.second << ',' << c << '\n';
    out.precision(precision);
}

}  // namespace resconcat::ipc
