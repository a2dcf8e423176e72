#pragma once

// Information processing capacity of a (possibly concatenated) reservoir
// driven by i.i.d. uniform inputs on [-1, 1]. Targets are products of
// Legendre polynomials of delayed inputs; the capacity of each target is the
// fraction of its variance a bias-free linear readout reproduces.

#include "resconcat/reservoir.hpp"

#include <nlohmann/json.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace resconcat::ipc {

struct Factor {
    int delay = 0;
    int degree = 1;

    auto operator<=>(const Factor&) const = default;
};

/// A product basis prod_i P_{d_i}(u(t - delay_i)), stored as factors sorted
/// by delay with distinct delays and degree >= 1.
class Basis {
public:
    Basis() = default;
    explicit Basis(std::vector<Factor> factors);

    const std::vector<Factor>& factors() const { return factors_; }
    int order() const;
    int max_delay() const { return factors_.empty() ? 0 : factors_.back().delay; }

    /// Canonical ordering: by max delay, then lexicographic over factors.
    std::strong_ordering operator<=>(const Basis& other) const;
    bool operator==(const Basis& other) const = default;

    /// "delay:degree" pairs joined by spaces, e.g. "0:1 3:2".
    std::string to_string() const;

private:
    std::vector<Factor> factors_;
};

struct IpcConfig {
    long t_steps = 100000;
    int tau_max = 25;
    int max_order = 5;
    double threshold_scale = 1.0;
    std::uint64_t input_seed = 0;
    /// Steps simulated and discarded before the T measured steps.
    int washout = 1000;
    /// Orders above this are only evaluated on bases that extend a surviving
    /// basis two degrees lower.
    int prune_above = 5;
    /// Targets per orthogonal projection in the batched kernel.
    int batch_size = 64;

    void validate(Eigen::Index concat_dim) const;
};

struct IpcReport {
    double total = 0.0;
    std::map<int, double> per_order;
    std::map<std::pair<int, int>, double> per_order_delay; // (order, tau)
    /// Bases whose capacity survived the threshold.
    std::map<Basis, double> per_basis;
    double threshold_used = 0.0;
    Eigen::Index dim = 0;
    long t_steps = 0;
    int tau_max = 0;
    int max_order = 0;
    long bases_evaluated = 0;
    /// Orders evaluated with pruning; when non-empty totals are lower bounds.
    std::vector<int> pruned_orders;
    /// total exceeded dim by more than 2 %.
    bool exceeds_bound = false;
};

double legendre(int degree, double x);

/// Column d holds P_d(u(t)) for every t, d = 0..max_degree.
Matrix legendre_table(std::span<const double> u, int max_degree);

/// prod over factors of P_degree(u(t - delay)) for t = max_delay .. len-1.
std::vector<double> target_signal(const Basis& basis, std::span<const double> u);

/// Every basis of total degree `order` with delays in 0..tau_max, in
/// canonical order.
std::vector<Basis> enumerate_basis(int order, int tau_max);

/// Every basis two degrees above some basis in `parents` (one factor +2,
/// two factors +1, delays up to tau_max), deduplicated, canonical order.
std::vector<Basis> extend_basis(std::span<const Basis> parents, int tau_max);

/// Threshold below which a single capacity is reset to zero:
/// scale * dim * 70 / T (7e-5 * dim at T = 1e6, scale 1).
double capacity_threshold(double scale, Eigen::Index dim, long t_steps);

/// 1 - SSE / sum (z - mean z)^2 for the bias-free least-squares fit of
/// `target` on the rows of `design`, clamped to [0, 1].
double capacity(const Matrix& design, std::span<const double> target);
double capacity(const ConcatTrajectory& x_hat, std::span<const double> target);

/// Orthonormal basis of the design's column space, built once and shared by
/// every capacity evaluation against that design.
class CapacityKernel {
public:
    explicit CapacityKernel(const Matrix& design);

    Eigen::Index rows() const { return q_.rows(); }
    Eigen::Index rank() const { return q_.cols(); }

    double capacity(std::span<const double> target) const;

    /// Capacities of many bases at once. Row k of the design corresponds to
    /// time first_time + k of the Legendre table. Batches run in parallel.
    std::vector<double> capacities(const Matrix& legendre, Eigen::Index first_time, std::span<const Basis> bases,
                                   int batch_size = 64) const;

private:
    Matrix q_;
};

/// Inputs, Legendre table and design matrix of one IPC measurement.
struct IpcProblem {
    std::vector<double> inputs; // washout + T samples
    Matrix legendre;            // (washout + T) x (max_order + 1)
    Matrix design;              // T x D
    Eigen::Index first_time = 0;
};

IpcProblem prepare_ipc_problem(const WeightSet& w, const Scheme& scheme, const IpcConfig& cfg);

/// Batched, OpenMP-parallel measurement.
IpcReport ipc_report(const WeightSet& w, const Scheme& scheme, const IpcConfig& cfg);

/// Serial reference: one independent least-squares fit per basis. Slow; kept
/// to cross-check the batched kernel.
IpcReport ipc_report_reference(const WeightSet& w, const Scheme& scheme, const IpcConfig& cfg);

nlohmann::json to_json(const IpcReport& report);

/// Long format: order,tau,capacity for every order 1..max_order and tau 0..tau_max.
void write_order_delay_csv(std::ostream& out, const IpcReport& report);

}  // namespace resconcat::ipc
