#pragma once

// Echo state reservoir: weight construction, state evolution, and the
// three ways of widening the readout input (delayed states, drifting
// states, delayed states on a transient-interleaved timeline).

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace resconcat {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ReservoirConfig {
    int n_in = 1;
    int n_res = 100;
    int n_out = 1;
    double rho_in = 0.1;
    double rho_res = 0.9;
    std::optional<double> rho_drift;
    std::uint64_t seed = 0;

    void validate() const;
};

/// The fixed random weights of one reservoir. Immutable once built.
struct WeightSet {
    Matrix w_in;                   // n_res x n_in
    Matrix w_res;                  // n_res x n_res
    std::optional<Matrix> w_drift; // n_res x n_res

    int n_in() const { return static_cast<int>(w_in.cols()); }
    int n_res() const { return static_cast<int>(w_res.rows()); }
};

struct StandardScheme {};

/// x^(t) = [x(t); x(t-Q); ...; x(t-PQ)]
struct DelayStateScheme {
    int p = 1;
    int q = 1;
};

/// x^(t) = [x(t); drift(1;t); ...; drift(P;t)]
struct DriftStateScheme {
    int p = 1;
};

/// Delay-state concatenation on a timeline with n_tran extra updates per
/// input tick. Q counts internal steps.
struct DelayTransientScheme {
    int p = 1;
    int q = 1;
    int n_tran = 1;
};

class Scheme {
public:
    using Variant = std::variant<StandardScheme, DelayStateScheme, DriftStateScheme, DelayTransientScheme>;

    Scheme() = default;
    Scheme(Variant v); // NOLINT(google-explicit-constructor)

    static Scheme standard() { return Scheme(StandardScheme{}); }
    static Scheme delay(int p, int q) { return Scheme(DelayStateScheme{p, q}); }
    static Scheme drift(int p) { return Scheme(DriftStateScheme{p}); }
    static Scheme transient(int p, int q, int n_tran) { return Scheme(DelayTransientScheme{p, q, n_tran}); }

    const Variant& variant() const { return v_; }

    /// P+1, or 1 for the standard scheme.
    int concat_factor() const;
    int p() const { return concat_factor() - 1; }
    /// Delay unit; 0 for schemes without one.
    int q() const;
    /// Extra internal updates per input; 0 for schemes without transients.
    int n_tran() const;
    /// History (in trajectory steps) consumed before the first row exists.
    int history() const { return p() * q(); }

    bool needs_drift() const { return std::holds_alternative<DriftStateScheme>(v_); }
    bool is_transient() const { return std::holds_alternative<DelayTransientScheme>(v_); }

    /// "standard", "delay", "drift" or "transient".
    std::string name() const;

private:
    Variant v_ = StandardScheme{};
};

struct StateTrajectory {
    RowMatrix states; // T x n_res, row t = x(t)
    Vector initial_state;

    Eigen::Index length() const { return states.rows(); }
};

/// Design matrix for all regressions: one row per emitted output time.
struct ConcatTrajectory {
    RowMatrix rows;                       // T_eff x (P+1) n_res
    std::vector<Eigen::Index> time_index; // row -> output time (0-based, external timeline)
    Scheme scheme;

    Eigen::Index size() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }

    /// Rows whose output time is at least `washout`.
    ConcatTrajectory drop_before(Eigen::Index washout) const;
};

/// Largest eigenvalue magnitude of a square matrix.
double spectral_radius(const Matrix& m);

WeightSet init_weights(const ReservoirConfig& config);

/// tanh(W_res x + W_in u)
Vector step(const WeightSet& w, const Vector& x, const Vector& u);

/// Drives the reservoir with `inputs` (T x n_in). x0 defaults to zeros.
StateTrajectory run(const WeightSet& w, const RowMatrix& inputs, const std::optional<Vector>& x0 = std::nullopt);

/// Input-free evolution: p successive applications of tanh(W_drift .).
std::vector<Vector> drift_run(const Matrix& w_drift, const Vector& x, int p);

/// Internal timeline of length (n_tran+1) T; internal step k consumes input
/// floor(k / (n_tran+1)).
StateTrajectory transient_run(const WeightSet& w, const RowMatrix& inputs, int n_tran,
                              const std::optional<Vector>& x0 = std::nullopt);

/// Builds concatenated readout inputs. For the transient scheme `traj` must
/// be the internal timeline produced by transient_run.
ConcatTrajectory concatenate(const StateTrajectory& traj, const Scheme& scheme, const WeightSet& w);

/// run/transient_run followed by concatenate.
ConcatTrajectory simulate(const WeightSet& w, const Scheme& scheme, const RowMatrix& inputs,
                          const std::optional<Vector>& x0 = std::nullopt);

/// Number of stored output-sized partial sums for delay-state concatenation:
/// (P+1)(PQ+2) N_out / 2.
std::uint64_t memory_cost(int p, int q, int n_out);

}  // namespace resconcat
