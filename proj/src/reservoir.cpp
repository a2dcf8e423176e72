#include "resconcat/reservoir.hpp"

#include "resconcat/error.hpp"
#include "resconcat/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <type_traits>

namespace resconcat {

namespace {

constexpr int max_draw_retries = 8;
constexpr double degenerate_radius = 1e-12;

// Sub-stream ids under ReservoirConfig::seed.
constexpr std::uint64_t stream_w_in = 1;
constexpr std::uint64_t stream_w_res = 0x100;
constexpr std::uint64_t stream_w_drift = 0x200;

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double scale, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
    return m;
}

Matrix scaled_recurrent(int n, double rho, std::uint64_t seed, std::uint64_t stream, const char* what)
{
    for (int attempt = 0; attempt <= max_draw_retries; ++attempt) {
        Matrix raw = uniform_matrix(n, n, 1.0, derive_seed(seed, stream + attempt));
        const double radius = spectral_radius(raw);
        if (radius < degenerate_radius) continue;
        raw *= rho / radius;
        return raw;
    }
    throw Error(ErrorKind::degenerate_draw,
                std::string(what) + ": spectral radius vanished after " + std::to_string(max_draw_retries) + " retries");
}

void require_finite(const auto& m, const char* what)
{
    require(m.allFinite(), ErrorKind::non_finite, std::string(what) + " has non-finite entries");
}

}  // namespace

void ReservoirConfig::validate() const
{
    require(n_in >= 1 && n_res >= 1 && n_out >= 1, ErrorKind::invalid_argument, "reservoir dimensions must be >= 1");
    require(rho_in > 0.0 && std::isfinite(rho_in), ErrorKind::invalid_argument, "rho_in must be positive");
    require(rho_res > 0.0 && std::isfinite(rho_res), ErrorKind::invalid_argument, "rho_res must be positive");
    if (rho_drift)
        require(*rho_drift > 0.0 && std::isfinite(*rho_drift), ErrorKind::invalid_argument,
                "rho_drift must be positive");
}

Scheme::Scheme(Variant v)
  : v_(v)
{
    std::visit(
      [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, DelayStateScheme>) {
              require(s.p >= 0 && s.q >= 1, ErrorKind::invalid_argument, "delay scheme needs P >= 0, Q >= 1");
          } else if constexpr (std::is_same_v<T, DriftStateScheme>) {
              require(s.p >= 1, ErrorKind::invalid_argument, "drift scheme needs P >= 1");
          } else if constexpr (std::is_same_v<T, DelayTransientScheme>) {
              require(s.p >= 0 && s.q >= 1 && s.n_tran >= 1, ErrorKind::invalid_argument,
                      "transient scheme needs P >= 0, Q >= 1, N_tran >= 1");
          }
      },
      v_);
}

int Scheme::concat_factor() const
{
    return std::visit(
      [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, StandardScheme>)
              return 1;
          else
              return s.p + 1;
      },
      v_);
}

int Scheme::q() const
{
    if (const auto* d = std::get_if<DelayStateScheme>(&v_)) return d->q;
    if (const auto* t = std::get_if<DelayTransientScheme>(&v_)) return t->q;
    return 0;
}

int Scheme::n_tran() const
{
    if (const auto* t = std::get_if<DelayTransientScheme>(&v_)) return t->n_tran;
    return 0;
}

std::string Scheme::name() const
{
    switch (v_.index()) {
    case 0: return "standard";
    case 1: return "delay";
    case 2: return "drift";
    default: return "transient";
    }
}

ConcatTrajectory ConcatTrajectory::drop_before(Eigen::Index washout) const
{
    Eigen::Index first = 0;
    while (first < size() && time_index[first] < washout) ++first;
    ConcatTrajectory out;
    out.scheme = scheme;
    out.rows = rows.bottomRows(size() - first);
    out.time_index.assign(time_index.begin() + first, time_index.end());
    return out;
}

double spectral_radius(const Matrix& m)
{
    require(m.rows() == m.cols() && m.rows() > 0, ErrorKind::dimension, "spectral_radius needs a non-empty square matrix");
    require_finite(m, "spectral_radius input");
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    require(solver.info() == Eigen::Success, ErrorKind::non_finite, "eigenvalue iteration did not converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

WeightSet init_weights(const ReservoirConfig& config)
{
    config.validate();
    WeightSet w;
    w.w_in = uniform_matrix(config.n_res, config.n_in, config.rho_in, derive_seed(config.seed, stream_w_in));
    w.w_res = scaled_recurrent(config.n_res, config.rho_res, config.seed, stream_w_res, "W_res");
    if (config.rho_drift)
        w.w_drift = scaled_recurrent(config.n_res, *config.rho_drift, config.seed, stream_w_drift, "W_drift");
    return w;
}

Vector step(const WeightSet& w, const Vector& x, const Vector& u)
{
    require(x.size() == w.n_res(), ErrorKind::dimension, "state size does not match W_res");
    require(u.size() == w.n_in(), ErrorKind::dimension, "input size does not match W_in");
    require_finite(x, "state");
    require_finite(u, "input");
    return (w.w_res * x + w.w_in * u).array().tanh().matrix();
}

namespace {

Vector start_state(const WeightSet& w, const std::optional<Vector>& x0)
{
    if (!x0) return Vector::Zero(w.n_res());
    require(x0->size() == w.n_res(), ErrorKind::dimension, "initial state size does not match W_res");
    require_finite(*x0, "initial state");
    return *x0;
}

void check_inputs(const WeightSet& w, const RowMatrix& inputs)
{
    require(inputs.rows() >= 1, ErrorKind::dimension, "need at least one input step");
    require(inputs.cols() == w.n_in(), ErrorKind::dimension, "input width does not match W_in");
    require_finite(inputs, "inputs");
}

// Shared recurrence; input_row(k) gives the input row index for internal step k.
template <typename InputIndex>
StateTrajectory evolve(const WeightSet& w, const RowMatrix& inputs, Eigen::Index steps, const Vector& x0,
                       InputIndex input_row)
{
    StateTrajectory traj;
    traj.initial_state = x0;
    traj.states.resize(steps, w.n_res());
    // drive = W_in u for every input row, computed once
    const Matrix drive = w.w_in * inputs.transpose();
    Vector x = x0;
    Vector pre(w.n_res());
    for (Eigen::Index k = 0; k < steps; ++k) {
        pre.noalias() = w.w_res * x;
        pre += drive.col(input_row(k));
        x = pre.array().tanh();
        traj.states.row(k) = x.transpose();
    }
    return traj;
}

}  // namespace

StateTrajectory run(const WeightSet& w, const RowMatrix& inputs, const std::optional<Vector>& x0)
{
    check_inputs(w, inputs);
    return evolve(w, inputs, inputs.rows(), start_state(w, x0), [](Eigen::Index k) { return k; });
}

std::vector<Vector> drift_run(const Matrix& w_drift, const Vector& x, int p)
{
    require(p >= 1, ErrorKind::invalid_argument, "drift_run needs p >= 1");
    require(w_drift.rows() == w_drift.cols() && w_drift.cols() == x.size(), ErrorKind::dimension,
            "W_drift does not match the state size");
    std::vector<Vector> out;
    out.reserve(p);
    Vector cur = x;
    for (int i = 0; i < p; ++i) {
        cur = (w_drift * cur).array().tanh();
        out.push_back(cur);
    }
    return out;
}

StateTrajectory transient_run(const WeightSet& w, const RowMatrix& inputs, int n_tran, const std::optional<Vector>& x0)
{
    require(n_tran >= 1, ErrorKind::invalid_argument, "transient_run needs n_tran >= 1");
    check_inputs(w, inputs);
    const Eigen::Index hold = n_tran + 1;
    return evolve(w, inputs, inputs.rows() * hold, start_state(w, x0), [hold](Eigen::Index k) { return k / hold; });
}

namespace {

// Rows [x(i); x(i-Q); ...; x(i-PQ)] for the given trajectory indices.
void fill_delay_rows(const RowMatrix& states, int p, int q, const std::vector<Eigen::Index>& at, RowMatrix& out)
{
    const Eigen::Index n = states.cols();
    out.resize(static_cast<Eigen::Index>(at.size()), (p + 1) * n);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (int block = 0; block <= p; ++block)
            out.row(r).segment(block * n, n) = states.row(at[r] - static_cast<Eigen::Index>(block) * q);
    }
}

}  // namespace

ConcatTrajectory concatenate(const StateTrajectory& traj, const Scheme& scheme, const WeightSet& w)
{
    const RowMatrix& x = traj.states;
    const Eigen::Index len = x.rows();
    const Eigen::Index n = x.cols();
    require(n == w.n_res(), ErrorKind::dimension, "trajectory width does not match the reservoir");

    ConcatTrajectory out;
    out.scheme = scheme;

    std::visit(
      [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, StandardScheme>) {
              out.rows = x;
              out.time_index.resize(len);
              for (Eigen::Index t = 0; t < len; ++t) out.time_index[t] = t;
          } else if constexpr (std::is_same_v<T, DelayStateScheme>) {
              const Eigen::Index hist = static_cast<Eigen::Index>(s.p) * s.q;
              require(len > hist, ErrorKind::insufficient_history,
                      "trajectory of length " + std::to_string(len) + " cannot supply P*Q = " + std::to_string(hist)
                        + " steps of history");
              for (Eigen::Index t = hist; t < len; ++t) out.time_index.push_back(t);
              fill_delay_rows(x, s.p, s.q, out.time_index, out.rows);
          } else if constexpr (std::is_same_v<T, DriftStateScheme>) {
              require(w.w_drift.has_value(), ErrorKind::invalid_argument, "drift scheme needs W_drift");
              out.rows.resize(len, (s.p + 1) * n);
              out.rows.leftCols(n) = x;
              // block i = tanh(block_{i-1} W_drift^T), row-wise drift_run
              const Matrix wt = w.w_drift->transpose();
              RowMatrix block = x;
              for (int i = 1; i <= s.p; ++i) {
                  block = (block * wt).array().tanh();
                  out.rows.middleCols(i * n, n) = block;
              }
              out.time_index.resize(len);
              for (Eigen::Index t = 0; t < len; ++t) out.time_index[t] = t;
          } else {
              const Eigen::Index hold = s.n_tran + 1;
              require(len % hold == 0, ErrorKind::dimension,
                      "transient trajectory length must be a multiple of n_tran + 1");
              const Eigen::Index hist = static_cast<Eigen::Index>(s.p) * s.q;
              std::vector<Eigen::Index> internal;
              for (Eigen::Index t = 0; t < len / hold; ++t) {
                  const Eigen::Index i = hold * t + s.n_tran;
                  if (i < hist) continue;
                  internal.push_back(i);
                  out.time_index.push_back(t);
              }
              require(!internal.empty(), ErrorKind::insufficient_history,
                      "transient trajectory cannot supply P*Q internal steps of history");
              fill_delay_rows(x, s.p, s.q, internal, out.rows);
          }
      },
      scheme.variant());
    return out;
}

ConcatTrajectory simulate(const WeightSet& w, const Scheme& scheme, const RowMatrix& inputs,
                          const std::optional<Vector>& x0)
{
    if (scheme.is_transient()) return concatenate(transient_run(w, inputs, scheme.n_tran(), x0), scheme, w);
    return concatenate(run(w, inputs, x0), scheme, w);
}

std::uint64_t memory_cost(int p, int q, int n_out)
{
    require(p >= 0 && q >= 1 && n_out >= 1, ErrorKind::invalid_argument, "memory_cost needs P >= 0, Q >= 1, N_out >= 1");
    const auto pp = static_cast<std::uint64_t>(p);
    const auto qq = static_cast<std::uint64_t>(q);
    // (P+1)(PQ+2) is always even: if P is odd then P+1 is even, else PQ+2 is.
    return (pp + 1) * (pp * qq + 2) / 2 * static_cast<std::uint64_t>(n_out);
}

}  // namespace resconcat
