#pragma once

#include "resconcat/reservoir.hpp"

#include <span>

namespace resconcat {

/// Trained linear readout. With bias enabled the last column of w_out
/// multiplies a constant 1.
struct ReadoutWeights {
    Matrix w_out; // n_out x (D [+1])
    bool bias_enabled = false;

    Eigen::Index state_dim() const { return w_out.cols() - (bias_enabled ? 1 : 0); }
};

struct FitReport {
    double residual_sse = 0.0;
    int effective_rank = 0;
    double singular_cutoff = 0.0;
};

struct LeastSquaresFit {
    Matrix coefficients; // D x n_out
    FitReport report;
};

/// Minimum-norm least squares min ||X B - Y||_F via a thin QR followed by an
/// SVD of the triangular factor. Singular values below
/// max(rows, cols) * eps * sigma_max are treated as zero.
LeastSquaresFit least_squares(const Matrix& x, const Matrix& y);

std::pair<ReadoutWeights, FitReport> fit_readout(const ConcatTrajectory& x_hat, const Matrix& targets, bool bias);

/// T_eff x n_out predictions, y(t) = W_out x^(t) (+ bias).
Matrix predict(const ReadoutWeights& w, const ConcatTrajectory& x_hat);

/// <|y - y_tc|^2> / <|y_tc - <y_tc>|^2>
double nmse(std::span<const double> pred, std::span<const double> target);

}  // namespace resconcat
