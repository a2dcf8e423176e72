#include "resconcat/readout.hpp"

#include "resconcat/error.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace resconcat {

LeastSquaresFit least_squares(const Matrix& x, const Matrix& y)
{
    require(x.rows() >= 1 && x.cols() >= 1, ErrorKind::dimension, "empty design matrix");
    require(y.rows() == x.rows(), ErrorKind::dimension, "target rows do not match design rows");
    require(x.allFinite(), ErrorKind::non_finite, "design matrix has non-finite entries");
    require(y.allFinite(), ErrorKind::non_finite, "targets have non-finite entries");

    const Eigen::Index rows = x.rows();
    const Eigen::Index cols = x.cols();
    const double relative_cutoff = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();

    LeastSquaresFit fit;
    double sigma_max = 0.0;
    if (rows >= cols) {
        // X = Q R, so X^+ = R^+ Q^T and X, R share singular values.
        Eigen::HouseholderQR<Matrix> qr(x);
        const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        const Matrix qty = (qr.householderQ().transpose() * y).topRows(cols);
        Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(relative_cutoff);
        fit.coefficients = svd.solve(qty);
        fit.report.effective_rank = static_cast<int>(svd.rank());
        sigma_max = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    } else {
        Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(relative_cutoff);
        fit.coefficients = svd.solve(y);
        fit.report.effective_rank = static_cast<int>(svd.rank());
        sigma_max = svd.singularValues()(0);
    }
    fit.report.singular_cutoff = relative_cutoff * sigma_max;
    fit.report.residual_sse = (x * fit.coefficients - y).squaredNorm();
    return fit;
}

namespace {

Matrix design_matrix(const ConcatTrajectory& x_hat, bool bias)
{
    Matrix x(x_hat.size(), x_hat.dim() + (bias ? 1 : 0));
    x.leftCols(x_hat.dim()) = x_hat.rows;
    if (bias) x.col(x_hat.dim()).setOnes();
    return x;
}

}  // namespace

std::pair<ReadoutWeights, FitReport> fit_readout(const ConcatTrajectory& x_hat, const Matrix& targets, bool bias)
{
    require(x_hat.size() >= 1, ErrorKind::dimension, "empty design matrix");
    LeastSquaresFit fit = least_squares(design_matrix(x_hat, bias), targets);
    ReadoutWeights w{fit.coefficients.transpose(), bias};
    return {std::move(w), fit.report};
}

Matrix predict(const ReadoutWeights& w, const ConcatTrajectory& x_hat)
{
    require(w.state_dim() == x_hat.dim(), ErrorKind::dimension, "readout width does not match concatenated states");
    Matrix y = x_hat.rows * w.w_out.leftCols(x_hat.dim()).transpose();
    if (w.bias_enabled) y.rowwise() += w.w_out.col(x_hat.dim()).transpose();
    return y;
}

double nmse(std::span<const double> pred, std::span<const double> target)
{
    require(pred.size() == target.size(), ErrorKind::dimension, "nmse series lengths differ");
    require(target.size() >= 2, ErrorKind::dimension, "nmse needs at least two samples");
    const auto n = static_cast<double>(target.size());
    double mean = 0.0;
    for (double v : target) mean += v;
    mean /= n;
    double err = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        err += (pred[i] - target[i]) * (pred[i] - target[i]);
        var += (target[i] - mean) * (target[i] - mean);
    }
    require(std::isfinite(err), ErrorKind::non_finite, "nmse: non-finite prediction");
    require(var > 0.0, ErrorKind::degenerate_target, "nmse: target series is constant");
    return err / var;
}

}  // namespace resconcat
