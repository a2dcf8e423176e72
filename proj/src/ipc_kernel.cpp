#include "resconcat/error.hpp"
#include "resconcat/ipc.hpp"
#include "resconcat/readout.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <limits>

namespace resconcat::ipc {

namespace {

double clamp_unit(double c) { return std::clamp(c, 0.0, 1.0); }

// Capacity from ||z||^2, sum z, and the squared norm of the projection of z
// onto the design's column space.
double capacity_from_moments(double sum_sq, double sum, double projected_sq, Eigen::Index n)
{
    const double centered_sq = sum_sq - sum * sum / static_cast<double>(n);
    require(centered_sq > 1e-300 * std::max(1.0, sum_sq), ErrorKind::degenerate_target,
            "capacity target has zero variance");
    const double sse = std::max(0.0, sum_sq - projected_sq);
    return clamp_unit(1.0 - sse / centered_sq);
}

}  // namespace

double capacity(const Matrix& design, std::span<const double> target)
{
    const auto n = static_cast<Eigen::Index>(target.size());
    require(design.rows() == n, ErrorKind::dimension, "capacity target length does not match the design rows");
    const Eigen::Map<const Vector> z(target.data(), n);
    const double mean = z.mean();
    const double centered_sq = (z.array() - mean).square().sum();
    require(centered_sq > 0.0, ErrorKind::degenerate_target, "capacity target has zero variance");
    const LeastSquaresFit fit = least_squares(design, z);
    return clamp_unit(1.0 - fit.report.residual_sse / centered_sq);
}

double capacity(const ConcatTrajectory& x_hat, std::span<const double> target)
{
    return capacity(Matrix(x_hat.rows), target);
}

CapacityKernel::CapacityKernel(const Matrix& design)
{
    require(design.rows() >= design.cols() && design.cols() >= 1, ErrorKind::dimension,
            "capacity kernel needs a tall design matrix");
    require(design.allFinite(), ErrorKind::non_finite, "design matrix has non-finite entries");
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(static_cast<double>(design.rows()) * std::numeric_limits<double>::epsilon());
    const Eigen::Index r = qr.rank();
    q_ = qr.householderQ() * Matrix::Identity(design.rows(), r);
}

double CapacityKernel::capacity(std::span<const double> target) const
{
    require(static_cast<Eigen::Index>(target.size()) == rows(), ErrorKind::dimension,
            "capacity target length does not match the design rows");
    const Eigen::Map<const Vector> z(target.data(), rows());
    return capacity_from_moments(z.squaredNorm(), z.sum(), (q_.transpose() * z).squaredNorm(), rows());
}

std::vector<double> CapacityKernel::capacities(const Matrix& legendre, Eigen::Index first_time,
                                               std::span<const Basis> bases, int batch_size) const
{
    require(batch_size >= 1, ErrorKind::invalid_argument, "batch_size must be >= 1");
    const Eigen::Index n = rows();
    const auto count = static_cast<long>(bases.size());
    std::vector<double> out(bases.size(), 0.0);
    if (count == 0) return out;
    for (const Basis& b : bases) {
        require(first_time - b.max_delay() >= 0, ErrorKind::insufficient_history, "not enough input history for basis");
        require(first_time + n <= legendre.rows(), ErrorKind::dimension, "legendre table too short for design");
        for (const Factor& f : b.factors())
            require(f.degree < legendre.cols(), ErrorKind::dimension, "legendre table lacks degree");
    }

    const long batches = (count + batch_size - 1) / batch_size;
    // rows per chunk: keeps a chunk of targets resident in cache while it is
    // built and projected
    constexpr Eigen::Index chunk_rows = 1024;
    bool failed = false;
#pragma omp parallel
    {
        Matrix z(chunk_rows, batch_size);
        Matrix proj(rank(), batch_size);
        Vector sum_sq(batch_size);
        Vector sum(batch_size);
#pragma omp for schedule(dynamic)
        for (long bi = 0; bi < batches; ++bi) {
            const long first = bi * batch_size;
            const long width = std::min<long>(batch_size, count - first);
            proj.setZero();
            sum_sq.setZero();
            sum.setZero();
            for (Eigen::Index r0 = 0; r0 < n; r0 += chunk_rows) {
                const Eigen::Index len = std::min(chunk_rows, n - r0);
                for (long j = 0; j < width; ++j) {
                    const Basis& b = bases[first + j];
                    auto col = z.col(j).head(len);
                    const Factor& f0 = b.factors().front();
                    col = legendre.col(f0.degree).segment(first_time + r0 - f0.delay, len);
                    for (std::size_t k = 1; k < b.factors().size(); ++k) {
                        const Factor& f = b.factors()[k];
                        col.array() *= legendre.col(f.degree).segment(first_time + r0 - f.delay, len).array();
                    }
                    sum_sq(j) += col.squaredNorm();
                    sum(j) += col.sum();
                }
                proj.leftCols(width).noalias() +=
                  q_.middleRows(r0, len).transpose() * z.topLeftCorner(len, width);
            }
            for (long j = 0; j < width; ++j) {
                const double centered_sq = sum_sq(j) - sum(j) * sum(j) / static_cast<double>(n);
                if (!(centered_sq > 0.0)) {
#pragma omp atomic write
                    failed = true;
                    continue;
                }
                const double sse = std::max(0.0, sum_sq(j) - proj.col(j).squaredNorm());
                out[first + j] = clamp_unit(1.0 - sse / centered_sq);
            }
        }
    }
    require(!failed, ErrorKind::degenerate_target, "capacity target has zero variance");
    return out;
}

}  // namespace resconcat::ipc
