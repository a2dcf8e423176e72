#pragma once

// Benchmark series: generalized Henon map, NARMA, and i.i.d. uniform drivers.
// Every generator is a pure function of its parameters and seed.

#include "resconcat/reservoir.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace resconcat::datasets {

struct Dataset {
    Matrix inputs;  // T x n_in
    Matrix targets; // T x n_out
    int washout = 0;
    std::string name;

    Eigen::Index length() const { return inputs.rows(); }

    /// Rows [first, first + count) with a new washout.
    Dataset slice(Eigen::Index first, Eigen::Index count, int washout) const;
};

std::vector<double> uniform_inputs(long length, std::uint64_t seed, double lo, double hi);

/// Noise-free m-th order recurrence y(t) = 1.76 - y(t-m+1)^2 - 0.1 y(t-m),
/// continued for `steps` values after the m-value `history` (oldest first).
std::vector<double> henon_iterate(int m, std::span<const double> history, long steps);

/// One-step-ahead prediction task on the observed series
/// y_obs(t) = y(t) + sigma(t), sigma ~ N(0, noise_std^2): inputs y_obs(t),
/// targets y_obs(t+1). Initial window uniform on [-0.1, 0.1], 500-step
/// transient discarded. The noise is not fed back into the map, whose
/// attractor does not survive dynamic noise of this size.
Dataset henon(int m, long length, double noise_std, std::uint64_t seed);

/// y(t) = 0.3 y(t-1) + 0.05 y(t-1) sum_{i=1..m} y(t-i) + 1.5 s(t-9) s(t) + 0.1
/// with zero history for t <= 0.
std::vector<double> narma_iterate(int m, std::span<const double> s);

/// Inputs s(t) ~ U[0, 0.5], targets y(t).
Dataset narma(int m, long length, std::uint64_t seed);

/// Columns t,input0..,target0..
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

}  // namespace resconcat::datasets
