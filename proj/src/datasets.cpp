#include "resconcat/datasets.hpp"

#include "resconcat/error.hpp"
#include "resconcat/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace resconcat::datasets {

namespace {

constexpr int max_regenerations = 16;
constexpr long henon_transient = 500;
constexpr double henon_divergence = 10.0;
constexpr double narma_divergence = 1e3;

}  // namespace

Dataset Dataset::slice(Eigen::Index first, Eigen::Index count, int new_washout) const
{
    require(first >= 0 && count >= 1 && first + count <= length(), ErrorKind::dimension, "dataset slice out of range");
    require(new_washout >= 0 && new_washout < count, ErrorKind::invalid_argument, "washout must be shorter than slice");
    return Dataset{inputs.middleRows(first, count), targets.middleRows(first, count), new_washout, name};
}

std::vector<double> uniform_inputs(long length, std::uint64_t seed, double lo, double hi)
{
    require(lo < hi, ErrorKind::invalid_argument, "uniform_inputs needs lo < hi");
    require(length >= 0, ErrorKind::invalid_argument, "negative length");
    Xoshiro256 rng(seed);
    std::vector<double> u(static_cast<std::size_t>(length));
    for (double& v : u) v = rng.uniform(lo, hi);
    return u;
}

std::vector<double> henon_iterate(int m, std::span<const double> history, long steps)
{
    require(m >= 2, ErrorKind::invalid_argument, "Henon order m must be >= 2");
    require(static_cast<int>(history.size()) == m, ErrorKind::dimension, "Henon history must hold m values");
    std::vector<double> y(history.begin(), history.end());
    y.reserve(history.size() + static_cast<std::size_t>(steps));
    for (long k = 0; k < steps; ++k) {
        const std::size_t t = y.size();
        y.push_back(1.76 - y[t - m + 1] * y[t - m + 1] - 0.1 * y[t - m]);
    }
    return std::vector<double>(y.begin() + m, y.end());
}

Dataset henon(int m, long length, double noise_std, std::uint64_t seed)
{
    require(m >= 2, ErrorKind::invalid_argument, "Henon order m must be >= 2");
    require(length > m, ErrorKind::invalid_argument, "Henon length too short");
    require(noise_std >= 0.0, ErrorKind::invalid_argument, "noise_std must be >= 0");

    // one extra sample so the last input has a target
    const long steps = henon_transient + length + 1;
    for (int attempt = 0; attempt < max_regenerations; ++attempt) {
        Xoshiro256 rng(derive_seed(seed, attempt));
        std::vector<double> history(m);
        for (double& v : history) v = rng.uniform(-0.1, 0.1);
        std::vector<double> y = henon_iterate(m, history, steps);
        bool diverged = false;
        for (double v : y)
            if (!(std::abs(v) <= henon_divergence)) {
                diverged = true;
                break;
            }
        if (diverged) continue;
        if (noise_std > 0.0)
            for (double& v : y) v += noise_std * rng.normal();

        Dataset d;
        d.name = "henon" + std::to_string(m);
        d.inputs.resize(length, 1);
        d.targets.resize(length, 1);
        for (long t = 0; t < length; ++t) {
            d.inputs(t, 0) = y[henon_transient + t];
            d.targets(t, 0) = y[henon_transient + t + 1];
        }
        return d;
    }
    throw Error(ErrorKind::divergence, "Henon series diverged on " + std::to_string(max_regenerations) + " seeds");
}

std::vector<double> narma_iterate(int m, std::span<const double> s)
{
    require(m >= 1, ErrorKind::invalid_argument, "NARMA order must be >= 1");
    const auto len = static_cast<long>(s.size());
    std::vector<double> y(s.size(), 0.0);
    auto y_at = [&](long t) { return t >= 0 ? y[t] : 0.0; };
    auto s_at = [&](long t) { return t >= 0 ? s[t] : 0.0; };
    for (long t = 0; t < len; ++t) {
        double window = 0.0;
        for (int i = 1; i <= m; ++i) window += y_at(t - i);
        y[t] = 0.3 * y_at(t - 1) + 0.05 * y_at(t - 1) * window + 1.5 * s_at(t - 9) * s_at(t) + 0.1;
    }
    return y;
}

Dataset narma(int m, long length, std::uint64_t seed)
{
    require(m == 5 || m == 10, ErrorKind::invalid_argument, "NARMA order must be 5 or 10");
    require(length > 10, ErrorKind::invalid_argument, "NARMA length too short");
    for (int attempt = 0; attempt < max_regenerations; ++attempt) {
        const std::vector<double> s = uniform_inputs(length, derive_seed(seed, attempt), 0.0, 0.5);
        const std::vector<double> y = narma_iterate(m, s);
        bool ok = true;
        for (double v : y)
            if (!(std::abs(v) <= narma_divergence && v > 0.0)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        Dataset d;
        d.name = "narma" + std::to_string(m);
        d.inputs = Eigen::Map<const Vector>(s.data(), length);
        d.targets = Eigen::Map<const Vector>(y.data(), length);
        return d;
    }
    throw Error(ErrorKind::divergence, "NARMA series diverged on " + std::to_string(max_regenerations) + " seeds");
}

void write_csv(std::ostream& out, const Dataset& data)
{
    out << "t";
    for (Eigen::Index i = 0; i < data.inputs.cols(); ++i) out << ",input" << i;
    for (Eigen::Index i = 0; i < data.targets.cols(); ++i) out << ",target" << i;
    out << '\n';
    const auto precision = out.precision(17);
    for (Eigen::Index t = 0; t < data.length(); ++t) {
        out << t;
        for (Eigen::Index i = 0; i < data.inputs.cols(); ++i) out << ',' << data.inputs(t, i);
        for (Eigen::Index i = 0; i < data.targets.cols(); ++i) out << ',' << data.targets(t, i);
        out << '\n';
    }
    out.precision(precision);
}

Dataset read_csv(std::istream& in)
{
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::io, "dataset CSV is empty");
    int n_in = 0;
    int n_out = 0;
    {
        std::stringstream header(line);
        std::string col;
        std::getline(header, col, ',');
        require(col == "t", ErrorKind::io, "dataset CSV must start with column t");
        while (std::getline(header, col, ',')) {
            if (col.rfind("input", 0) == 0) {
                require(n_out == 0, ErrorKind::io, "input columns must precede target columns");
                ++n_in;
            } else if (col.rfind("target", 0) == 0) {
                ++n_out;
            } else {
                throw Error(ErrorKind::io, "unknown dataset column " + col);
            }
        }
    }
    require(n_in >= 1 && n_out >= 1, ErrorKind::io, "dataset CSV needs input and target columns");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> values;
        std::getline(row, cell, ',');
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        require(static_cast<int>(values.size()) == n_in + n_out, ErrorKind::io, "ragged dataset CSV row");
        rows.push_back(std::move(values));
    }
    Dataset d;
    d.name = "csv";
    d.inputs.resize(static_cast<Eigen::Index>(rows.size()), n_in);
    d.targets.resize(static_cast<Eigen::Index>(rows.size()), n_out);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (int i = 0; i < n_in; ++i) d.inputs(t, i) = rows[t][i];
        for (int i = 0; i < n_out; ++i) d.targets(t, i) = rows[t][n_in + i];
    }
    return d;
}

}  // namespace resconcat::datasets
