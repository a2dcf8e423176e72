#pragma once

// Budgeted seeded search over box-constrained continuous parameters.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace resconcat::search {

struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;
};

struct SearchSpace {
    std::vector<Axis> axes;

    void validate() const;
    std::size_t dim() const { return axes.size(); }

    /// rho_in in [0.05, 2] (log), rho_res in [0.1, 1.4], and rho_drift in
    /// [0.1, 1.4] when `with_drift`.
    static SearchSpace reservoir(bool with_drift);
};

using Point = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

struct TraceEntry {
    Point params;
    double objective = 0.0;
};

struct SearchResult {
    Point best_params;
    double best_objective = 0.0;
    std::vector<TraceEntry> trace;
};

/// `budget` i.i.d. samples. Non-finite objectives are recorded as +inf.
/// Evaluations may run in parallel; the trace is in sample order and ties
/// resolve to the earliest sample.
SearchResult random_search(const Objective& objective, const SearchSpace& space, int budget, std::uint64_t seed);

/// Full lattice with `points_per_axis` points per axis (endpoints included,
/// geometric on log axes; a single point sits at the midpoint). The first
/// axis varies slowest.
SearchResult grid_search(const Objective& objective, const SearchSpace& space, int points_per_axis);

/// Header is the axis names followed by `objective`.
void write_trace_csv(std::ostream& out, const SearchSpace& space, const SearchResult& result);

}  // namespace resconcat::search
