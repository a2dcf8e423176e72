#include "resconcat/hypersearch.hpp"

#include "resconcat/error.hpp"
#include "resconcat/rng.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace resconcat::search {

void SearchSpace::validate() const
{
    require(!axes.empty(), ErrorKind::invalid_argument, "search space has no axes");
    for (const Axis& a : axes) {
        require(a.lo < a.hi, ErrorKind::invalid_argument, "axis " + a.name + " needs lo < hi");
        require(!a.log_scale || a.lo > 0.0, ErrorKind::invalid_argument, "log axis " + a.name + " needs lo > 0");
    }
}

SearchSpace SearchSpace::reservoir(bool with_drift)
{
    SearchSpace s;
    s.axes.push_back({"rho_in", 0.05, 2.0, true});
    s.axes.push_back({"rho_res", 0.1, 1.4, false});
    if (with_drift) s.axes.push_back({"rho_drift", 0.1, 1.4, false});
    return s;
}

namespace {

double sample_axis(const Axis& a, double unit)
{
    if (a.log_scale) return std::exp(std::log(a.lo) + unit * (std::log(a.hi) - std::log(a.lo)));
    return a.lo + unit * (a.hi - a.lo);
}

SearchResult evaluate_all(const Objective& objective, std::vector<Point> points)
{
    SearchResult result;
    result.trace.resize(points.size());
    const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        double value = std::numeric_limits<double>::infinity();
        try {
            value = objective(points[i]);
        } catch (const Error&) {
            // failed configurations (e.g. diverging datasets) count as +inf
        }
        if (!std::isfinite(value)) value = std::numeric_limits<double>::infinity();
        result.trace[i] = {std::move(points[i]), value};
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.trace.size(); ++i)
        if (result.trace[i].objective < result.trace[best].objective) best = i;
    result.best_params = result.trace[best].params;
    result.best_objective = result.trace[best].objective;
    return result;
}

}  // namespace

SearchResult random_search(const Objective& objective, const SearchSpace& space, int budget, std::uint64_t seed)
{
    space.validate();
    require(budget >= 1, ErrorKind::invalid_argument, "search budget must be >= 1");
    Xoshiro256 rng(seed);
    std::vector<Point> points(static_cast<std::size_t>(budget));
    for (Point& p : points) {
        p.reserve(space.dim());
        for (const Axis& a : space.axes) p.push_back(sample_axis(a, rng.uniform01()));
    }
    return evaluate_all(objective, std::move(points));
}

SearchResult grid_search(const Objective& objective, const SearchSpace& space, int points_per_axis)
{
    space.validate();
    require(points_per_axis >= 1, ErrorKind::invalid_argument, "grid needs at least one point per axis");
    std::vector<std::vector<double>> ticks;
    for (const Axis& a : space.axes) {
        std::vector<double> t;
        for (int i = 0; i < points_per_axis; ++i)
            t.push_back(sample_axis(a, points_per_axis == 1 ? 0.5 : static_cast<double>(i) / (points_per_axis - 1)));
        ticks.push_back(std::move(t));
    }
    std::vector<Point> points;
    std::vector<int> idx(space.dim(), 0);
    while (true) {
        Point p;
        for (std::size_t k = 0; k < idx.size(); ++k) p.push_back(ticks[k][idx[k]]);
        points.push_back(std::move(p));
        // odometer, last axis fastest
        int k = static_cast<int>(idx.size()) - 1;
        while (k >= 0 && ++idx[k] == points_per_axis) idx[k--] = 0;
        if (k < 0) break;
    }
    return evaluate_all(objective, std::move(points));
}

void write_trace_csv(std::ostream& out, const SearchSpace& space, const SearchResult& result)
{
    for (const Axis& a : space.axes) out << a.name << ',';
    out << "objective\n";
    const auto precision = out.precision(17);
    for (const TraceEntry& e : result.trace) {
        for (double v : e.params) out << v << ',';
        out << e.objective << '\n';
    }
    out.precision(precision);
}

}  // namespace resconcat::search
