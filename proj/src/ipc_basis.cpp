#include "resconcat/error.hpp"
#include "resconcat/ipc.hpp"

#include <algorithm>
#include <numeric>

namespace resconcat::ipc {

Basis::Basis(std::vector<Factor> factors)
  : factors_(std::move(factors))
{
    std::sort(factors_.begin(), factors_.end());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        require(factors_[i].delay >= 0 && factors_[i].degree >= 1, ErrorKind::invalid_argument,
                "basis factors need delay >= 0 and degree >= 1");
        require(i == 0 || factors_[i].delay != factors_[i - 1].delay, ErrorKind::invalid_argument,
                "basis delays must be distinct");
    }
}

int Basis::order() const
{
    return std::accumulate(factors_.begin(), factors_.end(), 0,
                           [](int acc, const Factor& f) { return acc + f.degree; });
}

std::strong_ordering Basis::operator<=>(const Basis& other) const
{
    if (auto c = max_delay() <=> other.max_delay(); c != 0) return c;
    return std::lexicographical_compare_three_way(factors_.begin(), factors_.end(), other.factors_.begin(),
                                                  other.factors_.end());
}

std::string Basis::to_string() const
{
    std::string s;
    for (const Factor& f : factors_) {
        if (!s.empty()) s += ' ';
        s += std::to_string(f.delay) + ':' + std::to_string(f.degree);
    }
    return s;
}

double legendre(int degree, double x)
{
    require(degree >= 0, ErrorKind::invalid_argument, "legendre degree must be >= 0");
    if (degree == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int d = 1; d < degree; ++d) {
        const double next = ((2.0 * d + 1.0) * x * cur - d * prev) / (d + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

Matrix legendre_table(std::span<const double> u, int max_degree)
{
    require(max_degree >= 0, ErrorKind::invalid_argument, "legendre_table needs max_degree >= 0");
    const auto n = static_cast<Eigen::Index>(u.size());
    Matrix table(n, max_degree + 1);
    table.col(0).setOnes();
    if (max_degree >= 1) table.col(1) = Eigen::Map<const Vector>(u.data(), n);
    for (int d = 1; d < max_degree; ++d)
        table.col(d + 1) =
          (((2.0 * d + 1.0) * table.col(1).array() * table.col(d).array() - d * table.col(d - 1).array()) / (d + 1.0))
            .matrix();
    return table;
}

std::vector<double> target_signal(const Basis& basis, std::span<const double> u)
{
    require(!basis.factors().empty(), ErrorKind::invalid_argument, "empty basis");
    const auto len = static_cast<long>(u.size());
    const long first = basis.max_delay();
    require(len > first, ErrorKind::insufficient_history, "input series shorter than the basis' maximum delay");
    std::vector<double> z(static_cast<std::size_t>(len - first), 1.0);
    for (const Factor& f : basis.factors())
        for (long t = first; t < len; ++t) z[t - first] *= legendre(f.degree, u[t - f.delay]);
    return z;
}

namespace {

void compositions(int remaining, int delay, int tau_max, std::vector<Factor>& cur, std::vector<Basis>& out)
{
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    if (delay > tau_max) return;
    // skip this delay
    compositions(remaining, delay + 1, tau_max, cur, out);
    for (int deg = 1; deg <= remaining; ++deg) {
        cur.push_back({delay, deg});
        compositions(remaining - deg, delay + 1, tau_max, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Basis> enumerate_basis(int order, int tau_max)
{
    require(order >= 1 && tau_max >= 0, ErrorKind::invalid_argument, "enumerate_basis needs order >= 1, tau_max >= 0");
    std::vector<Basis> out;
    std::vector<Factor> cur;
    compositions(order, 0, tau_max, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Basis> extend_basis(std::span<const Basis> parents, int tau_max)
{
    std::vector<Basis> out;
    for (const Basis& parent : parents) {
        // degree per delay, dense
        std::vector<int> deg(static_cast<std::size_t>(tau_max) + 1, 0);
        for (const Factor& f : parent.factors()) {
            require(f.delay <= tau_max, ErrorKind::invalid_argument, "parent basis exceeds tau_max");
            deg[f.delay] = f.degree;
        }
        auto emit = [&] {
            std::vector<Factor> fs;
            for (int d = 0; d <= tau_max; ++d)
                if (deg[d] > 0) fs.push_back({d, deg[d]});
            out.emplace_back(std::move(fs));
        };
        for (int a = 0; a <= tau_max; ++a) {
            deg[a] += 2;
            emit();
            deg[a] -= 2;
            for (int b = a + 1; b <= tau_max; ++b) {
                ++deg[a];
                ++deg[b];
                emit();
                --deg[a];
                --deg[b];
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double capacity_threshold(double scale, Eigen::Index dim, long t_steps)
{
    require(scale >= 0.0 && t_steps > 0, ErrorKind::invalid_argument, "invalid threshold parameters");
    return scale * static_cast<double>(dim) * 70.0 / static_cast<double>(t_steps);
}

}  // namespace resconcat::ipc
