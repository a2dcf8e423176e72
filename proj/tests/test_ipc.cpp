#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "resconcat/datasets.hpp"
#include "resconcat/error.hpp"
#include "resconcat/ipc.hpp"
#include "resconcat/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

using namespace resconcat;
using namespace resconcat::ipc;

namespace {

// Gauss-Legendre nodes and weights from the eigen-decomposition of the
// Jacobi matrix (Golub-Welsch); no Legendre evaluation involved.
std::pair<Vector, Vector> gauss_legendre(int n)
{
    Matrix jacobi = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
    const Vector nodes = es.eigenvalues();
    const Vector weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return {nodes, weights};
}

double quad(int a, int b)
{
    static const auto [x, w] = gauss_legendre(64);
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += w(i) * legendre(a, x(i)) * legendre(b, x(i));
    return s;
}

long binomial(int n, int k)
{
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

WeightSet ipc_weights(int n_res, std::uint64_t seed, double rho_res = 0.9, bool drift = false)
{
    ReservoirConfig c;
    c.n_res = n_res;
    c.rho_in = 0.3;
    c.rho_res = rho_res;
    if (drift) c.rho_drift = 0.9;
    c.seed = seed;
    return init_weights(c);
}

IpcConfig small_config(long t_steps, int tau_max, int max_order)
{
    IpcConfig cfg;
    cfg.t_steps = t_steps;
    cfg.tau_max = tau_max;
    cfg.max_order = max_order;
    cfg.input_seed = 77;
    cfg.washout = 200;
    return cfg;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("legendre closed forms")
{
    for (double x : {-1.0, -0.7, -0.2, 0.0, 0.3, 0.55, 1.0}) {
        CHECK(legendre(0, x) == 1.0);
        CHECK(legendre(1, x) == x);
        CHECK(legendre(2, x) == doctest::Approx((3 * x * x - 1) / 2).epsilon(1e-14));
        CHECK(legendre(3, x) == doctest::Approx((5 * x * x * x - 3 * x) / 2).epsilon(1e-14));
        CHECK(legendre(4, x) == doctest::Approx((35 * std::pow(x, 4) - 30 * x * x + 3) / 8).epsilon(1e-14));
        CHECK(legendre(5, x) == doctest::Approx((63 * std::pow(x, 5) - 70 * std::pow(x, 3) + 15 * x) / 8).epsilon(1e-14));
    }
    for (int d = 0; d <= 9; ++d) CHECK(legendre(d, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(legendre(-1, 0.0), Error);
}

TEST_CASE("legendre orthogonality by Gauss-Legendre quadrature")
{
    CHECK(std::abs(quad(3, 5)) < 1e-13);
    CHECK(std::abs(quad(2, 4)) < 1e-13);
    CHECK(std::abs(quad(1, 9)) < 1e-13);
    for (int n = 0; n <= 9; ++n) CHECK(quad(n, n) == doctest::Approx(2.0 / (2 * n + 1)).epsilon(1e-12));
}

TEST_CASE("legendre_table agrees with legendre")
{
    const std::vector<double> u = datasets::uniform_inputs(50, 3, -1.0, 1.0);
    const Matrix table = legendre_table(u, 7);
    REQUIRE(table.rows() == 50);
    REQUIRE(table.cols() == 8);
    for (Eigen::Index t = 0; t < 50; ++t)
        for (int d = 0; d <= 7; ++d) CHECK(table(t, d) == doctest::Approx(legendre(d, u[t])).epsilon(1e-13));
}

TEST_CASE("target_signal")
{
    const std::vector<double> u{0.5, -0.25, 1.0, 0.1};
    const auto z1 = target_signal(Basis({{0, 1}}), u);
    CHECK(z1 == u);

    // P_1(u(t-2)) * P_2(u(t)), t = 2, 3
    const auto z = target_signal(Basis({{2, 1}, {0, 2}}), u);
    REQUIRE(z.size() == 2);
    CHECK(z[0] == doctest::Approx(0.5 * (3 * 1.0 - 1) / 2));
    CHECK(z[1] == doctest::Approx(-0.25 * (3 * 0.01 - 1) / 2));

    CHECK_THROWS_AS(target_signal(Basis({{4, 1}}), u), Error);
    CHECK_THROWS_AS(target_signal(Basis(), u), Error);
}

TEST_CASE("Basis invariants and ordering")
{
    const Basis b({{3, 2}, {0, 1}});
    CHECK(b.order() == 3);
    CHECK(b.max_delay() == 3);
    CHECK(b.to_string() == "0:1 3:2");
    CHECK(Basis({{1, 5}}) < Basis({{0, 1}, {2, 1}})); // smaller max delay first
    CHECK_THROWS_AS(Basis({{1, 1}, {1, 2}}), Error);
    CHECK_THROWS_AS(Basis({{0, 0}}), Error);
    CHECK_THROWS_AS(Basis({{-1, 1}}), Error);
}

TEST_CASE("enumerate_basis counts and structure")
{
    CHECK(enumerate_basis(1, 2).size() == 3);
    CHECK(enumerate_basis(2, 1).size() == 3); // 0:2, 1:2, 0:1 1:1
    // multisets of size k over tau_max + 1 delays
    for (int order = 1; order <= 5; ++order)
        for (int tau : {0, 1, 4, 25}) {
            const auto bases = enumerate_basis(order, tau);
            CHECK(static_cast<long>(bases.size()) == binomial(tau + order, order));
            std::set<std::string> seen;
            for (std::size_t i = 0; i < bases.size(); ++i) {
                CHECK(bases[i].order() == order);
                CHECK(bases[i].max_delay() <= tau);
                seen.insert(bases[i].to_string());
                if (i > 0) CHECK(bases[i - 1] < bases[i]);
            }
            CHECK(seen.size() == bases.size());
        }
    CHECK(enumerate_basis(3, 25).size() == 3276);
}

TEST_CASE("extend_basis raises the order by two")
{
    const std::vector<Basis> parent{Basis({{0, 1}})};
    const auto ext = extend_basis(parent, 1);
    // 0:3, 0:2 1:1, 0:1 1:2
    REQUIRE(ext.size() == 3);
    std::set<std::string> names;
    for (const Basis& b : ext) names.insert(b.to_string());
    CHECK(names == std::set<std::string>{"0:3", "0:2 1:1", "0:1 1:2"});

    // Extending every order-k basis yields every order-(k+2) basis.
    for (int k = 1; k <= 3; ++k) {
        const auto all = enumerate_basis(k, 3);
        CHECK(extend_basis(all, 3) == enumerate_basis(k + 2, 3));
    }
    CHECK(extend_basis(std::vector<Basis>{}, 5).empty());
}

TEST_CASE("capacity_threshold")
{
    CHECK(capacity_threshold(1.0, 12, 1000000) == doctest::Approx(7e-5 * 12));
    CHECK(capacity_threshold(1.0, 24, 100000) == doctest::Approx(7e-4 * 24));
    CHECK(capacity_threshold(1.0, 12, 100000) > capacity_threshold(1.0, 12, 200000));
    CHECK(capacity_threshold(2.0, 12, 100000) > capacity_threshold(1.0, 12, 100000));
}

TEST_CASE("capacity of a design column is one")
{
    const Matrix x = gaussian_matrix(1000, 5, 1);
    std::vector<double> z(1000);
    for (int t = 0; t < 1000; ++t) z[t] = x(t, 2);
    CHECK(capacity(x, z) == doctest::Approx(1.0).epsilon(1e-12));
    const CapacityKernel kernel(x);
    CHECK(kernel.rank() == 5);
    CHECK(kernel.capacity(z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("capacity of an independent target is near D/T")
{
    const Eigen::Index t = 20000;
    const Eigen::Index d = 10;
    const Matrix x = gaussian_matrix(t, d, 2);
    const CapacityKernel kernel(x);
    double sum = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        const Matrix z = gaussian_matrix(t, 1, 1000 + r);
        const double c = kernel.capacity(std::span<const double>(z.data(), t));
        CHECK(c == doctest::Approx(capacity(x, std::span<const double>(z.data(), t))).epsilon(1e-10));
        sum += c;
    }
    // each capacity ~ chi2_D / T: mean D/T, sd sqrt(2D)/T
    const double mean = sum / reps;
    const double expected = static_cast<double>(d) / t;
    CHECK(std::abs(mean - expected) < 4.0 * std::sqrt(2.0 * d) / t / std::sqrt(reps));
}

TEST_CASE("capacity with half the variance explained")
{
    const Eigen::Index t = 100000;
    const Matrix x = gaussian_matrix(t, 3, 3);
    const Matrix noise = gaussian_matrix(t, 1, 4);
    std::vector<double> z(static_cast<std::size_t>(t));
    for (Eigen::Index i = 0; i < t; ++i) z[i] = x(i, 0) + noise(i, 0);
    CHECK(std::abs(capacity(x, z) - 0.5) < 0.05);
}

TEST_CASE("capacity errors")
{
    const Matrix x = gaussian_matrix(10, 2, 5);
    CHECK_THROWS_AS(capacity(x, std::vector<double>(9, 1.0)), Error);
    try {
        capacity(x, std::vector<double>(10, 2.0));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_target);
    }
    CHECK_THROWS_AS(CapacityKernel(gaussian_matrix(2, 3, 6)), Error);
}

TEST_CASE("batched capacities match per-basis capacities")
{
    const std::vector<double> u = datasets::uniform_inputs(3000, 9, -1.0, 1.0);
    const Matrix table = legendre_table(u, 3);
    const Matrix design = gaussian_matrix(2500, 8, 10) * 0.1 + Matrix(table.block(500, 1, 2500, 1).replicate(1, 8));
    const CapacityKernel kernel(design);
    const auto bases = enumerate_basis(3, 6);
    for (int batch : {1, 7, 64, 1000}) {
        const auto caps = kernel.capacities(table, 500, bases, batch);
        REQUIRE(caps.size() == bases.size());
        for (std::size_t i = 0; i < bases.size(); ++i) {
            const auto z = target_signal(bases[i], std::span<const double>(u).subspan(500 - bases[i].max_delay()));
            CHECK(caps[i] == doctest::Approx(capacity(design, z)).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(kernel.capacities(table, 0, bases, 8), Error);
}

TEST_CASE("ipc_report matches the serial reference")
{
    const WeightSet w = ipc_weights(6, 5);
    const IpcConfig cfg = small_config(2000, 6, 3);
    for (const Scheme& scheme : {Scheme::standard(), Scheme::delay(1, 2)}) {
        const IpcReport fast = ipc_report(w, scheme, cfg);
        const IpcReport ref = ipc_report_reference(w, scheme, cfg);
        CHECK(fast.total == doctest::Approx(ref.total).epsilon(1e-9));
        CHECK(fast.bases_evaluated == ref.bases_evaluated);
        REQUIRE(fast.per_basis.size() == ref.per_basis.size());
        for (const auto& [basis, c] : ref.per_basis) {
            REQUIRE(fast.per_basis.count(basis) == 1);
            CHECK(fast.per_basis.at(basis) == doctest::Approx(c).epsilon(1e-9));
        }
    }
}

TEST_CASE("ipc_report aggregation invariants")
{
    const WeightSet w = ipc_weights(8, 6);
    const IpcConfig cfg = small_config(5000, 8, 5);
    const IpcReport r = ipc_report(w, Scheme::standard(), cfg);
    CHECK(r.dim == 8);
    CHECK(r.threshold_used == doctest::Approx(capacity_threshold(1.0, 8, 5000)));
    double total = 0.0;
    for (const auto& [order, c] : r.per_order) {
        double sum = 0.0;
        for (int tau = 0; tau <= cfg.tau_max; ++tau) sum += r.per_order_delay.at({order, tau});
        CHECK(c == doctest::Approx(sum).epsilon(1e-12));
        total += c;
    }
    CHECK(r.total == doctest::Approx(total).epsilon(1e-12));
    CHECK(r.total >= 0.0);
    CHECK(r.total <= 1.02 * r.dim);
    CHECK_FALSE(r.exceeds_bound);
    CHECK(r.per_order_delay.size() == static_cast<std::size_t>(5 * 9));
    for (const auto& [basis, c] : r.per_basis) {
        CHECK(c >= r.threshold_used);
        CHECK(c <= 1.0);
    }
    CHECK(r.bases_evaluated == binomial(9, 1) + binomial(10, 2) + binomial(11, 3) + binomial(12, 4) + binomial(13, 5));
    CHECK(r.pruned_orders.empty());
    // the linear part dominates with a weak input
    CHECK(r.per_order.at(1) > 0.5 * r.total);
}

TEST_CASE("a larger threshold never increases the total")
{
    const WeightSet w = ipc_weights(6, 7);
    IpcConfig cfg = small_config(3000, 5, 3);
    double prev = 1e9;
    for (double scale : {0.5, 1.0, 4.0, 16.0}) {
        cfg.threshold_scale = scale;
        const IpcReport r = ipc_report(w, Scheme::standard(), cfg);
        CHECK(r.total <= prev);
        prev = r.total;
    }
}

TEST_CASE("pruned orders are lower bounds of the full enumeration")
{
    const WeightSet w = ipc_weights(6, 8);
    IpcConfig cfg = small_config(3000, 5, 5);
    const IpcReport full = ipc_report(w, Scheme::standard(), cfg);
    cfg.prune_above = 1;
    const IpcReport pruned = ipc_report(w, Scheme::standard(), cfg);
    CHECK(pruned.pruned_orders == std::vector<int>{3, 4, 5});
    CHECK(pruned.bases_evaluated < full.bases_evaluated);
    CHECK(pruned.total <= full.total + 1e-12);
    for (const auto& [basis, c] : pruned.per_basis) {
        REQUIRE(full.per_basis.count(basis) == 1);
        CHECK(full.per_basis.at(basis) == doctest::Approx(c).epsilon(1e-12));
    }
    CHECK(to_json(pruned)["lower_bound"] == true);
}

TEST_CASE("IpcConfig validation")
{
    const WeightSet w = ipc_weights(6, 9);
    IpcConfig cfg = small_config(3000, 5, 4);
    CHECK_THROWS_AS(ipc_report(w, Scheme::standard(), cfg), Error);
    cfg.max_order = 11;
    CHECK_THROWS_AS(ipc_report(w, Scheme::standard(), cfg), Error);
    cfg = small_config(599, 5, 3);
    CHECK_THROWS_AS(ipc_report(w, Scheme::standard(), cfg), Error);
    cfg = small_config(1199, 5, 3);
    CHECK_THROWS_AS(ipc_report(w, Scheme::delay(1, 1), cfg), Error); // 100 * D with D = 12
    cfg = small_config(3000, 5, 3);
    cfg.threshold_scale = 0.0;
    CHECK_THROWS_AS(ipc_report(w, Scheme::standard(), cfg), Error);
    cfg = small_config(3000, 5, 3);
    cfg.washout = 4;
    CHECK_THROWS_AS(ipc_report(w, Scheme::standard(), cfg), Error);
}

TEST_CASE("concatenated schemes report the concatenated dimension")
{
    const WeightSet w = ipc_weights(6, 10, 0.9, true);
    const IpcConfig cfg = small_config(2000, 4, 1);
    CHECK(ipc_report(w, Scheme::delay(1, 1), cfg).dim == 12);
    CHECK(ipc_report(w, Scheme::drift(1), cfg).dim == 12);
    CHECK(ipc_report(w, Scheme::transient(1, 1, 1), cfg).dim == 12);
}

TEST_CASE("JSON and CSV output")
{
    const WeightSet w = ipc_weights(6, 11);
    const IpcConfig cfg = small_config(2000, 3, 3);
    const IpcReport r = ipc_report(w, Scheme::standard(), cfg);

    const nlohmann::json j = to_json(r);
    CHECK(j["total"].get<double>() == r.total);
    CHECK(j["dim"] == 6);
    CHECK(j["max_order"] == 3);
    CHECK(j["lower_bound"] == false);
    CHECK(j["per_basis"].size() == r.per_basis.size());
    CHECK(j["per_order"].size() == 3);

    std::ostringstream csv;
    write_order_delay_csv(csv, r);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "order,tau,capacity");
    int rows = 0;
    double sum = 0.0;
    while (std::getline(in, line)) {
        ++rows;
        sum += std::stod(line.substr(line.rfind(',') + 1));
    }
    CHECK(rows == 3 * 4);
    CHECK(sum == doctest::Approx(r.total).epsilon(1e-12));
}
