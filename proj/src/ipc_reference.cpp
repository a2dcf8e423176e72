// Serial reference for the batched capacity kernel: every basis gets its own
// target series and its own least-squares fit, no shared factorization.

#include "resconcat/ipc.hpp"

namespace resconcat::ipc {

std::vector<double> reference_capacities(const IpcProblem& problem, std::span<const Basis> bases)
{
    const Eigen::Index rows = problem.design.rows();
    std::vector<double> out;
    out.reserve(bases.size());
    for (const Basis& b : bases) {
        const std::vector<double> z = target_signal(b, problem.inputs);
        // z[k] belongs to time max_delay + k
        const std::size_t offset = static_cast<std::size_t>(problem.first_time - b.max_delay());
        out.push_back(capacity(problem.design, std::span<const double>(z).subspan(offset, rows)));
    }
    return out;
}

}  // namespace resconcat::ipc
