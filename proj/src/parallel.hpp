#pragma once

#include <exception>
#include <mutex>

namespace resconcat::detail {

/// Runs body(i) for i in [0, n) across OpenMP threads and rethrows the
/// first exception after the loop.
template <typename Body>
void parallel_for(long n, Body body)
{
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace resconcat::detail
