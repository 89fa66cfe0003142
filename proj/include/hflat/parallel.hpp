#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace hflat {

enum class Execution { Serial, Parallel };

/// out[k] = fn(points[k]). The parallel path uses OpenMP; the serial path is the
/// reference. Results land by index so both give identical output. If any call
/// throws, the exception of the lowest index is rethrown after the loop.
template <class Result, class Point, class Fn>
std::vector<Result> map_points(const std::vector<Point>& points, Fn&& fn, Execution exec) {
    const auto count = static_cast<long long>(points.size());
    std::vector<Result> out(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long k = 0; k < count; ++k) {
            try {
                out[static_cast<std::size_t>(k)] = fn(points[static_cast<std::size_t>(k)]);
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
    } else {
        for (long long k = 0; k < count; ++k) {
            try {
                out[static_cast<std::size_t>(k)] = fn(points[static_cast<std::size_t>(k)]);
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace hflat
