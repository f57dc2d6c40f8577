#pragma once

#include <cstddef>
#include <functional>

namespace osc {

// fn(i) for i in [0, n) on up to `workers` threads, strided. The first exception is rethrown after joining.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace osc
