#include "phaselab/parallel.hpp"

#include <omp.h>

namespace phaselab {

void set_thread_count(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t chunk_size) {
    std::vector<std::size_t> out;
    for (std::size_t done = 0; done < n; done += chunk_size) out.push_back(std::min(chunk_size, n - done));
    return out;
}

}  // namespace phaselab
