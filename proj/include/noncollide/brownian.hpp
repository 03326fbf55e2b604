#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace noncollide {

// Seeded d-dimensional Wiener increments on the finest grid of one path.
// The matrix is fully determined by (seed, path_id, d, n_fine, horizon);
// regeneration is bitwise identical, and distinct path_ids are independent
// streams. All coarser step sizes are exact block sums of this grid, so
// every scheme and step size in an experiment is driven by one Brownian
// path (strong-error coupling).
struct BrownianGrid {
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;
    int d = 0;
    int n_fine = 0;
    double horizon = 0.0;
    double dt_fine = 0.0;
    std::vector<double> increments;  // n_fine x d row-major, entries ~ N(0, dt_fine)

    double at(int step, int component) const {
        return increments[static_cast<std::size_t>(step) * d + component];
    }
};

// n_fine must be a power of two and horizon positive; throws std::invalid_argument.
BrownianGrid generate_grid(std::uint64_t seed, std::uint64_t path_id, int d, int n_fine,
                           double horizon);

// Block-sum the grid to step dt_fine * factor. factor must be a power of two
// dividing n_fine. Sums are performed by repeated pairwise halving so that
// coarsen(g, 2f) is bitwise identical to coarsening by 2 and then by f.
std::vector<double> coarsen(const BrownianGrid& grid, int factor);

// Binary audit dump: magic "NCSBROWN", then seed, path_id, d, n_fine as
// little-endian 64-bit integers, then horizon as a little-endian 64-bit
// float, then the increments row-major as little-endian 64-bit floats.
void write_grid(const BrownianGrid& grid, std::ostream& os);

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace noncollide
