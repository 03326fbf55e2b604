#include "noncollide/brownian.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "noncollide/rng.hpp"

namespace noncollide {

BrownianGrid generate_grid(std::uint64_t seed, std::uint64_t path_id, int d, int n_fine,
                           double horizon) {
    if (!is_power_of_two(n_fine))
        throw std::invalid_argument("generate_grid: n_fine must be a power of two");
    if (!(horizon > 0.0)) throw std::invalid_argument("generate_grid: horizon must be positive");
    if (d < 1) throw std::invalid_argument("generate_grid: d must be >= 1");

    BrownianGrid g;
    g.seed = seed;
    g.path_id = path_id;
    g.d = d;
    g.n_fine = n_fine;
    g.horizon = horizon;
    g.dt_fine = horizon / n_fine;
    g.increments.resize(static_cast<std::size_t>(n_fine) * d);

    const double scale = std::sqrt(g.dt_fine);
    for (int n = 0; n < n_fine; ++n) {
        for (int j = 0; j < d; ++j) {
            const std::uint64_t cell = static_cast<std::uint64_t>(n) * d + j;
            g.increments[static_cast<std::size_t>(n) * d + j] =
                scale * normal_from_counter(seed, path_id, cell);
        }
    }
    return g;
}

std::vector<double> coarsen(const BrownianGrid& grid, int factor) {
    if (!is_power_of_two(factor) || factor > grid.n_fine || grid.n_fine % factor != 0)
        throw std::invalid_argument("coarsen: factor must be a power of two dividing n_fine");

    std::vector<double> out = grid.increments;
    int rows = grid.n_fine;
    const int d = grid.d;
    while (factor > 1) {
        const int half = rows / 2;
        for (int m = 0; m < half; ++m)
            for (int j = 0; j < d; ++j)
                out[static_cast<std::size_t>(m) * d + j] =
                    out[static_cast<std::size_t>(2 * m) * d + j] +
                    out[static_cast<std::size_t>(2 * m + 1) * d + j];
        rows = half;
        factor /= 2;
    }
    out.resize(static_cast<std::size_t>(rows) * d);
    return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64(os, v);
}

}  // namespace

void write_grid(const BrownianGrid& grid, std::ostream& os) {
    os.write("NCSBROWN", 8);
    put_u64(os, grid.seed);
    put_u64(os, grid.path_id);
    put_u64(os, static_cast<std::uint64_t>(grid.d));
    put_u64(os, static_cast<std::uint64_t>(grid.n_fine));
    put_f64(os, grid.horizon);
    for (double x : grid.increments) put_f64(os, x);
}

}  // namespace noncollide
