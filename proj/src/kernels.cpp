#include "bsch/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bsch::kernels {

namespace {

// Neumaier-compensated serial sum of a contiguous range.
double comp_sum(const double* x, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s + x[i];
        if (std::abs(s) >= std::abs(x[i])) {
            c += (s - t) + x[i];
        } else {
            c += (x[i] - t) + s;
        }
        s = t;
    }
    return s + c;
}

template <class BlockFn>
double blocked_reduce(std::size_t n, BlockFn&& block) {
    const std::size_t nb = (n + reduce_block - 1) / reduce_block;
    if (nb <= 1) {
        return block(0, n);
    }
    std::vector<double> partial(nb);
#pragma omp parallel for schedule(static) if (n >= par_grain)
    for (long long b = 0; b < static_cast<long long>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * reduce_block;
        const std::size_t hi = std::min(lo + reduce_block, n);
        partial[static_cast<std::size_t>(b)] = block(lo, hi);
    }
    return comp_sum(partial.data(), partial.size());
}

inline void laplace_row(int nx, double ihx2, const double* row, double* out) {
    out[0] = (row[1] - 2.0 * row[0] + row[nx - 1]) * ihx2;
    for (int i = 1; i < nx - 1; ++i) {
        out[i] = (row[i + 1] - 2.0 * row[i] + row[i - 1]) * ihx2;
    }
    out[nx - 1] = (row[0] - 2.0 * row[nx - 1] + row[nx - 2]) * ihx2;
}

} // namespace

void laplace_bulk(int nx, int ny, double hx, double hy, const double* u,
                  const double* gb, const double* gt, double* out) {
    const double ihx2 = 1.0 / (hx * hx);
    const double ihy2 = 1.0 / (hy * hy);
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
#pragma omp parallel for schedule(static) if (n >= par_grain)
    for (int j = 0; j < ny; ++j) {
        const double* row = u + static_cast<std::size_t>(j) * nx;
        double* o = out + static_cast<std::size_t>(j) * nx;
        laplace_row(nx, ihx2, row, o);
        if (j == 0) {
            // ghost = u[i,1] + 2*hy*gb[i]
            for (int i = 0; i < nx; ++i) {
                const double up = row[nx + i];
                double ghost = up;
                if (gb) ghost += 2.0 * hy * gb[i];
                o[i] += (up - 2.0 * row[i] + ghost) * ihy2;
            }
        } else if (j == ny - 1) {
            for (int i = 0; i < nx; ++i) {
                const double dn = row[i - nx];
                double ghost = dn;
                if (gt) ghost += 2.0 * hy * gt[i];
                o[i] += (ghost - 2.0 * row[i] + dn) * ihy2;
            }
        } else {
            for (int i = 0; i < nx; ++i) {
                o[i] += (row[nx + i] - 2.0 * row[i] + row[i - nx]) * ihy2;
            }
        }
    }
}

void laplace_ring(int nx, double hx, const double* v, double* out) {
    laplace_row(nx, 1.0 / (hx * hx), v, out);
}

void normal_derivative(int nx, int ny, double hy, const double* u,
                       double* out_bottom, double* out_top) {
    const double s = 0.5 / hy;
    const double* r0 = u;
    const double* r1 = u + nx;
    const double* r2 = u + 2 * static_cast<std::size_t>(nx);
    const double* t0 = u + static_cast<std::size_t>(ny - 1) * nx;
    const double* t1 = u + static_cast<std::size_t>(ny - 2) * nx;
    const double* t2 = u + static_cast<std::size_t>(ny - 3) * nx;
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(nx) >= par_grain)
    for (int i = 0; i < nx; ++i) {
        out_bottom[i] = (3.0 * r0[i] - 4.0 * r1[i] + r2[i]) * s;
        out_top[i] = (3.0 * t0[i] - 4.0 * t1[i] + t2[i]) * s;
    }
}

double sum(const double* x, std::size_t n) {
    return blocked_reduce(n, [x](std::size_t lo, std::size_t hi) {
        return comp_sum(x + lo, hi - lo);
    });
}

double dot(const double* x, const double* y, std::size_t n) {
    return blocked_reduce(n, [x, y](std::size_t lo, std::size_t hi) {
        double s = 0.0, c = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double p = x[i] * y[i];
            const double t = s + p;
            if (std::abs(s) >= std::abs(p)) {
                c += (s - t) + p;
            } else {
                c += (p - t) + s;
            }
            s = t;
        }
        return s + c;
    });
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= par_grain)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        m = std::max(m, std::abs(x[i]));
    }
    return m;
}

double bulk_quad_sum(int nx, int ny, double hx, double hy, const double* u) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    const double full = sum(u, n);
    const double edges = sum(u, nx) + sum(u + n - nx, nx);
    return hx * hy * (full - 0.5 * edges);
}

double bulk_quad_dot(int nx, int ny, double hx, double hy, const double* u,
                     const double* w) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    const double full = dot(u, w, n);
    const double edges = dot(u, w, nx) + dot(u + n - nx, w + n - nx, nx);
    return hx * hy * (full - 0.5 * edges);
}

double dirichlet_bulk(int nx, int ny, double hx, double hy, const double* u) {
    std::vector<double> xrow(ny), yrow(ny > 1 ? ny - 1 : 0);
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(nx) * ny >= par_grain)
    for (int j = 0; j < ny; ++j) {
        const double* row = u + static_cast<std::size_t>(j) * nx;
        double sx = 0.0;
        for (int i = 0; i < nx; ++i) {
            const double d = row[(i + 1) % nx] - row[i];
            sx += d * d;
        }
        xrow[j] = sx;
        if (j < ny - 1) {
            double sy = 0.0;
            for (int i = 0; i < nx; ++i) {
                const double d = row[nx + i] - row[i];
                sy += d * d;
            }
            yrow[j] = sy;
        }
    }
    double ex = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double wy = (j == 0 || j == ny - 1) ? 0.5 * hy : hy;
        ex += (wy / hx) * xrow[j];
    }
    double ey = 0.0;
    for (int j = 0; j + 1 < ny; ++j) {
        ey += yrow[j];
    }
    return 0.5 * (ex + (hx / hy) * ey);
}

double dirichlet_ring(int nx, double hx, const double* v) {
    double s = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double d = v[(i + 1) % nx] - v[i];
        s += d * d;
    }
    return 0.5 * s / hx;
}

} // namespace bsch::kernels
