#include "bsch/kernels.hpp"

#include <algorithm>
#include <cmath>

// Plain single-threaded reference kernels. Intentionally naive: the
// equivalence tests check the OpenMP versions against these, and the
// benchmark target measures the gap.

namespace bsch::kernels::serial {

void laplace_bulk(int nx, int ny, double hx, double hy, const double* u,
                  const double* gb, const double* gt, double* out) {
    const double ihx2 = 1.0 / (hx * hx);
    const double ihy2 = 1.0 / (hy * hy);
    auto at = [&](int i, int j) {
        return u[static_cast<std::size_t>(j) * nx + ((i % nx) + nx) % nx];
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double below, above;
            if (j == 0) {
                below = at(i, 1) + (gb ? 2.0 * hy * gb[i] : 0.0);
            } else {
                below = at(i, j - 1);
            }
            if (j == ny - 1) {
                above = at(i, ny - 2) + (gt ? 2.0 * hy * gt[i] : 0.0);
            } else {
                above = at(i, j + 1);
            }
            out[static_cast<std::size_t>(j) * nx + i] =
                (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) * ihx2 +
                (above - 2.0 * at(i, j) + below) * ihy2;
        }
    }
}

void laplace_ring(int nx, double hx, const double* v, double* out) {
    const double ihx2 = 1.0 / (hx * hx);
    for (int i = 0; i < nx; ++i) {
        out[i] = (v[(i + 1) % nx] - 2.0 * v[i] + v[(i + nx - 1) % nx]) * ihx2;
    }
}

void normal_derivative(int nx, int ny, double hy, const double* u,
                       double* out_bottom, double* out_top) {
    auto at = [&](int i, int j) { return u[static_cast<std::size_t>(j) * nx + i]; };
    const double s = 0.5 / hy;
    for (int i = 0; i < nx; ++i) {
        out_bottom[i] = (3.0 * at(i, 0) - 4.0 * at(i, 1) + at(i, 2)) * s;
        out_top[i] =
            (3.0 * at(i, ny - 1) - 4.0 * at(i, ny - 2) + at(i, ny - 3)) * s;
    }
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

double bulk_quad_sum(int nx, int ny, double hx, double hy, const double* u) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double w = (j == 0 || j == ny - 1) ? 0.5 * hx * hy : hx * hy;
        for (int i = 0; i < nx; ++i) {
            s += w * u[static_cast<std::size_t>(j) * nx + i];
        }
    }
    return s;
}

double bulk_quad_dot(int nx, int ny, double hx, double hy, const double* u,
                     const double* w) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double wq = (j == 0 || j == ny - 1) ? 0.5 * hx * hy : hx * hy;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            s += wq * u[k] * w[k];
        }
    }
    return s;
}

double dirichlet_bulk(int nx, int ny, double hx, double hy, const double* u) {
    auto at = [&](int i, int j) { return u[static_cast<std::size_t>(j) * nx + i]; };
    double e = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double wy = (j == 0 || j == ny - 1) ? 0.5 * hy : hy;
        for (int i = 0; i < nx; ++i) {
            const double d = at((i + 1) % nx, j) - at(i, j);
            e += (wy / hx) * d * d;
        }
    }
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double d = at(i, j + 1) - at(i, j);
            e += (hx / hy) * d * d;
        }
    }
    return 0.5 * e;
}

double dirichlet_ring(int nx, double hx, const double* v) {
    double e = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double d = v[(i + 1) % nx] - v[i];
        e += d * d / hx;
    }
    return 0.5 * e;
}

} // namespace bsch::kernels::serial
