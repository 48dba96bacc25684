#ifndef BSCH_GRID_HPP
#define BSCH_GRID_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "bsch/errors.hpp"

namespace bsch {

// Periodic strip T x [0, ly]: nx columns (period lx), ny rows. The two
// boundary rings live on the rows j = 0 (outward normal -e_y) and
// j = ny-1 (+e_y) and are collocated with them, so the trace of a bulk
// field is a row extraction.
//
// Quadrature: hx*hy per interior-row node, hx*hy/2 on the two boundary
// rows (trapezoid in y), hx per ring node. The weights sum to lx*ly and
// 2*lx exactly.
struct Grid {
    Grid(int nx, int ny, double lx, double ly);

    int nx;
    int ny;
    double lx;
    double ly;

    double hx() const { return lx / nx; }
    double hy() const { return ly / (ny - 1); }
    double x(int i) const { return i * hx(); }
    double y(int j) const { return j * hy(); }
    double bulk_measure() const { return lx * ly; }
    double surf_measure() const { return 2.0 * lx; }
    double bulk_weight(int j) const {
        return (j == 0 || j == ny - 1) ? 0.5 * hx() * hy() : hx() * hy();
    }
    double surf_weight() const { return hx(); }
    std::size_t bulk_nodes() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t surf_nodes() const { return 2 * static_cast<std::size_t>(nx); }
};

// nx*ny scalar lattice, row-major (j*nx + i).
struct BulkField {
    BulkField() = default;
    BulkField(int nx, int ny, double fill = 0.0)
        : nx(nx), ny(ny), v(static_cast<std::size_t>(nx) * ny, fill) {}
    explicit BulkField(const Grid& g, double fill = 0.0)
        : BulkField(g.nx, g.ny, fill) {}

    int nx = 0;
    int ny = 0;
    std::vector<double> v;

    double& at(int i, int j) { return v[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const {
        return v[static_cast<std::size_t>(j) * nx + i];
    }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    std::size_t size() const { return v.size(); }
};

// Two length-nx rings (bottom j=0, top j=ny-1).
struct SurfField {
    SurfField() = default;
    explicit SurfField(int nx, double fill = 0.0)
        : nx(nx), bottom(nx, fill), top(nx, fill) {}
    explicit SurfField(const Grid& g, double fill = 0.0)
        : SurfField(g.nx, fill) {}

    int nx = 0;
    std::vector<double> bottom;
    std::vector<double> top;
};

void require_match(const Grid& g, const BulkField& u);
void require_match(const Grid& g, const SurfField& v);

// 5-point Laplacian, periodic in x; boundary rows take mirror ghosts with
// the supplied outward flux (null = no-flux).
BulkField laplace_bulk(const Grid& g, const BulkField& u,
                       const SurfField* flux = nullptr);

// Laplace-Beltrami on each ring independently (1D periodic 3-point).
SurfField laplace_surface(const Grid& g, const SurfField& v);

// Outward normal derivative by the one-sided second-order stencil.
SurfField normal_derivative(const Grid& g, const BulkField& u);

double integrate_bulk(const Grid& g, const BulkField& u);
double integrate_surface(const Grid& g, const SurfField& v);
double mean_bulk(const Grid& g, const BulkField& u);
double mean_surface(const Grid& g, const SurfField& v);

// P_Omega, P_Gamma: subtract the quadrature mean in place.
void project_zero_mean(const Grid& g, BulkField& u);
void project_zero_mean(const Grid& g, SurfField& v);

// 1/2 * discrete Dirichlet quadratic forms; equal to -1/2 <L u, u> under
// the quadrature pairing for no-flux ghosts.
double dirichlet_energy_bulk(const Grid& g, const BulkField& u);
double dirichlet_energy_surface(const Grid& g, const SurfField& v);

double max_abs(const BulkField& u);
double max_abs(const SurfField& v);

// Text snapshot format, round-trip exact (17 significant digits):
//   BSCH-FIELD v1 nx=<nx> ny=<ny> lx=<lx> ly=<ly>
// followed by ny rows of nx values; surface files carry ny=ring and two
// rows (bottom, top).
std::string encode_field(const Grid& g, const BulkField& u);
std::string encode_field(const Grid& g, const SurfField& v);
void save_field(const std::filesystem::path& p, const Grid& g,
                const BulkField& u);
void save_field(const std::filesystem::path& p, const Grid& g,
                const SurfField& v);
BulkField load_bulk_field(const std::filesystem::path& p, const Grid& g);
SurfField load_surf_field(const std::filesystem::path& p, const Grid& g);

} // namespace bsch

#endif
