#ifndef BSCH_KERNELS_HPP
#define BSCH_KERNELS_HPP

#include <cstddef>

// Data-parallel cores behind the grid operators: stencil applications and
// quadrature reductions. Every kernel here has a straightforward serial
// twin in bsch::kernels::serial, kept as the reference implementation for
// equivalence tests and for the benchmark target.
//
// Reductions accumulate per fixed-size block (Neumaier-compensated) and
// combine the block partials in index order, so the result is identical
// whether the blocks run serially or on any number of OpenMP threads.

namespace bsch::kernels {

// Blocks below this many elements stay serial; stencil loops use the same
// cutoff per row count. Tuned by the benchmark target.
inline constexpr std::size_t par_grain = 1u << 14;
inline constexpr std::size_t reduce_block = 4096;

// 5-point Laplacian on an nx*ny lattice, periodic in x. Boundary rows use
// second-order mirror ghosts carrying the outward normal flux: ghost =
// inner + 2*hy*g. gb/gt are per-column fluxes on the bottom/top ring; null
// means zero flux.
void laplace_bulk(int nx, int ny, double hx, double hy, const double* u,
                  const double* gb, const double* gt, double* out);

// 3-point periodic Laplacian on one ring of nx nodes.
void laplace_ring(int nx, double hx, const double* v, double* out);

// Outward normal derivative by the second-order one-sided stencil;
// bottom ring has normal -e_y, top ring +e_y.
void normal_derivative(int nx, int ny, double hy, const double* u,
                       double* out_bottom, double* out_top);

// sum_i x_i and sum_i x_i*y_i, block-compensated.
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

// max_i |x_i|
double max_abs(const double* x, std::size_t n);

// Trapezoid-in-y quadrature sum over the bulk lattice: full weight hx*hy
// on interior rows, half on the two boundary rows. `weighted` variant
// multiplies by a second field first.
double bulk_quad_sum(int nx, int ny, double hx, double hy, const double* u);
double bulk_quad_dot(int nx, int ny, double hx, double hy, const double* u,
                     const double* w);

// 1/2 * sum over edges of the squared difference quotients, weighted so
// that the value equals -1/2 <laplace_bulk(u; zero flux), u> under the
// trapezoid quadrature.
double dirichlet_bulk(int nx, int ny, double hx, double hy, const double* u);
double dirichlet_ring(int nx, double hx, const double* v);

namespace serial {

void laplace_bulk(int nx, int ny, double hx, double hy, const double* u,
                  const double* gb, const double* gt, double* out);
void laplace_ring(int nx, double hx, const double* v, double* out);
void normal_derivative(int nx, int ny, double hy, const double* u,
                       double* out_bottom, double* out_top);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
double bulk_quad_sum(int nx, int ny, double hx, double hy, const double* u);
double bulk_quad_dot(int nx, int ny, double hx, double hy, const double* u,
                     const double* w);
double dirichlet_bulk(int nx, int ny, double hx, double hy, const double* u);
double dirichlet_ring(int nx, double hx, const double* v);

} // namespace serial

} // namespace bsch::kernels

#endif
