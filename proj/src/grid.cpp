#include "bsch/grid.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsch/kernels.hpp"

namespace bsch {

Grid::Grid(int nx_, int ny_, double lx_, double ly_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 4 || ny < 4) {
        throw DimensionError("grid needs nx >= 4 and ny >= 4");
    }
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw DimensionError("grid needs lx > 0 and ly > 0");
    }
}

void require_match(const Grid& g, const BulkField& u) {
    if (u.nx != g.nx || u.ny != g.ny) {
        throw DimensionError("bulk field shape does not match grid");
    }
}

void require_match(const Grid& g, const SurfField& v) {
    if (v.nx != g.nx || static_cast<int>(v.bottom.size()) != g.nx ||
        static_cast<int>(v.top.size()) != g.nx) {
        throw DimensionError("surface field shape does not match grid");
    }
}

BulkField laplace_bulk(const Grid& g, const BulkField& u,
                       const SurfField* flux) {
    require_match(g, u);
    if (flux) require_match(g, *flux);
    BulkField out(g);
    kernels::laplace_bulk(g.nx, g.ny, g.hx(), g.hy(), u.data(),
                          flux ? flux->bottom.data() : nullptr,
                          flux ? flux->top.data() : nullptr, out.data());
    return out;
}

SurfField laplace_surface(const Grid& g, const SurfField& v) {
    require_match(g, v);
    SurfField out(g);
    kernels::laplace_ring(g.nx, g.hx(), v.bottom.data(), out.bottom.data());
    kernels::laplace_ring(g.nx, g.hx(), v.top.data(), out.top.data());
    return out;
}

SurfField normal_derivative(const Grid& g, const BulkField& u) {
    require_match(g, u);
    SurfField out(g);
    kernels::normal_derivative(g.nx, g.ny, g.hy(), u.data(),
                               out.bottom.data(), out.top.data());
    return out;
}

double integrate_bulk(const Grid& g, const BulkField& u) {
    require_match(g, u);
    return kernels::bulk_quad_sum(g.nx, g.ny, g.hx(), g.hy(), u.data());
}

double integrate_surface(const Grid& g, const SurfField& v) {
    require_match(g, v);
    return g.surf_weight() * (kernels::sum(v.bottom.data(), v.bottom.size()) +
                              kernels::sum(v.top.data(), v.top.size()));
}

double mean_bulk(const Grid& g, const BulkField& u) {
    return integrate_bulk(g, u) / g.bulk_measure();
}

double mean_surface(const Grid& g, const SurfField& v) {
    return integrate_surface(g, v) / g.surf_measure();
}

void project_zero_mean(const Grid& g, BulkField& u) {
    const double m = mean_bulk(g, u);
    for (double& x : u.v) x -= m;
}

void project_zero_mean(const Grid& g, SurfField& v) {
    const double m = mean_surface(g, v);
    for (double& x : v.bottom) x -= m;
    for (double& x : v.top) x -= m;
}

double dirichlet_energy_bulk(const Grid& g, const BulkField& u) {
    require_match(g, u);
    return kernels::dirichlet_bulk(g.nx, g.ny, g.hx(), g.hy(), u.data());
}

double dirichlet_energy_surface(const Grid& g, const SurfField& v) {
    require_match(g, v);
    return kernels::dirichlet_ring(g.nx, g.hx(), v.bottom.data()) +
           kernels::dirichlet_ring(g.nx, g.hx(), v.top.data());
}

double max_abs(const BulkField& u) {
    return kernels::max_abs(u.data(), u.size());
}

double max_abs(const SurfField& v) {
    return std::max(kernels::max_abs(v.bottom.data(), v.bottom.size()),
                    kernels::max_abs(v.top.data(), v.top.size()));
}

namespace {

void append_num(std::string& s, double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    s += buf;
}

void append_row(std::string& s, const double* row, int nx) {
    for (int i = 0; i < nx; ++i) {
        if (i) s += ' ';
        append_num(s, row[i]);
    }
    s += '\n';
}

std::string header(const Grid& g, const char* ny_token) {
    std::string s = "BSCH-FIELD v1 nx=" + std::to_string(g.nx) + " ny=";
    s += ny_token;
    s += " lx=";
    append_num(s, g.lx);
    s += " ly=";
    append_num(s, g.ly);
    s += '\n';
    return s;
}

std::vector<double> parse_row(const std::string& line, int nx,
                              const std::string& where) {
    std::istringstream is(line);
    std::vector<double> row(nx);
    for (int i = 0; i < nx; ++i) {
        if (!(is >> row[i])) {
            throw DimensionError("snapshot row too short in " + where);
        }
    }
    return row;
}

} // namespace

std::string encode_field(const Grid& g, const BulkField& u) {
    require_match(g, u);
    std::string s = header(g, std::to_string(g.ny).c_str());
    for (int j = 0; j < g.ny; ++j) {
        append_row(s, u.data() + static_cast<std::size_t>(j) * g.nx, g.nx);
    }
    return s;
}

std::string encode_field(const Grid& g, const SurfField& v) {
    require_match(g, v);
    std::string s = header(g, "ring");
    append_row(s, v.bottom.data(), g.nx);
    append_row(s, v.top.data(), g.nx);
    return s;
}

void save_field(const std::filesystem::path& p, const Grid& g,
                const BulkField& u) {
    std::ofstream f(p, std::ios::binary);
    f << encode_field(g, u);
}

void save_field(const std::filesystem::path& p, const Grid& g,
                const SurfField& v) {
    std::ofstream f(p, std::ios::binary);
    f << encode_field(g, v);
}

namespace {

std::ifstream open_checked(const std::filesystem::path& p, const Grid& g,
                           const std::string& ny_expect) {
    std::ifstream f(p, std::ios::binary);
    if (!f) {
        throw DimensionError("cannot open snapshot " + p.string());
    }
    std::string head;
    std::getline(f, head);
    std::ostringstream want;
    want << "BSCH-FIELD v1 nx=" << g.nx << " ny=" << ny_expect;
    if (head.rfind(want.str(), 0) != 0) {
        throw DimensionError("snapshot header mismatch in " + p.string() +
                             ": " + head);
    }
    return f;
}

} // namespace

BulkField load_bulk_field(const std::filesystem::path& p, const Grid& g) {
    auto f = open_checked(p, g, std::to_string(g.ny));
    BulkField u(g);
    std::string line;
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(f, line)) {
            throw DimensionError("snapshot truncated: " + p.string());
        }
        auto row = parse_row(line, g.nx, p.string());
        std::copy(row.begin(), row.end(),
                  u.v.begin() + static_cast<std::size_t>(j) * g.nx);
    }
    return u;
}

SurfField load_surf_field(const std::filesystem::path& p, const Grid& g) {
    auto f = open_checked(p, g, "ring");
    SurfField v(g);
    std::string line;
    if (!std::getline(f, line)) {
        throw DimensionError("snapshot truncated: " + p.string());
    }
    v.bottom = parse_row(line, g.nx, p.string());
    if (!std::getline(f, line)) {
        throw DimensionError("snapshot truncated: " + p.string());
    }
    v.top = parse_row(line, g.nx, p.string());
    return v;
}

} // namespace bsch
