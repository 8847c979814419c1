#include "mvns/fields.hpp"

#include <cmath>

#include "mvns/spectral.hpp"

namespace mvns {

Grid Grid::make(int n) {
    if (n < 8) throw std::invalid_argument("grid: n must be >= 8");
    Grid g;
    g.n = n;
    g.dx = 1.0 / n;
    return g;
}

void require_same_grid(const Grid& a, const Grid& b) {
    if (a != b) throw std::invalid_argument("grid mismatch");
}

VectorField VectorField::from_function_raw(const Grid& g,
                                           const std::function<double(int, double, double)>& f) {
    VectorField v(g);
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < g.ny(c); ++j)
            for (int i = 0; i < g.nx(c); ++i) v.c[c](i, j) = f(c, g.x(c, i), g.y(c, j));
    return v;
}

VectorField VectorField::from_function(const Grid& g,
                                       const std::function<double(int, double, double)>& f) {
    VectorField v = from_function_raw(g, f);
    v.clamp_walls();
    return v;
}

void VectorField::clamp_walls() {
    const int n = grid.n;
    for (int j = 0; j < n; ++j) {
        c[0](0, j) = 0.0;
        c[0](n, j) = 0.0;
    }
    for (int i = 0; i < n; ++i) {
        c[1](i, 0) = 0.0;
        c[1](i, n) = 0.0;
    }
}

bool VectorField::finite() const {
    for (const auto& a : c)
        for (double x : a.a)
            if (!std::isfinite(x)) return false;
    return true;
}

bool VectorField::walls_zero() const {
    const int n = grid.n;
    for (int j = 0; j < n; ++j)
        if (c[0](0, j) != 0.0 || c[0](n, j) != 0.0) return false;
    for (int i = 0; i < n; ++i)
        if (c[1](i, 0) != 0.0 || c[1](i, n) != 0.0) return false;
    return true;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    axpy(1.0, o);
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    axpy(-1.0, o);
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& a : c)
        for (double& x : a.a) x *= s;
    return *this;
}

void VectorField::axpy(double s, const VectorField& o) {
    require_same_grid(grid, o.grid);
    for (int k = 0; k < 2; ++k) {
        auto& a = c[k].a;
        const auto& b = o.c[k].a;
        for (std::size_t q = 0; q < a.size(); ++q) a[q] += s * b[q];
    }
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

double sample_ghost(const Array2& f, const Grid& g, int c, int i, int j) {
    const int n = g.n;
    if (c == 0) {
        if (j < 0) return -f(i, 0);
        if (j >= n) return -f(i, n - 1);
    } else {
        if (i < 0) return -f(0, j);
        if (i >= n) return -f(n - 1, j);
    }
    return f(i, j);
}

Array2 gather(const VectorField& v, int k, int l) {
    const Grid& g = v.grid;
    if (k == l) return v.c[k];
    const int n = g.n;
    Array2 out(g.nx(l), g.ny(l));
    const Array2& f = v.c[k];
    if (l == 0) {
        for (int j = 0; j < n; ++j)
            for (int i = 1; i < n; ++i)
                out(i, j) = 0.25 * (f(i - 1, j) + f(i, j) + f(i - 1, j + 1) + f(i, j + 1));
    } else {
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < n; ++i)
                out(i, j) = 0.25 * (f(i, j - 1) + f(i + 1, j - 1) + f(i, j) + f(i + 1, j));
    }
    return out;
}

std::array<double, 6> derivatives(const Array2& f, const Grid& g, int c, int i, int j) {
    auto at = [&](int a, int b) { return sample_ghost(f, g, c, a, b); };
    const double r = 1.0 / g.dx;
    const double fc = f(i, j);
    const double xp = at(i + 1, j), xm = at(i - 1, j), yp = at(i, j + 1), ym = at(i, j - 1);
    return {fc,
            0.5 * (xp - xm) * r,
            0.5 * (yp - ym) * r,
            (xp - 2.0 * fc + xm) * r * r,
            0.25 * (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) * r * r,
            (yp - 2.0 * fc + ym) * r * r};
}

std::array<double, 2> first_derivatives(const Array2& f, const Grid& g, int c, int i, int j) {
    auto at = [&](int a, int b) { return sample_ghost(f, g, c, a, b); };
    const double r = 1.0 / g.dx;
    const int n = g.n;
    double dx_, dy_;
    if (c == 0 && i == 0)
        dx_ = 0.5 * (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) * r;
    else if (c == 0 && i == n)
        dx_ = 0.5 * (3.0 * f(n, j) - 4.0 * f(n - 1, j) + f(n - 2, j)) * r;
    else
        dx_ = 0.5 * (at(i + 1, j) - at(i - 1, j)) * r;
    if (c == 1 && j == 0)
        dy_ = 0.5 * (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) * r;
    else if (c == 1 && j == n)
        dy_ = 0.5 * (3.0 * f(i, n) - 4.0 * f(i, n - 1) + f(i, n - 2)) * r;
    else
        dy_ = 0.5 * (at(i, j + 1) - at(i, j - 1)) * r;
    return {dx_, dy_};
}

VectorField discrete_curl(const Grid& g, const std::function<double(double, double)>& psi) {
    const int n = g.n;
    Array2 nodes(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) nodes(i, j) = psi(i * g.dx, j * g.dx);
    VectorField v(g);
    const double r = 1.0 / g.dx;
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i) v.c[0](i, j) = (nodes(i, j + 1) - nodes(i, j)) * r;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i) v.c[1](i, j) = -(nodes(i + 1, j) - nodes(i, j)) * r;
    return v;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid;
    ScalarField d(g);
    const double r = 1.0 / g.dx;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            d(i, j) = (v.c[0](i + 1, j) - v.c[0](i, j)) * r + (v.c[1](i, j + 1) - v.c[1](i, j)) * r;
    return d;
}

VectorField gradient(const ScalarField& phi) {
    const Grid& g = phi.grid;
    VectorField v(g);
    const double r = 1.0 / g.dx;
    for (int j = 0; j < g.n; ++j)
        for (int i = 1; i < g.n; ++i) v.c[0](i, j) = (phi(i, j) - phi(i - 1, j)) * r;
    for (int j = 1; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) v.c[1](i, j) = (phi(i, j) - phi(i, j - 1)) * r;
    return v;
}

VectorField laplacian(const VectorField& v) {
    const Grid& g = v.grid;
    VectorField out(g);
    const double r2 = 1.0 / (g.dx * g.dx);
    for (int c = 0; c < 2; ++c) {
        const Array2& f = v.c[c];
        for (int j = 0; j < g.ny(c); ++j)
            for (int i = 0; i < g.nx(c); ++i) {
                if (g.on_wall(c, i, j)) continue;
                const double fc = f(i, j);
                const double dxx = (sample_ghost(f, g, c, i + 1, j) - 2.0 * fc + sample_ghost(f, g, c, i - 1, j)) * r2;
                const double dyy = (sample_ghost(f, g, c, i, j + 1) - 2.0 * fc + sample_ghost(f, g, c, i, j - 1)) * r2;
                out.c[c](i, j) = dxx + dyy;
            }
    }
    return out;
}

double inner_cells(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    double s = 0.0;
    for (std::size_t q = 0; q < a.p.a.size(); ++q) s += a.p.a[q] * b.p.a[q];
    return s * a.grid.dx * a.grid.dx;
}

double inner_L2(const VectorField& v, const VectorField& w) {
    require_same_grid(v.grid, w.grid);
    const Grid& g = v.grid;
    double s = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < g.ny(c); ++j)
            for (int i = 0; i < g.nx(c); ++i) s += g.weight(c, i, j) * v.c[c](i, j) * w.c[c](i, j);
    return s;
}

double norm_L2(const VectorField& v) { return std::sqrt(inner_L2(v, v)); }

double max_abs(const ScalarField& s) {
    double m = 0.0;
    for (double x : s.p.a) m = std::max(m, std::abs(x));
    return m;
}

namespace {

void remove_mean(ScalarField& s) {
    double m = 0.0;
    for (double x : s.p.a) m += x;
    m /= double(s.p.a.size());
    for (double& x : s.p.a) x -= m;
}

ScalarField apply_neumann(const ScalarField& phi) { return divergence(gradient(phi)); }

}  // namespace

ScalarField solve_pressure(const ScalarField& rhs_in, double tol, SolveStats* stats) {
    ScalarField rhs = rhs_in;
    remove_mean(rhs);
    ScalarField x(rhs.grid);
    const double bnorm = std::sqrt(inner_cells(rhs, rhs));
    if (stats) *stats = {};
    if (bnorm == 0.0) return x;

    ScalarField r = rhs;
    ScalarField z = spectral::neumann_solve(r);
    ScalarField p = z;
    double rz = inner_cells(r, z);
    const int maxit = 500;
    double res = 1.0;
    for (int it = 1; it <= maxit; ++it) {
        ScalarField Ap = apply_neumann(p);
        const double alpha = rz / inner_cells(p, Ap);
        for (std::size_t q = 0; q < x.p.a.size(); ++q) {
            x.p.a[q] += alpha * p.p.a[q];
            r.p.a[q] -= alpha * Ap.p.a[q];
        }
        res = std::sqrt(inner_cells(r, r)) / bnorm;
        if (stats) *stats = {it, res};
        if (res <= tol) {
            remove_mean(x);
            return x;
        }
        z = spectral::neumann_solve(r);
        const double rz_new = inner_cells(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t q = 0; q < p.p.a.size(); ++q) p.p.a[q] = z.p.a[q] + beta * p.p.a[q];
    }
    throw SolverError("pressure Poisson CG did not converge", maxit, res);
}

VectorField leray_project(const VectorField& v, double tol, SolveStats* stats) {
    ScalarField phi = solve_pressure(divergence(v), tol, stats);
    VectorField out = v;
    out -= gradient(phi);
    out.clamp_walls();
    return out;
}

namespace {

struct DiffSums {
    double first = 0.0;
    double second = 0.0;
};

DiffSums difference_sums(const VectorField& v) {
    const Grid& g = v.grid;
    const int n = g.n;
    const double r = 1.0 / g.dx;
    DiffSums s;
    for (int c = 0; c < 2; ++c) {
        const Array2& f = v.c[c];
        auto at = [&](int i, int j) { return sample_ghost(f, g, c, i, j); };
        // Along the normal axis the index runs 0..n; along the tangential axis it runs 0..n-1 with ghosts.
        const int ni = g.nx(c), nj = g.ny(c);
        const int i_lo = (c == 0) ? 0 : -1, i_hi = (c == 0) ? n - 1 : n - 1;
        const int j_lo = (c == 0) ? -1 : 0, j_hi = n - 1;
        for (int j = 0; j < nj; ++j)
            for (int i = i_lo; i <= i_hi; ++i) {
                const double d = (at(i + 1, j) - at(i, j)) * r;
                s.first += d * d;
            }
        for (int j = j_lo; j <= j_hi; ++j)
            for (int i = 0; i < ni; ++i) {
                const double d = (at(i, j + 1) - at(i, j)) * r;
                s.first += d * d;
            }
        for (int j = 0; j < nj; ++j)
            for (int i = 0; i < ni; ++i) {
                if (g.on_wall(c, i, j)) continue;
                const double dxx = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) * r * r;
                const double dyy = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) * r * r;
                s.second += dxx * dxx + dyy * dyy;
            }
        for (int j = j_lo; j <= j_hi; ++j)
            for (int i = i_lo; i <= i_hi; ++i) {
                const double dxy = (at(i + 1, j + 1) - at(i, j + 1) - at(i + 1, j) + at(i, j)) * r * r;
                s.second += 2.0 * dxy * dxy;
            }
    }
    const double w = g.dx * g.dx;
    s.first *= w;
    s.second *= w;
    return s;
}

}  // namespace

double norm_H2(const VectorField& v) {
    const DiffSums s = difference_sums(v);
    return std::sqrt(inner_L2(v, v) + s.first + s.second);
}

double seminorm_H1(const VectorField& v) { return std::sqrt(difference_sums(v).first); }

double norm_lap(const VectorField& v) { return norm_L2(laplacian(v)); }

double norm_A(const VectorField& v, double tol) {
    const VectorField L = laplacian(v);
    const VectorField gp = gradient(solve_pressure(divergence(L), tol));
    const double a = inner_L2(L, L) - inner_L2(gp, gp);
    return std::sqrt(std::max(0.0, a));
}

}  // namespace mvns
