#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvns {

/// Failure of an iterative solve (carries iteration count and final residual).
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Uniform staggered grid on the unit square.
struct Grid {
    int n = 0;
    double dx = 0.0;

    static Grid make(int n);
    bool operator==(const Grid& o) const { return n == o.n; }
    bool operator!=(const Grid& o) const { return n != o.n; }

    /// Array extents of velocity component c (0: vertical faces, 1: horizontal faces).
    int nx(int c) const { return c == 0 ? n + 1 : n; }
    int ny(int c) const { return c == 0 ? n : n + 1; }

    /// Physical coordinates of sample (i,j) of component c.
    double x(int c, int i) const { return c == 0 ? i * dx : (i + 0.5) * dx; }
    double y(int c, int j) const { return c == 0 ? (j + 0.5) * dx : j * dx; }

    /// True when (i,j) of component c lies on a wall (normal velocity slot).
    bool on_wall(int c, int i, int j) const {
        return c == 0 ? (i == 0 || i == n) : (j == 0 || j == n);
    }
    /// Quadrature weight of sample (i,j) of component c (half weight on walls).
    double weight(int c, int i, int j) const {
        return on_wall(c, i, j) ? 0.5 * dx * dx : dx * dx;
    }
};

/// Dense 2D array indexed (i,j) with i fastest (row-major in j).
struct Array2 {
    int nx = 0, ny = 0;
    std::vector<double> a;

    Array2() = default;
    Array2(int nx_, int ny_, double v = 0.0) : nx(nx_), ny(ny_), a(std::size_t(nx_) * ny_, v) {}
    double& operator()(int i, int j) { return a[std::size_t(j) * nx + i]; }
    double operator()(int i, int j) const { return a[std::size_t(j) * nx + i]; }
    std::size_t size() const { return a.size(); }
};

/// Cell-centered scalar.
struct ScalarField {
    Grid grid;
    Array2 p;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), p(g.n, g.n) {}
    double& operator()(int i, int j) { return p(i, j); }
    double operator()(int i, int j) const { return p(i, j); }
};

/// Staggered velocity: c[0] on vertical faces, c[1] on horizontal faces.
struct VectorField {
    Grid grid;
    std::array<Array2, 2> c;

    VectorField() = default;
    explicit VectorField(const Grid& g)
        : grid(g), c{Array2(g.nx(0), g.ny(0)), Array2(g.nx(1), g.ny(1))} {}

    /// Samples f(x,y) -> component value at every staggered location, walls clamped to 0.
    static VectorField from_function(const Grid& g, const std::function<double(int, double, double)>& f);
    /// As from_function but without clamping the wall slots.
    static VectorField from_function_raw(const Grid& g, const std::function<double(int, double, double)>& f);

    void clamp_walls();
    bool finite() const;
    bool walls_zero() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
    /// this += s * o
    void axpy(double s, const VectorField& o);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

void require_same_grid(const Grid& a, const Grid& b);

/// Value of component c at (i,j), with odd reflection across the walls parallel to c.
double sample_ghost(const Array2& f, const Grid& g, int c, int i, int j);

/// Component k interpolated onto the sample locations of component l (k == l copies).
Array2 gather(const VectorField& v, int k, int l);

/// Value and central derivatives {f, d1, d2, d11, d12, d22} of a component-c array at an
/// interior slot (i,j).
std::array<double, 6> derivatives(const Array2& f, const Grid& g, int c, int i, int j);
/// First derivatives at any slot; along the normal axis of a wall slot the stencil is one-sided.
std::array<double, 2> first_derivatives(const Array2& f, const Grid& g, int c, int i, int j);

/// Discrete curl of a node-sampled stream function; exactly divergence free. psi must vanish on the walls.
VectorField discrete_curl(const Grid& g, const std::function<double(double, double)>& psi);

ScalarField divergence(const VectorField& v);
/// Face gradient of a cell scalar; wall slots are 0.
VectorField gradient(const ScalarField& phi);
/// Five-point vector Laplacian with no-slip ghosts; wall slots are 0.
VectorField laplacian(const VectorField& v);

double inner_cells(const ScalarField& a, const ScalarField& b);
double inner_L2(const VectorField& v, const VectorField& w);
double norm_L2(const VectorField& v);
double max_abs(const ScalarField& s);

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
};

/// Solves div grad phi = rhs (homogeneous Neumann), zero-mean phi, by preconditioned CG.
ScalarField solve_pressure(const ScalarField& rhs, double tol = 1e-10, SolveStats* stats = nullptr);

/// Discrete Leray projection v - grad phi.
VectorField leray_project(const VectorField& v, double tol = 1e-10, SolveStats* stats = nullptr);

/// ||u||_{H^2}: sum of L2, first and second difference quadratures.
double norm_H2(const VectorField& v);
/// ||Delta u||
double norm_lap(const VectorField& v);
/// ||P Delta u||, evaluated as sqrt(||Delta u||^2 - ||grad phi||^2).
double norm_A(const VectorField& v, double tol = 1e-12);
/// sqrt of sum of squared forward differences (plain H^1 seminorm).
double seminorm_H1(const VectorField& v);

}  // namespace mvns
