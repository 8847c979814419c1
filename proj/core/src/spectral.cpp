#include "mvns/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace mvns::spectral {

namespace {

enum class Basis { Cosine, SineNode, SineCell };

/// Orthonormal eigenbasis (columns) and eigenvalues of a 1D second-difference matrix.
struct Basis1D {
    Eigen::MatrixXd q;
    Eigen::VectorXd lambda;
};

Basis1D build(Basis kind, int n) {
    const double pi = std::acos(-1.0);
    const double h = 1.0 / n;
    int m = 0;
    switch (kind) {
        case Basis::Cosine: m = n; break;
        case Basis::SineNode: m = n - 1; break;
        case Basis::SineCell: m = n; break;
    }
    Basis1D b{Eigen::MatrixXd(m, m), Eigen::VectorXd(m)};
    for (int k = 0; k < m; ++k) {
        const int kk = (kind == Basis::Cosine) ? k : k + 1;
        for (int i = 0; i < m; ++i) {
            double v = 0.0;
            switch (kind) {
                case Basis::Cosine: v = std::cos(pi * kk * (i + 0.5) / n); break;
                case Basis::SineNode: v = std::sin(pi * kk * (i + 1.0) / n); break;
                case Basis::SineCell: v = std::sin(pi * kk * (i + 0.5) / n); break;
            }
            b.q(i, k) = v;
        }
        b.q.col(k).normalize();
        const double s = std::sin(pi * kk / (2.0 * n));
        b.lambda(k) = -4.0 * s * s / (h * h);
    }
    return b;
}

struct Bases {
    Basis1D cosine, sine_node, sine_cell;
};

std::shared_ptr<const Bases> bases_for(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const Bases>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto b = std::make_shared<const Bases>(
        Bases{build(Basis::Cosine, n), build(Basis::SineNode, n), build(Basis::SineCell, n)});
    cache.emplace(n, b);
    return b;
}

}  // namespace

ScalarField neumann_solve(const ScalarField& rhs) {
    const int n = rhs.grid.n;
    auto b = bases_for(n);
    Eigen::MatrixXd f(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) f(i, j) = rhs(i, j);
    Eigen::MatrixXd fh = b->cosine.q.transpose() * f * b->cosine.q;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double l = b->cosine.lambda(i) + b->cosine.lambda(j);
            fh(i, j) = (i == 0 && j == 0) ? 0.0 : fh(i, j) / l;
        }
    Eigen::MatrixXd x = b->cosine.q * fh * b->cosine.q.transpose();
    ScalarField out(rhs.grid);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out(i, j) = x(i, j);
    return out;
}

VectorField helmholtz_solve(const VectorField& f, double alpha, double beta) {
    const Grid& g = f.grid;
    const int n = g.n;
    auto b = bases_for(n);
    VectorField out(g);
    for (int c = 0; c < 2; ++c) {
        // Interior unknowns: normal axis 1..n-1 (sine at nodes), tangential axis 0..n-1 (sine at cells).
        const Basis1D& bx = (c == 0) ? b->sine_node : b->sine_cell;
        const Basis1D& by = (c == 0) ? b->sine_cell : b->sine_node;
        const int mx = int(bx.lambda.size()), my = int(by.lambda.size());
        const int ox = (c == 0) ? 1 : 0, oy = (c == 0) ? 0 : 1;
        Eigen::MatrixXd m(mx, my);
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) m(i, j) = f.c[c](i + ox, j + oy);
        Eigen::MatrixXd mh = bx.q.transpose() * m * by.q;
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) mh(i, j) /= alpha - beta * (bx.lambda(i) + by.lambda(j));
        Eigen::MatrixXd x = bx.q * mh * by.q.transpose();
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) out.c[c](i + ox, j + oy) = x(i, j);
    }
    return out;
}

}  // namespace mvns::spectral
