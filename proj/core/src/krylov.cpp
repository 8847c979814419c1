#include "mvns/krylov.hpp"

#include <cmath>
#include <vector>

namespace mvns {

VectorField cg(const LinOp& A, const LinOp& precond, const VectorField& b, VectorField x,
               double tol, int maxit, SolveStats* stats) {
    const double bnorm = norm_L2(b);
    if (stats) *stats = {};
    if (bnorm == 0.0) return VectorField(b.grid);
    VectorField r = b - A(x);
    double res = norm_L2(r) / bnorm;
    if (stats) *stats = {0, res};
    if (res <= tol) return x;
    VectorField z = precond ? precond(r) : r;
    VectorField p = z;
    double rz = inner_L2(r, z);
    for (int it = 1; it <= maxit; ++it) {
        const VectorField Ap = A(p);
        const double alpha = rz / inner_L2(p, Ap);
        x.axpy(alpha, p);
        r.axpy(-alpha, Ap);
        res = norm_L2(r) / bnorm;
        if (stats) *stats = {it, res};
        if (res <= tol) return x;
        z = precond ? precond(r) : r;
        const double rz_new = inner_L2(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        p *= beta;
        p += z;
    }
    throw SolverError("CG did not converge", maxit, res);
}

VectorField gmres(const LinOp& A, const LinOp& precond, const VectorField& b, VectorField x,
                  double tol, int restart, int maxit, SolveStats* stats) {
    const double bnorm = norm_L2(b);
    if (stats) *stats = {};
    if (bnorm == 0.0) return VectorField(b.grid);
    int total = 0;
    double res = 0.0;
    while (total < maxit) {
        VectorField r = b - A(x);
        double beta = norm_L2(r);
        res = beta / bnorm;
        if (stats) *stats = {total, res};
        if (res <= tol) return x;

        std::vector<VectorField> V;
        std::vector<VectorField> Z;
        V.push_back((1.0 / beta) * r);
        std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
        std::vector<double> cs(restart, 0.0), sn(restart, 0.0), e(restart + 1, 0.0);
        e[0] = beta;
        int k = 0;
        for (; k < restart && total < maxit; ++k, ++total) {
            Z.push_back(precond ? precond(V[k]) : V[k]);
            VectorField w = A(Z[k]);
            for (int i = 0; i <= k; ++i) {
                H[i][k] = inner_L2(w, V[i]);
                w.axpy(-H[i][k], V[i]);
            }
            H[k + 1][k] = norm_L2(w);
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
                H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
                H[i][k] = t;
            }
            const double d = std::hypot(H[k][k], H[k + 1][k]);
            cs[k] = H[k][k] / d;
            sn[k] = H[k + 1][k] / d;
            const double hk1 = H[k + 1][k];
            H[k][k] = d;
            H[k + 1][k] = 0.0;
            e[k + 1] = -sn[k] * e[k];
            e[k] = cs[k] * e[k];
            res = std::abs(e[k + 1]) / bnorm;
            if (stats) *stats = {total + 1, res};
            if (res <= tol || hk1 == 0.0) {
                ++k;
                ++total;
                break;
            }
            V.push_back((1.0 / hk1) * w);
        }
        std::vector<double> y(k, 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = e[i];
            for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < k; ++i) x.axpy(y[i], Z[i]);
        if (res <= tol) {
            const double true_res = norm_L2(b - A(x)) / bnorm;
            if (stats) *stats = {total, true_res};
            if (true_res <= 10.0 * tol) return x;
        }
    }
    throw SolverError("GMRES did not converge", total, res);
}

}  // namespace mvns
