#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sciagent/error.hpp"
#include "sciagent/metrics.hpp"

namespace sciagent::hilbert {

struct HilbertSystem {
    int n = 0;
    std::vector<double> h;       // dense row-major n*n, h_ij = 1/(i+j-1)
    std::vector<double> b;       // row sums (exact solution is all ones)
    std::vector<double> x_star;  // ones
};

HilbertSystem build_hilbert(int n);

// kappa_2 = sigma_max / sigma_min via one-sided Jacobi SVD.
double condition_2norm(std::span<const double> a, int n);

enum class Method { naive_lu, chol_reg, lu_reg, qr_reg, cg, pcg, svd_trunc };
std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

struct SolveParams {
    std::optional<double> lambda;  // unset: default rule 1e-12 * trace(H) / n
    double tol = 1e-14;            // CG family, relative residual
    int max_iter = -1;             // <0: 10n
    double svd_cutoff = 1e-12;     // relative to sigma_max
};

struct SolveOutcome {
    Method method = Method::naive_lu;
    std::vector<double> x;
    double linf = 0;             // recomputed against x_star, never trusted from the solver
    double lambda_used = 0;
    int iterations = 0;
    int rank = 0;                // svd_trunc: retained singular values
    bool converged = true;
    std::string failure;         // "not_positive_definite", "max_iter_exceeded", ...
    std::vector<double> error_energy_trace;  // CG family: sqrt(e^T H e) per iteration
};

// Solves Hx=b (or (H+lambda I)x=b for the regularized direct methods) with
// from-scratch dense kernels. Breakdown is reported on the outcome, not
// thrown: a failed factorization yields NaN x and linf.
SolveOutcome solve(const HilbertSystem& sys, Method method, const SolveParams& params = {});

struct SweepCell {
    int n;
    Method method;
    SolveOutcome outcome;
    metrics::Completion status;
};

std::vector<SweepCell> sweep(std::span<const int> sizes, std::span<const Method> methods,
                             const SolveParams& params = {}, double threshold = 1e-2);

std::string sweep_csv(const std::vector<SweepCell>& cells);  // method rows x n columns

// Dense kernels, exposed for direct testing. Solvers take b in x and leave
// the solution there; they return false on breakdown.
namespace dense {
// LU with partial pivoting; returns false on exact zero pivot.
bool lu_solve(std::vector<double> a, int n, std::vector<double>& x);
// Cholesky LL^T; returns false when a pivot is not strictly positive.
bool cholesky_solve(std::vector<double> a, int n, std::vector<double>& x);
// Householder QR solve.
bool qr_solve(std::vector<double> a, int n, std::vector<double>& x);
// One-sided Jacobi SVD of a symmetric (or general square) matrix: returns
// singular values descending, and optionally U (columns) and V.
std::vector<double> jacobi_svd(std::vector<double> a, int n, std::vector<double>* u_out = nullptr,
                               std::vector<double>* v_out = nullptr);
}  // namespace dense

}  // namespace sciagent::hilbert
