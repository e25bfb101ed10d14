#include "sciagent/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sciagent::hilbert {

HilbertSystem build_hilbert(int n) {
    if (n < 1) throw Error("hilbert: n must be positive");
    HilbertSystem sys;
    sys.n = n;
    sys.h.resize(static_cast<std::size_t>(n) * n);
    sys.b.assign(n, 0.0);
    sys.x_star.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double v = 1.0 / (i + j + 1);  // 1-based h_ij = 1/(i+j-1)
            sys.h[static_cast<std::size_t>(i) * n + j] = v;
            sys.b[i] += v;
        }
    }
    return sys;
}

std::string to_string(Method m) {
    switch (m) {
        case Method::naive_lu: return "naive_lu";
        case Method::chol_reg: return "chol_reg";
        case Method::lu_reg: return "lu_reg";
        case Method::qr_reg: return "qr_reg";
        case Method::cg: return "cg";
        case Method::pcg: return "pcg";
        case Method::svd_trunc: return "svd_trunc";
    }
    return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
    for (Method m : {Method::naive_lu, Method::chol_reg, Method::lu_reg, Method::qr_reg,
                     Method::cg, Method::pcg, Method::svd_trunc}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

namespace dense {

bool lu_solve(std::vector<double> a, int n, std::vector<double>& x) {
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a[static_cast<std::size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double cand = std::abs(a[static_cast<std::size_t>(i) * n + k]);
            if (cand > best) {
                best = cand;
                p = i;
            }
        }
        if (best == 0.0) return false;
        if (p != k) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(k) * n + j],
                          a[static_cast<std::size_t>(p) * n + j]);
            std::swap(x[k], x[p]);
        }
        double pivot = a[static_cast<std::size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            double m = a[static_cast<std::size_t>(i) * n + k] / pivot;
            a[static_cast<std::size_t>(i) * n + k] = m;
            for (int j = k + 1; j < n; ++j)
                a[static_cast<std::size_t>(i) * n + j] -= m * a[static_cast<std::size_t>(k) * n + j];
            x[i] -= m * x[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= a[static_cast<std::size_t>(i) * n + j] * x[j];
        x[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    return true;
}

bool cholesky_solve(std::vector<double> a, int n, std::vector<double>& x) {
    // lower factor in place
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            double l = a[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (!(d > 0.0)) return false;
        double ljj = std::sqrt(d);
        a[static_cast<std::size_t>(j) * n + j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
            a[static_cast<std::size_t>(i) * n + j] = s / ljj;
        }
    }
    // forward then backward substitution
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * x[k];
        x[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    return true;
}

bool qr_solve(std::vector<double> a, int n, std::vector<double>& x) {
    // Householder QR, reflectors applied to x on the fly.
    for (int k = 0; k < n; ++k) {
        double norm = 0;
        for (int i = k; i < n; ++i) {
            double v = a[static_cast<std::size_t>(i) * n + k];
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return false;
        double akk = a[static_cast<std::size_t>(k) * n + k];
        double alpha = akk > 0 ? -norm : norm;
        std::vector<double> w(n - k);
        w[0] = akk - alpha;
        for (int i = k + 1; i < n; ++i) w[i - k] = a[static_cast<std::size_t>(i) * n + k];
        double wnorm2 = 0;
        for (double v : w) wnorm2 += v * v;
        if (wnorm2 == 0.0) continue;
        a[static_cast<std::size_t>(k) * n + k] = alpha;
        for (int i = k + 1; i < n; ++i) a[static_cast<std::size_t>(i) * n + k] = 0.0;
        for (int j = k + 1; j < n; ++j) {
            double dot = 0;
            for (int i = k; i < n; ++i) dot += w[i - k] * a[static_cast<std::size_t>(i) * n + j];
            double f = 2.0 * dot / wnorm2;
            for (int i = k; i < n; ++i) a[static_cast<std::size_t>(i) * n + j] -= f * w[i - k];
        }
        double dot = 0;
        for (int i = k; i < n; ++i) dot += w[i - k] * x[i];
        double f = 2.0 * dot / wnorm2;
        for (int i = k; i < n; ++i) x[i] -= f * w[i - k];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= a[static_cast<std::size_t>(i) * n + j] * x[j];
        double d = a[static_cast<std::size_t>(i) * n + i];
        if (d == 0.0) return false;
        x[i] = s / d;
    }
    return true;
}

std::vector<double> jacobi_svd(std::vector<double> a, int n, std::vector<double>* u_out,
                               std::vector<double>* v_out) {
    // One-sided Jacobi on columns: A V = U Sigma.
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto col_dot = [&](int p, int q) {
        double s = 0;
        for (int i = 0; i < n; ++i)
            s += a[static_cast<std::size_t>(i) * n + p] * a[static_cast<std::size_t>(i) * n + q];
        return s;
    };
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = col_dot(p, p), aqq = col_dot(q, q), apq = col_dot(p, q);
                if (std::abs(apq) <= 1e2 * eps * std::sqrt(app * aqq)) continue;
                off += std::abs(apq);
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (int i = 0; i < n; ++i) {
                    double ap = a[static_cast<std::size_t>(i) * n + p];
                    double aq = a[static_cast<std::size_t>(i) * n + q];
                    a[static_cast<std::size_t>(i) * n + p] = c * ap - s * aq;
                    a[static_cast<std::size_t>(i) * n + q] = s * ap + c * aq;
                    double vp = v[static_cast<std::size_t>(i) * n + p];
                    double vq = v[static_cast<std::size_t>(i) * n + q];
                    v[static_cast<std::size_t>(i) * n + p] = c * vp - s * vq;
                    v[static_cast<std::size_t>(i) * n + q] = s * vp + c * vq;
                }
            }
        }
        if (off == 0) break;
    }
    std::vector<double> sigma(n);
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) {
        sigma[j] = std::sqrt(col_dot(j, j));
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](int i, int j) { return sigma[i] > sigma[j]; });
    std::vector<double> sorted(n);
    for (int j = 0; j < n; ++j) sorted[j] = sigma[order[j]];
    if (u_out) {
        u_out->assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j) {
            int src = order[j];
            double s = sigma[src];
            for (int i = 0; i < n; ++i)
                (*u_out)[static_cast<std::size_t>(i) * n + j] =
                    s > 0 ? a[static_cast<std::size_t>(i) * n + src] / s : 0.0;
        }
    }
    if (v_out) {
        v_out->assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j) {
            int src = order[j];
            for (int i = 0; i < n; ++i)
                (*v_out)[static_cast<std::size_t>(i) * n + j] = v[static_cast<std::size_t>(i) * n + src];
        }
    }
    return sorted;
}

}  // namespace dense

double condition_2norm(std::span<const double> a, int n) {
    std::vector<double> m(a.begin(), a.end());
    std::vector<double> sigma = dense::jacobi_svd(std::move(m), n);
    if (sigma.back() == 0) return std::numeric_limits<double>::infinity();
    return sigma.front() / sigma.back();
}

namespace {

std::vector<double> matvec(const HilbertSystem& sys, const std::vector<double>& x) {
    std::vector<double> y(sys.n, 0.0);
    for (int i = 0; i < sys.n; ++i) {
        double s = 0;
        for (int j = 0; j < sys.n; ++j) s += sys.h[static_cast<std::size_t>(i) * sys.n + j] * x[j];
        y[i] = s;
    }
    return y;
}

// CG / Jacobi-PCG on Hx=b from x0=0; records the energy norm of the error,
// which is the quantity the iteration actually decreases.
void run_cg(const HilbertSystem& sys, bool jacobi, double tol, int max_iter, SolveOutcome& out) {
    const int n = sys.n;
    std::vector<double> x(n, 0.0), r = sys.b, z(n), p(n), hp(n);
    std::vector<double> minv(n, 1.0);
    if (jacobi)
        for (int i = 0; i < n; ++i) minv[i] = 1.0 / sys.h[static_cast<std::size_t>(i) * n + i];
    for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
    p = z;
    double rz = 0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];
    double bnorm = 0;
    for (double v : sys.b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);

    auto energy_error = [&] {
        std::vector<double> e(n);
        for (int i = 0; i < n; ++i) e[i] = x[i] - sys.x_star[i];
        std::vector<double> he = matvec(sys, e);
        double s = 0;
        for (int i = 0; i < n; ++i) s += e[i] * he[i];
        return std::sqrt(std::max(s, 0.0));
    };

    int it = 0;
    out.error_energy_trace.push_back(energy_error());
    for (; it < max_iter; ++it) {
        double rnorm = 0;
        for (double v : r) rnorm += v * v;
        if (std::sqrt(rnorm) <= tol * bnorm) break;
        hp = matvec(sys, p);
        double php = 0;
        for (int i = 0; i < n; ++i) php += p[i] * hp[i];
        if (!(php > 0)) break;
        double alpha = rz / php;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
        double rz_new = 0;
        for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        out.error_energy_trace.push_back(energy_error());
    }
    double rnorm = 0;
    for (double v : r) rnorm += v * v;
    out.iterations = it;
    out.converged = std::sqrt(rnorm) <= tol * bnorm;
    if (!out.converged) out.failure = "max_iter_exceeded";
    out.x = std::move(x);
}

}  // namespace

SolveOutcome solve(const HilbertSystem& sys, Method method, const SolveParams& params) {
    const int n = sys.n;
    SolveOutcome out;
    out.method = method;

    double trace = 0;
    for (int i = 0; i < n; ++i) trace += sys.h[static_cast<std::size_t>(i) * n + i];
    double lambda = params.lambda.value_or(1e-12 * trace / n);
    int max_iter = params.max_iter > 0 ? params.max_iter : 10 * n;

    auto regularized = [&] {
        std::vector<double> a = sys.h;
        for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] += lambda;
        return a;
    };

    bool ok = true;
    switch (method) {
        case Method::naive_lu: {
            out.x = sys.b;
            ok = dense::lu_solve(sys.h, n, out.x);
            out.lambda_used = 0;
            if (!ok) out.failure = "singular_pivot";
            break;
        }
        case Method::lu_reg: {
            out.x = sys.b;
            ok = dense::lu_solve(regularized(), n, out.x);
            out.lambda_used = lambda;
            if (!ok) out.failure = "singular_pivot";
            break;
        }
        case Method::chol_reg: {
            out.x = sys.b;
            ok = dense::cholesky_solve(regularized(), n, out.x);
            out.lambda_used = lambda;
            if (!ok) out.failure = "not_positive_definite";
            break;
        }
        case Method::qr_reg: {
            out.x = sys.b;
            ok = dense::qr_solve(regularized(), n, out.x);
            out.lambda_used = lambda;
            if (!ok) out.failure = "singular_pivot";
            break;
        }
        case Method::cg:
        case Method::pcg: {
            run_cg(sys, method == Method::pcg, params.tol, max_iter, out);
            break;
        }
        case Method::svd_trunc: {
            std::vector<double> u, v;
            std::vector<double> sigma = dense::jacobi_svd(sys.h, n, &u, &v);
            double cutoff = params.svd_cutoff * sigma.front();
            out.x.assign(n, 0.0);
            int rank = 0;
            for (int k = 0; k < n; ++k) {
                if (sigma[k] < cutoff) break;
                ++rank;
                double coef = 0;
                for (int i = 0; i < n; ++i) coef += u[static_cast<std::size_t>(i) * n + k] * sys.b[i];
                coef /= sigma[k];
                for (int i = 0; i < n; ++i) out.x[i] += coef * v[static_cast<std::size_t>(i) * n + k];
            }
            out.rank = rank;
            break;
        }
    }

    if (!ok) {
        out.x.assign(n, std::numeric_limits<double>::quiet_NaN());
        out.converged = false;
    }
    out.linf = metrics::linf_error(sys.x_star, out.x);
    return out;
}

std::vector<SweepCell> sweep(std::span<const int> sizes, std::span<const Method> methods,
                             const SolveParams& params, double threshold) {
    std::vector<SweepCell> cells;
    for (int n : sizes) {
        HilbertSystem sys = build_hilbert(n);
        for (Method m : methods) {
            SweepCell cell{n, m, solve(sys, m, params), metrics::Completion::contains_nan};
            cell.status = metrics::classify_completion(cell.outcome.linf, threshold);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::vector<int> sizes;
    std::vector<Method> methods;
    for (const auto& c : cells) {
        if (std::find(sizes.begin(), sizes.end(), c.n) == sizes.end()) sizes.push_back(c.n);
        if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
            methods.push_back(c.method);
    }
    auto find_cell = [&](Method m, int n) -> const SweepCell* {
        for (const auto& c : cells)
            if (c.method == m && c.n == n) return &c;
        return nullptr;
    };
    std::ostringstream os;
    os << "method";
    for (int n : sizes) os << ",n=" << n;
    os << '\n';
    os.setf(std::ios::scientific);
    os.precision(3);
    for (Method m : methods) {
        os << to_string(m);
        for (int n : sizes) {
            const SweepCell* c = find_cell(m, n);
            os << ',';
            if (c) os << c->outcome.linf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace sciagent::hilbert
