#include "sciagent/pde/sod.hpp"

#include <array>
#include <cmath>

namespace sciagent::pde {

namespace {

constexpr EulerState kSodLeft{1.0, 0.0, 1.0};
constexpr EulerState kSodRight{0.125, 0.0, 0.1};
constexpr double kGamma = 1.4;
constexpr double kDiaphragm = 0.5;

double sound_speed(const EulerState& s, double g) { return std::sqrt(g * s.p / s.rho); }

// f_K(p): velocity change across the left/right wave for trial star pressure.
double wave_fn(double p, const EulerState& s, double g, double* dfdp = nullptr) {
    double a = sound_speed(s, g);
    if (p > s.p) {  // shock branch
        double A = 2.0 / ((g + 1.0) * s.rho);
        double B = (g - 1.0) / (g + 1.0) * s.p;
        double root = std::sqrt(A / (p + B));
        if (dfdp) *dfdp = root * (1.0 - 0.5 * (p - s.p) / (p + B));
        return (p - s.p) * root;
    }
    // rarefaction branch
    double pr = std::pow(p / s.p, (g - 1.0) / (2.0 * g));
    if (dfdp) *dfdp = 1.0 / (s.rho * a) * std::pow(p / s.p, -(g + 1.0) / (2.0 * g));
    return 2.0 * a / (g - 1.0) * (pr - 1.0);
}

}  // namespace

RiemannStarState solve_riemann_star(const EulerState& left, const EulerState& right, double gamma,
                                    double tol) {
    const double du = right.u - left.u;
    auto total = [&](double p, double* dfdp = nullptr) {
        double dl = 0, dr = 0;
        double fl = wave_fn(p, left, gamma, dfdp ? &dl : nullptr);
        double fr = wave_fn(p, right, gamma, dfdp ? &dr : nullptr);
        if (dfdp) *dfdp = dl + dr;
        return fl + fr + du;
    };

    // Bracket the root, then Newton with bisection fallback.
    double lo = 1e-10;
    double hi = std::max(left.p, right.p);
    while (total(hi) < 0) {
        hi *= 2.0;
        if (hi > 1e8) throw NoConvergence("riemann: cannot bracket star pressure");
    }
    if (total(lo) > 0) throw NoConvergence("riemann: vacuum-adjacent data");

    double p = 0.5 * (lo + hi);
    RiemannStarState star;
    for (int it = 0; it < 200; ++it) {
        star.iterations = it + 1;
        double dfdp = 0;
        double f = total(p, &dfdp);
        if (f > 0) {
            hi = p;
        } else {
            lo = p;
        }
        double step = dfdp != 0 ? f / dfdp : 0;
        double next = p - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - p) <= tol * std::max(1.0, p)) {
            p = next;
            break;
        }
        p = next;
        if (it == 199) throw NoConvergence("riemann: star pressure iteration stalled");
    }

    star.p_star = p;
    star.u_star = 0.5 * (left.u + right.u) +
                  0.5 * (wave_fn(p, right, gamma) - wave_fn(p, left, gamma));
    star.left_wave = p > left.p ? WaveKind::shock : WaveKind::rarefaction;
    star.right_wave = p > right.p ? WaveKind::shock : WaveKind::rarefaction;

    auto star_density = [&](const EulerState& s) {
        double ratio = p / s.p;
        if (p > s.p) {
            double gm = (gamma - 1.0) / (gamma + 1.0);
            return s.rho * (ratio + gm) / (gm * ratio + 1.0);
        }
        return s.rho * std::pow(ratio, 1.0 / gamma);
    };
    star.rho_star_left = star_density(left);
    star.rho_star_right = star_density(right);
    return star;
}

namespace {

// Sample the self-similar solution at xi = (x - x_diaphragm)/t.
EulerState sample_riemann(const RiemannStarState& star, const EulerState& l, const EulerState& r,
                          double g, double xi) {
    double al = sound_speed(l, g), ar = sound_speed(r, g);
    if (xi <= star.u_star) {
        // left of contact
        if (star.left_wave == WaveKind::shock) {
            double sl = l.u - al * std::sqrt((g + 1.0) / (2.0 * g) * star.p_star / l.p +
                                             (g - 1.0) / (2.0 * g));
            if (xi < sl) return l;
            return {star.rho_star_left, star.u_star, star.p_star};
        }
        double head = l.u - al;
        double a_star = al * std::pow(star.p_star / l.p, (g - 1.0) / (2.0 * g));
        double tail = star.u_star - a_star;
        if (xi < head) return l;
        if (xi > tail) return {star.rho_star_left, star.u_star, star.p_star};
        double u = 2.0 / (g + 1.0) * (al + (g - 1.0) / 2.0 * l.u + xi);
        double a = 2.0 / (g + 1.0) * (al + (g - 1.0) / 2.0 * (l.u - xi));
        double rho = l.rho * std::pow(a / al, 2.0 / (g - 1.0));
        double p = l.p * std::pow(a / al, 2.0 * g / (g - 1.0));
        return {rho, u, p};
    }
    // right of contact
    if (star.right_wave == WaveKind::shock) {
        double sr = r.u + ar * std::sqrt((g + 1.0) / (2.0 * g) * star.p_star / r.p +
                                         (g - 1.0) / (2.0 * g));
        if (xi > sr) return r;
        return {star.rho_star_right, star.u_star, star.p_star};
    }
    double head = r.u + ar;
    double a_star = ar * std::pow(star.p_star / r.p, (g - 1.0) / (2.0 * g));
    double tail = star.u_star + a_star;
    if (xi > head) return r;
    if (xi < tail) return {star.rho_star_right, star.u_star, star.p_star};
    double u = 2.0 / (g + 1.0) * (-ar + (g - 1.0) / 2.0 * r.u + xi);
    double a = 2.0 / (g + 1.0) * (ar - (g - 1.0) / 2.0 * (r.u - xi));
    double rho = r.rho * std::pow(a / ar, 2.0 / (g - 1.0));
    double p = r.p * std::pow(a / ar, 2.0 * g / (g - 1.0));
    return {rho, u, p};
}

struct Conserved {
    double rho, mom, ener;
};

Conserved to_conserved(const EulerState& s, double g) {
    double E = 0.5 * s.u * s.u + s.p / ((g - 1.0) * s.rho);
    return {s.rho, s.rho * s.u, s.rho * E};
}

EulerState to_primitive(const Conserved& c, double g) {
    double u = c.mom / c.rho;
    double p = (g - 1.0) * (c.ener - 0.5 * c.rho * u * u);
    return {c.rho, u, p};
}

Conserved euler_flux(const EulerState& s, double g) {
    double E = 0.5 * s.u * s.u + s.p / ((g - 1.0) * s.rho);
    return {s.rho * s.u, s.rho * s.u * s.u + s.p, (s.rho * E + s.p) * s.u};
}

// HLLC flux with Davis wave-speed estimates.
Conserved hllc_flux(const EulerState& l, const EulerState& r, double g) {
    double al = sound_speed(l, g), ar = sound_speed(r, g);
    double sl = std::min(l.u - al, r.u - ar);
    double sr = std::max(l.u + al, r.u + ar);
    double s_star = (r.p - l.p + l.rho * l.u * (sl - l.u) - r.rho * r.u * (sr - r.u)) /
                    (l.rho * (sl - l.u) - r.rho * (sr - r.u));

    if (sl >= 0) return euler_flux(l, g);
    if (sr <= 0) return euler_flux(r, g);

    auto star_flux = [&](const EulerState& s, double sk) {
        Conserved u = to_conserved(s, g);
        Conserved f = euler_flux(s, g);
        double factor = s.rho * (sk - s.u) / (sk - s_star);
        double E = u.ener / s.rho;
        Conserved u_star{factor, factor * s_star,
                         factor * (E + (s_star - s.u) * (s_star + s.p / (s.rho * (sk - s.u))))};
        return Conserved{f.rho + sk * (u_star.rho - u.rho), f.mom + sk * (u_star.mom - u.mom),
                         f.ener + sk * (u_star.ener - u.ener)};
    };
    if (s_star >= 0) return star_flux(l, sl);
    return star_flux(r, sr);
}

}  // namespace

SodSolution solve_sod_exact(const std::vector<double>& x_nodes, double t) {
    if (x_nodes.empty()) throw Error("sod: no sample nodes");
    RiemannStarState star = solve_riemann_star(kSodLeft, kSodRight, kGamma);

    SodSolution out;
    Grid1D g;
    g.x0 = x_nodes.front();
    g.x1 = x_nodes.back();
    g.cells = static_cast<int>(x_nodes.size()) - 1;
    g.xs = x_nodes;
    out.rho = {g, {}, "rho"};
    out.u = {g, {}, "u"};
    out.p = {g, {}, "p"};
    for (double x : x_nodes) {
        EulerState s = t > 0 ? sample_riemann(star, kSodLeft, kSodRight, kGamma,
                                              (x - kDiaphragm) / t)
                             : (x <= kDiaphragm ? kSodLeft : kSodRight);
        out.rho.values.push_back(s.rho);
        out.u.values.push_back(s.u);
        out.p.values.push_back(s.p);
    }
    out.star = star;
    return out;
}

SodSolution solve_sod_hllc(int nx, double t_end) {
    if (nx < 8) throw Error("sod hllc: nx too small");
    const double h = 1.0 / nx;
    std::vector<Conserved> u(nx), u1(nx);
    std::vector<double> xc(nx);
    for (int i = 0; i < nx; ++i) {
        xc[i] = (i + 0.5) * h;
        u[i] = to_conserved(xc[i] <= kDiaphragm ? kSodLeft : kSodRight, kGamma);
    }

    auto max_speed = [&](const std::vector<Conserved>& w) {
        double s = 0;
        for (const auto& c : w) {
            EulerState prim = to_primitive(c, kGamma);
            s = std::max(s, std::abs(prim.u) + sound_speed(prim, kGamma));
        }
        return s;
    };

    // RK2 with transmissive ends; net boundary flux tracked for the mass audit.
    auto sweep = [&](const std::vector<Conserved>& w, std::vector<Conserved>& out,
                     double dt, double* boundary_mass) {
        std::vector<Conserved> flux(nx + 1);
        for (int i = 0; i <= nx; ++i) {
            const Conserved& cl = w[std::max(i - 1, 0)];
            const Conserved& cr = w[std::min(i, nx - 1)];
            flux[i] = hllc_flux(to_primitive(cl, kGamma), to_primitive(cr, kGamma), kGamma);
        }
        for (int i = 0; i < nx; ++i) {
            out[i].rho = w[i].rho - dt / h * (flux[i + 1].rho - flux[i].rho);
            out[i].mom = w[i].mom - dt / h * (flux[i + 1].mom - flux[i].mom);
            out[i].ener = w[i].ener - dt / h * (flux[i + 1].ener - flux[i].ener);
        }
        if (boundary_mass) *boundary_mass += dt * (flux[nx].rho - flux[0].rho);
    };

    double t = 0;
    double drift = 0;  // worst per-step mass balance violation
    auto total_mass = [&] {
        double m = 0;
        for (const auto& c : u) m += c.rho * h;
        return m;
    };

    while (t < t_end) {
        double dt = 0.4 * h / max_speed(u);
        if (t + dt > t_end) dt = t_end - t;
        double mass_before = total_mass();
        double half_boundary = 0;
        sweep(u, u1, dt, &half_boundary);
        std::vector<Conserved> u2(nx);
        double half_boundary2 = 0;
        sweep(u1, u2, dt, &half_boundary2);
        for (int i = 0; i < nx; ++i) {
            u[i].rho = 0.5 * (u[i].rho + u2[i].rho);
            u[i].mom = 0.5 * (u[i].mom + u2[i].mom);
            u[i].ener = 0.5 * (u[i].ener + u2[i].ener);
        }
        double step_boundary = 0.5 * (half_boundary + half_boundary2);
        drift = std::max(drift, std::abs(total_mass() + step_boundary - mass_before));
        t += dt;
    }

    SodSolution out;
    Grid1D g;
    g.x0 = xc.front();
    g.x1 = xc.back();
    g.cells = nx - 1;
    g.xs = xc;
    out.rho = {g, {}, "rho"};
    out.u = {g, {}, "u"};
    out.p = {g, {}, "p"};
    for (int i = 0; i < nx; ++i) {
        EulerState s = to_primitive(u[i], kGamma);
        out.rho.values.push_back(s.rho);
        out.u.values.push_back(s.u);
        out.p.values.push_back(s.p);
    }
    out.star = solve_riemann_star(kSodLeft, kSodRight, kGamma);
    out.mass_drift = drift;
    return out;
}

}  // namespace sciagent::pde
