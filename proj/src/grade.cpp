#include "sciagent/grade.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>

#include "sciagent/dim.hpp"
#include "sciagent/metrics.hpp"
#include "sciagent/pde/burgers.hpp"
#include "sciagent/pde/elliptic.hpp"
#include "sciagent/pde/ns.hpp"
#include "sciagent/pde/sod.hpp"

namespace sciagent::grade {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Reference compute_reference(const std::string& id) {
    Reference ref;
    if (id == "burgers") {
        ref.fields_2d["u"] = pde::solve_burgers(512, pde::burgers_default_nt(512));
    } else if (id == "sod") {
        pde::Grid1D g = pde::Grid1D::uniform(0.0, 1.0, 400);
        pde::SodSolution sol = pde::solve_sod_exact(g.xs, 0.2);
        ref.fields_1d["rho"] = sol.rho;
        ref.fields_1d["u"] = sol.u;
        ref.fields_1d["p"] = sol.p;
    } else if (id == "poisson") {
        ref.fields_2d["u"] = pde::solve_poisson(128);
    } else if (id == "helmholtz") {
        ref.fields_2d["u"] = pde::solve_helmholtz(128);
    } else if (id == "cavity") {
        pde::CavityOptions opt;
        opt.n = 32;
        opt.steady_tol = 1e-7;
        pde::NsSolution sol = pde::solve_lid_cavity(opt);
        ref.fields_2d["u"] = sol.u;
        ref.fields_2d["v"] = sol.v;
        ref.fields_2d["p"] = sol.p;
    } else if (id == "ns-unsteady") {
        pde::UnsteadyNsOptions opt;
        opt.n = 32;
        pde::NsSolution sol = pde::solve_unsteady_ns(opt);
        ref.fields_2d["u"] = sol.u;
        ref.fields_2d["v"] = sol.v;
        ref.fields_2d["p"] = sol.p;
    } else if (id == "hilbert" || id == "keyhole") {
        // graded against closed-form targets; no field reference needed
    } else {
        throw Error("no reference solver for oracle id '" + id + "'");
    }
    return ref;
}

std::mutex g_ref_mutex;
std::map<std::string, Reference> g_refs;

// Collapse near-identical coordinates (printed doubles) into shared axes.
std::vector<double> unique_axis(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    double span = v.empty() ? 1.0 : std::max(1e-300, v.back() - v.front());
    for (double x : v) {
        if (out.empty() || x - out.back() > 1e-9 * span) out.push_back(x);
    }
    return out;
}

std::size_t axis_index(const std::vector<double>& axis, double x) {
    auto it = std::lower_bound(axis.begin(), axis.end(), x - 1e-12 * std::abs(x) - 1e-300);
    std::size_t i = static_cast<std::size_t>(it - axis.begin());
    if (i >= axis.size()) i = axis.size() - 1;
    if (i > 0 && std::abs(axis[i - 1] - x) < std::abs(axis[i] - x)) --i;
    return i;
}

}  // namespace

const Reference& reference_for(const std::string& oracle_id) {
    std::lock_guard lock(g_ref_mutex);
    auto it = g_refs.find(oracle_id);
    if (it == g_refs.end()) it = g_refs.emplace(oracle_id, compute_reference(oracle_id)).first;
    return it->second;
}

std::vector<double> regrid_candidate_2d(const csv::Artifact& candidate,
                                        const pde::Grid2D& ref_grid) {
    std::vector<double> xs = unique_axis(candidate.x);
    std::vector<double> ys = unique_axis(candidate.y);
    if (xs.size() < 2 || ys.size() < 2) throw Error("regrid: degenerate candidate grid");

    std::vector<double> table(xs.size() * ys.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < candidate.value.size(); ++r) {
        std::size_t i = axis_index(xs, candidate.x[r]);
        std::size_t j = axis_index(ys, candidate.y[r]);
        table[j * xs.size() + i] = candidate.value[r];
    }

    auto sample = [&](double x, double y) {
        double cx = std::clamp(x, xs.front(), xs.back());
        double cy = std::clamp(y, ys.front(), ys.back());
        std::size_t i =
            std::min(static_cast<std::size_t>(
                         std::upper_bound(xs.begin(), xs.end(), cx) - xs.begin() - 1),
                     xs.size() - 2);
        std::size_t j =
            std::min(static_cast<std::size_t>(
                         std::upper_bound(ys.begin(), ys.end(), cy) - ys.begin() - 1),
                     ys.size() - 2);
        double tx = (cx - xs[i]) / (xs[i + 1] - xs[i]);
        double ty = (cy - ys[j]) / (ys[j + 1] - ys[j]);
        double c00 = table[j * xs.size() + i];
        double c10 = table[j * xs.size() + i + 1];
        double c01 = table[(j + 1) * xs.size() + i];
        double c11 = table[(j + 1) * xs.size() + i + 1];
        double blend = c00 * (1 - tx) * (1 - ty) + c10 * tx * (1 - ty) + c01 * (1 - tx) * ty +
                       c11 * tx * ty;
        if (!std::isnan(blend)) return blend;
        // candidate grids with holes: fall back to the nearest filled corner
        double best = std::numeric_limits<double>::quiet_NaN();
        double best_d = kInf;
        const double corners[4][3] = {{c00, 0, 0}, {c10, 1, 0}, {c01, 0, 1}, {c11, 1, 1}};
        for (const auto& c : corners) {
            if (std::isnan(c[0])) continue;
            double d = std::abs(tx - c[1]) + std::abs(ty - c[2]);
            if (d < best_d) {
                best_d = d;
                best = c[0];
            }
        }
        return best;
    };

    std::vector<double> out;
    out.reserve(ref_grid.nodes());
    for (int j = 0; j <= ref_grid.ny; ++j)
        for (int i = 0; i <= ref_grid.nx; ++i)
            out.push_back(sample(ref_grid.xs[i], ref_grid.ys[j]));
    return out;
}

namespace {

double grade_pde_quantity(const Reference& ref, const std::string& name,
                          const csv::Artifact& artifact) {
    auto it1 = ref.fields_1d.find(name);
    if (it1 != ref.fields_1d.end()) {
        if (artifact.kind == csv::ArtifactKind::field_2d) return kInf;
        const pde::Field1D& field = it1->second;
        std::vector<double> xs = artifact.x;
        std::vector<double> vs = artifact.value;
        if (artifact.kind == csv::ArtifactKind::vector) return kInf;
        // sort by x for interpolation
        std::vector<std::size_t> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
        std::vector<double> sx(xs.size()), sv(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sx[i] = xs[order[i]];
            sv[i] = vs[order[i]];
        }
        std::vector<double> hat = metrics::regrid_1d(sx, sv, field.grid.xs);
        return metrics::rel_l2_error(field.values, hat);
    }
    auto it2 = ref.fields_2d.find(name);
    if (it2 == ref.fields_2d.end()) return kInf;
    if (artifact.kind != csv::ArtifactKind::field_2d) return kInf;
    const pde::Field2D& field = it2->second;
    std::vector<double> hat = regrid_candidate_2d(artifact, field.grid);
    std::vector<double> ref_vals, hat_vals;
    for (int id = 0; id < field.grid.nodes(); ++id) {
        if (field.grid.mask[id] == pde::NodeKind::excluded) continue;
        ref_vals.push_back(field.values[id]);
        hat_vals.push_back(hat[id]);
    }
    return metrics::rel_l2_error(ref_vals, hat_vals);
}

double grade_hilbert_quantity(const std::string& name, const csv::Artifact& artifact) {
    // quantity names are x<n>
    if (name.size() < 2 || name[0] != 'x') return kInf;
    int n = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(name[i]))) return kInf;
        n = n * 10 + (name[i] - '0');
    }
    if (n <= 0 || artifact.value.size() != static_cast<std::size_t>(n)) return kInf;
    std::vector<double> ones(n, 1.0);
    return metrics::linf_error(ones, artifact.value);
}

double grade_keyhole_quantity(const csv::Artifact& artifact) {
    if (artifact.value.size() != dim::kQuantities) return 1.0;
    dim::ExponentVector v;
    for (int i = 0; i < dim::kQuantities; ++i) {
        double val = artifact.value[i];
        if (std::isnan(val) || std::isinf(val)) return 1.0;
        // snap to the nearest small rational (denominator up to 6)
        bool snapped = false;
        for (long long d = 1; d <= 6 && !snapped; ++d) {
            double scaled = val * static_cast<double>(d);
            double rounded = std::round(scaled);
            if (std::abs(scaled - rounded) < 1e-6 && std::abs(rounded) < 1e6) {
                v.e[i] = dim::Frac(static_cast<long long>(rounded), d);
                snapped = true;
            }
        }
        if (!snapped) return 1.0;
    }
    try {
        return dim::canonicalize(v) == dim::keyhole_reference_group() ? 0.0 : 1.0;
    } catch (const dim::ZeroVector&) {
        return 1.0;
    }
}

}  // namespace

GradeResult grade_artifacts(const problems::ProblemSpec& problem,
                            const std::map<std::string, csv::Artifact>& artifacts) {
    GradeResult result;
    const Reference* ref = nullptr;
    if (problem.family == problems::Family::pde) ref = &reference_for(problem.grading.oracle_id);

    for (const auto& name : problem.grading.quantities) {
        auto it = artifacts.find(name);
        double err = kInf;
        if (it != artifacts.end()) {
            switch (problem.family) {
                case problems::Family::pde: err = grade_pde_quantity(*ref, name, it->second); break;
                case problems::Family::linalg: err = grade_hilbert_quantity(name, it->second); break;
                case problems::Family::dimensional: err = grade_keyhole_quantity(it->second); break;
            }
        }
        result.per_quantity[name] = err;
    }

    bool any_nan = false;
    double acc = 0.0;
    for (const auto& [name, err] : result.per_quantity) {
        if (std::isnan(err)) any_nan = true;
        if (problem.grading.aggregate == problems::GradingRecipe::Aggregate::max)
            acc = std::max(acc, err);
        else
            acc += err;
    }
    if (problem.grading.aggregate == problems::GradingRecipe::Aggregate::mean)
        acc /= static_cast<double>(result.per_quantity.size());
    result.aggregate = any_nan ? std::numeric_limits<double>::quiet_NaN() : acc;
    result.below_threshold =
        metrics::classify_completion(result.aggregate, problem.grading.threshold) ==
        metrics::Completion::below_threshold;
    return result;
}

}  // namespace sciagent::grade
