#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <json.hpp>

#include "sciagent/dim.hpp"
#include "sciagent/gateway.hpp"
#include "sciagent/hilbert.hpp"
#include "sciagent/metrics.hpp"
#include "sciagent/pde/burgers.hpp"
#include "sciagent/pde/elliptic.hpp"
#include "sciagent/pde/ns.hpp"
#include "sciagent/pde/sod.hpp"
#include "sciagent/pipeline.hpp"
#include "sciagent/problems.hpp"
#include "sciagent/prompt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sciagent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void write_text(const fs::path& file, const std::string& text) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << text;
}

// ---------------------------------------------------------------- run ----

struct RunArgs {
    std::string problem = "hilbert";
    std::string catalog_path;
    std::string backend = "scripted";
    std::string fixtures;
    int samples = 1;
    int reviews = 2;
    int jobs = 1;
    std::string out_dir = "out";
    double timeout_s = 300.0;
    std::string interpreter = "python3 {file}";
    std::string consultant_model = "consultant-default";
    std::string programmer_model = "programmer-default";
    std::string reviewer_model = "reviewer-default";
    std::size_t prompt_budget = 4500;
    std::size_t output_budget = 2000;
    std::string templates_dir;
    std::vector<std::string> attachments;
};

int cmd_run(const RunArgs& args) {
    problems::ProblemSpec problem;
    if (!args.catalog_path.empty()) {
        auto catalog = problems::load_catalog_json(args.catalog_path);
        auto it = std::find_if(catalog.begin(), catalog.end(),
                               [&](const auto& p) { return p.id == args.problem; });
        if (it == catalog.end()) {
            std::cerr << "problem '" << args.problem << "' not in catalog " << args.catalog_path
                      << "\n";
            return kExitUsage;
        }
        problem = *it;
    } else {
        problem = problems::find_problem(args.problem);
    }
    for (const auto& a : args.attachments) {
        if (!fs::exists(a)) {
            std::cerr << "attachment not found: " << a << "\n";
            return kExitUsage;
        }
        problem.attachments.emplace_back(a);
    }

    pipeline::BackendFactory factory;
    if (args.backend == "scripted") {
        if (args.fixtures.empty()) {
            std::cerr << "--backend scripted requires --fixtures\n";
            return kExitUsage;
        }
        if (!fs::exists(args.fixtures)) {
            std::cerr << "fixture file not found: " << args.fixtures << "\n";
            return kExitUsage;
        }
        auto fixture = gateway::Fixture::load(args.fixtures);
        factory = [fixture](int sample) {
            return std::make_shared<gateway::ScriptedBackend>(fixture, sample);
        };
    } else if (args.backend == "live") {
        auto config = gateway::HttpBackend::Config::from_env();
        if (config.base_url.empty()) {
            std::cerr << "--backend live requires SCIAGENT_API_BASE_URL\n";
            return kExitUsage;
        }
        factory = [config](int) { return std::make_shared<gateway::HttpBackend>(config); };
    } else {
        std::cerr << "unknown backend '" << args.backend << "' (scripted|live)\n";
        return kExitUsage;
    }

    fs::path tpl_dir = args.templates_dir.empty() ? prompt::default_template_dir()
                                                  : fs::path(args.templates_dir);
    prompt::TemplateSet templates = prompt::TemplateSet::load(tpl_dir);

    pipeline::CampaignOptions opt;
    opt.n_samples = args.samples;
    opt.jobs = args.jobs;
    opt.truncation.prompt_budget = args.prompt_budget;
    opt.truncation.output_budget = args.output_budget;
    opt.pipeline.reviews = args.reviews;
    opt.pipeline.roles.consultant.model = args.consultant_model;
    opt.pipeline.roles.programmer.model = args.programmer_model;
    opt.pipeline.roles.reviewer.model = args.reviewer_model;
    opt.pipeline.limits.wall_timeout_s = args.timeout_s;
    opt.pipeline.limits.interpreter_cmd = args.interpreter;
    opt.pipeline.limits.workspace = fs::path(args.out_dir) / "runs";

    pipeline::CampaignRecord rec = pipeline::run_campaign(problem, templates, factory, opt);
    pipeline::write_campaign_outputs(rec, args.out_dir);

    for (const auto& a : rec.aggregates) {
        std::cout << problem.id << ' ' << a.stage
                  << "  exec_success=" << a.execution_success_rate
                  << "  solving_success=" << a.solving_success_rate;
        if (a.errors) std::cout << "  mean_err=" << a.errors->mean;
        std::cout << '\n';
    }
    int aborted = 0;
    for (const auto& r : rec.runs)
        if (!r.error.empty()) ++aborted;
    if (aborted > 0)
        std::cout << aborted << "/" << rec.n_samples << " runs aborted (see transcripts)\n";
    return kExitOk;
}

// ------------------------------------------------------------- oracle ----

int cmd_oracle(const std::string& name, int n, int nx, double t, double tol,
               const std::string& out_dir_s) {
    fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir / "artifacts");
    json summary;
    summary["oracle"] = name;

    if (name == "burgers") {
        int grid = nx > 0 ? nx : 256;
        pde::Field2D u = pde::solve_burgers(grid, pde::burgers_default_nt(grid));
        pde::write_field_csv(u, out_dir / "artifacts" / "solution_u.csv");
        double center_dev = 0, ic_dev = 0;
        for (int j = 0; j <= u.grid.ny; ++j)
            center_dev = std::max(center_dev, std::abs(u.values[u.grid.idx(grid / 2, j)]));
        for (int i = 0; i <= grid; ++i)
            ic_dev = std::max(ic_dev, std::abs(u.values[u.grid.idx(i, 0)] +
                                               std::sin(std::numbers::pi * u.grid.xs[i])));
        summary["odd_symmetry_center_max"] = center_dev;
        summary["initial_condition_max_dev"] = ic_dev;
    } else if (name == "sod") {
        int grid = nx > 0 ? nx : 400;
        double tt = t > 0 ? t : 0.2;
        pde::Grid1D g = pde::Grid1D::uniform(0.0, 1.0, grid);
        pde::SodSolution sol = pde::solve_sod_exact(g.xs, tt);
        pde::write_field_csv(sol.rho, out_dir / "artifacts" / "solution_rho.csv");
        pde::write_field_csv(sol.u, out_dir / "artifacts" / "solution_u.csv");
        pde::write_field_csv(sol.p, out_dir / "artifacts" / "solution_p.csv");
        summary["p_star"] = sol.star.p_star;
        summary["u_star"] = sol.star.u_star;
        summary["rho_star_left"] = sol.star.rho_star_left;
        summary["rho_star_right"] = sol.star.rho_star_right;
        summary["left_wave"] = sol.star.left_wave == pde::WaveKind::rarefaction ? "rarefaction"
                                                                                : "shock";
        summary["right_wave"] = sol.star.right_wave == pde::WaveKind::shock ? "shock"
                                                                            : "rarefaction";
    } else if (name == "poisson" || name == "helmholtz") {
        int grid = n > 0 ? n : 128;
        pde::Field2D u = name == "poisson" ? pde::solve_poisson(grid) : pde::solve_helmholtz(grid);
        pde::write_field_csv(u, out_dir / "artifacts" / "solution_u.csv");
        double lo = 1e300, hi = -1e300;
        for (double v : u.values) {
            if (std::isnan(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        summary["min"] = lo;
        summary["max"] = hi;
    } else if (name == "cavity") {
        pde::CavityOptions opt;
        if (n > 0) opt.n = n;
        if (tol > 0) opt.steady_tol = tol;
        pde::NsSolution sol = pde::solve_lid_cavity(opt);
        pde::write_field_csv(sol.u, out_dir / "artifacts" / "solution_u.csv");
        pde::write_field_csv(sol.v, out_dir / "artifacts" / "solution_v.csv");
        pde::write_field_csv(sol.p, out_dir / "artifacts" / "solution_p.csv");
        summary["max_divergence"] = sol.max_divergence;
        summary["steps"] = sol.steps;
        summary["p_origin"] = sol.p.values[sol.p.grid.idx(0, 0)];
    } else if (name == "ns-unsteady") {
        pde::UnsteadyNsOptions opt;
        if (n > 0) opt.n = n;
        pde::NsSolution sol = pde::solve_unsteady_ns(opt);
        pde::write_field_csv(sol.u, out_dir / "artifacts" / "solution_u.csv");
        pde::write_field_csv(sol.v, out_dir / "artifacts" / "solution_v.csv");
        pde::write_field_csv(sol.p, out_dir / "artifacts" / "solution_p.csv");
        summary["max_divergence"] = sol.max_divergence;
        summary["steps"] = sol.steps;
    } else if (name == "hilbert-sweep") {
        const std::vector<int> sizes{5, 10, 15, 20, 25};
        const std::vector<hilbert::Method> methods{
            hilbert::Method::naive_lu, hilbert::Method::chol_reg, hilbert::Method::lu_reg,
            hilbert::Method::qr_reg,   hilbert::Method::cg,       hilbert::Method::pcg,
            hilbert::Method::svd_trunc};
        auto cells = hilbert::sweep(sizes, methods);
        write_text(out_dir / "artifacts" / "hilbert_sweep.csv", hilbert::sweep_csv(cells));
        json status = json::object();
        for (const auto& c : cells)
            status[hilbert::to_string(c.method) + "_n" + std::to_string(c.n)] =
                metrics::to_string(c.status);
        summary["status"] = status;
    } else {
        std::cerr << "unknown oracle '" << name
                  << "'; valid: burgers, sod, poisson, helmholtz, cavity, ns-unsteady, "
                     "hilbert-sweep\n";
        return kExitUsage;
    }

    write_text(out_dir / "reports" / (name + "_oracle.json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
    return kExitOk;
}

// ----------------------------------------------------------- dimsearch ----

int cmd_dimsearch(const std::string& csv_path, bool synthetic, std::uint64_t seed, double noise,
                  int rows, double beta, const std::vector<long long>& denominators,
                  long long bound, int top_k, const std::string& out_dir_s) {
    dim::KeyholeDataset ds;
    if (synthetic) {
        ds = dim::generate_synthetic(rows, beta, noise, seed);
    } else {
        if (csv_path.empty()) {
            std::cerr << "dimsearch needs a CSV path or --synthetic\n";
            return kExitUsage;
        }
        if (!fs::exists(csv_path)) {
            std::cerr << "file not found: " << csv_path << "\n";
            return kExitUsage;
        }
        try {
            ds = dim::load_keyhole_csv(csv_path);
        } catch (const dim::SchemaMismatch& e) {
            std::cerr << "schema mismatch: " << e.what() << "\n";
            return kExitUsage;
        } catch (const dim::NonPositiveValue& e) {
            std::cerr << "bad data: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    dim::Constraints constraints;
    if (!denominators.empty()) constraints.denominators = denominators;
    constraints.bound = bound;

    auto fits = dim::search_best(ds, constraints, top_k);

    fs::path out_dir(out_dir_s);
    json ranked = json::array();
    const auto schema = dim::QuantitySchema::keyhole();
    for (const auto& fit : fits) {
        json exps = json::object();
        for (int i = 0; i < dim::kQuantities; ++i) exps[schema.names[i]] = fit.v.e[i].str();
        ranked.push_back(json{{"exponents", exps},
                              {"r2", fit.r2},
                              {"slope", fit.slope},
                              {"intercept", fit.intercept}});
    }
    json dens = json::array();
    for (long long d : constraints.denominators) dens.push_back(d);
    json result{{"rows", ds.rows()},
                {"source", ds.source_tag},
                {"constraints", json{{"denominators", dens}, {"bound", constraints.bound}}},
                {"best_exponents", fits.front().v.str()},
                {"best_r2", fits.front().r2},
                {"candidates", ranked}};
    write_text(out_dir / "reports" / "dimsearch.json", result.dump(2) + "\n");

    // fit-curve table for the top candidate
    std::ostringstream curve;
    curve << "Pi,e_star\n";
    for (std::size_t r = 0; r < ds.rows(); ++r)
        curve << std::exp(dim::log_pi(fits.front().v, ds.inputs[r])) << ',' << ds.target[r]
              << '\n';
    write_text(out_dir / "artifacts" / "dimsearch_fit.csv", curve.str());

    std::cout << result.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-role agent harness for scientific computing benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run a benchmark pipeline campaign");
    run->add_option("--problem", run_args.problem, "problem id");
    run->add_option("--catalog", run_args.catalog_path, "external problem catalog (JSON)");
    run->add_option("--backend", run_args.backend, "scripted|live");
    run->add_option("--fixtures", run_args.fixtures, "scripted backend fixture JSONL");
    run->add_option("--samples", run_args.samples, "independent samples")->check(CLI::PositiveNumber);
    run->add_option("--reviews", run_args.reviews, "review rounds")->check(CLI::NonNegativeNumber);
    run->add_option("--jobs", run_args.jobs, "parallel workers")->check(CLI::PositiveNumber);
    run->add_option("--out", run_args.out_dir, "output directory");
    run->add_option("--timeout", run_args.timeout_s, "sandbox wall timeout (s)");
    run->add_option("--interpreter", run_args.interpreter, "interpreter command template");
    run->add_option("--consultant-model", run_args.consultant_model);
    run->add_option("--programmer-model", run_args.programmer_model);
    run->add_option("--reviewer-model", run_args.reviewer_model);
    run->add_option("--prompt-budget", run_args.prompt_budget, "prompt token budget");
    run->add_option("--output-budget", run_args.output_budget, "runtime-output token budget");
    run->add_option("--templates", run_args.templates_dir, "template directory");
    run->add_option("--attachment", run_args.attachments, "file staged into the sandbox");

    std::string oracle_name;
    int oracle_n = 0, oracle_nx = 0;
    double oracle_t = 0, oracle_tol = 0;
    std::string oracle_out = "out";
    auto* oracle = app.add_subcommand("oracle", "run a reference solver with self-checks");
    oracle->add_option("name", oracle_name, "oracle id")->required();
    oracle->add_option("--n", oracle_n, "grid cells per side");
    oracle->add_option("--nx", oracle_nx, "1D resolution");
    oracle->add_option("--t", oracle_t, "sample time");
    oracle->add_option("--tol", oracle_tol, "steady tolerance");
    oracle->add_option("--out", oracle_out, "output directory");

    std::string dim_csv;
    bool dim_synth = false;
    std::uint64_t dim_seed = 7;
    double dim_noise = 0.05, dim_beta = 1.0;
    int dim_rows = 90, dim_topk = 5;
    long long dim_bound = 3;
    std::vector<long long> dim_dens;
    std::string dim_out = "out";
    auto* dimsearch = app.add_subcommand("dimsearch", "search dominant dimensionless groups");
    dimsearch->add_option("csv", dim_csv, "keyhole CSV path");
    dimsearch->add_flag("--synthetic", dim_synth, "generate a synthetic dataset");
    dimsearch->add_option("--seed", dim_seed);
    dimsearch->add_option("--noise", dim_noise);
    dimsearch->add_option("--rows", dim_rows)->check(CLI::PositiveNumber);
    dimsearch->add_option("--beta", dim_beta);
    dimsearch->add_option("--denominators", dim_dens, "allowed exponent denominators");
    dimsearch->add_option("--bound", dim_bound, "max |exponent|");
    dimsearch->add_option("--top-k", dim_topk)->check(CLI::PositiveNumber);
    dimsearch->add_option("--out", dim_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (oracle->parsed())
            return cmd_oracle(oracle_name, oracle_n, oracle_nx, oracle_t, oracle_tol, oracle_out);
        if (dimsearch->parsed())
            return cmd_dimsearch(dim_csv, dim_synth, dim_seed, dim_noise, dim_rows, dim_beta,
                                 dim_dens, dim_bound, dim_topk, dim_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
