#include "sciagent/problems.hpp"

#include <array>
#include <fstream>

#include <json.hpp>

namespace sciagent::problems {

std::string to_string(Family f) {
    switch (f) {
        case Family::pde: return "pde";
        case Family::linalg: return "linalg";
        case Family::dimensional: return "dimensional";
    }
    return "?";
}

void ProblemSpec::validate() const {
    if (id.empty()) throw Error("problem: empty id");
    if (description.empty()) throw Error("problem " + id + ": empty description");
    for (const char* tok : {"{problem}", "{expansion}", "{solution}", "{feedback}"}) {
        if (description.find(tok) != std::string::npos)
            throw Error("problem " + id + ": description contains template placeholder " + tok);
    }
    if ((family == Family::linalg || family == Family::dimensional) && !(grading.threshold > 0))
        throw Error("problem " + id + ": threshold must be positive for this family");
    if (grading.quantities.empty())
        throw Error("problem " + id + ": grading recipe names no quantities");
}

namespace {

constexpr const char* kBurgers = R"(The PDE of 1-D Burgers equation is given by:

    du/dt + u*du/dx - nu*d2u/dx2 = 0,  (x,t) in Omega

where the domain is defined as (x,t) in Omega = [-1,1] x [0,1], and the parameter is nu = 0.01/pi. The initial and boundary conditions are:

    u(x,0) = -sin(pi*x)
    u(-1,t) = u(1,t) = 0

Please primarily use these libraries (numpy, scipy, matplotlib) to implement an appropriate method from scratch to solve this problem.
Plot the contour of u(x,t) in one figure.)";

constexpr const char* kSod = R"(The PDEs of 1-D Euler equations are given by:

    d(rho)/dt + d(rho*u)/dx = 0
    d(rho*u)/dt + d(rho*u^2 + p)/dx = 0
    d(rho*E)/dt + d(rho*E*u + p*u)/dx = 0

where the total energy E = u^2/2 + p/((gamma - 1)*rho) and the adiabatic index gamma = 1.4.
At t = 0, the initial conditions in the interval x in [0,1] are:

    (rho, u, p) = (1.0, 0.0, 1.0)    for 0 < x <= 0.5
    (rho, u, p) = (0.125, 0.0, 0.1)  for 0.5 <= x < 1

Please primarily use these libraries (numpy, scipy, matplotlib) to implement an appropriate method from scratch to solve this problem.
Plot the density rho, velocity u, and pressure p at t = 0.2 in one figure.)";

constexpr const char* kPoisson = R"(The PDE of 2-D Poisson equation is given by:

    Laplace(u) = 0,  (x,y) in Omega

The domain is a rectangle minus several circles, Omega = Omega_rec \ Omega_circle, where Omega_rec = [-0.5, 0.5]^2 is the rectangle, and the circles Omega_circle = union of R_1..R_4 are defined as:

    R_1 = { (x,y) : (x - 0.3)^2 + (y - 0.3)^2 <= 0.1^2 }
    R_2 = { (x,y) : (x + 0.3)^2 + (y - 0.3)^2 <= 0.1^2 }
    R_3 = { (x,y) : (x - 0.3)^2 + (y + 0.3)^2 <= 0.1^2 }
    R_4 = { (x,y) : (x + 0.3)^2 + (y + 0.3)^2 <= 0.1^2 }

The boundary conditions are:

    u = 0 on the circle boundaries
    u = 1 on the rectangle boundary

Please primarily use these libraries (numpy, scipy, matplotlib) to implement an appropriate method from scratch to solve this problem.
Plot the contour of u(x,y) in one figure, and mark the circles in the plot.)";

constexpr const char* kHelmholtz = R"(The PDE of 2-D Helmholtz equation is given by:

    -Laplace(u) + k^2*u = f(x,y),  (x,y) in Omega

The function f is defined as:

    f(x,y) = A*(mu_1^2 + mu_2^2 + x^2 + y^2)*sin(mu_1*pi*x)*sin(mu_2*pi*y)

The parameter values are:

    mu_1 = 1, mu_2 = 4, k = 8, A = 10

The domain is a rectangle minus several circles, Omega = Omega_rec \ Omega_circle, where Omega_rec = [-1, 1]^2 is the rectangle, and the circles Omega_circle = union of R_1..R_4 are defined as:

    R_1 = { (x,y) : (x - 0.5)^2 + (y - 0.5)^2 <= 0.2^2 }
    R_2 = { (x,y) : (x - 0.4)^2 + (y + 0.4)^2 <= 0.4^2 }
    R_3 = { (x,y) : (x + 0.2)^2 + (y + 0.7)^2 <= 0.1^2 }
    R_4 = { (x,y) : (x + 0.6)^2 + (y - 0.5)^2 <= 0.3^2 }

The boundary conditions are:

    u = 0.2 on the rectangle boundary
    u = 1 on the circle boundaries

Please primarily use these libraries (numpy, scipy, matplotlib) to implement an appropriate method from scratch to solve this problem.
Plot the contour of u(x,y) in one figure, and mark the circles in the plot.)";

constexpr const char* kCavity = R"(The governing PDEs for 2D steady incompressible NS equations are given by:

    u*du/dx + v*du/dy + dp/dx - (1/Re)*(d2u/dx2 + d2u/dy2) = 0,  (x,y) in Omega
    u*dv/dx + v*dv/dy + dp/dy - (1/Re)*(d2v/dx2 + d2v/dy2) = 0,  (x,y) in Omega
    du/dx + dv/dy = 0,  (x,y) in Omega

The Reynolds number Re = 100. The domain is Omega = [0, 2]^2, and the top boundary is Gamma_1; the left, right and bottom boundary is Gamma_2. The boundary conditions are:

    (u,v) = (alpha*x*(1-x), 0) on Gamma_1
    (u,v) = (0,0) on Gamma_2
    Reference pressure: p(x=0, y=0) = 0
    Zero normal pressure gradient: dp/dn = 0 on the whole boundary

where alpha is 2. Please primarily use these libraries (numpy, scipy, matplotlib) to implement an appropriate method from scratch to solve this problem.
Plot the contour of the velocity magnitude with the streamlines, velocity u, v and pressure p in four figures, respectively.)";

constexpr const char* kUnsteadyNs = R"(The governing PDEs for 2D unsteady incompressible NS equations are given by:

    du/dt + u*du/dx + v*du/dy + dp/dx - (1/Re)*(d2u/dx2 + d2u/dy2) = f_x,  (x,y) in Omega
    dv/dt + u*dv/dx + v*dv/dy + dp/dy - (1/Re)*(d2v/dx2 + d2v/dy2) = f_y,  (x,y) in Omega
    du/dx + dv/dy = 0,  (x,y) in Omega

The Reynolds number Re = 100. The domain is Omega x T = ([0, 2] x [0, 1]) x [0, 0.5], and the forcing term f(x, y, t) can be given as:

    f(x, y, t) = (0, -sin(pi*x)*sin(pi*y)*sin(pi*t))

The boundary conditions are specified as follows.
No-slip condition on the top and bottom walls Gamma_1:

    (u, v) = (0, 0) on Gamma_1

Inlet condition at the left boundary Gamma_2:

    u(0, y, t) = sin(pi*y)*(sin(pi*t) + sin(3*pi*t) + sin(5*pi*t))
    v(0, y, t) = 0

Outlet condition at the right boundary Gamma_3:

    du/dx = dv/dx = 0
    p(2, y, t) = 0

The initial condition in the domain is:

    u(x, y, 0) = v(x, y, 0) = 0,  (x,y) in Omega

Please primarily use these libraries (numpy, scipy, matplotlib) to implement an appropriate method from scratch to solve this problem.
Solve the Poisson equation using GMRES iteration methods.
Plot the contour of the velocity u, v and pressure p at timestep t = 0.5 in three figures, respectively.)";

constexpr const char* kHilbert = R"(Implement various appropriate methods from scratch to solve the system of linear algebra equations H_n x = b accurately and efficiently, where H_n is an n x n matrix defined by h_ij = 1/(i+j-1), and the vector b is taken to ensure that the system admits an exact solution x* = (1, 1, ..., 1).
Please primarily use numpy, scipy, and matplotlib libraries.
Compare the L_inf error of the numerical results with the exact solution for n = 5, 10, 15, 20, 25.)";

constexpr const char* kKeyhole = R"(Please read the CSV data file and consider the data in columns 3, 4, 5, 6, 7, 8 and 11. These columns correspond to seven physical quantities respectively: the effective laser power (etaP), the laser scan speed (Vs), the laser beam radius (r0), the thermal diffusivity (alpha), the material density (rho), the heat capacity (Cp), and the difference between melting and ambient temperatures (Tl - T0).

The File path: dataset_keyhole.csv
Some sample data from the CSV file is as follows:

case,source,etaP,Vs,r0,alpha,rho,Cp,Tv-T0,Lv,Tl-T0,Lm,e,Ke,e*
keyhole,Mat1,45.62,0.4,4.8e-5,1e-5,3920,830,3267,9.25e+6,1630,2.86e+5,3.3e-5,4.127,0.695

Based on dimensional analysis and using the data of these physical quantities in the file, please identify the optimal dimensionless quantity formed by combining these parameters, which exhibits the highest coefficient of determination (R^2) and thus dominates the variation in the keyhole aspect ratio e* (data in the last column).

Please implement an appropriate method from scratch to solve this problem, primarily using these libraries (numpy, scipy, sklearn, pandas, matplotlib, and pytorch).

Ensure that the resulting dimensionless exponents are normalized by Vs and that the exponents of physical quantities be integers or rational fractions with absolute values not exceeding 3.)";

std::vector<ProblemSpec> make_catalog() {
    using A = GradingRecipe::Aggregate;
    std::vector<ProblemSpec> v;
    v.push_back({"burgers", Family::pde, kBurgers, {"burgers", {"u"}, 0.1, A::mean}, {}});
    v.push_back({"sod", Family::pde, kSod, {"sod", {"rho", "u", "p"}, 0.1, A::mean}, {}});
    v.push_back({"poisson", Family::pde, kPoisson, {"poisson", {"u"}, 0.1, A::mean}, {}});
    v.push_back({"helmholtz", Family::pde, kHelmholtz, {"helmholtz", {"u"}, 0.1, A::mean}, {}});
    v.push_back({"cavity", Family::pde, kCavity, {"cavity", {"u", "v", "p"}, 0.1, A::mean}, {}});
    v.push_back(
        {"ns-unsteady", Family::pde, kUnsteadyNs, {"ns-unsteady", {"u", "v", "p"}, 0.1, A::mean}, {}});
    v.push_back({"hilbert",
                 Family::linalg,
                 kHilbert,
                 {"hilbert", {"x5", "x10", "x15", "x20", "x25"}, 1e-2, A::max},
                 {}});
    v.push_back(
        {"keyhole", Family::dimensional, kKeyhole, {"keyhole", {"exponents"}, 0.5, A::max}, {}});
    for (const auto& p : v) p.validate();
    return v;
}

}  // namespace

const std::vector<ProblemSpec>& builtin_catalog() {
    static const std::vector<ProblemSpec> catalog = make_catalog();
    return catalog;
}

const ProblemSpec& find_problem(const std::string& id) {
    for (const auto& p : builtin_catalog())
        if (p.id == id) return p;
    throw Error("unknown problem id '" + id + "'; valid ids: " + [] {
        std::string s;
        for (const auto& p : builtin_catalog()) s += (s.empty() ? "" : ", ") + p.id;
        return s;
    }());
}

std::vector<std::string> problem_ids() {
    std::vector<std::string> ids;
    for (const auto& p : builtin_catalog()) ids.push_back(p.id);
    return ids;
}

std::vector<ProblemSpec> load_catalog_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open catalog " + file.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw Error("catalog: expected a JSON array");

    auto family_of = [](const std::string& s) {
        if (s == "pde") return Family::pde;
        if (s == "linalg") return Family::linalg;
        if (s == "dimensional") return Family::dimensional;
        throw Error("catalog: unknown family '" + s + "'");
    };

    std::vector<ProblemSpec> out;
    for (const auto& obj : doc) {
        ProblemSpec p;
        p.id = obj.at("id").get<std::string>();
        p.family = family_of(obj.at("family").get<std::string>());
        p.description = obj.at("description").get<std::string>();
        const auto& g = obj.at("grading");
        p.grading.oracle_id = g.at("oracle").get<std::string>();
        for (const auto& q : g.at("quantities")) p.grading.quantities.push_back(q.get<std::string>());
        p.grading.threshold = g.value("threshold", 0.0);
        p.grading.aggregate = g.value("aggregate", std::string("mean")) == "max"
                                  ? GradingRecipe::Aggregate::max
                                  : GradingRecipe::Aggregate::mean;
        for (const auto& a : obj.value("attachments", nlohmann::json::array()))
            p.attachments.emplace_back(a.get<std::string>());
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace sciagent::problems
