#include "sciagent/dim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace sciagent::dim {

Frac::Frac(long long n, long long d) {
    if (d == 0) throw Error("frac: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Frac Frac::operator+(const Frac& o) const { return {num * o.den + o.num * den, den * o.den}; }
Frac Frac::operator-(const Frac& o) const { return {num * o.den - o.num * den, den * o.den}; }
Frac Frac::operator*(const Frac& o) const { return {num * o.num, den * o.den}; }
Frac Frac::operator/(const Frac& o) const {
    if (o.num == 0) throw Error("frac: division by zero");
    return {num * o.den, den * o.num};
}

std::string Frac::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

QuantitySchema QuantitySchema::keyhole() {
    QuantitySchema s;
    s.names = {"etaP", "Vs", "r0", "alpha", "rho", "Cp", "Tl-T0"};
    //       etaP  Vs  r0 alpha rho  Cp  Tl-T0
    s.dims = {{
        {1, 0, 0, 0, 1, 0, 0},     // M
        {2, 1, 1, 2, -3, 2, 0},    // L
        {-3, -1, 0, -1, 0, -2, 0}, // T
        {0, 0, 0, 0, 0, -1, 1},    // Theta
    }};
    return s;
}

bool ExponentVector::lex_less(const ExponentVector& o) const {
    for (int i = 0; i < kQuantities; ++i) {
        if (e[i] == o.e[i]) continue;
        return e[i] < o.e[i];
    }
    return false;
}

std::string ExponentVector::str() const {
    std::string s = "(";
    for (int i = 0; i < kQuantities; ++i) s += (i ? ", " : "") + e[i].str();
    return s + ")";
}

bool is_dimensionless(const QuantitySchema& schema, const ExponentVector& v) {
    for (int d = 0; d < kDims; ++d) {
        Frac acc;
        for (int q = 0; q < kQuantities; ++q)
            acc = acc + v.e[q] * Frac(schema.dims[d][q]);
        if (!acc.is_zero()) return false;
    }
    return true;
}

ExponentVector canonicalize(const ExponentVector& v) {
    int anchor = -1;
    if (!v.e[0].is_zero()) {
        anchor = 0;
    } else {
        for (int i = 1; i < kQuantities; ++i) {
            if (!v.e[i].is_zero()) {
                anchor = i;
                break;
            }
        }
    }
    if (anchor < 0) throw ZeroVector("canonicalize: zero exponent vector");
    Frac scale = Frac(1) / v.e[anchor];
    ExponentVector out;
    for (int i = 0; i < kQuantities; ++i) out.e[i] = v.e[i] * scale;
    return out;
}

namespace {

bool is_canonical(const ExponentVector& v) {
    if (!v.e[0].is_zero()) return v.e[0] == Frac(1);
    for (int i = 1; i < kQuantities; ++i) {
        if (!v.e[i].is_zero()) return v.e[i] == Frac(1);
    }
    return false;  // zero vector
}

struct NullSpace {
    std::vector<int> pivot_cols;                // one per matrix row kept
    std::vector<int> free_cols;                 // dimension of the null space
    std::vector<std::vector<Frac>> pivot_coef;  // pivot value = sum coef[r][f] * t_f
};

// RREF of the integer dimension matrix over exact rationals.
NullSpace null_space(const QuantitySchema& schema) {
    std::array<std::array<Frac, kQuantities>, kDims> m;
    for (int d = 0; d < kDims; ++d)
        for (int q = 0; q < kQuantities; ++q) m[d][q] = Frac(schema.dims[d][q]);

    NullSpace ns;
    int row = 0;
    for (int col = 0; col < kQuantities && row < kDims; ++col) {
        int sel = -1;
        for (int r = row; r < kDims; ++r) {
            if (!m[r][col].is_zero()) {
                sel = r;
                break;
            }
        }
        if (sel < 0) continue;
        std::swap(m[sel], m[row]);
        Frac inv = Frac(1) / m[row][col];
        for (int c = 0; c < kQuantities; ++c) m[row][c] = m[row][c] * inv;
        for (int r = 0; r < kDims; ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            Frac f = m[r][col];
            for (int c = 0; c < kQuantities; ++c) m[r][c] = m[r][c] - f * m[row][c];
        }
        ns.pivot_cols.push_back(col);
        ++row;
    }
    for (int col = 0, p = 0; col < kQuantities; ++col) {
        if (p < static_cast<int>(ns.pivot_cols.size()) && ns.pivot_cols[p] == col) {
            ++p;
            continue;
        }
        ns.free_cols.push_back(col);
    }
    if (ns.free_cols.empty()) throw EmptyNullSpace("dimension matrix has full column rank");
    // v[pivot_r] = -sum_f m[r][free_f] * v[free_f]
    ns.pivot_coef.assign(ns.pivot_cols.size(), std::vector<Frac>(ns.free_cols.size()));
    for (std::size_t r = 0; r < ns.pivot_cols.size(); ++r)
        for (std::size_t f = 0; f < ns.free_cols.size(); ++f)
            ns.pivot_coef[r][f] = -m[r][ns.free_cols[f]];
    return ns;
}

bool denominator_allowed(const Frac& f, const std::vector<long long>& denominators) {
    for (long long d : denominators)
        if (f.den == d) return true;
    return false;
}

}  // namespace

std::vector<ExponentVector> enumerate_candidates(const QuantitySchema& schema,
                                                 const Constraints& c) {
    if (c.denominators.empty()) throw Error("enumerate: empty denominator set");
    NullSpace ns = null_space(schema);
    long long lcm = 1;
    for (long long d : c.denominators) {
        if (d < 1) throw Error("enumerate: denominators must be positive");
        lcm = std::lcm(lcm, d);
    }

    const long long steps = c.bound * lcm;  // free coordinate = k/lcm, |k| <= steps
    const std::size_t nfree = ns.free_cols.size();
    std::vector<long long> k(nfree, -steps);
    std::vector<ExponentVector> out;
    const Frac bound(c.bound);

    auto admissible = [&](const Frac& f) {
        if (f < -bound || bound < f) return false;
        return denominator_allowed(f, c.denominators);
    };

    while (true) {
        ExponentVector v;
        bool ok = true;
        for (std::size_t f = 0; f < nfree && ok; ++f) {
            v.e[ns.free_cols[f]] = Frac(k[f], lcm);
            ok = admissible(v.e[ns.free_cols[f]]);
        }
        if (ok) {
            for (std::size_t r = 0; r < ns.pivot_cols.size() && ok; ++r) {
                Frac acc;
                for (std::size_t f = 0; f < nfree; ++f)
                    acc = acc + ns.pivot_coef[r][f] * v.e[ns.free_cols[f]];
                v.e[ns.pivot_cols[r]] = acc;
                ok = admissible(acc);
            }
        }
        if (ok && is_canonical(v) && is_dimensionless(schema, v)) out.push_back(v);

        std::size_t pos = 0;
        while (pos < nfree && k[pos] == steps) {
            k[pos] = -steps;
            ++pos;
        }
        if (pos == nfree) break;
        ++k[pos];
    }
    return out;
}

KeyholeDataset parse_keyhole_csv(const std::string& text, const std::string& source_tag) {
    static const std::array<std::string, 15> kHeader = {
        "case", "source", "etaP", "Vs", "r0", "alpha", "rho", "Cp",
        "Tv-T0", "Lv", "Tl-T0", "Lm", "e", "Ke", "e*"};
    // 1-based input columns 3,4,5,6,7,8,11 plus the last column as target
    static const std::array<int, kQuantities> kInputCols = {2, 3, 4, 5, 6, 7, 10};

    auto split = [](const std::string& line) {
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            std::string tok = comma == std::string::npos ? line.substr(pos)
                                                         : line.substr(pos, comma - pos);
            std::size_t b = tok.find_first_not_of(" \t\r");
            std::size_t e = tok.find_last_not_of(" \t\r");
            f.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return f;
    };

    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    KeyholeDataset ds;
    ds.source_tag = source_tag;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split(line);
        if (!have_header) {
            if (fields.size() != kHeader.size())
                throw SchemaMismatch("keyhole csv: expected 15 columns, got " +
                                     std::to_string(fields.size()));
            for (std::size_t i = 0; i < kHeader.size(); ++i) {
                if (fields[i] != kHeader[i])
                    throw SchemaMismatch("keyhole csv: column " + std::to_string(i + 1) +
                                         " is '" + fields[i] + "', expected '" + kHeader[i] + "'");
            }
            have_header = true;
            continue;
        }
        ++row_no;
        if (fields.size() != kHeader.size())
            throw SchemaMismatch("keyhole csv row " + std::to_string(row_no) + ": " +
                                 std::to_string(fields.size()) + " columns");
        auto num = [&](int col) {
            try {
                return std::stod(fields[col]);
            } catch (...) {
                throw SchemaMismatch("keyhole csv row " + std::to_string(row_no) +
                                     ": bad number '" + fields[col] + "'");
            }
        };
        std::array<double, kQuantities> q{};
        for (int i = 0; i < kQuantities; ++i) {
            q[i] = num(kInputCols[i]);
            if (!(q[i] > 0))
                throw NonPositiveValue("keyhole csv row " + std::to_string(row_no) + ": " +
                                       kHeader[kInputCols[i]] + " = " + fields[kInputCols[i]]);
        }
        double target = num(static_cast<int>(kHeader.size()) - 1);
        if (!(target > 0))
            throw NonPositiveValue("keyhole csv row " + std::to_string(row_no) +
                                   ": e* = " + fields.back());
        ds.inputs.push_back(q);
        ds.target.push_back(target);
    }
    if (!have_header) throw SchemaMismatch("keyhole csv: missing header row");
    return ds;
}

KeyholeDataset load_keyhole_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_keyhole_csv(buf.str(), path.filename().string());
}

void write_keyhole_csv(const KeyholeDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "case,source,etaP,Vs,r0,alpha,rho,Cp,Tv-T0,Lv,Tl-T0,Lm,e,Ke,e*\n";
    ExponentVector ref = keyhole_reference_group();
    out.precision(12);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const auto& q = ds.inputs[r];
        double pi_ref = std::exp(log_pi(ref, q));
        // columns outside the analysis set carry plausible filler
        out << "keyhole," << (ds.source_tag.empty() ? "synthetic" : ds.source_tag) << ','
            << q[0] << ',' << q[1] << ',' << q[2] << ',' << q[3] << ',' << q[4] << ',' << q[5]
            << ',' << 2.0 * q[6] << ',' << 9.25e6 << ',' << q[6] << ',' << 2.86e5 << ','
            << ds.target[r] * q[2] << ',' << pi_ref / 3.141592653589793 << ',' << ds.target[r]
            << '\n';
    }
}

double log_pi(const ExponentVector& v, const std::array<double, kQuantities>& q) {
    double s = 0;
    for (int i = 0; i < kQuantities; ++i) {
        if (!v.e[i].is_zero()) s += v.e[i].to_double() * std::log(q[i]);
    }
    return s;
}

CandidateFit fit_loglog(const KeyholeDataset& ds, const ExponentVector& v) {
    const std::size_t n = ds.rows();
    if (n < 2) throw DegenerateFit("fit: need at least two rows");
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = log_pi(v, ds.inputs[i]);
        y[i] = std::log(ds.target[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw DegenerateFit("fit: Pi constant across rows");
    if (syy == 0) throw DegenerateFit("fit: target constant across rows");
    CandidateFit fit;
    fit.v = v;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = 1.0 - ss_res / syy;
    return fit;
}

std::vector<CandidateFit> search_best(const KeyholeDataset& ds, const Constraints& c,
                                      std::size_t top_k) {
    auto candidates = enumerate_candidates(QuantitySchema::keyhole(), c);
    std::vector<CandidateFit> fits;
    fits.reserve(candidates.size());
    for (const auto& v : candidates) {
        try {
            fits.push_back(fit_loglog(ds, v));
        } catch (const DegenerateFit&) {
            if (ds.rows() < 2) throw;  // dataset-level problem, not a candidate quirk
        }
    }
    if (fits.empty()) throw DegenerateFit("search: no candidate admitted a fit");
    std::stable_sort(fits.begin(), fits.end(), [](const CandidateFit& a, const CandidateFit& b) {
        if (a.r2 != b.r2) return a.r2 > b.r2;
        return a.v.lex_less(b.v);
    });
    if (fits.size() > top_k) fits.resize(top_k);
    return fits;
}

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

double gauss(std::mt19937_64& rng) {
    double u1 = uniform01(rng), u2 = uniform01(rng);
    while (u1 <= 1e-300) u1 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace

KeyholeDataset generate_synthetic(std::size_t n_rows, double beta, double noise_level,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    KeyholeDataset ds;
    ds.source_tag = "synthetic";
    ExponentVector ref = keyhole_reference_group();
    constexpr double kCoeff = 0.05;
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::array<double, kQuantities> q{};
        q[0] = log_uniform(rng, 20.0, 400.0);     // etaP [W]
        q[1] = log_uniform(rng, 0.1, 1.6);        // Vs [m/s]
        q[2] = log_uniform(rng, 2e-5, 1.5e-4);    // r0 [m]
        q[3] = log_uniform(rng, 3e-6, 3e-5);      // alpha [m^2/s]
        q[4] = log_uniform(rng, 2500.0, 8000.0);  // rho [kg/m^3]
        q[5] = log_uniform(rng, 450.0, 1000.0);   // Cp [J/(kg K)]
        q[6] = log_uniform(rng, 900.0, 2200.0);   // Tl-T0 [K]
        double eps = noise_level > 0 ? noise_level * gauss(rng) : 0.0;
        double target = kCoeff * std::exp(beta * log_pi(ref, q) + eps);
        ds.inputs.push_back(q);
        ds.target.push_back(target);
    }
    return ds;
}

ExponentVector keyhole_reference_group() {
    ExponentVector v;
    v.e = {Frac(1), Frac(-1, 2), Frac(-3, 2), Frac(-1, 2), Frac(-1), Frac(-1), Frac(-1)};
    return v;
}

}  // namespace sciagent::dim
