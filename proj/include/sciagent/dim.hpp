#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sciagent/error.hpp"

namespace sciagent::dim {

struct SchemaMismatch : Error {
    using Error::Error;
};
struct NonPositiveValue : Error {
    using Error::Error;
};
struct ZeroVector : Error {
    using Error::Error;
};
struct DegenerateFit : Error {
    using Error::Error;
};
struct EmptyNullSpace : Error {
    using Error::Error;
};

// Reduced rational with positive denominator.
struct Frac {
    long long num = 0;
    long long den = 1;

    Frac() = default;
    Frac(long long n, long long d = 1);

    Frac operator+(const Frac& o) const;
    Frac operator-(const Frac& o) const;
    Frac operator*(const Frac& o) const;
    Frac operator/(const Frac& o) const;
    Frac operator-() const { return {-num, den}; }
    bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
    auto operator<=>(const Frac& o) const {
        return static_cast<__int128>(num) * o.den <=> static_cast<__int128>(o.num) * den;
    }
    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;  // "n" or "n/d"
};

inline constexpr int kQuantities = 7;
inline constexpr int kDims = 4;  // M, L, T, Theta

// The seven keyhole inputs with their SI dimension vectors.
struct QuantitySchema {
    std::array<std::string, kQuantities> names;
    std::array<std::array<int, kQuantities>, kDims> dims;  // rows M,L,T,Theta

    static QuantitySchema keyhole();
};

struct ExponentVector {
    std::array<Frac, kQuantities> e;

    bool operator==(const ExponentVector& o) const { return e == o.e; }
    bool lex_less(const ExponentVector& o) const;
    std::string str() const;
};

bool is_dimensionless(const QuantitySchema& schema, const ExponentVector& v);

// Scales the vector so the first quantity's exponent is +1 (or, when that
// exponent is zero, so the first nonzero exponent is +1). Negative scalings
// are allowed: a group and its reciprocal are the same candidate.
ExponentVector canonicalize(const ExponentVector& v);

struct Constraints {
    std::vector<long long> denominators = {1, 2, 3};
    long long bound = 3;  // max |exponent|
};

// All canonical dimensionless vectors whose own components satisfy the
// constraints, in deterministic order. The null space of the dimension matrix
// is three-dimensional; enumeration walks its free coordinates.
std::vector<ExponentVector> enumerate_candidates(const QuantitySchema& schema,
                                                 const Constraints& c);

struct KeyholeDataset {
    std::vector<std::array<double, kQuantities>> inputs;
    std::vector<double> target;  // e*
    std::string source_tag;

    std::size_t rows() const { return target.size(); }
};

// Reads the 15-column keyhole CSV, extracting columns 3-8 and 11 (1-based) as
// inputs and the final e* column as the target. Rejects non-positive entries.
KeyholeDataset load_keyhole_csv(const std::filesystem::path& path);
KeyholeDataset parse_keyhole_csv(const std::string& text, const std::string& source_tag);
void write_keyhole_csv(const KeyholeDataset& ds, const std::filesystem::path& path);

struct CandidateFit {
    ExponentVector v;
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

// OLS of log e* against log Pi(v); r2 on the log-log scale.
CandidateFit fit_loglog(const KeyholeDataset& ds, const ExponentVector& v);

// Evaluates every enumerated candidate and ranks by r2 descending with a
// lexicographic exponent tie-break.
std::vector<CandidateFit> search_best(const KeyholeDataset& ds, const Constraints& c,
                                      std::size_t top_k);

// Log-uniform inputs in laser-melt-pool ranges; e* = coeff * Pi_ref^beta * exp(eps),
// eps ~ N(0, noise^2). Deterministic under seed.
KeyholeDataset generate_synthetic(std::size_t n_rows, double beta, double noise_level,
                                  std::uint64_t seed);

// The reference dominant group: exponents (1,-1/2,-3/2,-1/2,-1,-1,-1) over
// (etaP, Vs, r0, alpha, rho, Cp, Tl-T0).
ExponentVector keyhole_reference_group();

double log_pi(const ExponentVector& v, const std::array<double, kQuantities>& q);

}  // namespace sciagent::dim
