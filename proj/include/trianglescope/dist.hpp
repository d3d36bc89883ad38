#pragma once

#include <vector>

#include "trianglescope/rational.hpp"

namespace tri {

/// Outcomes are 1-based labels in {1..n}; n is capped at 8 globally.
inline constexpr int max_outcomes = 8;

/// Dense joint distribution p(a,b,c) over {1..n}^3.
/// T is double (float backend) or Rational (exact backend).
template <typename T>
struct Distribution {
    int n = 0;
    std::vector<T> p;  // index((a-1)*n + (b-1))*n + (c-1)

    Distribution() = default;
    explicit Distribution(int n_outcomes) : n(n_outcomes), p(static_cast<size_t>(n) * n * n, T(0)) {}

    T& at(int a, int b, int c) { return p[(static_cast<size_t>(a - 1) * n + (b - 1)) * n + (c - 1)]; }
    T const& at(int a, int b, int c) const {
        return p[(static_cast<size_t>(a - 1) * n + (b - 1)) * n + (c - 1)];
    }
};

using DistF = Distribution<double>;
using DistQ = Distribution<Rational>;

/// Point on the 2-simplex of fully symmetric distributions.
template <typename T>
struct SymCoordsT {
    T s111{0}, s112{0}, s123{0};
};
using SymCoords = SymCoordsT<double>;
using SymCoordsQ = SymCoordsT<Rational>;

/// 2D plot coordinates inside the triangle (0,0), (1,0), (1/2, sqrt(3)/2).
struct TernaryPoint {
    double x = 0, y = 0;
};

/// Corner mapping: s112 -> (0,0), s123 -> (1,0), s111 -> (1/2, sqrt(3)/2).
TernaryPoint to_ternary(SymCoords const& s);

enum class ExtremalKind { k111, k112, k123 };

struct FinnerReport {
    bool satisfied = false;
    double worst_violation = 0;  // max over triples of p(a,b,c) - sqrt(prod of marginals)
};

/// Throws std::invalid_argument if entries are negative, n is out of range,
/// or the total mass is off (exactly 1 for Rational, 1e-12 for double).
template <typename T>
void validate(Distribution<T> const& d);

/// The four-outcome reference point: 25/256 on a=b=c, 5/256 on all-distinct,
/// 1/256 otherwise.
DistQ ejm_distribution();

template <typename T>
SymCoordsT<T> sym_coords(Distribution<T> const& d);

/// Uniform mixture over one deterministic outcome class.
DistQ extremal_distribution(ExtremalKind kind, int n_outcomes);

template <typename T>
Distribution<T> from_sym_coords(SymCoordsT<T> const& s, int n_outcomes);

/// Average over all 6 party permutations composed with all n! joint outcome
/// permutations. Rejects n > 8.
template <typename T>
Distribution<T> symmetrize(Distribution<T> const& d);

/// Max entry deviation from its orbit mean: <= tol (float), exactly 0 (Rational).
bool is_fully_symmetric(DistF const& d, double tol = 1e-9);
bool is_fully_symmetric(DistQ const& d);

template <typename T>
FinnerReport finner_check(Distribution<T> const& d);

double finner_s111_bound(int n_outcomes);

/// Euclidean 2-norm over all n^3 entries (not squared).
double distance(DistF const& p, DistF const& q);
double distance(DistQ const& p, DistQ const& q);

/// Explicit exact->float conversion; entries round to nearest, ties to even.
DistF to_float(DistQ const& d);
SymCoords to_float(SymCoordsQ const& s);

}  // namespace tri
