#include "trianglescope/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trianglescope/perm.hpp"

namespace tri {

TernaryPoint to_ternary(SymCoords const& s) {
    static double const h = std::sqrt(3.0) / 2.0;
    return {s.s123 + 0.5 * s.s111, h * s.s111};
}

template <typename T>
void validate(Distribution<T> const& d) {
    if (d.n < 2 || d.n > max_outcomes) throw std::invalid_argument("distribution: n_outcomes out of range");
    if (d.p.size() != static_cast<size_t>(d.n) * d.n * d.n)
        throw std::invalid_argument("distribution: wrong storage size");
    T sum(0);
    for (auto const& x : d.p) {
        if (x < T(0)) throw std::invalid_argument("distribution: negative entry");
        sum += x;
    }
    if constexpr (std::is_same_v<T, Rational>) {
        if (sum != Rational(1)) throw std::invalid_argument("distribution: mass != 1");
    } else {
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("distribution: mass != 1");
    }
}

DistQ ejm_distribution() {
    DistQ d(4);
    for (int a = 1; a <= 4; a++)
        for (int b = 1; b <= 4; b++)
            for (int c = 1; c <= 4; c++) {
                if (a == b && b == c)
                    d.at(a, b, c) = Rational(25, 256);
                else if (a != b && b != c && a != c)
                    d.at(a, b, c) = Rational(5, 256);
                else
                    d.at(a, b, c) = Rational(1, 256);
            }
    return d;
}

template <typename T>
SymCoordsT<T> sym_coords(Distribution<T> const& d) {
    SymCoordsT<T> s;
    for (int a = 1; a <= d.n; a++)
        for (int b = 1; b <= d.n; b++)
            for (int c = 1; c <= d.n; c++) {
                T const& x = d.at(a, b, c);
                if (a == b && b == c)
                    s.s111 += x;
                else if (a != b && b != c && a != c)
                    s.s123 += x;
                else
                    s.s112 += x;
            }
    return s;
}

DistQ extremal_distribution(ExtremalKind kind, int n_outcomes) {
    int const n = n_outcomes;
    if (n < 1 || n > max_outcomes) throw std::invalid_argument("extremal_distribution: n_outcomes out of range");
    if (kind != ExtremalKind::k111 && n < 3)
        throw std::invalid_argument("extremal_distribution: kinds 112/123 need n_outcomes >= 3");
    DistQ d(n);
    switch (kind) {
        case ExtremalKind::k111:
            for (int k = 1; k <= n; k++) d.at(k, k, k) = Rational(1, n);
            break;
        case ExtremalKind::k112: {
            Rational w(1, 3L * n * (n - 1));
            for (int k = 1; k <= n; k++)
                for (int l = 1; l <= n; l++) {
                    if (k == l) continue;
                    d.at(k, k, l) = w;
                    d.at(k, l, k) = w;
                    d.at(l, k, k) = w;
                }
            break;
        }
        case ExtremalKind::k123: {
            Rational w(1, static_cast<long>(n) * (n - 1) * (n - 2));
            for (int k = 1; k <= n; k++)
                for (int l = 1; l <= n; l++)
                    for (int m = 1; m <= n; m++)
                        if (k != l && l != m && k != m) d.at(k, l, m) = w;
            break;
        }
    }
    return d;
}

template <typename T>
Distribution<T> from_sym_coords(SymCoordsT<T> const& s, int n_outcomes) {
    int const n = n_outcomes;
    auto mix = [&](ExtremalKind k) { return extremal_distribution(k, n); };
    DistQ e111 = mix(ExtremalKind::k111), e112 = mix(ExtremalKind::k112), e123 = mix(ExtremalKind::k123);
    Distribution<T> d(n);
    for (size_t i = 0; i < d.p.size(); i++) {
        if constexpr (std::is_same_v<T, Rational>)
            d.p[i] = s.s111 * e111.p[i] + s.s112 * e112.p[i] + s.s123 * e123.p[i];
        else
            d.p[i] = s.s111 * e111.p[i].to_double() + s.s112 * e112.p[i].to_double() +
                     s.s123 * e123.p[i].to_double();
    }
    return d;
}

template <typename T>
Distribution<T> symmetrize(Distribution<T> const& d) {
    if (d.n > max_outcomes) throw std::invalid_argument("symmetrize: n_outcomes out of range");
    auto outcome_perms = all_permutations(d.n);
    auto party_perms = all_permutations(3);
    Distribution<T> r(d.n);
    for (auto const& op : outcome_perms)
        for (auto const& pp : party_perms)
            for (int a = 1; a <= d.n; a++)
                for (int b = 1; b <= d.n; b++)
                    for (int c = 1; c <= d.n; c++) {
                        int abc[3] = {a, b, c};
                        int permuted[3] = {op[abc[pp[0]] - 1] + 1, op[abc[pp[1]] - 1] + 1,
                                           op[abc[pp[2]] - 1] + 1};
                        r.at(permuted[0], permuted[1], permuted[2]) += d.at(a, b, c);
                    }
    T denom(static_cast<long>(outcome_perms.size() * party_perms.size()));
    for (auto& x : r.p) x /= denom;
    return r;
}

namespace {

/// Orbit id of (a,b,c) under party perms + joint outcome perms: the
/// lexicographically smallest image.
template <typename T>
std::vector<T> orbit_means(Distribution<T> const& d, std::vector<int>& orbit_of) {
    auto outcome_perms = all_permutations(d.n);
    auto party_perms = all_permutations(3);
    int const n = d.n;
    size_t const total = static_cast<size_t>(n) * n * n;
    orbit_of.assign(total, -1);
    std::vector<T> means;
    std::vector<std::array<int, 3>> stack;
    for (size_t idx = 0; idx < total; idx++) {
        if (orbit_of[idx] != -1) continue;
        int const a = static_cast<int>(idx / (n * n)) + 1;
        int const b = static_cast<int>((idx / n) % n) + 1;
        int const c = static_cast<int>(idx % n) + 1;
        int id = static_cast<int>(means.size());
        T sum(0);
        long count = 0;
        for (auto const& op : outcome_perms)
            for (auto const& pp : party_perms) {
                int abc[3] = {a, b, c};
                size_t j = ((static_cast<size_t>(op[abc[pp[0]] - 1])) * n + op[abc[pp[1]] - 1]) * n +
                           op[abc[pp[2]] - 1];
                if (orbit_of[j] != id) {
                    orbit_of[j] = id;
                    sum += d.p[j];
                    count++;
                }
            }
        sum /= T(count);
        means.push_back(sum);
    }
    return means;
}

}  // namespace

bool is_fully_symmetric(DistF const& d, double tol) {
    std::vector<int> orbit_of;
    auto means = orbit_means(d, orbit_of);
    for (size_t i = 0; i < d.p.size(); i++)
        if (std::abs(d.p[i] - means[orbit_of[i]]) > tol) return false;
    return true;
}

bool is_fully_symmetric(DistQ const& d) {
    std::vector<int> orbit_of;
    auto means = orbit_means(d, orbit_of);
    for (size_t i = 0; i < d.p.size(); i++)
        if (d.p[i] != means[orbit_of[i]]) return false;
    return true;
}

template <typename T>
FinnerReport finner_check(Distribution<T> const& d) {
    int const n = d.n;
    std::vector<T> ma(n, T(0)), mb(n, T(0)), mc(n, T(0));
    for (int a = 1; a <= n; a++)
        for (int b = 1; b <= n; b++)
            for (int c = 1; c <= n; c++) {
                T const& x = d.at(a, b, c);
                ma[a - 1] += x;
                mb[b - 1] += x;
                mc[c - 1] += x;
            }
    FinnerReport rep;
    rep.satisfied = true;
    rep.worst_violation = -1e300;
    for (int a = 1; a <= n; a++)
        for (int b = 1; b <= n; b++)
            for (int c = 1; c <= n; c++) {
                T const& lhs = d.at(a, b, c);
                T prod = ma[a - 1] * mb[b - 1] * mc[c - 1];
                bool ok;
                double viol;
                if constexpr (std::is_same_v<T, Rational>) {
                    ok = lhs * lhs <= prod;  // lhs >= 0, so equivalent to lhs <= sqrt(prod)
                    viol = lhs.to_double() - std::sqrt(prod.to_double());
                } else {
                    viol = lhs - std::sqrt(prod);
                    ok = viol <= 1e-12;
                }
                if (!ok) rep.satisfied = false;
                rep.worst_violation = std::max(rep.worst_violation, viol);
            }
    return rep;
}

double finner_s111_bound(int n_outcomes) {
    if (n_outcomes < 1) throw std::invalid_argument("finner_s111_bound: n_outcomes must be >= 1");
    return 1.0 / std::sqrt(static_cast<double>(n_outcomes));
}

double distance(DistF const& p, DistF const& q) {
    if (p.n != q.n) throw std::invalid_argument("distance: mismatched n_outcomes");
    double s = 0;
    for (size_t i = 0; i < p.p.size(); i++) {
        double d = p.p[i] - q.p[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double distance(DistQ const& p, DistQ const& q) {
    if (p.n != q.n) throw std::invalid_argument("distance: mismatched n_outcomes");
    Rational s(0);
    for (size_t i = 0; i < p.p.size(); i++) {
        Rational d = p.p[i] - q.p[i];
        s += d * d;
    }
    return std::sqrt(s.to_double());
}

DistF to_float(DistQ const& d) {
    DistF r(d.n);
    for (size_t i = 0; i < d.p.size(); i++) r.p[i] = d.p[i].to_double();
    return r;
}

SymCoords to_float(SymCoordsQ const& s) {
    return {s.s111.to_double(), s.s112.to_double(), s.s123.to_double()};
}

template void validate<double>(Distribution<double> const&);
template void validate<Rational>(Distribution<Rational> const&);
template SymCoordsT<double> sym_coords<double>(Distribution<double> const&);
template SymCoordsT<Rational> sym_coords<Rational>(Distribution<Rational> const&);
template Distribution<double> from_sym_coords<double>(SymCoordsT<double> const&, int);
template Distribution<Rational> from_sym_coords<Rational>(SymCoordsT<Rational> const&, int);
template Distribution<double> symmetrize<double>(Distribution<double> const&);
template Distribution<Rational> symmetrize<Rational>(Distribution<Rational> const&);
template FinnerReport finner_check<double>(Distribution<double> const&);
template FinnerReport finner_check<Rational>(Distribution<Rational> const&);

}  // namespace tri
