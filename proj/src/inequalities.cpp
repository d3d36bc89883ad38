#include "trianglescope/inequalities.hpp"

#include <cmath>
#include <stdexcept>

namespace tri {

namespace {

void require_four(int n, char const* what) {
    if (n != 4) throw std::invalid_argument(std::string(what) + ": class index sets are defined for 4 outcomes");
}

enum Class { c111 = 0, c112 = 1, c123 = 2 };

int class_of(int a, int b, int c) {
    if (a == b && b == c) return c111;
    if (a != b && b != c && a != c) return c123;
    return c112;
}

// exact coefficients (1-w*)/w* for w* = 0.678 and w* = 0.161
double const kCoeffL1 = (1.0 - 0.678) / 0.678;
double const kCoeffL2 = (1.0 - 0.161) / 0.161;
double const kRhsL1 = 0.289;
double const kRhsL2 = 0.316;

}  // namespace

void PenaltySpec::validate() const {
    if (l != 1 && l != 2) throw std::invalid_argument("penalty: l must be 1 or 2");
}

void InequalitySpec::validate() const {
    penalty.validate();
    if (w < 0 || w > 1) throw std::invalid_argument("inequality: w must be in [0,1]");
}

double delta_penalty(DistF const& p, int l) {
    require_four(p.n, "delta_penalty");
    PenaltySpec{l}.validate();
    double mean[3] = {0, 0, 0};
    double const size[3] = {4, 36, 24};
    for (int a = 1; a <= 4; a++)
        for (int b = 1; b <= 4; b++)
            for (int c = 1; c <= 4; c++) mean[class_of(a, b, c)] += p.at(a, b, c);
    for (int k = 0; k < 3; k++) mean[k] /= size[k];
    double delta = 0;
    for (int a = 1; a <= 4; a++)
        for (int b = 1; b <= 4; b++)
            for (int c = 1; c <= 4; c++) {
                double d = std::abs(mean[class_of(a, b, c)] - p.at(a, b, c));
                delta += l == 1 ? d : d * d;
            }
    return delta;
}

Rational delta_penalty_exact(DistQ const& p, int l) {
    require_four(p.n, "delta_penalty");
    PenaltySpec{l}.validate();
    Rational mean[3] = {Rational(0), Rational(0), Rational(0)};
    long const size[3] = {4, 36, 24};
    for (int a = 1; a <= 4; a++)
        for (int b = 1; b <= 4; b++)
            for (int c = 1; c <= 4; c++) mean[class_of(a, b, c)] += p.at(a, b, c);
    for (int k = 0; k < 3; k++) mean[k] /= Rational(size[k]);
    Rational delta(0);
    for (int a = 1; a <= 4; a++)
        for (int b = 1; b <= 4; b++)
            for (int c = 1; c <= 4; c++) {
                Rational d = abs(mean[class_of(a, b, c)] - p.at(a, b, c));
                delta += l == 1 ? d : d * d;
            }
    return delta;
}

double f_w(DistF const& p, InequalitySpec const& spec) {
    spec.validate();
    require_four(p.n, "f_w");
    return spec.w * sym_coords(p).s111 - (1.0 - spec.w) * delta_penalty(p, spec.penalty.l);
}

double conjectured_coefficient(int l) {
    PenaltySpec{l}.validate();
    return l == 1 ? kCoeffL1 : kCoeffL2;
}

double conjectured_rhs(int l) {
    PenaltySpec{l}.validate();
    return l == 1 ? kRhsL1 : kRhsL2;
}

ConjecturedReport evaluate_conjectured(DistF const& p) {
    require_four(p.n, "evaluate_conjectured");
    double s111 = sym_coords(p).s111;
    ConjecturedReport r;
    r.lhs_l1 = s111 - kCoeffL1 * delta_penalty(p, 1);
    r.lhs_l2 = s111 - kCoeffL2 * delta_penalty(p, 2);
    r.violates_l1 = r.lhs_l1 > kRhsL1;
    r.violates_l2 = r.lhs_l2 > kRhsL2;
    return r;
}

DeltaWBound delta_w_bound(DistF const& p_local, int l) {
    require_four(p_local.n, "delta_w_bound");
    PenaltySpec{l}.validate();
    double delta = delta_penalty(p_local, l);
    double s111 = sym_coords(p_local).s111;
    return {delta, 100.0 / 256.0 - s111 - delta};
}

double delta_penalty_111_only(DistF const& p, int l) {
    require_four(p.n, "delta_penalty_111_only");
    PenaltySpec{l}.validate();
    double mean = 0;
    for (int k = 1; k <= 4; k++) mean += p.at(k, k, k);
    mean /= 4;
    double delta = 0;
    for (int k = 1; k <= 4; k++) {
        double d = std::abs(mean - p.at(k, k, k));
        delta += l == 1 ? d : d * d;
    }
    return delta;
}

double marginal_penalty(DistF const& p, int l) {
    require_four(p.n, "marginal_penalty");
    PenaltySpec{l}.validate();
    double ma[4] = {0}, mb[4] = {0}, mc[4] = {0};
    for (int a = 1; a <= 4; a++)
        for (int b = 1; b <= 4; b++)
            for (int c = 1; c <= 4; c++) {
                double v = p.at(a, b, c);
                ma[a - 1] += v;
                mb[b - 1] += v;
                mc[c - 1] += v;
            }
    double delta = 0;
    for (int k = 0; k < 4; k++)
        for (double m : {ma[k], mb[k], mc[k]}) {
            double d = std::abs(m - 0.25);
            delta += l == 1 ? d : d * d;
        }
    return delta;
}

}  // namespace tri
