#pragma once

#include "trianglescope/dist.hpp"

namespace tri {

/// Class-deviation penalty exponent: absolute (l=1) or squared (l=2).
struct PenaltySpec {
    int l = 1;
    void validate() const;
};

struct InequalitySpec {
    double w = 0;  // weight in [0,1]
    PenaltySpec penalty;
    double rhs = 0;
    void validate() const;
};

/// Sum over the three outcome classes (111, 112, 123, sizes 4/36/24) of
/// |class mean - p(a,b,c)|^l. Zero exactly when p is constant on each class.
/// Defined for four outcomes only; other n are rejected.
double delta_penalty(DistF const& p, int l);
Rational delta_penalty_exact(DistQ const& p, int l);

/// f_w(p) = w * s111(p) - (1-w) * Delta_l(p).
double f_w(DistF const& p, InequalitySpec const& spec);

struct ConjecturedReport {
    double lhs_l1 = 0, lhs_l2 = 0;
    bool violates_l1 = false, violates_l2 = false;
};

/// Evaluates the two conjectured trade-off inequalities:
///   s111 - c1 * Delta_1 <= 0.289 and s111 - c2 * Delta_2 <= 0.316,
/// with c1 = (1-w*)/w* at w* = 0.678 and c2 likewise at w* = 0.161.
ConjecturedReport evaluate_conjectured(DistF const& p);

/// Display-rounded coefficients of the conjectured inequalities.
double conjectured_coefficient(int l);
double conjectured_rhs(int l);

/// Upper bound on the optimal gap from one known local point:
/// Delta_l + w (100/256 - s111 - Delta_l). Returned as (intercept, slope).
struct DeltaWBound {
    double intercept = 0, slope = 0;
    double at(double w) const { return intercept + slope * w; }
};
DeltaWBound delta_w_bound(DistF const& p_local, int l);

/// Negative controls: penalty variants that fail to separate the EJM point.
/// Both vanish on the half-grid strategy even though its three-party
/// correlation exceeds the EJM value.
double delta_penalty_111_only(DistF const& p, int l);
double marginal_penalty(DistF const& p, int l);

}  // namespace tri
