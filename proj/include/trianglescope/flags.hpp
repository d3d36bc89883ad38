#pragma once

#include <array>
#include <vector>

#include "trianglescope/dist.hpp"
#include "trianglescope/rational.hpp"

namespace tri {

enum class Source { alpha, beta, gamma };

char const* source_name(Source s);
Source source_from_name(std::string_view name);

/// Piecewise-constant response function over [0,1]^2. Cells hold exact
/// probability vectors over {1..n}; intervals are half-open [x_i, x_{i+1})
/// with the final one closed.
struct Flag {
    int n_outcomes = 0;
    Source x_axis = Source::alpha;
    Source y_axis = Source::beta;
    std::vector<Rational> x_breaks;  // strictly increasing, 0 .. 1
    std::vector<Rational> y_breaks;
    std::vector<std::vector<std::vector<Rational>>> cells;  // [ix][iy] -> vector of n probs

    std::vector<Rational> const& cell_at(Rational const& x, Rational const& y) const;
};

/// Triangle wiring: Alice sees (beta, gamma), Bob (gamma, alpha),
/// Charlie (alpha, beta).
struct FlagModel {
    int n_outcomes = 0;
    Flag alice, bob, charlie;
};

/// Seeds for the outcome-symmetric generator. Both are flags over the unit
/// cell; q11 must satisfy q(2|.)=...=q(n|.) pointwise, q12 must satisfy
/// q(3|.)=...=q(n|.) pointwise.
struct SubResponseSpec {
    int n_outcomes = 0;
    Flag q11, q12;
};

void validate(Flag const& f);
void validate(FlagModel const& m);

/// Exact output distribution: refines each source axis into the union of that
/// axis's breakpoints across the two flags using it, then sums
/// len*len*len * qA*qB*qC over refined cells. Throws if an axis refinement
/// exceeds 10^4 intervals.
DistQ evaluate(FlagModel const& m);

/// Builds the n x n block flag from the seeds: diagonal block (j,j) maps
/// outcomes through the transposition 1<->j, block (j,k) through the
/// permutation sending 1->j, 2->k. The result satisfies the outcome
/// covariance constraint for every joint relabeling.
Flag generate_outcome_symmetric(SubResponseSpec const& spec, Source x_axis, Source y_axis);

/// True iff per-block outcome masses are covariant under every joint outcome
/// permutation: mass(sigma j, sigma k)(sigma a) == mass(j,k)(a). Blocks are
/// compared by per-outcome measure, not geometric layout.
bool check_outcome_covariance(Flag const& f);

// Named constructors. All emit exact rational layouts; evaluate() reproduces
// the corresponding closed forms symbol-for-symbol.

/// Half-grid strategy with p(A=B=C) = 1/2: mass 1/8 on each of
/// [1,1,1],[2,2,2],[3,3,3],[4,4,4],[1,4,3],[2,3,4],[3,2,1],[4,1,2].
FlagModel squares_flags();

/// Maximally correlated symmetric family, n=4: sym coords (1/4, 9v/4, (3-9v)/4),
/// v in [0,1/3].
FlagModel maxcorr_flags(Rational const& nu);

/// Three-parameter family, n=4: r,eta in [0,1], nu in [0,1/2), with derived
/// q = (1-r)/3 + nu/(1-nu) * (4 eta - 1)/3 required to lie in [0,1/2].
FlagModel general_flags(Rational const& r, Rational const& eta, Rational const& nu);

/// Anti-correlated family, n=4: sym coords (r/48, (4-r)/16, (18+r)/24), r in [0,1].
FlagModel anticorr_flags(Rational const& r);

/// Pair marginals 7/64 (equal) / 3/64 (unequal) for all three pairs, with
/// p(A=B=C=k) = 1/16.
FlagModel two_party_marginal_flags();

/// n-outcome generalization of the maximally correlated family:
/// sym coords (1/n, 3v(n-1)/n, (1-3v)(n-1)/n), v in [0,1/3], n >= 3.
FlagModel n_outcome_flags(int n_outcomes, Rational const& nu);

/// Three-outcome model with sym coords (7/18, 7/18, 2/9); note s111 > 1/3.
FlagModel three_outcome_counterexample_flags();

/// Three-outcome model: Alice is a 3x3 Latin square on uniform grids, Bob and
/// Charlie are striped with band widths p_alpha; sym coords are (1/3, 0, 2/3)
/// for every valid p_alpha.
FlagModel latin_square_flags(std::array<Rational, 3> const& p_alpha);

}  // namespace tri
