#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trianglescope/dist.hpp"
#include "trianglescope/flags.hpp"

namespace tri {

/// Parameters of the three-parameter symmetric family.
struct FamilyParams {
    Rational r, eta, nu;

    /// Derived q = (1-r)/3 + nu/(1-nu) * (4 eta - 1)/3; must lie in [0,1/2].
    Rational derived_q() const;
    void validate() const;
};

/// Parameters of the mixing currents: both in [0,1].
struct CurrentParams {
    Rational epsilon, l;
    void validate() const;
};

struct RegionPolygon {
    std::vector<TernaryPoint> vertices;      // simple polygon, closed implicitly
    std::vector<std::string> provenance;     // per-vertex family tag
};

/// Closed form of the three-parameter family:
///   s111 = ((1-nu) r + eta nu)/4
///   s112 = 3((1-nu)(1-r) + 3 eta nu)/4
///   s123 = (1 + 2(1-nu) r + (3-10 eta) nu)/4
SymCoordsQ general_family(FamilyParams const& p);

struct TableLine {
    std::string label;                        // color name
    SymCoordsQ from, to;
    std::vector<SymCoordsQ> samples;          // parametrized line points
};

/// The six fixed-parameter lines with their stated endpoints.
std::vector<TableLine> table_lines(int samples_per_line = 33);

/// ((52+9t)/256, (180+9t)/256, (24-18t)/256), t in [0,1].
SymCoordsQ gisin_line(Rational const& t);

/// (r/48, (4-r)/16, (18+r)/24), r in [0,1]; agrees exactly with
/// sym_coords(evaluate(anticorr_flags(r))).
SymCoordsQ anticorr_line(Rational const& r);

/// Closed form of the decorrelation current applied to a local symmetric
/// point s0; affine in s0 with coefficient (1-eps)^3.
SymCoordsQ current_flow(SymCoordsQ const& s0, CurrentParams const& params);
SymCoords current_flow(SymCoords const& s0, double epsilon, double l);

struct CurrentSampleReport {
    DistF empirical;           // empirical joint distribution
    SymCoords coords;          // its symmetric coordinates
    long n_samples = 0;
    std::array<long, 8> case_counts{};  // counts of the (x,y,z) bit patterns
};

/// Monte Carlo simulation of the constructive current model on top of `base`
/// (which must evaluate to a fully symmetric distribution). Deterministic for
/// fixed (seed, n_samples).
CurrentSampleReport current_model_sample(FlagModel const& base, CurrentParams const& params,
                                         long n_samples, uint64_t seed);

/// Certified-local points: the closed-form current applied to the
/// anti-correlated line over an (r, eps, l) grid.
std::vector<SymCoordsQ> spike_region(int grid);

/// Boundary polygon of the swept inner region (three-parameter family sweep,
/// the t-parametrized line, and the current spike), in ternary coordinates.
RegionPolygon inner_region(int grid);

/// Point-in-polygon with boundary tolerance tol in the ternary metric.
bool contains(RegionPolygon const& region, SymCoords const& s, double tol);

}  // namespace tri
