#include "trianglescope/families.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "trianglescope/rng.hpp"

namespace tri {

namespace {
Rational const kZero(0);
Rational const kOne(1);
}  // namespace

Rational FamilyParams::derived_q() const {
    return (kOne - r) / Rational(3) + nu / (kOne - nu) * (Rational(4) * eta - kOne) / Rational(3);
}

void FamilyParams::validate() const {
    if (r < kZero || r > kOne || eta < kZero || eta > kOne)
        throw std::invalid_argument("family params: r and eta must be in [0,1]");
    if (nu < kZero || nu >= Rational(1, 2)) throw std::invalid_argument("family params: nu must be in [0,1/2)");
    Rational q = derived_q();
    if (q < kZero || q > Rational(1, 2)) throw std::invalid_argument("family params: derived q outside [0,1/2]");
}

void CurrentParams::validate() const {
    if (epsilon < kZero || epsilon > kOne || l < kZero || l > kOne)
        throw std::invalid_argument("current params: epsilon and l must be in [0,1]");
}

SymCoordsQ general_family(FamilyParams const& p) {
    p.validate();
    Rational const &r = p.r, &eta = p.eta, &nu = p.nu;
    SymCoordsQ s;
    s.s111 = ((kOne - nu) * r + eta * nu) / Rational(4);
    s.s112 = Rational(3, 4) * ((kOne - nu) * (kOne - r) + Rational(3) * eta * nu);
    s.s123 = (kOne + Rational(2) * (kOne - nu) * r + (Rational(3) - Rational(10) * eta) * nu) / Rational(4);
    return s;
}

std::vector<TableLine> table_lines(int samples_per_line) {
    if (samples_per_line < 2) throw std::invalid_argument("table_lines: need at least 2 samples");
    auto coords = [](long a1, long b1, long a2, long b2, long a3, long b3) {
        return SymCoordsQ{Rational(a1, b1), Rational(a2, b2), Rational(a3, b3)};
    };
    std::vector<TableLine> lines;
    auto add = [&](std::string label, SymCoordsQ from, SymCoordsQ to,
                   std::function<FamilyParams(Rational const&)> params, Rational t_lo, Rational t_hi,
                   bool open_hi = false) {
        TableLine line{std::move(label), from, to, {}};
        for (int i = 0; i < samples_per_line; i++) {
            Rational t = t_lo + (t_hi - t_lo) * Rational(i, samples_per_line - 1);
            if (open_hi && i == samples_per_line - 1)
                t = t_lo + (t_hi - t_lo) * Rational(2 * samples_per_line - 1, 2 * samples_per_line);
            line.samples.push_back(general_family(params(t)));
        }
        lines.push_back(std::move(line));
    };
    // eta=1, r=1: t = nu descending so that From/To match the stated order
    add("purple", coords(1, 4, 1, 1, 3, 4, 1, 1, 0, 1), coords(1, 4, 1, 1, 0, 1, 1, 1, 3, 4),
        [](Rational const& nu) { return FamilyParams{kOne, kOne, nu}; }, Rational(1, 3), kZero);
    // eta=1, r=(7nu-1)/(2(1-nu)), nu in [1/7, 1/3]
    add("red", coords(1, 28, 1, 1, 27, 28, 1, 1, 0, 1), coords(1, 4, 1, 1, 3, 4, 1, 1, 0, 1),
        [](Rational const& nu) {
            return FamilyParams{(Rational(7) * nu - kOne) / (Rational(2) * (kOne - nu)), kOne, nu};
        },
        Rational(1, 7), Rational(1, 3));
    // eta=1, r=0, nu in [0, 1/7]
    add("grey", coords(0, 1, 1, 1, 3, 4, 1, 1, 1, 4, 1, 1), coords(1, 28, 1, 1, 27, 28, 1, 1, 0, 1),
        [](Rational const& nu) { return FamilyParams{kZero, kOne, nu}; }, kZero, Rational(1, 7));
    // eta=0, r=(1-2nu)/(1-nu), nu in [0, 1/2)
    add("dark green", coords(0, 1, 1, 1, 3, 8, 1, 1, 5, 8, 1, 1), coords(1, 4, 1, 1, 0, 1, 1, 1, 3, 4),
        [](Rational const& nu) { return FamilyParams{(kOne - Rational(2) * nu) / (kOne - nu), kZero, nu}; },
        Rational(1, 2), kZero, /*open_hi=*/false);
    // eta=0, r=0, nu in [0, 1/2)
    add("light blue", coords(0, 1, 1, 1, 3, 4, 1, 1, 1, 4, 1, 1), coords(0, 1, 1, 1, 3, 8, 1, 1, 5, 8, 1, 1),
        [](Rational const& nu) { return FamilyParams{kZero, kZero, nu}; }, kZero, Rational(1, 2),
        /*open_hi=*/true);
    // nu=0, r in [0,1]
    add("dark blue", coords(0, 1, 1, 1, 3, 4, 1, 1, 1, 4, 1, 1), coords(1, 4, 1, 1, 0, 1, 1, 1, 3, 4),
        [](Rational const& r) { return FamilyParams{r, kOne, kZero}; }, kZero, kOne);

    // the dark green line starts at the open nu->1/2 end; sample from just inside
    auto& dg = lines[3];
    dg.samples.clear();
    for (int i = 0; i < samples_per_line; i++) {
        Rational nu = Rational(1, 2) * Rational(i, samples_per_line) ;
        nu = Rational(1, 2) - Rational(1, 2) * Rational(i, samples_per_line - 1);
        if (i == 0) nu = Rational(samples_per_line - 1, 2 * samples_per_line);
        dg.samples.push_back(
            general_family(FamilyParams{(kOne - Rational(2) * nu) / (kOne - nu), kZero, nu}));
    }
    return lines;
}

SymCoordsQ gisin_line(Rational const& t) {
    if (t < kZero || t > kOne) throw std::invalid_argument("gisin_line: t must be in [0,1]");
    return {(Rational(52) + Rational(9) * t) / Rational(256),
            (Rational(180) + Rational(9) * t) / Rational(256),
            (Rational(24) - Rational(18) * t) / Rational(256)};
}

SymCoordsQ anticorr_line(Rational const& r) {
    if (r < kZero || r > kOne) throw std::invalid_argument("anticorr_line: r must be in [0,1]");
    return {r / Rational(48), (Rational(4) - r) / Rational(16), (Rational(18) + r) / Rational(24)};
}

SymCoordsQ current_flow(SymCoordsQ const& s0, CurrentParams const& params) {
    params.validate();
    Rational const& e = params.epsilon;
    Rational const& l = params.l;
    Rational decay = (kOne - e) * (kOne - e) * (kOne - e);
    Rational mix = Rational(3) * (e * (kOne - e) + e * e * e / Rational(4));
    Rational e3 = e * e * e;
    SymCoordsQ s;
    s.s111 = decay * s0.s111 + mix * (kOne - l) / Rational(4) + e3 / Rational(64);
    s.s112 = decay * s0.s112 + mix * (Rational(3) - l) / Rational(4) + Rational(9, 64) * e3;
    s.s123 = decay * s0.s123 + mix * l / Rational(2) + Rational(6, 64) * e3;
    return s;
}

SymCoords current_flow(SymCoords const& s0, double epsilon, double l) {
    double e = epsilon;
    double decay = (1 - e) * (1 - e) * (1 - e);
    double mix = 3 * (e * (1 - e) + e * e * e / 4);
    double e3 = e * e * e;
    return {decay * s0.s111 + mix * (1 - l) / 4 + e3 / 64,
            decay * s0.s112 + mix * (3 - l) / 4 + 9.0 / 64 * e3,
            decay * s0.s123 + mix * l / 2 + 6.0 / 64 * e3};
}

namespace {

/// Float view of a flag for sampling: breaks and cells as doubles.
struct FlagView {
    std::vector<double> x_breaks, y_breaks;
    std::vector<std::vector<std::vector<double>>> cells;

    explicit FlagView(Flag const& f) {
        for (auto const& b : f.x_breaks) x_breaks.push_back(b.to_double());
        for (auto const& b : f.y_breaks) y_breaks.push_back(b.to_double());
        cells.resize(f.cells.size());
        for (size_t i = 0; i < f.cells.size(); i++) {
            cells[i].resize(f.cells[i].size());
            for (size_t j = 0; j < f.cells[i].size(); j++) {
                for (auto const& q : f.cells[i][j]) cells[i][j].push_back(q.to_double());
            }
        }
    }

    int sample(Rng& rng, double x, double y) const {
        auto idx = [](std::vector<double> const& br, double v) {
            size_t lo = 0, hi = br.size() - 1;
            while (hi - lo > 1) {
                size_t mid = (lo + hi) / 2;
                (br[mid] <= v ? lo : hi) = mid;
            }
            return lo;
        };
        auto const& cell = cells[idx(x_breaks, x)][idx(y_breaks, y)];
        return rng.next_discrete(cell) + 1;
    }
};

}  // namespace

CurrentSampleReport current_model_sample(FlagModel const& base, CurrentParams const& params,
                                         long n_samples, uint64_t seed) {
    params.validate();
    if (n_samples < 1) throw std::invalid_argument("current_model_sample: n_samples must be >= 1");
    if (base.n_outcomes != 4)
        throw std::invalid_argument("current_model_sample: base model must have 4 outcomes");
    DistQ base_dist = evaluate(base);
    if (!is_fully_symmetric(base_dist))
        throw std::invalid_argument("current_model_sample: base must evaluate to a fully symmetric distribution");

    double const eps = params.epsilon.to_double();
    double const l = params.l.to_double();
    FlagView va(base.alice), vb(base.bob), vc(base.charlie);
    Rng rng(seed);

    // pair distribution q(a,b): (1-l)/4 on the diagonal, l/12 off it
    auto draw_pair = [&](int& a, int& b) {
        if (rng.next_bernoulli(1 - l)) {
            a = b = static_cast<int>(rng.next_u64() % 4) + 1;
        } else {
            a = static_cast<int>(rng.next_u64() % 4) + 1;
            b = static_cast<int>(rng.next_u64() % 3) + 1;
            if (b >= a) b++;
        }
    };

    CurrentSampleReport rep;
    rep.n_samples = n_samples;
    std::vector<long> counts(64, 0);
    for (long t = 0; t < n_samples; t++) {
        double alpha = rng.next_double(), beta = rng.next_double(), gamma = rng.next_double();
        int x = rng.next_bernoulli(eps), y = rng.next_bernoulli(eps), z = rng.next_bernoulli(eps);
        int b_bc, c_bc, a_ac, c_ac, a_ab, b_ab;
        draw_pair(b_bc, c_bc);
        draw_pair(a_ac, c_ac);
        draw_pair(a_ab, b_ab);
        rep.case_counts[static_cast<size_t>(x * 4 + y * 2 + z)]++;

        int a, b, c;
        if (!y && !z) a = va.sample(rng, beta, gamma);
        else if (y && !z) a = a_ac;
        else if (!y && z) a = a_ab;
        else a = rng.next_bernoulli(0.5) ? a_ab : a_ac;

        if (!x && !z) b = vb.sample(rng, gamma, alpha);
        else if (x && !z) b = b_bc;
        else if (!x && z) b = b_ab;
        else b = rng.next_bernoulli(0.5) ? b_ab : b_bc;

        if (!x && !y) c = vc.sample(rng, alpha, beta);
        else if (x && !y) c = c_bc;
        else if (!x && y) c = c_ac;
        else c = rng.next_bernoulli(0.5) ? c_ac : c_bc;

        counts[static_cast<size_t>((a - 1) * 16 + (b - 1) * 4 + (c - 1))]++;
    }
    rep.empirical = DistF(4);
    for (int i = 0; i < 64; i++)
        rep.empirical.p[i] = static_cast<double>(counts[i]) / static_cast<double>(n_samples);
    rep.coords = sym_coords(rep.empirical);
    return rep;
}

std::vector<SymCoordsQ> spike_region(int grid) {
    if (grid < 2) throw std::invalid_argument("spike_region: grid must be >= 2");
    std::vector<SymCoordsQ> pts;
    for (int ir = 0; ir < grid; ir++) {
        SymCoordsQ base = anticorr_line(Rational(ir, grid - 1));
        for (int ie = 0; ie < grid; ie++)
            for (int il = 0; il < grid; il++)
                pts.push_back(current_flow(base, {Rational(ie, grid - 1), Rational(il, grid - 1)}));
    }
    return pts;
}

namespace {

struct TaggedPoint {
    TernaryPoint pt;
    std::string const* tag;
};

/// Boundary polyline from horizontal slices of the point cloud: per s111
/// level band, the min and max ternary x. Slice linking gives a simple
/// polygon as long as slices are single intervals, which holds for this
/// region (checked by the containment tests).
RegionPolygon slice_boundary(std::vector<TaggedPoint> const& pts, int slices) {
    double ymin = 1e300, ymax = -1e300;
    for (auto const& p : pts) {
        ymin = std::min(ymin, p.pt.y);
        ymax = std::max(ymax, p.pt.y);
    }
    double dy = (ymax - ymin) / slices;
    struct Band {
        bool any = false;
        TaggedPoint lo, hi;
    };
    std::vector<Band> bands(slices);
    for (auto const& p : pts) {
        int b = std::min(slices - 1, static_cast<int>((p.pt.y - ymin) / dy));
        if (!bands[b].any) {
            bands[b] = {true, p, p};
        } else {
            if (p.pt.x < bands[b].lo.pt.x) bands[b].lo = p;
            if (p.pt.x > bands[b].hi.pt.x) bands[b].hi = p;
        }
    }
    RegionPolygon poly;
    for (auto const& b : bands)
        if (b.any) {
            poly.vertices.push_back(b.lo.pt);
            poly.provenance.push_back(*b.lo.tag);
        }
    for (auto it = bands.rbegin(); it != bands.rend(); ++it)
        if (it->any) {
            poly.vertices.push_back(it->hi.pt);
            poly.provenance.push_back(*it->hi.tag);
        }
    return poly;
}

}  // namespace

RegionPolygon inner_region(int grid) {
    if (grid < 10) throw std::invalid_argument("inner_region: grid must be >= 10");
    static std::string const tag_family = "general_family";
    static std::string const tag_gisin = "gisin_line";
    static std::string const tag_spike = "spike";
    std::vector<TaggedPoint> pts;
    for (int ir = 0; ir <= grid; ir++)
        for (int ie = 0; ie <= grid; ie++)
            for (int in = 0; in < grid; in++) {
                FamilyParams fp{Rational(ir, grid), Rational(ie, grid), Rational(in, 2 * grid)};
                Rational q = fp.derived_q();
                if (q < Rational(0) || q > Rational(1, 2)) continue;
                pts.push_back({to_ternary(to_float(general_family(fp))), &tag_family});
            }
    for (int it = 0; it <= grid; it++)
        pts.push_back({to_ternary(to_float(gisin_line(Rational(it, grid)))), &tag_gisin});
    int spike_grid = std::max(8, grid / 4);
    for (auto const& s : spike_region(spike_grid)) pts.push_back({to_ternary(to_float(s)), &tag_spike});
    return slice_boundary(pts, std::max(24, grid / 2));
}

namespace {

double seg_distance(TernaryPoint a, TernaryPoint b, double px, double py) {
    double vx = b.x - a.x, vy = b.y - a.y;
    double wx = px - a.x, wy = py - a.y;
    double vv = vx * vx + vy * vy;
    double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

bool contains(RegionPolygon const& region, SymCoords const& s, double tol) {
    if (region.vertices.size() < 3) throw std::invalid_argument("contains: degenerate polygon");
    TernaryPoint p = to_ternary(s);
    size_t const n = region.vertices.size();
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        auto const& a = region.vertices[i];
        auto const& b = region.vertices[j];
        if (seg_distance(a, b, p.x, p.y) <= tol) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

}  // namespace tri
