#include "trianglescope/flags.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "trianglescope/perm.hpp"

namespace tri {

char const* source_name(Source s) {
    switch (s) {
        case Source::alpha: return "alpha";
        case Source::beta: return "beta";
        case Source::gamma: return "gamma";
    }
    return "?";
}

Source source_from_name(std::string_view name) {
    if (name == "alpha") return Source::alpha;
    if (name == "beta") return Source::beta;
    if (name == "gamma") return Source::gamma;
    throw std::invalid_argument("unknown source axis '" + std::string(name) + "'");
}

namespace {

Rational const kZero(0);
Rational const kOne(1);

std::vector<Rational> det_cell(int n, int outcome_1based) {
    std::vector<Rational> v(n, kZero);
    v[outcome_1based - 1] = kOne;
    return v;
}

std::vector<Rational> uniform_cell(int n) { return std::vector<Rational>(n, Rational(1, n)); }

std::vector<Rational> block_breaks(int n) {
    std::vector<Rational> b;
    for (int i = 0; i <= n; i++) b.push_back(Rational(i, n));
    return b;
}

std::vector<Rational> merge_breaks(std::vector<Rational> const& a, std::vector<Rational> const& b) {
    std::vector<Rational> m;
    m.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

/// Interval of [breaks[i], breaks[i+1]) containing x; final interval closed.
size_t interval_index(std::vector<Rational> const& breaks, Rational const& x) {
    size_t lo = 0, hi = breaks.size() - 1;  // invariant: breaks[lo] <= x
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (breaks[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    return std::min(lo, breaks.size() - 2);
}

/// Grid-building helper: fills cells from a callback on interval indices.
template <typename F>
Flag make_grid_flag(int n, Source x_axis, Source y_axis, std::vector<Rational> x_breaks,
                    std::vector<Rational> y_breaks, F&& cell_fn) {
    Flag f;
    f.n_outcomes = n;
    f.x_axis = x_axis;
    f.y_axis = y_axis;
    f.x_breaks = std::move(x_breaks);
    f.y_breaks = std::move(y_breaks);
    f.cells.resize(f.x_breaks.size() - 1);
    for (size_t ix = 0; ix + 1 < f.x_breaks.size(); ix++) {
        f.cells[ix].resize(f.y_breaks.size() - 1);
        for (size_t iy = 0; iy + 1 < f.y_breaks.size(); iy++) f.cells[ix][iy] = cell_fn(ix, iy);
    }
    validate(f);
    return f;
}

int block_of(std::vector<Rational> const& breaks, size_t interval, int n) {
    // breaks refine the uniform n-grid; map interval -> block index 0..n-1
    Rational lo = breaks[interval];
    for (int b = n - 1; b >= 0; b--)
        if (lo >= Rational(b, n)) return b;
    return 0;
}

}  // namespace

std::vector<Rational> const& Flag::cell_at(Rational const& x, Rational const& y) const {
    return cells[interval_index(x_breaks, x)][interval_index(y_breaks, y)];
}

void validate(Flag const& f) {
    if (f.n_outcomes < 2 || f.n_outcomes > max_outcomes)
        throw std::invalid_argument("flag: n_outcomes out of range");
    if (f.x_axis == f.y_axis) throw std::invalid_argument("flag: x_axis == y_axis");
    for (auto const* br : {&f.x_breaks, &f.y_breaks}) {
        if (br->size() < 2 || br->front() != kZero || br->back() != kOne)
            throw std::invalid_argument("flag: breaks must span [0,1]");
        for (size_t i = 0; i + 1 < br->size(); i++)
            if (!((*br)[i] < (*br)[i + 1])) throw std::invalid_argument("flag: breaks not strictly increasing");
    }
    if (f.cells.size() != f.x_breaks.size() - 1) throw std::invalid_argument("flag: cell grid shape");
    for (auto const& col : f.cells) {
        if (col.size() != f.y_breaks.size() - 1) throw std::invalid_argument("flag: cell grid shape");
        for (auto const& cell : col) {
            if (cell.size() != static_cast<size_t>(f.n_outcomes))
                throw std::invalid_argument("flag: cell vector size");
            Rational sum(0);
            for (auto const& q : cell) {
                if (q < kZero) throw std::invalid_argument("flag: negative cell probability");
                sum += q;
            }
            if (sum != kOne) throw std::invalid_argument("flag: cell probabilities must sum to 1");
        }
    }
}

void validate(FlagModel const& m) {
    if (m.alice.n_outcomes != m.n_outcomes || m.bob.n_outcomes != m.n_outcomes ||
        m.charlie.n_outcomes != m.n_outcomes)
        throw std::invalid_argument("flag model: inconsistent n_outcomes");
    if (m.alice.x_axis != Source::beta || m.alice.y_axis != Source::gamma)
        throw std::invalid_argument("flag model: alice must read (beta, gamma)");
    if (m.bob.x_axis != Source::gamma || m.bob.y_axis != Source::alpha)
        throw std::invalid_argument("flag model: bob must read (gamma, alpha)");
    if (m.charlie.x_axis != Source::alpha || m.charlie.y_axis != Source::beta)
        throw std::invalid_argument("flag model: charlie must read (alpha, beta)");
    validate(m.alice);
    validate(m.bob);
    validate(m.charlie);
}

DistQ evaluate(FlagModel const& m) {
    validate(m);
    size_t const max_intervals = 10000;
    auto alpha = merge_breaks(m.bob.y_breaks, m.charlie.x_breaks);
    auto beta = merge_breaks(m.alice.x_breaks, m.charlie.y_breaks);
    auto gamma = merge_breaks(m.alice.y_breaks, m.bob.x_breaks);
    for (auto const* ax : {&alpha, &beta, &gamma})
        if (ax->size() - 1 > max_intervals) throw std::invalid_argument("evaluate: axis refinement too fine");

    int const n = m.n_outcomes;
    // sparse per-cell supports, indexed by refined interval pair
    struct Support {
        std::vector<std::pair<int, Rational const*>> nz;
    };
    auto build = [&](Flag const& f, std::vector<Rational> const& xr, std::vector<Rational> const& yr) {
        std::vector<std::vector<Support>> s(xr.size() - 1, std::vector<Support>(yr.size() - 1));
        for (size_t ix = 0; ix + 1 < xr.size(); ix++) {
            size_t fx = interval_index(f.x_breaks, xr[ix]);
            for (size_t iy = 0; iy + 1 < yr.size(); iy++) {
                size_t fy = interval_index(f.y_breaks, yr[iy]);
                auto const& cell = f.cells[fx][fy];
                for (int a = 0; a < n; a++)
                    if (!cell[a].is_zero()) s[ix][iy].nz.emplace_back(a, &cell[a]);
            }
        }
        return s;
    };
    auto sa = build(m.alice, beta, gamma);
    auto sb = build(m.bob, gamma, alpha);
    auto sc = build(m.charlie, alpha, beta);

    DistQ d(n);
    for (size_t ia = 0; ia + 1 < alpha.size(); ia++) {
        Rational la = alpha[ia + 1] - alpha[ia];
        for (size_t ib = 0; ib + 1 < beta.size(); ib++) {
            Rational lab = la * (beta[ib + 1] - beta[ib]);
            auto const& qc = sc[ia][ib].nz;
            for (size_t ig = 0; ig + 1 < gamma.size(); ig++) {
                Rational w = lab * (gamma[ig + 1] - gamma[ig]);
                auto const& qa = sa[ib][ig].nz;
                auto const& qb = sb[ig][ia].nz;
                for (auto const& [a, va] : qa) {
                    Rational wa = w * (*va);
                    for (auto const& [b, vb] : qb) {
                        Rational wab = wa * (*vb);
                        for (auto const& [c, vc] : qc)
                            d.p[(static_cast<size_t>(a) * n + b) * n + c] += wab * (*vc);
                    }
                }
            }
        }
    }
    return d;
}

Flag generate_outcome_symmetric(SubResponseSpec const& spec, Source x_axis, Source y_axis) {
    int const n = spec.n_outcomes;
    if (n < 2 || n > max_outcomes) throw std::invalid_argument("generator: n_outcomes out of range");
    validate(spec.q11);
    validate(spec.q12);
    for (auto const& col : spec.q11.cells)
        for (auto const& cell : col)
            for (int a = 2; a < n; a++)
                if (cell[a] != cell[1])
                    throw std::invalid_argument("generator: q11 must have outcomes 2..n equal pointwise");
    for (auto const& col : spec.q12.cells)
        for (auto const& cell : col)
            for (int a = 3; a < n; a++)
                if (cell[a] != cell[2])
                    throw std::invalid_argument("generator: q12 must have outcomes 3..n equal pointwise");

    auto sub_x = merge_breaks(spec.q11.x_breaks, spec.q12.x_breaks);
    auto sub_y = merge_breaks(spec.q11.y_breaks, spec.q12.y_breaks);
    auto scale_breaks = [n](std::vector<Rational> const& sub) {
        std::vector<Rational> out;
        for (int j = 0; j < n; j++)
            for (size_t i = 0; i + 1 < sub.size(); i++) out.push_back((Rational(j) + sub[i]) / Rational(n));
        out.push_back(kOne);
        return out;
    };
    size_t const spb = sub_x.size() - 1, spy = sub_y.size() - 1;

    Flag f;
    f.n_outcomes = n;
    f.x_axis = x_axis;
    f.y_axis = y_axis;
    f.x_breaks = scale_breaks(sub_x);
    f.y_breaks = scale_breaks(sub_y);
    f.cells.resize(f.x_breaks.size() - 1);
    for (size_t ix = 0; ix + 1 < f.x_breaks.size(); ix++) {
        int const j = static_cast<int>(ix / spb);
        size_t const sx = ix % spb;
        f.cells[ix].resize(f.y_breaks.size() - 1);
        for (size_t iy = 0; iy + 1 < f.y_breaks.size(); iy++) {
            int const k = static_cast<int>(iy / spy);
            size_t const sy = iy % spy;
            Flag const& seed = (j == k) ? spec.q11 : spec.q12;
            auto const& sub = seed.cells[interval_index(seed.x_breaks, sub_x[sx])]
                                        [interval_index(seed.y_breaks, sub_y[sy])];
            std::vector<int> map =
                (j == k) ? transposition(n, j) : inverse(pair_completion(n, j, k));
            std::vector<Rational> cell(n);
            for (int a = 0; a < n; a++) cell[a] = sub[map[a]];
            f.cells[ix][iy] = std::move(cell);
        }
    }
    validate(f);
    return f;
}

bool check_outcome_covariance(Flag const& f) {
    int const n = f.n_outcomes;
    // per-block per-outcome masses on the uniform n-grid (exact intersection)
    std::vector<std::vector<std::vector<Rational>>> mass(
        n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, kZero)));
    for (size_t ix = 0; ix + 1 < f.x_breaks.size(); ix++) {
        for (size_t iy = 0; iy + 1 < f.y_breaks.size(); iy++) {
            auto const& cell = f.cells[ix][iy];
            for (int bx = 0; bx < n; bx++) {
                Rational x0 = std::max(f.x_breaks[ix], Rational(bx, n));
                Rational x1 = std::min(f.x_breaks[ix + 1], Rational(bx + 1, n));
                if (!(x0 < x1)) continue;
                for (int by = 0; by < n; by++) {
                    Rational y0 = std::max(f.y_breaks[iy], Rational(by, n));
                    Rational y1 = std::min(f.y_breaks[iy + 1], Rational(by + 1, n));
                    if (!(y0 < y1)) continue;
                    Rational area = (x1 - x0) * (y1 - y0);
                    for (int a = 0; a < n; a++)
                        if (!cell[a].is_zero()) mass[bx][by][a] += area * cell[a];
                }
            }
        }
    }
    for (auto const& sigma : all_permutations(n))
        for (int j = 0; j < n; j++)
            for (int k = 0; k < n; k++)
                for (int a = 0; a < n; a++)
                    if (mass[sigma[j]][sigma[k]][sigma[a]] != mass[j][k][a]) return false;
    return true;
}

FlagModel squares_flags() {
    int const n = 4;
    std::vector<Rational> half = {kZero, Rational(1, 2), kOne};
    int const a_tab[2][2] = {{1, 3}, {4, 2}};
    int const b_tab[2][2] = {{1, 4}, {2, 3}};
    int const c_tab[2][2] = {{1, 2}, {3, 4}};
    FlagModel m;
    m.n_outcomes = n;
    m.alice = make_grid_flag(n, Source::beta, Source::gamma, half, half,
                             [&](size_t ix, size_t iy) { return det_cell(n, a_tab[ix][iy]); });
    m.bob = make_grid_flag(n, Source::gamma, Source::alpha, half, half,
                           [&](size_t ix, size_t iy) { return det_cell(n, b_tab[ix][iy]); });
    m.charlie = make_grid_flag(n, Source::alpha, Source::beta, half, half,
                               [&](size_t ix, size_t iy) { return det_cell(n, c_tab[ix][iy]); });
    return m;
}

namespace {

/// Shared construction for the correlated families: Alice outputs the gamma
/// block label on a stripe of width `stripe` inside each gamma block and her
/// beta block label elsewhere; Bob mirrors this with alpha; Charlie has the
/// given diagonal/off-diagonal cell vectors.
FlagModel striped_model(int n, Rational const& stripe,
                        std::vector<Rational> const& alice_mid,  // optional second stripe boundary
                        Rational const& alice_mid_pos,
                        std::function<std::vector<Rational>(int, int)> charlie_cell) {
    auto blocks = block_breaks(n);
    std::vector<Rational> gb = blocks;
    for (int k = 0; k < n; k++) {
        if (!stripe.is_zero() && stripe < kOne) gb.push_back((Rational(k) + stripe) / Rational(n));
        if (!alice_mid.empty() && !alice_mid_pos.is_zero() && alice_mid_pos < kOne)
            gb.push_back((Rational(k) + alice_mid_pos) / Rational(n));
    }
    std::sort(gb.begin(), gb.end());
    gb.erase(std::unique(gb.begin(), gb.end()), gb.end());

    auto alice_cell = [&](size_t ix, size_t iy, std::vector<Rational> const& ybr) {
        int k = block_of(ybr, iy, n);
        Rational pos = (ybr[iy] - Rational(k, n)) * Rational(n);
        if (!alice_mid.empty()) {
            if (pos < alice_mid_pos) return det_cell(n, k + 1);
            if (pos < stripe) {  // anti-correlation band: uniform over != k+1
                std::vector<Rational> v(n, Rational(1, n - 1));
                v[k] = kZero;
                return v;
            }
            return det_cell(n, static_cast<int>(ix) + 1);
        }
        if (pos < stripe) return det_cell(n, k + 1);
        return det_cell(n, static_cast<int>(ix) + 1);
    };

    FlagModel m;
    m.n_outcomes = n;
    m.alice = make_grid_flag(n, Source::beta, Source::gamma, blocks, gb,
                             [&](size_t ix, size_t iy) { return alice_cell(ix, iy, gb); });
    // Bob keeps the plain stripe construction on gamma, outputting alpha otherwise.
    std::vector<Rational> bob_gb = blocks;
    for (int k = 0; k < n; k++)
        if (!stripe.is_zero() && stripe < kOne) bob_gb.push_back((Rational(k) + stripe) / Rational(n));
    std::sort(bob_gb.begin(), bob_gb.end());
    bob_gb.erase(std::unique(bob_gb.begin(), bob_gb.end()), bob_gb.end());
    m.bob = make_grid_flag(n, Source::gamma, Source::alpha, bob_gb, blocks, [&](size_t ix, size_t iy) {
        int k = block_of(bob_gb, ix, n);
        Rational pos = (bob_gb[ix] - Rational(k, n)) * Rational(n);
        if (pos < stripe) return det_cell(n, k + 1);
        return det_cell(n, static_cast<int>(iy) + 1);
    });
    m.charlie = make_grid_flag(n, Source::alpha, Source::beta, blocks, blocks,
                               [&](size_t ix, size_t iy) {
                                   return charlie_cell(static_cast<int>(ix), static_cast<int>(iy));
                               });
    return m;
}

}  // namespace

FlagModel n_outcome_flags(int n_outcomes, Rational const& nu) {
    int const n = n_outcomes;
    if (n < 3 || n > max_outcomes) throw std::invalid_argument("n_outcome_flags: need 3 <= n <= 8");
    if (nu < kZero || nu > Rational(1, 3)) throw std::invalid_argument("n_outcome_flags: nu must be in [0,1/3]");
    Rational q = nu / (kOne - nu);
    auto charlie = [&](int i, int j) {
        if (i == j) return det_cell(n, i + 1);
        std::vector<Rational> v(n);
        for (int a = 0; a < n; a++)
            v[a] = (a == i || a == j) ? q : (kOne - Rational(2) * q) / Rational(n - 2);
        return v;
    };
    return striped_model(n, nu, {}, kZero, charlie);
}

FlagModel maxcorr_flags(Rational const& nu) {
    if (nu < kZero || nu > Rational(1, 3)) throw std::invalid_argument("maxcorr_flags: nu must be in [0,1/3]");
    return n_outcome_flags(4, nu);
}

FlagModel general_flags(Rational const& r, Rational const& eta, Rational const& nu) {
    int const n = 4;
    if (r < kZero || r > kOne || eta < kZero || eta > kOne)
        throw std::invalid_argument("general_flags: r and eta must be in [0,1]");
    if (nu < kZero || nu >= Rational(1, 2)) throw std::invalid_argument("general_flags: nu must be in [0,1/2)");
    Rational q = (kOne - r) / Rational(3) + nu / (kOne - nu) * (Rational(4) * eta - kOne) / Rational(3);
    if (q < kZero || q > Rational(1, 2))
        throw std::invalid_argument("general_flags: derived q = (1-r)/3 + nu/(1-nu)(4 eta-1)/3 outside [0,1/2]");
    auto charlie = [&](int i, int j) {
        if (i == j) {
            std::vector<Rational> v(n, (kOne - r) / Rational(3));
            v[i] = r;
            return v;
        }
        std::vector<Rational> v(n);
        for (int a = 0; a < n; a++) v[a] = (a == i || a == j) ? q : Rational(1, 2) - q;
        return v;
    };
    return striped_model(n, nu, {kOne}, eta * nu, charlie);
}

FlagModel anticorr_flags(Rational const& r) {
    int const n = 4;
    if (r < kZero || r > kOne) throw std::invalid_argument("anticorr_flags: r must be in [0,1]");
    auto blocks = block_breaks(n);
    std::vector<Rational> fine = blocks;  // blocks refined into tertiles
    for (int b = 0; b < n; b++)
        for (int t = 1; t < 3; t++) fine.push_back(Rational(3 * b + t, 3 * n));
    std::sort(fine.begin(), fine.end());
    fine.erase(std::unique(fine.begin(), fine.end()), fine.end());

    auto others = [n](int l) {
        std::vector<int> o;
        for (int a = 1; a <= n; a++)
            if (a != l + 1) o.push_back(a);
        return o;
    };
    auto tertile_of = [&](size_t idx, int block) {
        Rational pos = (fine[idx] - Rational(block, n)) * Rational(n) * Rational(3);
        return pos < kOne ? 0 : pos < Rational(2) ? 1 : 2;
    };

    FlagModel m;
    m.n_outcomes = n;
    // Alice: x=beta refined in tertiles, y=gamma blocks. Off-diagonal outputs
    // the gamma label; diagonal block (l,l) deviates to the tertile-indexed
    // non-l outcome, read off her beta fine coordinate.
    m.alice = make_grid_flag(n, Source::beta, Source::gamma, fine, blocks, [&](size_t ix, size_t iy) {
        int j = block_of(fine, ix, n), k = static_cast<int>(iy);
        if (j != k) return det_cell(n, k + 1);
        return det_cell(n, others(j)[tertile_of(ix, j)]);
    });
    // Bob: x=gamma blocks, y=alpha refined. Off-diagonal outputs the alpha
    // label; diagonal deviates per his alpha fine coordinate.
    m.bob = make_grid_flag(n, Source::gamma, Source::alpha, blocks, fine, [&](size_t ix, size_t iy) {
        int k = static_cast<int>(ix), i = block_of(fine, iy, n);
        if (k != i) return det_cell(n, i + 1);
        return det_cell(n, others(i)[tertile_of(iy, i)]);
    });
    // Charlie: both axes refined. Off-diagonal outputs the beta label; on the
    // diagonal he reads both neighbors' deviations: with probability r he
    // joins the consensus (their common value, or the fourth value if they
    // disagree), and otherwise splits evenly between the two leftovers.
    m.charlie = make_grid_flag(n, Source::alpha, Source::beta, fine, fine, [&](size_t ix, size_t iy) {
        int i = block_of(fine, ix, n), j = block_of(fine, iy, n);
        if (i != j) return det_cell(n, j + 1);
        int l = i + 1;
        int ub = others(i)[tertile_of(ix, i)];
        int ua = others(i)[tertile_of(iy, i)];
        int cons;
        std::vector<int> leftovers;
        if (ua == ub) {
            cons = ua;
            for (int a = 1; a <= n; a++)
                if (a != l && a != cons) leftovers.push_back(a);
        } else {
            cons = 0;
            for (int a = 1; a <= n; a++)
                if (a != l && a != ua && a != ub) cons = a;
            leftovers = {ua, ub};
        }
        std::vector<Rational> v(n, kZero);
        v[cons - 1] += r;
        for (int x : leftovers) v[x - 1] += (kOne - r) / Rational(2);
        return v;
    });
    return m;
}

FlagModel two_party_marginal_flags() {
    int const n = 4;
    // One response pattern shared by all three parties (cyclic symmetry):
    // output the second source's label if it is one step above the first
    // (mod 4), otherwise the first source's label.
    int const tab[4][4] = {{1, 2, 1, 1}, {2, 2, 3, 2}, {3, 3, 3, 4}, {1, 4, 4, 4}};
    auto blocks = block_breaks(n);
    auto cell = [&](size_t ix, size_t iy) { return det_cell(n, tab[ix][iy]); };
    FlagModel m;
    m.n_outcomes = n;
    m.alice = make_grid_flag(n, Source::beta, Source::gamma, blocks, blocks, cell);
    m.bob = make_grid_flag(n, Source::gamma, Source::alpha, blocks, blocks, cell);
    m.charlie = make_grid_flag(n, Source::alpha, Source::beta, blocks, blocks, cell);
    return m;
}

FlagModel latin_square_flags(std::array<Rational, 3> const& p_alpha) {
    int const n = 3;
    Rational sum = p_alpha[0] + p_alpha[1] + p_alpha[2];
    for (auto const& w : p_alpha)
        if (w < kZero) throw std::invalid_argument("latin_square_flags: negative weight");
    if (sum != kOne) throw std::invalid_argument("latin_square_flags: weights must sum to 1");

    std::vector<Rational> bands = {kZero};
    std::vector<int> band_sym;
    Rational acc(0);
    for (int i = 0; i < 3; i++) {
        if (p_alpha[i].is_zero()) continue;
        acc += p_alpha[i];
        bands.push_back(acc);
        band_sym.push_back(i);
    }
    auto thirds = block_breaks(3);

    FlagModel m;
    m.n_outcomes = n;
    m.alice = make_grid_flag(n, Source::beta, Source::gamma, thirds, thirds, [&](size_t ix, size_t iy) {
        return det_cell(n, static_cast<int>((2 * (ix + iy)) % 3) + 1);
    });
    m.bob = make_grid_flag(n, Source::gamma, Source::alpha, thirds, bands, [&](size_t ix, size_t iy) {
        return det_cell(n, static_cast<int>((ix + band_sym[iy]) % 3) + 1);
    });
    m.charlie = make_grid_flag(n, Source::alpha, Source::beta, bands, thirds, [&](size_t ix, size_t iy) {
        return det_cell(n, static_cast<int>((iy + 3 - band_sym[ix]) % 3) + 1);
    });
    return m;
}

FlagModel three_outcome_counterexample_flags() {
    throw std::logic_error("three_outcome_counterexample_flags: construction pending");
}

}  // namespace tri
