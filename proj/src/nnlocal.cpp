#include "trianglescope/nnlocal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "trianglescope/inequalities.hpp"
#include "trianglescope/kernels.hpp"

namespace tri {

namespace {

int hw_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

std::pair<int, int> PartyNetwork::layer_shape(int layer) const {
    int in = layer == 0 ? 2 : hidden_width;
    int out = layer == hidden_depth ? n_outcomes : hidden_width;
    return {out, in};
}

void PartyNetwork::allocate() {
    weights.assign(layer_count(), {});
    biases.assign(layer_count(), {});
    for (int l = 0; l < layer_count(); l++) {
        auto [rows, cols] = layer_shape(l);
        weights[l].assign(static_cast<size_t>(rows) * cols, 0.0);
        biases[l].assign(rows, 0.0);
    }
}

void PartyNetwork::init_random(Rng& rng) {
    allocate();
    for (int l = 0; l < layer_count(); l++) {
        auto [rows, cols] = layer_shape(l);
        double scale = 1.0 / std::sqrt(static_cast<double>(cols));
        for (auto& w : weights[l]) w = (2.0 * rng.next_double() - 1.0) * scale;
        for (auto& b : biases[l]) b = (2.0 * rng.next_double() - 1.0) * scale;
    }
}

void PartyNetwork::forward(double in0, double in1, double* probs) const {
    auto const& k = kernels::active();
    std::vector<double> act = {in0, in1};
    std::vector<double> next;
    for (int l = 0; l < layer_count(); l++) {
        auto [rows, cols] = layer_shape(l);
        next.assign(rows, 0.0);
        k.gemv(weights[l].data(), act.data(), biases[l].data(), next.data(), rows, cols);
        if (l < hidden_depth) k.relu(next.data(), rows);
        act.swap(next);
    }
    // softmax, max-shifted
    double mx = act[0];
    for (int i = 1; i < n_outcomes; i++) mx = std::max(mx, act[i]);
    double sum = 0;
    for (int i = 0; i < n_outcomes; i++) {
        probs[i] = std::exp(act[i] - mx);
        sum += probs[i];
    }
    for (int i = 0; i < n_outcomes; i++) probs[i] /= sum;
}

bool PartyNetwork::finite() const {
    for (auto const& layer : weights)
        for (double w : layer)
            if (!std::isfinite(w)) return false;
    for (auto const& layer : biases)
        for (double b : layer)
            if (!std::isfinite(b)) return false;
    return true;
}

NeuralLocalModel make_model(int n_outcomes, int width, int depth) {
    NeuralLocalModel m;
    m.n_outcomes = n_outcomes;
    for (PartyNetwork* p : {&m.alice, &m.bob, &m.charlie}) {
        p->n_outcomes = n_outcomes;
        p->hidden_width = width;
        p->hidden_depth = depth;
        p->allocate();
    }
    return m;
}

TrainObjective TrainObjective::distance_to(DistF target) {
    TrainObjective o;
    o.kind = Kind::distance;
    o.target = std::move(target);
    return o;
}

TrainObjective TrainObjective::inequality(double w, int l) {
    if (w < 0 || w > 1) throw std::invalid_argument("objective: w must be in [0,1]");
    PenaltySpec{l}.validate();
    TrainObjective o;
    o.kind = Kind::inequality;
    o.w = w;
    o.l = l;
    return o;
}

DistF monte_carlo_distribution(NeuralLocalModel const& model, long M, uint64_t seed) {
    if (M < 1) throw std::invalid_argument("monte_carlo_distribution: M must be >= 1");
    int const n = model.n_outcomes;
    auto const& k = kernels::active();
    DistF d(n);
    std::vector<double> pa(n), pb(n), pc(n);
    Rng rng(seed);
    for (long i = 0; i < M; i++) {
        double alpha = rng.next_double(), beta = rng.next_double(), gamma = rng.next_double();
        model.alice.forward(beta, gamma, pa.data());
        model.bob.forward(gamma, alpha, pb.data());
        model.charlie.forward(alpha, beta, pc.data());
        k.outer3_acc(pa.data(), pb.data(), pc.data(), n, d.p.data());
    }
    double inv = 1.0 / static_cast<double>(M);
    for (auto& x : d.p) x *= inv;
    return d;
}

double loss(DistF const& p_nn, TrainObjective const& objective) {
    if (objective.kind == TrainObjective::Kind::distance) {
        if (objective.target.n != p_nn.n) throw std::invalid_argument("loss: mismatched n_outcomes");
        return kernels::active().sumsq_diff(p_nn.p.data(), objective.target.p.data(), p_nn.p.size());
    }
    return -f_w(p_nn, InequalitySpec{objective.w, PenaltySpec{objective.l}, 0});
}

namespace {

/// dLoss/dp as a dense tensor.
std::vector<double> loss_gradient_wrt_p(DistF const& p, TrainObjective const& obj) {
    size_t const sz = p.p.size();
    std::vector<double> g(sz, 0.0);
    if (obj.kind == TrainObjective::Kind::distance) {
        for (size_t i = 0; i < sz; i++) g[i] = 2.0 * (p.p[i] - obj.target.p[i]);
        return g;
    }
    // loss = -w s111 + (1-w) Delta_l
    int const n = p.n;
    auto class_of = [](int a, int b, int c) {
        if (a == b && b == c) return 0;
        if (a != b && b != c && a != c) return 2;
        return 1;
    };
    double mean[3] = {0, 0, 0}, size[3] = {4, 36, 24}, signsum[3] = {0, 0, 0};
    for (int a = 1; a <= n; a++)
        for (int b = 1; b <= n; b++)
            for (int c = 1; c <= n; c++) mean[class_of(a, b, c)] += p.at(a, b, c);
    for (int t = 0; t < 3; t++) mean[t] /= size[t];
    auto sign = [](double x) { return x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0; };
    if (obj.l == 1)
        for (int a = 1; a <= n; a++)
            for (int b = 1; b <= n; b++)
                for (int c = 1; c <= n; c++) {
                    int t = class_of(a, b, c);
                    signsum[t] += sign(mean[t] - p.at(a, b, c));
                }
    size_t i = 0;
    for (int a = 1; a <= n; a++)
        for (int b = 1; b <= n; b++)
            for (int c = 1; c <= n; c++, i++) {
                int t = class_of(a, b, c);
                double ddelta;
                if (obj.l == 1)
                    ddelta = signsum[t] / size[t] - sign(mean[t] - p.at(a, b, c));
                else
                    ddelta = 2.0 * (p.at(a, b, c) - mean[t]);
                g[i] = (1.0 - obj.w) * ddelta - (a == b && b == c ? obj.w : 0.0);
            }
    return g;
}

struct PartyWorkspace {
    std::vector<std::vector<double>> pre;   // pre-activations per layer
    std::vector<std::vector<double>> act;   // post-activations per layer (act[0] = input)
    std::vector<double> probs;

    void forward(PartyNetwork const& net, double in0, double in1) {
        auto const& k = kernels::active();
        int const L = net.layer_count();
        pre.resize(L);
        act.resize(L + 1);
        act[0] = {in0, in1};
        for (int l = 0; l < L; l++) {
            auto [rows, cols] = net.layer_shape(l);
            pre[l].assign(rows, 0.0);
            k.gemv(net.weights[l].data(), act[l].data(), net.biases[l].data(), pre[l].data(), rows, cols);
            act[l + 1] = pre[l];
            if (l < net.hidden_depth) k.relu(act[l + 1].data(), rows);
        }
        int const n = net.n_outcomes;
        probs.assign(n, 0.0);
        double mx = act[L][0];
        for (int i = 1; i < n; i++) mx = std::max(mx, act[L][i]);
        double sum = 0;
        for (int i = 0; i < n; i++) {
            probs[i] = std::exp(act[L][i] - mx);
            sum += probs[i];
        }
        for (int i = 0; i < n; i++) probs[i] /= sum;
    }

    /// dprobs -> accumulate parameter grads; input grads are discarded
    /// (source values are not parameters).
    void backward(PartyNetwork const& net, std::vector<double> const& dprobs, PartyGrad& grad) {
        auto const& k = kernels::active();
        int const n = net.n_outcomes;
        int const L = net.layer_count();
        // softmax backward
        double dot = 0;
        for (int i = 0; i < n; i++) dot += dprobs[i] * probs[i];
        std::vector<double> dlayer(n);
        for (int i = 0; i < n; i++) dlayer[i] = probs[i] * (dprobs[i] - dot);
        for (int l = L - 1; l >= 0; l--) {
            auto [rows, cols] = net.layer_shape(l);
            k.ger_acc(grad.weights[l].data(), dlayer.data(), act[l].data(), rows, cols);
            k.axpy(1.0, dlayer.data(), grad.biases[l].data(), rows);
            if (l == 0) break;
            std::vector<double> dprev(cols, 0.0);
            k.gemv_t_acc(net.weights[l].data(), dlayer.data(), dprev.data(), rows, cols);
            k.relu_backward(pre[l - 1].data(), dprev.data(), cols);
            dlayer.swap(dprev);
        }
    }
};

PartyGrad zero_grad(PartyNetwork const& net) {
    PartyGrad g;
    g.weights.resize(net.layer_count());
    g.biases.resize(net.layer_count());
    for (int l = 0; l < net.layer_count(); l++) {
        auto [rows, cols] = net.layer_shape(l);
        g.weights[l].assign(static_cast<size_t>(rows) * cols, 0.0);
        g.biases[l].assign(rows, 0.0);
    }
    return g;
}

}  // namespace

ModelGrad gradient(NeuralLocalModel const& model, TrainObjective const& objective, long M, uint64_t seed) {
    int const n = model.n_outcomes;
    // pass 1: the Monte Carlo estimate itself
    DistF p = monte_carlo_distribution(model, M, seed);
    std::vector<double> dp = loss_gradient_wrt_p(p, objective);
    double const invM = 1.0 / static_cast<double>(M);

    ModelGrad grad;
    grad.alice = zero_grad(model.alice);
    grad.bob = zero_grad(model.bob);
    grad.charlie = zero_grad(model.charlie);
    grad.loss_value = loss(p, objective);

    // pass 2: replay the identical sample stream and backpropagate
    Rng rng(seed);
    PartyWorkspace wa, wb, wc;
    std::vector<double> dpa(n), dpb(n), dpc(n);
    for (long i = 0; i < M; i++) {
        double alpha = rng.next_double(), beta = rng.next_double(), gamma = rng.next_double();
        wa.forward(model.alice, beta, gamma);
        wb.forward(model.bob, gamma, alpha);
        wc.forward(model.charlie, alpha, beta);
        std::fill(dpa.begin(), dpa.end(), 0.0);
        std::fill(dpb.begin(), dpb.end(), 0.0);
        std::fill(dpc.begin(), dpc.end(), 0.0);
        for (int a = 0; a < n; a++)
            for (int b = 0; b < n; b++) {
                double const* dp_row = dp.data() + (static_cast<size_t>(a) * n + b) * n;
                double wab = wa.probs[a] * wb.probs[b];
                for (int c = 0; c < n; c++) {
                    double g = dp_row[c] * invM;
                    dpa[a] += g * wb.probs[b] * wc.probs[c];
                    dpb[b] += g * wa.probs[a] * wc.probs[c];
                    dpc[c] += g * wab;
                }
            }
        wa.backward(model.alice, dpa, grad.alice);
        wb.backward(model.bob, dpb, grad.bob);
        wc.backward(model.charlie, dpc, grad.charlie);
    }
    for (auto const* pg : {&grad.alice, &grad.bob, &grad.charlie})
        for (auto const* vecs : {&pg->weights, &pg->biases})
            for (auto const& v : *vecs)
                for (double x : v)
                    if (!std::isfinite(x)) grad.finite = false;
    return grad;
}

namespace {

struct AdadeltaState {
    std::vector<std::vector<double>> eg2_w, edx2_w, eg2_b, edx2_b;

    explicit AdadeltaState(PartyNetwork const& net) {
        for (int l = 0; l < net.layer_count(); l++) {
            auto [rows, cols] = net.layer_shape(l);
            eg2_w.emplace_back(static_cast<size_t>(rows) * cols, 0.0);
            edx2_w.emplace_back(static_cast<size_t>(rows) * cols, 0.0);
            eg2_b.emplace_back(rows, 0.0);
            edx2_b.emplace_back(rows, 0.0);
        }
    }

    void step(std::vector<std::vector<double>>& params, std::vector<std::vector<double>> const& grads,
              std::vector<std::vector<double>>& eg2, std::vector<std::vector<double>>& edx2, double rho,
              double eps) {
        for (size_t l = 0; l < params.size(); l++)
            for (size_t i = 0; i < params[l].size(); i++) {
                double g = grads[l][i];
                eg2[l][i] = rho * eg2[l][i] + (1 - rho) * g * g;
                double dx = -std::sqrt(edx2[l][i] + eps) / std::sqrt(eg2[l][i] + eps) * g;
                edx2[l][i] = rho * edx2[l][i] + (1 - rho) * dx * dx;
                params[l][i] += dx;
            }
    }
};

void sgd_step(std::vector<std::vector<double>>& params, std::vector<std::vector<double>> const& grads,
              double step) {
    for (size_t l = 0; l < params.size(); l++)
        for (size_t i = 0; i < params[l].size(); i++) params[l][i] -= step * grads[l][i];
}

struct RestartOutcome {
    NeuralLocalModel model;
    double final_loss = std::numeric_limits<double>::infinity();
    bool ok = false;
    std::vector<EpochRecord> history;
};

RestartOutcome run_restart(TrainConfig const& cfg, int restart) {
    uint64_t seed = Rng::derive(cfg.master_seed, static_cast<uint64_t>(restart)).next_u64();
    Rng init_rng(seed);
    NeuralLocalModel model = make_model(cfg.n_outcomes, cfg.hidden_width, cfg.hidden_depth);
    model.alice.init_random(init_rng);
    model.bob.init_random(init_rng);
    model.charlie.init_random(init_rng);

    RestartOutcome out;
    AdadeltaState sa(model.alice), sb(model.bob), sc(model.charlie);
    int const total_epochs = cfg.schedule.adadelta_epochs + cfg.schedule.finetune_epochs;
    double last_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < total_epochs; epoch++) {
        uint64_t epoch_seed = Rng::derive(seed, 0x1000 + static_cast<uint64_t>(epoch)).next_u64();
        ModelGrad g = gradient(model, cfg.objective, cfg.n_samples, epoch_seed);
        if (!g.finite || !std::isfinite(g.loss_value)) return out;  // diverged
        out.history.push_back({restart, epoch, g.loss_value});
        last_loss = g.loss_value;
        if (epoch < cfg.schedule.adadelta_epochs) {
            double rho = cfg.schedule.adadelta_decay, eps = cfg.schedule.adadelta_eps;
            sa.step(model.alice.weights, g.alice.weights, sa.eg2_w, sa.edx2_w, rho, eps);
            sa.step(model.alice.biases, g.alice.biases, sa.eg2_b, sa.edx2_b, rho, eps);
            sb.step(model.bob.weights, g.bob.weights, sb.eg2_w, sb.edx2_w, rho, eps);
            sb.step(model.bob.biases, g.bob.biases, sb.eg2_b, sb.edx2_b, rho, eps);
            sc.step(model.charlie.weights, g.charlie.weights, sc.eg2_w, sc.edx2_w, rho, eps);
            sc.step(model.charlie.biases, g.charlie.biases, sc.eg2_b, sc.edx2_b, rho, eps);
        } else {
            double step = cfg.schedule.finetune_step;
            sgd_step(model.alice.weights, g.alice.weights, step);
            sgd_step(model.alice.biases, g.alice.biases, step);
            sgd_step(model.bob.weights, g.bob.weights, step);
            sgd_step(model.bob.biases, g.bob.biases, step);
            sgd_step(model.charlie.weights, g.charlie.weights, step);
            sgd_step(model.charlie.biases, g.charlie.biases, step);
        }
        if (!model.alice.finite() || !model.bob.finite() || !model.charlie.finite()) return out;
    }
    // final loss on a fixed evaluation stream, comparable across restarts
    uint64_t eval_seed = Rng::derive(cfg.master_seed, 0xe0a1ULL).next_u64();
    DistF p = monte_carlo_distribution(model, cfg.n_samples, eval_seed);
    out.final_loss = loss(p, cfg.objective);
    out.model = std::move(model);
    out.ok = std::isfinite(out.final_loss) && last_loss < std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace

TrainResult train(TrainConfig const& config) {
    if (config.restarts < 1) throw std::invalid_argument("train: restarts must be >= 1");
    if (config.n_samples < 1) throw std::invalid_argument("train: n_samples must be >= 1");
    std::vector<RestartOutcome> outcomes(config.restarts);
    int const workers = std::min(hw_threads(config.threads), config.restarts);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= config.restarts) return;
            outcomes[static_cast<size_t>(r)] = run_restart(config, r);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; t++) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    TrainResult result;
    int best = -1;
    for (int r = 0; r < config.restarts; r++) {
        auto& o = outcomes[static_cast<size_t>(r)];
        result.history.insert(result.history.end(), o.history.begin(), o.history.end());
        result.final_losses.push_back(o.final_loss);
        if (o.ok && (best < 0 || o.final_loss < outcomes[static_cast<size_t>(best)].final_loss)) best = r;
    }
    if (best < 0) throw std::runtime_error("train: all restarts produced non-finite losses");
    result.best = std::move(outcomes[static_cast<size_t>(best)].model);
    result.best_loss = outcomes[static_cast<size_t>(best)].final_loss;
    result.best_restart = best;
    return result;
}

FlagModel discretize_to_flags(NeuralLocalModel const& model, int resolution) {
    if (resolution < 2) throw std::invalid_argument("discretize_to_flags: resolution must be >= 2");
    int const n = model.n_outcomes;
    std::vector<Rational> breaks;
    for (int i = 0; i <= resolution; i++) breaks.push_back(Rational(i, resolution));
    auto discretize = [&](PartyNetwork const& net, Source x_axis, Source y_axis) {
        Flag f;
        f.n_outcomes = n;
        f.x_axis = x_axis;
        f.y_axis = y_axis;
        f.x_breaks = breaks;
        f.y_breaks = breaks;
        f.cells.resize(resolution);
        std::vector<double> probs(n);
        for (int ix = 0; ix < resolution; ix++) {
            f.cells[ix].resize(resolution);
            double cx = (ix + 0.5) / resolution;
            for (int iy = 0; iy < resolution; iy++) {
                double cy = (iy + 0.5) / resolution;
                net.forward(cx, cy, probs.data());
                int arg = 0;
                for (int a = 1; a < n; a++)
                    if (probs[a] > probs[arg]) arg = a;
                std::vector<Rational> cell(n, Rational(0));
                cell[arg] = Rational(1);
                f.cells[ix][iy] = std::move(cell);
            }
        }
        return f;
    };
    FlagModel m;
    m.n_outcomes = n;
    m.alice = discretize(model.alice, Source::beta, Source::gamma);
    m.bob = discretize(model.bob, Source::gamma, Source::alpha);
    m.charlie = discretize(model.charlie, Source::alpha, Source::beta);
    validate(m);
    return m;
}

}  // namespace tri
