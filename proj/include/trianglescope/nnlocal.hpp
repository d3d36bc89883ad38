#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "trianglescope/dist.hpp"
#include "trianglescope/flags.hpp"
#include "trianglescope/rng.hpp"

namespace tri {

/// One party's response network: input (two source values), `hidden_depth`
/// ReLU layers of `hidden_width` units, and a softmax output over outcomes.
struct PartyNetwork {
    int n_outcomes = 4;
    int hidden_width = 30;
    int hidden_depth = 4;
    std::vector<std::vector<double>> weights;  // row-major, layer l: out x in
    std::vector<std::vector<double>> biases;

    int layer_count() const { return hidden_depth + 1; }
    std::pair<int, int> layer_shape(int layer) const;  // (rows, cols)

    void allocate();
    void init_random(Rng& rng);

    /// Softmax output probabilities; `probs` has n_outcomes entries.
    void forward(double in0, double in1, double* probs) const;

    bool finite() const;
};

struct NeuralLocalModel {
    int n_outcomes = 4;
    PartyNetwork alice, bob, charlie;
};

NeuralLocalModel make_model(int n_outcomes, int width, int depth);

struct TrainObjective {
    enum class Kind { distance, inequality };
    Kind kind = Kind::distance;
    DistF target;    // distance objective
    double w = 0.5;  // inequality objective weight
    int l = 1;       // penalty exponent

    static TrainObjective distance_to(DistF target);
    static TrainObjective inequality(double w, int l);
};

struct OptimizerSchedule {
    double adadelta_decay = 0.95;
    double adadelta_eps = 1e-6;
    int adadelta_epochs = 600;
    double finetune_step = 0.05;
    int finetune_epochs = 200;
};

struct TrainConfig {
    int n_outcomes = 4;
    long n_samples = 8192;  // Monte Carlo sample count per epoch
    TrainObjective objective;
    OptimizerSchedule schedule;
    int restarts = 10;
    uint64_t master_seed = 0;
    int hidden_width = 30;
    int hidden_depth = 4;
    int threads = 0;  // 0 = hardware concurrency
};

struct EpochRecord {
    int restart = 0;
    int epoch = 0;
    double loss = 0;
};

struct TrainResult {
    NeuralLocalModel best;
    double best_loss = 0;
    int best_restart = 0;
    std::vector<EpochRecord> history;
    std::vector<double> final_losses;  // per restart
};

/// Monte Carlo estimate over M iid uniform source triples:
/// p(a,b,c) = (1/M) sum_i pA(a|b_i,g_i) pB(b|g_i,a_i) pC(c|a_i,b_i).
/// Valid distribution for any M; deterministic given (M, seed).
DistF monte_carlo_distribution(NeuralLocalModel const& model, long M, uint64_t seed);

double loss(DistF const& p_nn, TrainObjective const& objective);

struct PartyGrad {
    std::vector<std::vector<double>> weights, biases;
};

struct ModelGrad {
    PartyGrad alice, bob, charlie;
    double loss_value = 0;
    bool finite = true;
};

/// Reverse-mode gradient of loss(monte_carlo_distribution(model, M, seed))
/// with the sample set held fixed. Absolute-value kinks use subgradient 0.
ModelGrad gradient(NeuralLocalModel const& model, TrainObjective const& objective, long M, uint64_t seed);

/// Runs `restarts` independent initializations and returns the best-loss
/// model with the per-epoch loss history. Deterministic given master_seed.
/// Throws if every restart diverges to non-finite parameters.
TrainResult train(TrainConfig const& config);

/// Uniform resolution x resolution grid per party; each cell outputs the
/// argmax of the network at the cell center, ties broken toward the lowest
/// outcome index.
FlagModel discretize_to_flags(NeuralLocalModel const& model, int resolution);

}  // namespace tri
