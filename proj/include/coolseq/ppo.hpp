#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coolseq/mlp.hpp"
#include "coolseq/rng.hpp"
#include "coolseq/sequence.hpp"

namespace coolseq {

struct EnvConfig {
    ThermalSpec thermal;
    ModelParams params;
    std::size_t n_rounds = 16;
    std::size_t obs_dim = 64;        ///< populations fed to the agent (padded/truncated)
    double tail_tol = 1e-12;
    std::size_t cutoff_cap = 32768;
    double reward_scale = 100.0;     ///< reward = scale * C
    double annihilation_reward = -100.0;
};

struct EnvStepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    bool annihilated = false;
};

/// The cooling episode as a Markov decision process: the agent picks UM or CM,
/// the environment applies the map at its analytic optimal interval and pays
/// reward_scale times the cooperative performance of the post-step state.
/// A CM annihilation ends the episode with a fixed penalty; on an exactly
/// ground state both actions degrade to no-ops repaying the previous C.
class CoolingEnv {
  public:
    explicit CoolingEnv(const EnvConfig& config);

    std::vector<double> reset();
    EnvStepResult step(Strategy action);

    bool done() const { return done_; }
    std::size_t round() const { return round_; }
    double nbar_initial() const { return nbar_initial_; }
    double last_tau() const { return last_tau_; }
    const PopulationState& state() const { return state_; }
    const EnvConfig& config() const { return config_; }

  private:
    std::vector<double> observe() const;

    EnvConfig config_;
    PopulationState initial_;
    PopulationState state_;
    double nbar_initial_ = 0.0;
    double prev_c_ = 0.0;
    double last_tau_ = 0.0;
    std::size_t round_ = 0;
    bool done_ = true;
};

struct TrajectoryStep {
    std::vector<double> observation;
    int action = 0;
    double log_prob = 0.0;
    double reward = 0.0;
    double value = 0.0;
    double advantage = 0.0;
    double return_to_go = 0.0;
};

struct Episode {
    std::vector<TrajectoryStep> steps;
    double total_reward = 0.0;
    bool annihilated = false;
};

struct PpoHyper {
    std::size_t obs_dim = 64;
    std::size_t hidden = 64;           ///< two hidden layers of this width
    double clip_ratio = 0.2;
    double discount = 1.0;             ///< finite horizon
    double gae_lambda = 0.95;
    std::size_t epochs = 4;            ///< gradient passes per update
    std::size_t episodes_per_batch = 64;
    double learning_rate = 3e-4;
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    std::size_t max_iterations = 300;
    std::size_t patience = 30;         ///< plateau window, iterations
    double plateau_tol = 1e-3;         ///< relative moving-average change
};

/// Actor (two-way softmax head) and critic (scalar state value) networks.
struct PolicyParams {
    Mlp actor;
    Mlp critic;
    PpoHyper hyper;

    static PolicyParams make(const PpoHyper& hyper, Rng& rng);
};

/// Probabilities of {UM, CM} for one observation.
std::vector<double> action_distribution(const Mlp& actor, std::span<const double> obs);

/// Samples `count` episodes. Episode e draws from rng.derive(e), so the
/// batch is reproducible and independent of any parallel scheduling. With
/// greedy = true actions are argmax instead of samples.
std::vector<Episode> collect_episodes(const PolicyParams& policy, CoolingEnv& env,
                                      std::size_t count, const Rng& rng, bool greedy = false);

/// Generalized advantage estimation followed by batch-wide normalization to
/// zero mean and unit variance. Returns false (leaving advantages raw) when
/// the batch has no advantage variance to normalize.
bool compute_advantages(std::vector<Episode>& batch, double discount, double gae_lambda);

struct UpdateReport {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    bool aborted = false;  ///< non-finite loss; parameters were restored
};

/// One full-batch evaluation of the PPO objective and its gradients.
/// policy_loss is the clipped surrogate minus the entropy bonus; value_loss
/// is the mean squared error of the critic against the GAE returns. The
/// gradients are accumulated into the provided buffers (param layout).
UpdateReport ppo_loss_and_gradients(const PolicyParams& policy,
                                    const std::vector<Episode>& batch,
                                    std::span<double> actor_grad,
                                    std::span<double> critic_grad);

/// Several epochs of clipped-surrogate ascent plus value regression and an
/// entropy bonus; afterwards the collected batch's policy is simply stale
/// (the stored log-probabilities play the role of pi_old).
UpdateReport ppo_update(PolicyParams& policy, const std::vector<Episode>& batch,
                        AdamOptimizer& actor_opt, AdamOptimizer& critic_opt);

struct LearningCurvePoint {
    std::size_t iteration = 0;
    double mean_total_reward = 0.0;
    double best_c = 0.0;  ///< best greedy-rollout total C seen so far
};

struct TrainResult {
    PolicyParams policy;  ///< best-so-far snapshot
    std::vector<LearningCurvePoint> curve;
    bool converged = false;       ///< plateau reached within budget
    double best_total_c = 0.0;    ///< total C of best_sequence
    MeasurementSequence best_sequence;
};

TrainResult train(const EnvConfig& env_config, const PpoHyper& hyper, std::uint64_t seed);

struct GeneratedSequence {
    MeasurementSequence sequence;
    std::vector<double> intervals;
};

/// Greedy (argmax) rollout of a trained policy; the returned intervals are
/// exactly those a replay through run_sequence would choose.
GeneratedSequence generate_sequence(const PolicyParams& policy, const PopulationState& initial,
                                    const ModelParams& params, std::size_t n_rounds);

/// Versioned text checkpoint; parameters round-trip exactly.
void save_policy(std::ostream& os, const PolicyParams& policy);
PolicyParams load_policy(std::istream& is);

void write_learning_curve_csv(std::ostream& os, const std::vector<LearningCurvePoint>& curve,
                              const std::vector<std::string>& preamble = {});

}  // namespace coolseq
