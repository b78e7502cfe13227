#include "coolseq/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace coolseq {

CoolingEnv::CoolingEnv(const EnvConfig& config)
    : config_(config),
      initial_(thermal_populations(config.thermal, config.tail_tol, config.cutoff_cap)),
      state_(initial_) {
    config_.params.validate();
    if (config_.n_rounds < 1) throw InvalidParameterError("CoolingEnv: n_rounds must be >= 1");
    if (config_.obs_dim < 1) throw InvalidParameterError("CoolingEnv: obs_dim must be >= 1");
    nbar_initial_ = avg_population(initial_);
}

std::vector<double> CoolingEnv::observe() const {
    std::vector<double> obs(config_.obs_dim, 0.0);
    const auto p = state_.populations();
    const std::size_t n = std::min<std::size_t>(p.size(), config_.obs_dim);
    std::copy(p.begin(), p.begin() + n, obs.begin());
    return obs;
}

std::vector<double> CoolingEnv::reset() {
    state_ = initial_;
    round_ = 0;
    prev_c_ = 0.0;
    last_tau_ = 0.0;
    done_ = false;
    return observe();
}

EnvStepResult CoolingEnv::step(Strategy action) {
    if (done_) throw InvalidParameterError("CoolingEnv::step: episode is over; call reset()");
    EnvStepResult result;
    const double nbar = avg_population(state_);
    if (nbar <= 0.0) {
        // exactly-ground state: nothing to cool; repay the previous C
        last_tau_ = 0.0;
        result.reward = config_.reward_scale * prev_c_;
    } else {
        const double tau = action == Strategy::cm ? tau_opt_cm(state_, config_.params).tau
                                                  : tau_opt_um(state_, config_.params).tau;
        try {
            state_ = action == Strategy::cm ? apply_cm(state_, tau, config_.params)
                                            : apply_um(state_, tau, config_.params);
            last_tau_ = tau;
            const double c =
                cooperative_performance(nbar_initial_, avg_population(state_),
                                        ground_fidelity(state_), state_.survival());
            prev_c_ = c;
            result.reward = config_.reward_scale * c;
        } catch (const MeasurementAnnihilationError&) {
            result.reward = config_.annihilation_reward;
            result.annihilated = true;
            done_ = true;
        }
    }
    ++round_;
    if (round_ >= config_.n_rounds) done_ = true;
    result.done = done_;
    result.observation = observe();
    return result;
}

PolicyParams PolicyParams::make(const PpoHyper& hyper, Rng& rng) {
    PolicyParams policy{Mlp({hyper.obs_dim, hyper.hidden, hyper.hidden, 2}),
                        Mlp({hyper.obs_dim, hyper.hidden, hyper.hidden, 1}), hyper};
    policy.actor.init_random(rng);
    policy.critic.init_random(rng);
    return policy;
}

std::vector<double> action_distribution(const Mlp& actor, std::span<const double> obs) {
    return softmax(actor.forward(obs));
}

std::vector<Episode> collect_episodes(const PolicyParams& policy, CoolingEnv& env,
                                      std::size_t count, const Rng& rng, bool greedy) {
    std::vector<Episode> batch(count);
    for (std::size_t e = 0; e < count; ++e) {
        Rng stream = rng.derive(e);
        Episode& episode = batch[e];
        std::vector<double> obs = env.reset();
        bool done = false;
        while (!done) {
            TrajectoryStep step;
            step.observation = obs;
            const std::vector<double> probs = action_distribution(policy.actor, obs);
            std::size_t a;
            if (greedy)
                a = probs[1] > probs[0] ? 1 : 0;
            else
                a = stream.categorical(probs);
            step.action = static_cast<int>(a);
            step.log_prob = std::log(probs[a]);
            step.value = policy.critic.forward(obs)[0];
            EnvStepResult r = env.step(a == 1 ? Strategy::cm : Strategy::um);
            step.reward = r.reward;
            episode.total_reward += r.reward;
            episode.annihilated = episode.annihilated || r.annihilated;
            episode.steps.push_back(std::move(step));
            obs = std::move(r.observation);
            done = r.done;
        }
    }
    return batch;
}

bool compute_advantages(std::vector<Episode>& batch, double discount, double gae_lambda) {
    for (Episode& episode : batch) {
        double gae = 0.0;
        double next_value = 0.0;  // terminal state bootstraps zero
        for (std::size_t i = episode.steps.size(); i-- > 0;) {
            TrajectoryStep& s = episode.steps[i];
            const double delta = s.reward + discount * next_value - s.value;
            gae = delta + discount * gae_lambda * gae;
            s.advantage = gae;
            s.return_to_go = gae + s.value;
            next_value = s.value;
        }
    }
    // batch-wide normalization
    double mean = 0.0;
    std::size_t n = 0;
    for (const auto& ep : batch)
        for (const auto& s : ep.steps) {
            mean += s.advantage;
            ++n;
        }
    if (n == 0) return false;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& ep : batch)
        for (const auto& s : ep.steps) var += (s.advantage - mean) * (s.advantage - mean);
    var /= static_cast<double>(n);
    if (var < 1e-24) return false;  // nothing to normalize; leave raw and flag
    const double inv_std = 1.0 / std::sqrt(var);
    for (auto& ep : batch)
        for (auto& s : ep.steps) s.advantage = (s.advantage - mean) * inv_std;
    return true;
}

UpdateReport ppo_loss_and_gradients(const PolicyParams& policy,
                                    const std::vector<Episode>& batch,
                                    std::span<double> actor_grad,
                                    std::span<double> critic_grad) {
    if (actor_grad.size() != policy.actor.param_count() ||
        critic_grad.size() != policy.critic.param_count())
        throw InvalidParameterError("ppo_loss_and_gradients: gradient buffer size");
    std::size_t n = 0;
    for (const auto& ep : batch) n += ep.steps.size();
    if (n == 0) throw InvalidParameterError("ppo_loss_and_gradients: empty batch");
    const double inv_n = 1.0 / static_cast<double>(n);
    const double clip = policy.hyper.clip_ratio;

    UpdateReport report;
    Mlp::Cache actor_cache, critic_cache;
    for (const auto& ep : batch) {
        for (const auto& s : ep.steps) {
            // ----- actor: clipped surrogate + entropy bonus -----
            const std::vector<double> logits = policy.actor.forward(s.observation, actor_cache);
            const std::vector<double> probs = softmax(logits);
            const double logp = std::log(probs[s.action]);
            const double ratio = std::exp(logp - s.log_prob);
            const double unclipped = ratio * s.advantage;
            const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * s.advantage;
            report.policy_loss -= std::min(unclipped, clipped) * inv_n;

            double entropy = 0.0;
            for (double p : probs)
                if (p > 0.0) entropy -= p * std::log(p);
            report.entropy += entropy * inv_n;

            // d(-min)/dlogp: zero whenever the clipped branch is active
            const double dsurr_dlogp = unclipped <= clipped ? -ratio * s.advantage : 0.0;
            std::vector<double> dlogits(probs.size());
            for (std::size_t k = 0; k < probs.size(); ++k) {
                const double indicator = k == static_cast<std::size_t>(s.action) ? 1.0 : 0.0;
                dlogits[k] = dsurr_dlogp * (indicator - probs[k]);
                // entropy bonus: dH/dz_k = -p_k (log p_k + H)
                if (probs[k] > 0.0)
                    dlogits[k] +=
                        policy.hyper.entropy_coef * probs[k] * (std::log(probs[k]) + entropy);
                dlogits[k] *= inv_n;
            }
            policy.actor.backward(s.observation, actor_cache, dlogits, actor_grad);

            // ----- critic: squared error against the GAE returns -----
            const double v = policy.critic.forward(s.observation, critic_cache)[0];
            const double err = v - s.return_to_go;
            report.value_loss += err * err * inv_n;
            const double dv[1] = {policy.hyper.value_coef * 2.0 * err * inv_n};
            policy.critic.backward(s.observation, critic_cache, dv, critic_grad);
        }
    }
    report.policy_loss -= policy.hyper.entropy_coef * report.entropy;
    return report;
}

UpdateReport ppo_update(PolicyParams& policy, const std::vector<Episode>& batch,
                        AdamOptimizer& actor_opt, AdamOptimizer& critic_opt) {
    const std::vector<double> actor_backup(policy.actor.params().begin(),
                                           policy.actor.params().end());
    const std::vector<double> critic_backup(policy.critic.params().begin(),
                                            policy.critic.params().end());
    std::vector<double> actor_grad(policy.actor.param_count());
    std::vector<double> critic_grad(policy.critic.param_count());

    UpdateReport report;
    for (std::size_t epoch = 0; epoch < policy.hyper.epochs; ++epoch) {
        std::fill(actor_grad.begin(), actor_grad.end(), 0.0);
        std::fill(critic_grad.begin(), critic_grad.end(), 0.0);
        const UpdateReport epoch_report =
            ppo_loss_and_gradients(policy, batch, actor_grad, critic_grad);
        if (!std::isfinite(epoch_report.policy_loss) || !std::isfinite(epoch_report.value_loss)) {
            policy.actor.set_params(actor_backup);
            policy.critic.set_params(critic_backup);
            report.aborted = true;
            return report;
        }
        actor_opt.step(policy.actor.params(), actor_grad);
        critic_opt.step(policy.critic.params(), critic_grad);
        report = epoch_report;
    }
    return report;
}

GeneratedSequence generate_sequence(const PolicyParams& policy, const PopulationState& initial,
                                    const ModelParams& params, std::size_t n_rounds) {
    GeneratedSequence out;
    PopulationState state = initial;
    std::vector<double> obs(policy.hyper.obs_dim, 0.0);
    for (std::size_t i = 0; i < n_rounds; ++i) {
        const auto p = state.populations();
        std::fill(obs.begin(), obs.end(), 0.0);
        std::copy(p.begin(), p.begin() + std::min<std::size_t>(p.size(), obs.size()), obs.begin());
        const std::vector<double> probs = action_distribution(policy.actor, obs);
        const Strategy action = probs[1] > probs[0] ? Strategy::cm : Strategy::um;
        const double tau = action == Strategy::cm ? tau_opt_cm(state, params).tau
                                                  : tau_opt_um(state, params).tau;
        state = action == Strategy::cm ? apply_cm(state, tau, params)
                                       : apply_um(state, tau, params);
        out.sequence.steps.push_back(action);
        out.intervals.push_back(tau);
    }
    return out;
}

TrainResult train(const EnvConfig& env_config, const PpoHyper& hyper, std::uint64_t seed) {
    Rng init_rng(seed);
    PolicyParams policy = PolicyParams::make(hyper, init_rng);
    const Rng episode_root = Rng(seed).derive(0x636f6f6cULL);

    CoolingEnv env(env_config);
    const PopulationState initial =
        thermal_populations(env_config.thermal, env_config.tail_tol, env_config.cutoff_cap);

    AdamOptimizer actor_opt(policy.actor.param_count(), hyper.learning_rate);
    AdamOptimizer critic_opt(policy.critic.param_count(), hyper.learning_rate);

    TrainResult result{policy, {}, false, 0.0, {}};
    double best_c = -std::numeric_limits<double>::infinity();
    std::vector<double> reward_history;

    for (std::size_t iter = 1; iter <= hyper.max_iterations; ++iter) {
        std::vector<Episode> batch = collect_episodes(
            policy, env, hyper.episodes_per_batch, episode_root.derive(iter), false);
        double mean_total = 0.0;
        for (const auto& ep : batch) mean_total += ep.total_reward;
        mean_total /= static_cast<double>(batch.size());
        reward_history.push_back(mean_total);

        compute_advantages(batch, hyper.discount, hyper.gae_lambda);
        ppo_update(policy, batch, actor_opt, critic_opt);

        // best-so-far checkpoint by greedy-rollout total C
        try {
            const GeneratedSequence g =
                generate_sequence(policy, initial, env_config.params, env_config.n_rounds);
            const CoolingTrace trace = run_sequence(initial, g.sequence, env_config.params);
            const double total_c = trace.total_performance();
            if (total_c > best_c) {
                best_c = total_c;
                result.policy = policy;
                result.best_sequence = g.sequence;
                result.best_total_c = total_c;
            }
        } catch (const MeasurementAnnihilationError&) {
            // greedy rollout annihilated; keep the previous checkpoint
        }
        result.curve.push_back({iter, mean_total, best_c});

        // plateau: relative change between consecutive patience-sized windows
        if (reward_history.size() >= 2 * hyper.patience) {
            const auto tail = reward_history.end();
            const double recent =
                std::accumulate(tail - static_cast<long>(hyper.patience), tail, 0.0) /
                static_cast<double>(hyper.patience);
            const double previous =
                std::accumulate(tail - static_cast<long>(2 * hyper.patience),
                                tail - static_cast<long>(hyper.patience), 0.0) /
                static_cast<double>(hyper.patience);
            const double scale = std::max({std::abs(recent), std::abs(previous), 1e-12});
            if (std::abs(recent - previous) / scale < hyper.plateau_tol) {
                result.converged = true;
                break;
            }
        }
    }
    return result;
}

namespace {

void write_params(std::ostream& os, const char* tag, const Mlp& net) {
    os << tag;
    for (std::size_t s : net.layer_sizes()) os << ' ' << s;
    os << "\n";
    char buf[40];
    const auto p = net.params();
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
        os << buf << ((i + 1) % 8 == 0 || i + 1 == p.size() ? '\n' : ' ');
    }
}

Mlp read_params(std::istream& is, const std::string& expected_tag) {
    std::string tag;
    is >> tag;
    if (tag != expected_tag) throw InvalidParameterError("policy checkpoint: expected " +
                                                         expected_tag + ", got " + tag);
    std::string line;
    std::getline(is, line);
    std::istringstream sizes_in(line);
    std::vector<std::size_t> sizes;
    std::size_t s;
    while (sizes_in >> s) sizes.push_back(s);
    Mlp net(sizes);
    std::vector<double> params(net.param_count());
    for (double& v : params)
        if (!(is >> v)) throw InvalidParameterError("policy checkpoint: truncated parameters");
    net.set_params(params);
    return net;
}

}  // namespace

void save_policy(std::ostream& os, const PolicyParams& policy) {
    os << "coolseq-policy v1\n";
    const auto& h = policy.hyper;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "hyper %zu %zu %.17g %.17g %.17g %zu %zu %.17g %.17g %.17g\n", h.obs_dim,
                  h.hidden, h.clip_ratio, h.discount, h.gae_lambda, h.epochs,
                  h.episodes_per_batch, h.learning_rate, h.entropy_coef, h.value_coef);
    os << buf;
    write_params(os, "actor", policy.actor);
    write_params(os, "critic", policy.critic);
}

PolicyParams load_policy(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "coolseq-policy" || version != "v1")
        throw InvalidParameterError("policy checkpoint: unrecognized header");
    std::string tag;
    is >> tag;
    if (tag != "hyper") throw InvalidParameterError("policy checkpoint: missing hyper line");
    PpoHyper h;
    if (!(is >> h.obs_dim >> h.hidden >> h.clip_ratio >> h.discount >> h.gae_lambda >> h.epochs >>
          h.episodes_per_batch >> h.learning_rate >> h.entropy_coef >> h.value_coef))
        throw InvalidParameterError("policy checkpoint: malformed hyper line");
    Mlp actor = read_params(is, "actor");
    Mlp critic = read_params(is, "critic");
    return PolicyParams{std::move(actor), std::move(critic), h};
}

void write_learning_curve_csv(std::ostream& os, const std::vector<LearningCurvePoint>& curve,
                              const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) os << "# " << line << "\n";
    os << "iteration,mean_total_reward,best_C\n";
    char buf[80];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", p.iteration, p.mean_total_reward,
                      p.best_c);
        os << buf;
    }
}

}  // namespace coolseq
