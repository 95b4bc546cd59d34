#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bwalk/lattice.hpp"
#include "bwalk/rational.hpp"
#include "bwalk/rng.hpp"
#include "bwalk/weights.hpp"

namespace bwalk {

// Kernel selector shared by the samplers and the transfer engine.
struct KernelSpec {
    DriftProfile drift;  // length T; all ones = plain kernel
    bool q_mode = false;
    double q = 0.5;

    static KernelSpec plain(long T);
    static KernelSpec drifted(DriftProfile d);
    static KernelSpec macdonald(DriftProfile d, double q);
};

// Reachable configurations are keyed by their integer displacement from the
// base configuration (gap vector + offset in disguise).
struct StateKey {
    std::vector<int16_t> d;
    bool operator==(const StateKey& o) const { return d == o.d; }
};
struct StateKeyHash {
    size_t operator()(const StateKey& k) const {
        size_t h = 1469598103934665603ULL;
        for (auto v : k.d) {
            h ^= static_cast<size_t>(static_cast<uint16_t>(v));
            h *= 1099511628211ULL;
        }
        return h;
    }
};

template <typename W>
using SliceMap = std::unordered_map<StateKey, W, StateKeyHash>;

// Node-wise height corridor |H - H*| <= eps, checked at slice times.
struct CorridorSpec {
    const HeightField* target = nullptr;
    double eps = 0.0;
    long N_scale = 0;

    bool active() const { return target != nullptr; }
    // Exact sup over x of |H_walk(., t) - H*(., t)| for one configuration.
    bool admits(const std::vector<double>& positions_micro, double theta, double t_macro) const;
};

struct TransferCaps {
    long max_states_total = 1000000;
};

// Forward/backward transfer-matrix pass over reachable configurations.
template <typename W>
struct TransferResult {
    ParticleConfig y;
    std::optional<ParticleConfig> z;
    long T = 0;
    std::vector<SliceMap<W>> alpha;  // alpha[t]: mass arriving at state at time t
    std::vector<SliceMap<W>> beta;   // beta[t]: mass from state to the endpoint event
    W total{};                       // endpoint (+ corridor) mass
    long states_total = 0;

    // Conditional time-t distribution given the endpoint event.
    SliceMap<W> conditional(long t) const;
    // Conditional mean height at macroscopic x, time slice t.
    double mean_height(long t, long N_scale, double x) const;
};

// Probability mode: masses are kernel-normalized; conservation is exact in
// rational mode. In weight mode masses are raw path weights W(p;b).
enum class TransferMode { Probability, Weight };

template <typename W>
TransferResult<W> transfer_pass(const ParticleConfig& y, const std::optional<ParticleConfig>& z,
                                long T, const KernelSpec& kernel, TransferMode mode,
                                const CorridorSpec& corridor = {}, const TransferCaps& caps = {});

// Exact conditional path distribution between fixed endpoints.
TransferResult<Rational> exact_distribution(const ParticleConfig& y, const ParticleConfig& z,
                                            long T, const KernelSpec& kernel,
                                            const TransferCaps& caps = {});
TransferResult<double> exact_distribution_double(const ParticleConfig& y, const ParticleConfig& z,
                                                 long T, const KernelSpec& kernel,
                                                 const CorridorSpec& corridor = {},
                                                 const TransferCaps& caps = {});

// Sum over paths y -> z of W(p; b) (weight mode), exact rational.
Rational path_weight_sum(const ParticleConfig& y, const ParticleConfig& z, long T,
                         const DriftProfile& drift, const TransferCaps& caps = {});
// Same in doubles, optionally with q-weights.
double path_weight_sum_double(const ParticleConfig& y, const ParticleConfig& z, long T,
                              const KernelSpec& kernel, const TransferCaps& caps = {});

// (1/N^2) ln P(height stays within eps of H_star and the walk ends at z).
double ball_log_probability(const ParticleConfig& y, const ParticleConfig& z, long T,
                            const HeightField& H_star, double eps, const KernelSpec& kernel,
                            const TransferCaps& caps = {});

// One exact step-by-step draw; enumerates {0,1}^N per step.
WalkEnsemble sample_forward(const ParticleConfig& y, long T, const KernelSpec& kernel,
                            uint64_t seed, long enumeration_cap = 20);

// Metropolis chain over corner flips (and endpoint moves when the right
// boundary is free). Acceptance ratios are local.
class McmcChain {
  public:
    McmcChain(const ParticleConfig& y, const std::optional<ParticleConfig>& z, long T,
              const KernelSpec& kernel, uint64_t seed, uint64_t stream = 0);

    void sweep();                       // N*(T-1) proposals (plus endpoint moves when free)
    long sweeps_done() const { return sweeps_; }
    long accepted() const { return accepted_; }
    long proposed() const { return proposed_; }

    const std::vector<std::vector<int>>& displacements() const { return d_; }
    std::vector<double> positions(long t) const;
    WalkEnsemble ensemble() const;
    double log_weight() const { return log_weight_; }
    // Recomputes the path weight from scratch; returns |stored - fresh|.
    double verify_log_weight() const;

    // Single proposed move; exposed for the locality property test.
    bool propose(long i, long t, int dir, double* log_ratio_out = nullptr,
                 bool apply_if_accepted = true, double* u_override = nullptr);

  private:
    double move_log_ratio(long i, long t, int dir) const;
    bool move_valid(long i, long t, int dir) const;

    ParticleConfig y_;
    std::optional<ParticleConfig> z_;
    long T_, N_;
    KernelSpec kernel_;
    CounterRng rng_;
    std::vector<std::vector<int>> d_;  // (T+1) x N displacements
    double log_weight_ = 0.0;
    long sweeps_ = 0, accepted_ = 0, proposed_ = 0;
};

struct McmcOptions {
    long burn_in = -1;  // default 10 * N * T
    uint64_t stream = 0;
};

WalkEnsemble sample_mcmc(const ParticleConfig& y, const ParticleConfig& z, long T,
                         const KernelSpec& kernel, long sweeps, uint64_t seed,
                         const McmcOptions& opt = {});

}  // namespace bwalk
