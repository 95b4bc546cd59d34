#include "bwalk/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bwalk {

KernelSpec KernelSpec::plain(long T) { return {DriftProfile::ones(T), false, 0.5}; }
KernelSpec KernelSpec::drifted(DriftProfile d) { return {std::move(d), false, 0.5}; }
KernelSpec KernelSpec::macdonald(DriftProfile d, double q) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("KernelSpec: q must be in (0,1)");
    return {std::move(d), true, q};
}

bool CorridorSpec::admits(const std::vector<double>& xs, double theta, double t_macro) const {
    if (!active()) return true;
    double w = theta / double(N_scale);
    auto diff_at = [&](double x) {
        double h = 0;
        for (double p : xs) h += std::min(std::max(x - p / double(N_scale), 0.0), w);
        return std::abs(h - target->value(x, t_macro));
    };
    // Sup of |piecewise-linear - piecewise-linear| is attained at a breakpoint
    // of either function.
    for (double p : xs) {
        double xi = p / double(N_scale);
        if (diff_at(xi) > eps || diff_at(xi + w) > eps) return false;
    }
    for (long i = 0; i < target->nx; ++i)
        if (diff_at(target->x_of(i)) > eps) return false;
    return true;
}

namespace {

struct WeightOps {
    // Scalar helpers specialised on the mass type.
    static void add(Rational& a, const Rational& b) { a += b; }
    static void add(double& a, double b) { a += b; }
};

template <typename W>
struct StepContext {
    long N;
    Theta theta;
    bool q_mode = false;
    double lnq = 0;
    std::vector<long> Sy;           // prefix sums of base slack, size N
    // Per-step data
    double b = 1.0;
    Rational b_exact = 1;
    W norm{};                        // step normalization (probability mode), W(0) = weight mode
    bool normalize = false;
};

template <typename W>
W pair_factor_w(const StepContext<W>& ctx, long c, long n, int de, int eb);

template <>
Rational pair_factor_w(const StepContext<Rational>& ctx, long c, long n, int de, int) {
    return pair_factor_exact(ctx.theta.num, ctx.theta.den, c, n, de);
}
template <>
double pair_factor_w(const StepContext<double>& ctx, long c, long n, int de, int eb) {
    if (!ctx.q_mode) return pair_factor(ctx.theta.value, c, n, de);
    return std::exp(log_pair_factor_q(ctx.theta.value, ctx.lnq, c, n, de, eb));
}

template <typename W>
W drift_pow(const StepContext<W>& ctx, long k);
template <>
Rational drift_pow(const StepContext<Rational>& ctx, long k) {
    return rational_pow(ctx.b_exact, k);
}
template <>
double drift_pow(const StepContext<double>& ctx, long k) {
    return std::pow(ctx.b, double(k));
}

// Enumerates feasible steps e from the configuration y + d, passing the step
// weight (Vandermonde or q ratio, times drift and normalization) to sink.
template <typename W, typename Sink>
void enumerate_steps(const StepContext<W>& ctx, const std::vector<int16_t>& d,
                     const std::vector<int>& emin, const std::vector<int>& emax, Sink&& sink) {
    long N = ctx.N;
    std::vector<uint8_t> e(N, 0);
    std::vector<W> partial(N + 1);
    partial[0] = W(1);
    // adjacency slack at this configuration
    std::vector<long> adj(N > 1 ? N - 1 : 0);
    for (long i = 0; i + 1 < N; ++i)
        adj[i] = (ctx.Sy[i + 1] - ctx.Sy[i]) + d[i] - d[i + 1];

    std::function<void(long, long)> rec = [&](long i, long ones) {
        if (i == N) {
            W w = partial[N] * drift_pow(ctx, ones);
            sink(e, w);
            return;
        }
        for (int v = emin[i]; v <= emax[i]; ++v) {
            // Tight-pair rule: blocked trailing jump.
            if (v == 1 && i > 0 && adj[i - 1] == 0 && e[i - 1] == 0) continue;
            e[i] = static_cast<uint8_t>(v);
            W w = partial[i];
            for (long j = 0; j < i; ++j) {
                int de = int(e[j]) - v;
                if (de != 0 || (ctx.q_mode && v != 0)) {
                    long c = i - j;
                    long n = (ctx.Sy[i] - ctx.Sy[j]) + d[j] - d[i];
                    w = w * pair_factor_w(ctx, c, n, de, v);
                }
            }
            partial[i + 1] = w;
            rec(i + 1, ones + v);
        }
        e[i] = 0;
    };
    rec(0, 0);
}

template <typename W>
StepContext<W> make_context(const ParticleConfig& y, const KernelSpec& kernel);

template <>
StepContext<Rational> make_context(const ParticleConfig& y, const KernelSpec& kernel) {
    if (kernel.q_mode)
        throw std::invalid_argument("rational transfer mode does not support the q kernel");
    if (!y.theta.is_rational)
        throw std::invalid_argument("rational transfer mode requires rational theta");
    if (!kernel.drift.has_exact())
        throw std::invalid_argument("rational transfer mode requires exact drift values");
    StepContext<Rational> ctx;
    ctx.N = y.n();
    ctx.theta = y.theta;
    ctx.Sy.assign(ctx.N, 0);
    for (long i = 0; i + 1 < ctx.N; ++i) ctx.Sy[i + 1] = ctx.Sy[i] + y.slack[i];
    return ctx;
}
template <>
StepContext<double> make_context(const ParticleConfig& y, const KernelSpec& kernel) {
    StepContext<double> ctx;
    ctx.N = y.n();
    ctx.theta = y.theta;
    ctx.q_mode = kernel.q_mode;
    ctx.lnq = kernel.q_mode ? std::log(kernel.q) : 0.0;
    ctx.Sy.assign(ctx.N, 0);
    for (long i = 0; i + 1 < ctx.N; ++i) ctx.Sy[i + 1] = ctx.Sy[i] + y.slack[i];
    return ctx;
}

template <typename W>
void set_step(StepContext<W>& ctx, const KernelSpec& kernel, long t, bool normalize);

template <>
void set_step(StepContext<Rational>& ctx, const KernelSpec& kernel, long t, bool normalize) {
    ctx.b_exact = kernel.drift.b_exact[t];
    ctx.b = kernel.drift.b[t];
    ctx.normalize = normalize;
    if (normalize) ctx.norm = rational_pow(Rational(1) + ctx.b_exact, ctx.N);
}
template <>
void set_step(StepContext<double>& ctx, const KernelSpec& kernel, long t, bool normalize) {
    ctx.b = kernel.drift.b[t];
    ctx.normalize = normalize;
    if (normalize) {
        if (ctx.q_mode)
            ctx.norm = macdonald_normalization(ctx.N, ctx.b, std::pow(kernel.q, ctx.theta.value));
        else
            ctx.norm = std::pow(1.0 + ctx.b, double(ctx.N));
    }
}

}  // namespace

template <typename W>
SliceMap<W> TransferResult<W>::conditional(long t) const {
    SliceMap<W> out;
    if (beta.empty()) throw std::logic_error("conditional: backward pass not available");
    for (const auto& [k, a] : alpha[t]) {
        auto it = beta[t].find(k);
        if (it == beta[t].end()) continue;
        W m = a * it->second;
        if (!(m == W(0))) out[k] = m / total;
    }
    return out;
}

template <typename W>
double TransferResult<W>::mean_height(long t, long N_scale, double x) const {
    auto cond = conditional(t);
    double acc = 0.0;
    for (const auto& [k, m] : cond) {
        std::vector<double> xs(y.n());
        for (long i = 0; i < y.n(); ++i) xs[i] = y.positions[i] + k.d[i];
        double mm;
        if constexpr (std::is_same_v<W, Rational>)
            mm = to_double(m);
        else
            mm = m;
        acc += mm * empirical_height(xs, N_scale, y.theta.value, x);
    }
    return acc;
}

template <typename W>
TransferResult<W> transfer_pass(const ParticleConfig& y, const std::optional<ParticleConfig>& z,
                                long T, const KernelSpec& kernel, TransferMode mode,
                                const CorridorSpec& corridor, const TransferCaps& caps) {
    long N = y.n();
    if (kernel.drift.horizon() != T)
        throw std::invalid_argument("transfer_pass: drift length != T");
    std::vector<long> D;  // displacement targets
    if (z) {
        if (!path_feasible(y, *z, T))
            throw std::invalid_argument("transfer_pass: endpoints not connectable");
        D.resize(N);
        for (long i = 0; i < N; ++i)
            D[i] = std::lround(z->positions[i] - y.positions[i]);
    }
    auto ctx = make_context<W>(y, kernel);
    bool normalize = mode == TransferMode::Probability;

    TransferResult<W> res;
    res.y = y;
    res.z = z;
    res.T = T;
    res.alpha.resize(T + 1);
    StateKey start;
    start.d.assign(N, 0);
    auto positions_of = [&](const StateKey& k) {
        std::vector<double> xs(N);
        for (long i = 0; i < N; ++i) xs[i] = y.positions[i] + k.d[i];
        return xs;
    };
    if (corridor.active() && !corridor.admits(positions_of(start), y.theta.value, 0.0))
        throw std::invalid_argument("transfer_pass: start configuration violates the corridor");
    res.alpha[0][start] = W(1);
    res.states_total = 1;

    std::vector<int> emin(N), emax(N);
    for (long t = 0; t < T; ++t) {
        set_step(ctx, kernel, t, normalize);
        auto& cur = res.alpha[t];
        auto& nxt = res.alpha[t + 1];
        for (const auto& [key, mass] : cur) {
            for (long i = 0; i < N; ++i) {
                emin[i] = 0;
                emax[i] = 1;
                if (z) {
                    long rem = D[i] - key.d[i];  // jumps still needed
                    emin[i] = std::max<long>(0, rem - (T - t - 1));
                    emax[i] = std::min<long>(1, rem);
                    if (emin[i] > emax[i]) { emin[i] = 1; emax[i] = 0; }  // dead branch
                }
            }
            enumerate_steps(ctx, key.d, emin, emax,
                            [&](const std::vector<uint8_t>& e, const W& w) {
                                StateKey nk = key;
                                for (long i = 0; i < N; ++i) nk.d[i] += e[i];
                                W contrib = mass * w;
                                if (ctx.normalize) contrib = contrib / ctx.norm;
                                auto [it, fresh] = nxt.try_emplace(std::move(nk), W(0));
                                it->second += contrib;
                            });
        }
        if (corridor.active()) {
            double tm = double(t + 1) / double(corridor.N_scale);
            for (auto it = nxt.begin(); it != nxt.end();)
                if (!corridor.admits(positions_of(it->first), y.theta.value, tm))
                    it = nxt.erase(it);
                else
                    ++it;
        }
        res.states_total += static_cast<long>(nxt.size());
        if (res.states_total > caps.max_states_total)
            throw std::runtime_error("transfer_pass: state explosion, " +
                                     std::to_string(res.states_total) + " states exceeds cap " +
                                     std::to_string(caps.max_states_total));
    }

    // Endpoint mass.
    res.total = W(0);
    if (z) {
        StateKey zk;
        zk.d.resize(N);
        for (long i = 0; i < N; ++i) zk.d[i] = static_cast<int16_t>(D[i]);
        auto it = res.alpha[T].find(zk);
        if (it != res.alpha[T].end()) res.total = it->second;
        // Backward pass for conditional marginals.
        res.beta.assign(T + 1, SliceMap<W>{});
        res.beta[T][zk] = W(1);
        for (long t = T - 1; t >= 0; --t) {
            set_step(ctx, kernel, t, normalize);
            for (const auto& [key, amass] : res.alpha[t]) {
                (void)amass;
                for (long i = 0; i < N; ++i) {
                    long rem = D[i] - key.d[i];
                    emin[i] = std::max<long>(0, rem - (T - t - 1));
                    emax[i] = std::min<long>(1, rem);
                    if (emin[i] > emax[i]) { emin[i] = 1; emax[i] = 0; }
                }
                W acc = W(0);
                enumerate_steps(ctx, key.d, emin, emax,
                                [&](const std::vector<uint8_t>& e, const W& w) {
                                    StateKey nk = key;
                                    for (long i = 0; i < N; ++i) nk.d[i] += e[i];
                                    auto it2 = res.beta[t + 1].find(nk);
                                    if (it2 == res.beta[t + 1].end()) return;
                                    W contrib = w * it2->second;
                                    if (ctx.normalize) contrib = contrib / ctx.norm;
                                    acc += contrib;
                                });
                if (!(acc == W(0))) res.beta[t][key] = acc;
            }
        }
    } else {
        for (const auto& [k, m] : res.alpha[T]) res.total += m;
    }
    return res;
}

template struct TransferResult<Rational>;
template struct TransferResult<double>;
template TransferResult<Rational> transfer_pass<Rational>(const ParticleConfig&,
                                                           const std::optional<ParticleConfig>&,
                                                           long, const KernelSpec&, TransferMode,
                                                           const CorridorSpec&,
                                                           const TransferCaps&);
template TransferResult<double> transfer_pass<double>(const ParticleConfig&,
                                                      const std::optional<ParticleConfig>&, long,
                                                      const KernelSpec&, TransferMode,
                                                      const CorridorSpec&, const TransferCaps&);

TransferResult<Rational> exact_distribution(const ParticleConfig& y, const ParticleConfig& z,
                                            long T, const KernelSpec& kernel,
                                            const TransferCaps& caps) {
    return transfer_pass<Rational>(y, z, T, kernel, TransferMode::Probability, {}, caps);
}

TransferResult<double> exact_distribution_double(const ParticleConfig& y, const ParticleConfig& z,
                                                 long T, const KernelSpec& kernel,
                                                 const CorridorSpec& corridor,
                                                 const TransferCaps& caps) {
    return transfer_pass<double>(y, z, T, kernel, TransferMode::Probability, corridor, caps);
}

Rational path_weight_sum(const ParticleConfig& y, const ParticleConfig& z, long T,
                         const DriftProfile& drift, const TransferCaps& caps) {
    KernelSpec k = KernelSpec::drifted(drift);
    auto res = transfer_pass<Rational>(y, z, T, k, TransferMode::Weight, {}, caps);
    return res.total;
}

double path_weight_sum_double(const ParticleConfig& y, const ParticleConfig& z, long T,
                              const KernelSpec& kernel, const TransferCaps& caps) {
    auto res = transfer_pass<double>(y, z, T, kernel, TransferMode::Weight, {}, caps);
    return res.total;
}

double ball_log_probability(const ParticleConfig& y, const ParticleConfig& z, long T,
                            const HeightField& H_star, double eps, const KernelSpec& kernel,
                            const TransferCaps& caps) {
    CorridorSpec corridor;
    corridor.target = &H_star;
    corridor.eps = eps;
    corridor.N_scale = y.n();
    auto res = transfer_pass<double>(y, z, T, kernel, TransferMode::Probability, corridor, caps);
    if (res.total <= 0) return -std::numeric_limits<double>::infinity();
    return std::log(res.total) / (double(y.n()) * double(y.n()));
}

WalkEnsemble sample_forward(const ParticleConfig& y, long T, const KernelSpec& kernel,
                            uint64_t seed, long enumeration_cap) {
    long N = y.n();
    if (N > enumeration_cap)
        throw std::invalid_argument("sample_forward: N exceeds enumeration cap; use sample_mcmc");
    if (kernel.drift.horizon() != T)
        throw std::invalid_argument("sample_forward: drift length != T");
    CounterRng rng(seed);
    auto ctx = make_context<double>(y, kernel);
    WalkEnsemble w;
    w.theta = y.theta;
    w.start = y;
    std::vector<int16_t> d(N, 0);
    std::vector<int> emin(N, 0), emax(N, 1);
    for (long t = 0; t < T; ++t) {
        set_step(ctx, kernel, t, false);
        std::vector<std::vector<uint8_t>> moves;
        std::vector<double> weights;
        enumerate_steps(ctx, d, emin, emax, [&](const std::vector<uint8_t>& e, double wgt) {
            moves.push_back(e);
            weights.push_back(wgt);
        });
        double Z = 0;
        for (double v : weights) Z += v;
        double u = rng.next_double() * Z;
        size_t pick = 0;
        double acc = 0;
        for (size_t idx = 0; idx < weights.size(); ++idx) {
            acc += weights[idx];
            if (u <= acc) { pick = idx; break; }
            pick = idx;
        }
        StepVector sv;
        sv.e = moves[pick];
        for (long i = 0; i < N; ++i) d[i] += sv.e[i];
        w.steps.push_back(std::move(sv));
    }
    return w;
}

// ---------------------------------------------------------------------------
// MCMC

McmcChain::McmcChain(const ParticleConfig& y, const std::optional<ParticleConfig>& z, long T,
                     const KernelSpec& kernel, uint64_t seed, uint64_t stream)
    : y_(y), z_(z), T_(T), N_(y.n()), kernel_(kernel), rng_(seed, stream) {
    if (kernel_.drift.horizon() != T) throw std::invalid_argument("McmcChain: drift length != T");
    WalkEnsemble init = z_ ? canonical_path(y_, *z_, T_) : canonical_path(y_, y_, T_);
    d_.assign(T_ + 1, std::vector<int>(N_, 0));
    for (long t = 0; t <= T_; ++t) {
        auto dd = init.displacement(t);
        for (long i = 0; i < N_; ++i) d_[t][i] = dd[i];
    }
    PathWeightOptions opt;
    opt.mode = kernel_.q_mode ? WeightMode::Macdonald : WeightMode::Plain;
    opt.q = kernel_.q;
    log_weight_ = path_weight(init, kernel_.drift, opt).log_value;
}

std::vector<double> McmcChain::positions(long t) const {
    std::vector<double> xs(N_);
    for (long i = 0; i < N_; ++i) xs[i] = y_.positions[i] + d_[t][i];
    return xs;
}

WalkEnsemble McmcChain::ensemble() const {
    WalkEnsemble w;
    w.theta = y_.theta;
    w.start = y_;
    for (long t = 0; t < T_; ++t) {
        StepVector e;
        e.e.resize(N_);
        for (long i = 0; i < N_; ++i) e.e[i] = static_cast<uint8_t>(d_[t + 1][i] - d_[t][i]);
        w.steps.push_back(std::move(e));
    }
    return w;
}

double McmcChain::verify_log_weight() const {
    PathWeightOptions opt;
    opt.mode = kernel_.q_mode ? WeightMode::Macdonald : WeightMode::Plain;
    opt.q = kernel_.q;
    return std::abs(path_weight(ensemble(), kernel_.drift, opt).log_value - log_weight_);
}

bool McmcChain::move_valid(long i, long t, int dir) const {
    if (t < 1 || t > T_ || (t == T_ && z_)) return false;
    int e_prev = d_[t][i] - d_[t - 1][i];
    if (e_prev + dir < 0 || e_prev + dir > 1) return false;
    if (t < T_) {
        int e_next = d_[t + 1][i] - d_[t][i];
        if (e_next - dir < 0 || e_next - dir > 1) return false;
    }
    // Lattice order at slice t.
    if (dir > 0 && i > 0) {
        long adj = y_.slack[i - 1] + d_[t][i - 1] - d_[t][i];
        if (adj < 1) return false;
    }
    if (dir < 0 && i + 1 < N_) {
        long adj = y_.slack[i] + d_[t][i] - d_[t][i + 1];
        if (adj < 1) return false;
    }
    return true;
}

double McmcChain::move_log_ratio(long i, long t, int dir) const {
    double theta = y_.theta.value;
    double lnq = kernel_.q_mode ? std::log(kernel_.q) : 0.0;
    // log of one pair factor for particles (hi, lo) by index (hi < lo, higher
    // position first): xa > xb.
    auto lf = [&](double xa, double xb, int ea, int eb) {
        if (!kernel_.q_mode) {
            return std::log(((xa - xb) + theta * double(ea - eb)) / (xa - xb));
        }
        double a = (xa - xb) * lnq;
        double ap = a + theta * double(ea - eb) * lnq;
        return theta * double(eb) * lnq + std::log(-std::expm1(ap)) - std::log(-std::expm1(a));
    };
    double lr = 0.0;
    auto xm = positions(t - 1);
    auto xt = positions(t);
    int ei_prev = d_[t][i] - d_[t - 1][i];
    double xi_new = xt[i] + dir;
    for (long j = 0; j < N_; ++j) {
        if (j == i) continue;
        int ej_prev = d_[t][j] - d_[t - 1][j];
        // step t-1: only the increment of particle i changes
        if (i < j)
            lr += lf(xm[i], xm[j], ei_prev + dir, ej_prev) - lf(xm[i], xm[j], ei_prev, ej_prev);
        else
            lr += lf(xm[j], xm[i], ej_prev, ei_prev + dir) - lf(xm[j], xm[i], ej_prev, ei_prev);
    }
    if (t < T_) {
        int ei_next = d_[t + 1][i] - d_[t][i];
        for (long j = 0; j < N_; ++j) {
            if (j == i) continue;
            int ej_next = d_[t + 1][j] - d_[t][j];
            if (i < j)
                lr += lf(xi_new, xt[j], ei_next - dir, ej_next) - lf(xt[i], xt[j], ei_next, ej_next);
            else
                lr += lf(xt[j], xi_new, ej_next, ei_next - dir) - lf(xt[j], xt[i], ej_next, ei_next);
        }
        lr += double(dir) * (std::log(kernel_.drift.b[t - 1]) - std::log(kernel_.drift.b[t]));
    } else {
        lr += double(dir) * std::log(kernel_.drift.b[t - 1]);
    }
    return lr;
}

bool McmcChain::propose(long i, long t, int dir, double* log_ratio_out, bool apply_if_accepted,
                        double* u_override) {
    ++proposed_;
    if (!move_valid(i, t, dir)) return false;
    double lr = move_log_ratio(i, t, dir);
    if (log_ratio_out) *log_ratio_out = lr;
    double u = u_override ? *u_override : rng_.next_double();
    if (std::log(u) <= lr) {
        if (apply_if_accepted) {
            d_[t][i] += dir;
            log_weight_ += lr;
            ++accepted_;
        }
        return true;
    }
    return false;
}

void McmcChain::sweep() {
    long interior = N_ * std::max<long>(T_ - 1, 0);
    long endpoint = z_ ? 0 : N_;
    long total = interior + endpoint;
    for (long m = 0; m < total; ++m) {
        long pick = static_cast<long>(rng_.next_below(static_cast<uint64_t>(total)));
        int dir = rng_.next_bool() ? 1 : -1;
        long i, t;
        if (pick < interior) {
            i = pick % N_;
            t = 1 + pick / N_;
        } else {
            i = pick - interior;
            t = T_;
        }
        propose(i, t, dir);
    }
    ++sweeps_;
}

WalkEnsemble sample_mcmc(const ParticleConfig& y, const ParticleConfig& z, long T,
                         const KernelSpec& kernel, long sweeps, uint64_t seed,
                         const McmcOptions& opt) {
    if (!path_feasible(y, z, T)) throw std::invalid_argument("sample_mcmc: infeasible endpoints");
    McmcChain chain(y, z, T, kernel, seed, opt.stream);
    long burn = opt.burn_in >= 0 ? opt.burn_in : (sweeps > 0 ? 10 * y.n() * T : 0);
    for (long s = 0; s < burn + sweeps; ++s) chain.sweep();
    return chain.ensemble();
}

}  // namespace bwalk
