#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "bwalk/lattice.hpp"
#include "bwalk/rational.hpp"

namespace bwalk {

struct StepWeight {
    bool feasible = false;
    double log_value = -std::numeric_limits<double>::infinity();
    std::optional<Rational> exact;  // set when theta is rational

    double value() const { return feasible ? std::exp(log_value) : 0.0; }
};

// Per-step drift b_t > 0. Exact values are kept when available so plain-mode
// path weights stay rational.
struct DriftProfile {
    std::vector<double> b;
    std::vector<Rational> b_exact;  // empty or same size as b

    static DriftProfile ones(long T);
    static DriftProfile constant(double v, long T);
    static DriftProfile constant_exact(const Rational& v, long T);
    static DriftProfile from_rationals(const std::vector<Rational>& vs);
    // b_t = exp(f(t/N)).
    static DriftProfile from_function(const std::function<double(double)>& f, long T, long N);

    long horizon() const { return static_cast<long>(b.size()); }
    bool has_exact() const { return !b_exact.empty(); }
};

// One pair's contribution to V(x + theta*e)/V(x), with x_i - x_j = c*theta + n.
inline double pair_factor(double theta, long c, long n, int de) {
    return (double(c + de) * theta + double(n)) / (double(c) * theta + double(n));
}
// Same factor as an exact rational for theta = p/q.
inline Rational pair_factor_exact(long p, long q, long c, long n, int de) {
    return Rational(BigInt(p) * (c + de) + BigInt(q) * n, BigInt(p) * c + BigInt(q) * n);
}
// Macdonald pair factor (q^{x_i+theta e_i} - q^{x_j+theta e_j})/(q^{x_i} - q^{x_j})
// in log space; lnq < 0. Requires the pair to stay ordered (feasible step).
inline double log_pair_factor_q(double theta, double lnq, long c, long n, int de, int ej) {
    double a = (double(c) * theta + double(n)) * lnq;           // < 0
    double ap = a + theta * double(de) * lnq;                   // <= 0, = 0 only if infeasible
    return theta * double(ej) * lnq + std::log(-std::expm1(ap)) - std::log(-std::expm1(a));
}

// V(x + theta*e)/V(x); feasibility decided combinatorially before any division.
StepWeight vandermonde_ratio(const ParticleConfig& x, const StepVector& e);

// Sum of the ratio over all e with |e| = k; equals binomial(N, k).
Rational level_sum(const ParticleConfig& x, long k, long enumeration_cap = 20);

double kernel_plain(const ParticleConfig& x, const StepVector& e);
Rational kernel_plain_exact(const ParticleConfig& x, const StepVector& e);

double kernel_drifted(const ParticleConfig& x, const StepVector& e, double b);
Rational kernel_drifted_exact(const ParticleConfig& x, const StepVector& e, const Rational& b);

// log of the q-deformed step weight (without drift), -inf if infeasible.
double log_weight_macdonald(const ParticleConfig& x, const StepVector& e, double q);
// prod_{i=1}^{N} (1 + b t^{i-1}) with t = q^theta.
double macdonald_normalization(long N, double b, double t);
// Probability under the q-kernel. For N <= 10 the factorized normalization is
// recomputed by brute force and asserted against (derived-from-oracle identity).
double kernel_macdonald(const ParticleConfig& x, const StepVector& e, double q, double b);

enum class WeightMode { Plain, Macdonald };

struct PathWeight {
    bool zero = false;
    double log_value = 0.0;
    std::optional<Rational> exact;
};

struct PathWeightOptions {
    WeightMode mode = WeightMode::Plain;
    double q = 0.5;                   // Macdonald mode only
    long exact_pair_cap = 1000000;    // switch to log-only beyond this many pair factors
};

// W(p; b): product over steps of the Vandermonde (or q-) ratio times
// prod_i b_t^{e_i(t)}. Log accumulation uses compensated summation.
PathWeight path_weight(const WalkEnsemble& w, const DriftProfile& drift,
                       const PathWeightOptions& opt = {});

}  // namespace bwalk
