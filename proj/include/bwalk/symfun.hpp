#pragma once

#include <optional>
#include <vector>

#include "bwalk/lattice.hpp"
#include "bwalk/rational.hpp"
#include "bwalk/weights.hpp"

namespace bwalk {

struct QParams {
    double q = 0.5;
    double theta = 1.0;
    double t = 0.5;  // q^theta

    static QParams make(double q, double theta);
    // q = e^{kappa/N}, kappa < 0.
    static QParams from_kappa(double kappa, long N, double theta);
};

struct PolyValue {
    int sign = 0;  // 0 means the value is exactly zero
    double log_value = 0.0;
    std::optional<Rational> exact;

    double value() const;
    static PolyValue zero();
    static PolyValue from_exact(const Rational& r);
    static PolyValue from_log(double lg, int sign = 1);
};

// J_lambda(1^N; theta): box-product and Gamma-ratio forms, cross-asserted.
PolyValue jack_principal(const YoungDiagram& d, long N, Theta theta);
// Box-product form alone (exact for rational theta).
Rational jack_principal_exact(const YoungDiagram& d, long N, Theta theta);
// Gamma-ratio form alone, log value.
double log_jack_principal_gamma(const YoungDiagram& d, long N, double theta);

// Skew Jack polynomial of the transposed pair at parameter 1/theta, evaluated
// at (b_0..b_{T-1}) through the walk path-sum identity.
PolyValue skew_jack_pathsum(const YoungDiagram& lam, const YoungDiagram& mu,
                            const DriftProfile& b, long N, Theta theta);

// Jacobi-Trudi determinant det(h_{lam_i - mu_j - i + j}); independent Schur
// oracle for the theta = 1 degeneration.
Rational schur_skew_jt(const YoungDiagram& lam, const YoungDiagram& mu,
                       const std::vector<Rational>& b);

// P_lambda(1, t, ..., t^{N-1}; q, t): Pochhammer-product and q-Gamma forms.
PolyValue macdonald_principal(const YoungDiagram& d, long N, const QParams& qp);
double log_macdonald_principal_poch(const YoungDiagram& d, long N, const QParams& qp);
double log_macdonald_principal_qgamma(const YoungDiagram& d, long N, const QParams& qp);

PolyValue skew_macdonald_pathsum(const YoungDiagram& lam, const YoungDiagram& mu,
                                 const DriftProfile& b, long N, const QParams& qp);

// ln (a; q)_infty by direct product truncation; reports pole factors.
double log_q_pochhammer(double a, double q);
double q_pochhammer(double a, double q);
// ln [(q^w; q)_infty / (q^{w+theta}; q)_infty]; stable for q up to 1 - 1e-12.
double log_qpoch_ratio(double w, double theta, double q);
double q_gamma(double x, double q);

}  // namespace bwalk
