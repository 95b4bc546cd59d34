#include "bwalk/symfun.hpp"

#include <cmath>
#include <stdexcept>

#include "bwalk/sampler.hpp"

namespace bwalk {

QParams QParams::make(double q, double theta) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("QParams: q must be in (0,1)");
    if (!(theta > 0)) throw std::invalid_argument("QParams: theta must be positive");
    return {q, theta, std::pow(q, theta)};
}

QParams QParams::from_kappa(double kappa, long N, double theta) {
    if (!(kappa < 0)) throw std::invalid_argument("QParams: kappa must be negative");
    return make(std::exp(kappa / double(N)), theta);
}

double PolyValue::value() const { return sign == 0 ? 0.0 : double(sign) * std::exp(log_value); }

PolyValue PolyValue::zero() { return PolyValue{}; }

PolyValue PolyValue::from_exact(const Rational& r) {
    PolyValue v;
    if (r == 0) return v;
    v.sign = r > 0 ? 1 : -1;
    v.exact = r;
    Rational a = r > 0 ? r : Rational(-r);
    v.log_value = std::log(to_double(numerator(a))) - std::log(to_double(denominator(a)));
    // Large numerators lose precision through double conversion; rebuild from
    // the bit length when needed.
    if (!std::isfinite(v.log_value)) {
        auto bits = [](const BigInt& n) {
            BigInt a2 = abs(n);
            long b = 0;
            while (a2 > 0) { a2 >>= 1; ++b; }
            return b;
        };
        long bn = bits(numerator(a)), bd = bits(denominator(a));
        BigInt nn = numerator(a) >> std::max(0L, bn - 64);
        BigInt dd = denominator(a) >> std::max(0L, bd - 64);
        v.log_value = std::log(to_double(nn)) + double(std::max(0L, bn - 64)) * std::log(2.0) -
                      std::log(to_double(dd)) - double(std::max(0L, bd - 64)) * std::log(2.0);
    }
    return v;
}

PolyValue PolyValue::from_log(double lg, int sign) {
    PolyValue v;
    v.sign = sign;
    v.log_value = lg;
    return v;
}

// --- Jack ------------------------------------------------------------------

Rational jack_principal_exact(const YoungDiagram& d, long N, Theta theta) {
    if (d.n_rows() > N) return 0;
    if (!theta.is_rational)
        throw std::invalid_argument("jack_principal_exact requires rational theta");
    Rational th(theta.num, theta.den);
    YoungDiagram dt = d.transpose();
    Rational acc = 1;
    for (long i = 1; i <= d.n_rows(); ++i) {
        for (long j = 1; j <= d.rows[i - 1]; ++j) {
            long arm = d.rows[i - 1] - j;
            long leg = dt.rows[j - 1] - i;
            Rational num = Rational(N) * th + Rational(j - 1) - Rational(i - 1) * th;
            Rational den = Rational(arm) + Rational(leg) * th + th;
            acc *= num / den;
        }
    }
    return acc;
}

namespace {
double log_jack_principal_box(const YoungDiagram& d, long N, double theta) {
    YoungDiagram dt = d.transpose();
    double lg = 0;
    for (long i = 1; i <= d.n_rows(); ++i)
        for (long j = 1; j <= d.rows[i - 1]; ++j) {
            long arm = d.rows[i - 1] - j;
            long leg = dt.rows[j - 1] - i;
            lg += std::log(double(N) * theta + double(j - 1) - double(i - 1) * theta);
            lg -= std::log(double(arm) + double(leg) * theta + theta);
        }
    return lg;
}
}  // namespace

double log_jack_principal_gamma(const YoungDiagram& d, long N, double theta) {
    // Particle coordinates x_i = lambda_i - (i-1) theta, rows padded to N.
    std::vector<double> x(N);
    for (long i = 0; i < N; ++i) x[i] = double(d.row(i)) - double(i) * theta;
    double lg = 0;
    for (long i = 0; i < N; ++i)
        for (long j = i + 1; j < N; ++j)
            lg += std::lgamma(x[i] - x[j] + theta) - std::lgamma(x[i] - x[j]);
    for (long i = 1; i <= N; ++i) lg += std::lgamma(theta) - std::lgamma(double(i) * theta);
    return lg;
}

PolyValue jack_principal(const YoungDiagram& d, long N, Theta theta) {
    if (d.n_rows() > N) return PolyValue::zero();
    PolyValue v;
    if (theta.is_rational) {
        v = PolyValue::from_exact(jack_principal_exact(d, N, theta));
    } else {
        v = PolyValue::from_log(log_jack_principal_box(d, N, theta.value));
    }
    double lg2 = log_jack_principal_gamma(d, N, theta.value);
    if (std::abs(lg2 - v.log_value) > 1e-10 * (1.0 + std::abs(v.log_value)))
        throw std::runtime_error("jack_principal: box-product and Gamma-ratio forms disagree");
    return v;
}

PolyValue skew_jack_pathsum(const YoungDiagram& lam, const YoungDiagram& mu,
                            const DriftProfile& b, long N, Theta theta) {
    if (!lam.contains(mu)) return PolyValue::zero();
    long T = b.horizon();
    ParticleConfig y = diagram_to_config(mu, N, theta);
    ParticleConfig z = diagram_to_config(lam, N, theta);
    if (!path_feasible(y, z, T)) return PolyValue::zero();
    bool exact = theta.is_rational && b.has_exact();
    if (exact) {
        Rational sum = path_weight_sum(y, z, T, b);
        Rational pre = jack_principal_exact(mu, N, theta) / jack_principal_exact(lam, N, theta);
        return PolyValue::from_exact(pre * sum);
    }
    double sum = path_weight_sum_double(y, z, T, KernelSpec::drifted(b));
    double lg = std::log(sum) + log_jack_principal_box(mu, N, theta.value) -
                log_jack_principal_box(lam, N, theta.value);
    return PolyValue::from_log(lg);
}

// --- Schur oracle ------------------------------------------------------------

namespace {
// Complete homogeneous polynomials h_0..h_kmax of the finite alphabet b.
std::vector<Rational> complete_homogeneous(const std::vector<Rational>& b, long kmax) {
    std::vector<Rational> h(kmax + 1, Rational(0));
    h[0] = 1;
    for (const Rational& x : b) {
        // h_new[k] = sum_j h_old[j] x^{k-j}  via running accumulation
        for (long k = 1; k <= kmax; ++k) h[k] += x * h[k - 1];
    }
    return h;
}
}  // namespace

Rational schur_skew_jt(const YoungDiagram& lam, const YoungDiagram& mu,
                       const std::vector<Rational>& b) {
    if (!lam.contains(mu)) return 0;
    long n = lam.n_rows();
    if (n == 0) return 1;
    long kmax = lam.rows[0] + n;
    auto h = complete_homogeneous(b, kmax);
    auto hk = [&](long k) -> Rational {
        if (k < 0) return 0;
        if (k > kmax) throw std::logic_error("schur_skew_jt: index overflow");
        return h[k];
    };
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) m[i][j] = hk(lam.row(i) - mu.row(j) - i + j);
    // Gaussian elimination, exact arithmetic.
    Rational det = 1;
    for (long c = 0; c < n; ++c) {
        long p = -1;
        for (long r = c; r < n; ++r)
            if (m[r][c] != 0) { p = r; break; }
        if (p < 0) return 0;
        if (p != c) { std::swap(m[p], m[c]); det = -det; }
        det *= m[c][c];
        for (long r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rational f = m[r][c] / m[c][c];
            for (long cc = c; cc < n; ++cc) m[r][cc] -= f * m[c][cc];
        }
    }
    return det;
}

// --- q-special functions -----------------------------------------------------

double log_q_pochhammer(double a, double q) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("q_pochhammer: q must be in (0,1)");
    if (1.0 - q < 1e-4)
        throw std::invalid_argument("q_pochhammer: q too close to 1, use log_qpoch_ratio");
    double lg = 0.0, t = a;
    long k = 0;
    const long cap = 4000000;
    while (std::abs(t) > 1e-17 * (1.0 - q)) {
        double f = 1.0 - t;
        if (f <= 0)
            throw std::domain_error("q_pochhammer: nonpositive factor (pole), a q^k = " +
                                    std::to_string(t));
        lg += std::log1p(-t);
        t *= q;
        if (++k > cap) throw std::runtime_error("q_pochhammer: truncation cap exceeded");
    }
    return lg;
}

double q_pochhammer(double a, double q) { return std::exp(log_q_pochhammer(a, q)); }

double log_qpoch_ratio(double w, double theta, double q) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("log_qpoch_ratio: q must be in (0,1)");
    if (!(w > 0)) throw std::invalid_argument("log_qpoch_ratio: w must be positive");
    double eps = -std::log(q);
    // phi(w) = -sum_{n>=1} q^{nw} (1 - q^{n theta}) / (n (1 - q^n)).
    auto g = [&](double n) {
        double u = eps * n;
        return std::exp(-w * u) * (-std::expm1(-theta * u)) / (n * (-std::expm1(-u)));
    };
    const long M = 100000;
    double acc = 0.0;
    long n = 1;
    for (; n <= M; ++n) {
        double term = g(double(n));
        acc += term;
        if (term < 1e-18 * (1.0 + acc)) return -acc;
    }
    // Tail: Euler-Maclaurin with midpoint start.
    double a0 = double(M) + 0.5;
    // integral of F(u) = e^{-wu}(1-e^{-theta u})/(u(1-e^{-u})) over [eps*a0, inf)
    static const double gx[10] = {0.013046735741414128, 0.06746831665550773, 0.16029521585048778,
                                  0.2833023029353764,   0.4255628305091844,  0.5744371694908156,
                                  0.7166976970646236,   0.8397047841495122,  0.9325316833444923,
                                  0.9869532642585859};
    static const double gw[10] = {0.03333567215434407, 0.0747256745752903, 0.10954318125799103,
                                  0.13463335965499817, 0.14776211235737644, 0.14776211235737644,
                                  0.13463335965499817, 0.10954318125799103, 0.0747256745752903,
                                  0.03333567215434407};
    auto F = [&](double u) {
        return std::exp(-w * u) * (-std::expm1(-theta * u)) / (u * (-std::expm1(-u)));
    };
    double lo = eps * a0, integral = 0.0;
    double hi = lo < 1.0 ? 2.0 * lo : lo + 1.0;
    for (int panel = 0; panel < 600; ++panel) {
        double seg = 0.0;
        for (int i = 0; i < 10; ++i) seg += gw[i] * F(lo + gx[i] * (hi - lo));
        seg *= (hi - lo);
        integral += seg;
        if (seg < 1e-19 * (1.0 + acc + integral) && lo > 1.0) break;
        lo = hi;
        hi = lo < 1.0 ? 2.0 * lo : lo + 1.0;
    }
    double tail = integral / 1.0 + (g(double(M) + 1.0) - g(double(M))) / 24.0;
    return -(acc + tail);
}

double q_gamma(double x, double q) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("q_gamma: q must be in (0,1)");
    double qx = std::pow(q, x);
    if (qx >= 1.0)
        throw std::domain_error("q_gamma: q^x >= 1 (pole at nonpositive x)");
    double lg = (1.0 - x) * std::log1p(-q) + log_q_pochhammer(q, q) - log_q_pochhammer(qx, q);
    return std::exp(lg);
}

// --- Macdonald ---------------------------------------------------------------

double log_macdonald_principal_poch(const YoungDiagram& d, long N, const QParams& qp) {
    double lnt = qp.theta * std::log(qp.q);
    double lg = 0;
    for (long i = 0; i < N; ++i) lg += double(i) * double(d.row(i)) * lnt;
    for (long i = 0; i < N; ++i)
        for (long j = i + 1; j < N; ++j) {
            double gap = double(d.row(i) - d.row(j));
            double tc = std::exp(double(j - i) * lnt);       // t^{j-i}
            double tc1 = std::exp(double(j - i + 1) * lnt);  // t^{j-i+1}
            double qg = std::pow(qp.q, gap);
            lg += log_q_pochhammer(qg * tc, qp.q) - log_q_pochhammer(qg * tc1, qp.q);
            lg += log_q_pochhammer(tc1, qp.q) - log_q_pochhammer(tc, qp.q);
        }
    return lg;
}

double log_macdonald_principal_qgamma(const YoungDiagram& d, long N, const QParams& qp) {
    double lnq = std::log(qp.q);
    double th = qp.theta;
    double lg = 0;
    for (long i = 0; i < N; ++i) lg += th * double(i) * double(d.row(i)) * lnq;
    for (long i = 0; i < N; ++i)
        for (long j = i + 1; j < N; ++j) {
            double xdiff = double(d.row(i) - d.row(j)) + th * double(j - i);
            lg += log_qpoch_ratio(xdiff, th, qp.q) - log_qpoch_ratio(th * double(j - i), th, qp.q);
        }
    return lg;
}

PolyValue macdonald_principal(const YoungDiagram& d, long N, const QParams& qp) {
    if (d.n_rows() > N) return PolyValue::zero();
    double lg = log_macdonald_principal_qgamma(d, N, qp);
    if (1.0 - qp.q >= 1e-3) {
        double lg2 = log_macdonald_principal_poch(d, N, qp);
        if (std::abs(lg2 - lg) > 1e-9 * (1.0 + std::abs(lg)))
            throw std::runtime_error("macdonald_principal: Pochhammer and q-Gamma forms disagree");
        lg = lg2;
    }
    return PolyValue::from_log(lg);
}

PolyValue skew_macdonald_pathsum(const YoungDiagram& lam, const YoungDiagram& mu,
                                 const DriftProfile& b, long N, const QParams& qp) {
    if (!lam.contains(mu)) return PolyValue::zero();
    long T = b.horizon();
    Theta th = Theta::from_double(qp.theta);
    ParticleConfig y = diagram_to_config(mu, N, th);
    ParticleConfig z = diagram_to_config(lam, N, th);
    if (!path_feasible(y, z, T)) return PolyValue::zero();
    double sum = path_weight_sum_double(y, z, T, KernelSpec::macdonald(b, qp.q));
    double lg = std::log(sum) + log_macdonald_principal_qgamma(mu, N, qp) -
                log_macdonald_principal_qgamma(lam, N, qp);
    return PolyValue::from_log(lg);
}

}  // namespace bwalk
