#include "bwalk/surface.hpp"

#include <cmath>
#include <stdexcept>

namespace bwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;

// zeta(s) for even integer s >= 2, via Euler-Maclaurin with Bernoulli
// corrections B2 = 1/6, B4 = -1/30, B6 = 1/42.
double zeta_even(int s) {
    const int M = 120;
    long double sum = 0.0L;
    for (int k = 1; k < M; ++k) sum += powl((long double)k, -(long double)s);
    long double m = M;
    long double t = powl(m, -(long double)s);
    sum += m * t / (s - 1);           // integral tail
    sum += t / 2;                     // trapezoid correction
    long double ds = s;
    sum += t / m * ds / 12.0L;                                        // B2 term
    sum -= t / (m * m * m) * ds * (ds + 1) * (ds + 2) / 720.0L;       // B4 term
    sum += t / (m * m * m * m * m) * ds * (ds + 1) * (ds + 2) * (ds + 3) * (ds + 4) / 30240.0L;
    return (double)sum;
}

// Clausen function Cl2 on [0, pi] via the zeta power series.
double clausen2(double theta) {
    if (theta == 0.0) return 0.0;
    static std::vector<double> ztab = [] {
        std::vector<double> z(81);
        for (int n = 1; n <= 80; ++n) z[n] = zeta_even(2 * n);
        return z;
    }();
    double x = theta / (2 * kPi);
    double x2 = x * x;
    double sum = 0.0, pw = x2;
    for (int n = 1; n <= 80; ++n) {
        double term = ztab[n] / (double(n) * (2 * n + 1)) * pw;
        sum += term;
        if (term < 1e-18 * (std::abs(sum) + 1.0)) break;
        pw *= x2;
    }
    return theta - theta * std::log(std::abs(theta)) + theta * sum;
}

}  // namespace

double lobachevsky(double x) {
    // Reduce by L(x + pi) = L(x), L(-x) = -L(x), L(pi - x) = -L(x).
    double r = std::fmod(x, kPi);
    if (r < 0) r += kPi;
    double sign = 1.0;
    if (r > kPi / 2) {
        r = kPi - r;
        sign = -1.0;
    }
    return sign * 0.5 * clausen2(2.0 * r);
}

double lobachevsky_fourier(double x, long K) {
    double sum = 0.0, comp = 0.0;
    for (long n = K; n >= 1; --n) {
        double term = std::sin(2.0 * double(n) * x) / (double(n) * double(n));
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return 0.5 * sum;
}

bool Slope::in_closure(double tol) const {
    return s >= -tol && s <= 1 + tol && t <= tol && s + t >= -tol;
}

double Slope::margin() const { return std::min(std::min(s, 1 - s), std::min(-t, s + t)); }

double sigma(const Slope& sl) {
    if (!sl.in_closure())
        throw std::invalid_argument("sigma: slope outside the admissible triangle");
    return (lobachevsky(kPi * (1 - sl.s)) + lobachevsky(-kPi * sl.t) +
            lobachevsky(kPi * (sl.s + sl.t))) / kPi;
}

std::pair<double, double> sigma_grad(const Slope& sl, double eta) {
    if (!sl.in_closure() || sl.margin() < eta)
        throw std::invalid_argument("sigma_grad: slope within eta of the boundary");
    double ds = std::log(std::sin(kPi * sl.s)) - std::log(std::sin(kPi * (sl.s + sl.t)));
    double dt = std::log(std::sin(-kPi * sl.t)) - std::log(std::sin(kPi * (sl.s + sl.t)));
    return {ds, dt};
}

BoundaryProfile BoundaryProfile::ramp(double x0, double slope, double mass, long n_cells,
                                      double pad) {
    if (!(slope > 0) || !(mass > 0)) throw std::invalid_argument("ramp: need positive slope, mass");
    BoundaryProfile p;
    double len = mass / slope;
    p.x0 = x0 - pad;
    p.dx = (len + 2 * pad) / double(n_cells);
    p.h.resize(n_cells + 1);
    for (long i = 0; i <= n_cells; ++i) {
        double x = p.x0 + i * p.dx;
        p.h[i] = std::min(std::max((x - x0) * slope, 0.0), mass);
    }
    return p;
}

namespace {

// Phi'' = ln|u|, Phi even, Phi(0) = 0.
inline double phi_log(double u) {
    if (u == 0.0) return 0.0;
    return 0.5 * u * u * (std::log(std::abs(u)) - 1.5);
}

void check_profile(const BoundaryProfile& h, double theta, double mass_tol) {
    if (h.h.size() < 2) throw std::invalid_argument("free_entropy: profile too short");
    if (std::abs(h.mass() - theta) > mass_tol)
        throw std::invalid_argument("free_entropy: profile mass " + std::to_string(h.mass()) +
                                    " != theta " + std::to_string(theta));
    for (size_t i = 0; i + 1 < h.h.size(); ++i)
        if (h.h[i + 1] < h.h[i] - 1e-12)
            throw std::invalid_argument("free_entropy: profile not monotone");
}

// ln((1 - e^{w})/(-w)) for w <= 0, stable near 0.
inline double log_remainder(double w) {
    if (std::abs(w) < 1e-4)
        return std::log1p(w / 2 + w * w / 6 + w * w * w / 24);
    return std::log(-std::expm1(w)) - std::log(-w);
}

}  // namespace

double free_entropy(const BoundaryProfile& h, double theta, double mass_tol) {
    check_profile(h, theta, mass_tol);
    long n = h.n_cells();
    double dx = h.dx;
    // G(k) = iint over two cells k apart of ln|x-y|.
    std::vector<double> G(n + 1);
    for (long k = 0; k <= n; ++k)
        G[k] = phi_log((k + 1) * dx) + phi_log((k - 1) * dx) - 2 * phi_log(k * dx);
    std::vector<double> rho(n);
    for (long i = 0; i < n; ++i) rho[i] = h.density(i);
    double total = 0.0;
    for (long k = 0; k <= n - 1; ++k) {
        double s = 0.0;
        for (long i = 0; i + k < n; ++i) s += rho[i] * rho[i + k];
        total += (k == 0 ? 1.0 : 2.0) * s * G[k];
    }
    return total;
}

double free_entropy_q(const BoundaryProfile& h, double kappa, double theta, double mass_tol) {
    if (!(kappa < 0)) throw std::invalid_argument("free_entropy_q: kappa must be negative");
    check_profile(h, theta, mass_tol);
    long n = h.n_cells();
    double dx = h.dx;
    // Split ln(1 - e^{kappa u}) = ln(-kappa u) + R(u); the log part reuses the
    // exact cell integral, R is handled by Gauss quadrature on the piecewise
    // linear autocorrelation C(u).
    double log_part = free_entropy(h, theta, mass_tol) + std::log(-kappa) * h.mass() * h.mass();

    std::vector<double> corr(n + 1, 0.0);  // C(k dx) = dx * sum_i rho_i rho_{i+k}
    std::vector<double> rho(n);
    for (long i = 0; i < n; ++i) rho[i] = h.density(i);
    for (long k = 0; k <= n; ++k) {
        double s = 0.0;
        for (long i = 0; i + k < n; ++i) s += rho[i] * rho[i + k];
        corr[k] = dx * s;
    }
    // 8-point Gauss-Legendre on [0,1].
    static const double gx[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                                 0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
                                 0.8983332387068134,  0.9801449282487681};
    static const double gw[8] = {0.05061426814518813, 0.11119051722668723, 0.15685332293894363,
                                 0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                                 0.11119051722668723, 0.05061426814518813};
    double smooth = 0.0;
    for (long k = 0; k < n; ++k) {
        double c0 = corr[k], c1 = corr[k + 1];
        double seg = 0.0;
        for (int g = 0; g < 8; ++g) {
            double u = (k + gx[g]) * dx;
            double cu = c0 + (c1 - c0) * gx[g];
            seg += gw[g] * log_remainder(kappa * u) * cu;
        }
        smooth += seg * dx;
    }
    return log_part + 2.0 * smooth;
}

ComplexSlope complex_slope(const Slope& sl) {
    if (!(sl.margin() > 0))
        throw std::invalid_argument("complex_slope: slope must be strictly interior");
    double mod = std::sin(-kPi * sl.t) / std::sin(kPi * (sl.s + sl.t));
    ComplexSlope c;
    c.f = std::polar(mod, -kPi * sl.s);
    return c;
}

SmoothedDriftEval smoothed_drift(double x, double t, double rho, double v, double ell,
                                 double delta) {
    if (!(delta < ell)) throw std::invalid_argument("smoothed_drift: require delta < ell");
    Slope sl{rho, -rho * v};
    if (!(sl.margin() > 0))
        throw std::invalid_argument("smoothed_drift: (rho, -rho v) must be interior");
    double a = x - t * v, b = x - ell - t * v;
    SmoothedDriftEval out;
    out.kappa = (std::atan(a / delta) - std::atan(b / delta)) / kPi;
    out.hilbert = 0.5 * (std::log(b * b + delta * delta) - std::log(a * a + delta * delta));
    double hx = rho * out.kappa;        // d_x of smoothed height
    double ht = -rho * v * out.kappa;   // d_t
    out.g = std::log(std::sin(-kPi * ht)) - std::log(std::sin(kPi * (hx + ht))) -
            rho * out.hilbert;
    out.f = std::polar(std::sin(-kPi * ht) / std::sin(kPi * (hx + ht)), -kPi * hx);
    return out;
}

}  // namespace bwalk
