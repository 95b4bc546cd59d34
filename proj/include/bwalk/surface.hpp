#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace bwalk {

// L(x) = -int_0^x ln|2 sin z| dz, pi-periodic and odd.
double lobachevsky(double x);
// Slow Fourier partial sum (1/2) sum_{n<=K} sin(2nx)/n^2; kept as an
// independent oracle for tests and golden-value generation.
double lobachevsky_fourier(double x, long K);

// Gradient pair (s, t): s in [0,1], t <= 0, s + t >= 0.
struct Slope {
    double s = 0, t = 0;

    bool in_closure(double tol = 1e-12) const;
    // Distance-to-boundary margin min(s, 1-s, -t, s+t).
    double margin() const;
};

// sigma(s,t) = (1/pi) (L(pi(1-s)) + L(-pi t) + L(pi(s+t))); zero on the boundary.
double sigma(const Slope& sl);

// Closed-form gradient (d_s, d_t); rejects slopes within eta of the boundary
// where the logarithms blow up.
std::pair<double, double> sigma_grad(const Slope& sl, double eta = 1e-6);

// 1-D monotone height profile h on a uniform grid; dh is the measure.
struct BoundaryProfile {
    double x0 = 0, dx = 1;
    std::vector<double> h;  // node values, nondecreasing

    long n_cells() const { return static_cast<long>(h.size()) - 1; }
    double mass() const { return h.back() - h.front(); }
    double density(long i) const { return (h[i + 1] - h[i]) / dx; }
    static BoundaryProfile ramp(double x0, double slope, double mass, long n_cells,
                                double pad = 0.0);
};

// iint ln|x-y| dh(x) dh(y), log kernel integrated exactly over cell pairs.
double free_entropy(const BoundaryProfile& h, double theta, double mass_tol = 1e-6);

// Same with kernel ln(1 - e^{kappa |x-y|}), kappa < 0.
double free_entropy_q(const BoundaryProfile& h, double kappa, double theta,
                      double mass_tol = 1e-6);

struct ComplexSlope {
    std::complex<double> f;
};

// Lower-half-plane complex slope of an interior gradient; satisfies the
// sine-law triangle relation by construction.
ComplexSlope complex_slope(const Slope& sl);

struct SmoothedDriftEval {
    double kappa;    // Cauchy-smoothed indicator, in [0,1]
    double hilbert;  // Hilbert transform of kappa (closed log form)
    double g;        // drift function
    std::complex<double> f;  // complex slope of the smoothed field
};

// Constant-slope profile (rho, -rho v) on [tv, ell+tv] smoothed at scale delta.
SmoothedDriftEval smoothed_drift(double x, double t, double rho, double v, double ell,
                                 double delta);

}  // namespace bwalk
