#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "bwalk/lattice.hpp"

namespace bwalk {

using Complex = std::complex<double>;

// Conformal map b(z) and analytic weight functions phi^+/phi^- for the
// general transition kernel. Presets keep the weights positive on the
// particle interval so the kernel is a probability measure.
struct LoopSetup {
    ParticleConfig x;
    std::function<Complex(Complex)> b_map;       // identity or z -> q^z
    std::function<Complex(Complex)> phi_plus;
    std::function<Complex(Complex)> phi_minus;
    std::string preset_name;

    static LoopSetup identity_preset(const ParticleConfig& x, double c_plus = 1.0,
                                     double c_minus = 1.0);
    static LoopSetup qpow_preset(const ParticleConfig& x, double q, double c_plus = 1.0,
                                 double c_minus = 1.0);
    // phi^+(z) = exp(a z), phi^-(z) = 1 (b = identity).
    static LoopSetup exp_preset(const ParticleConfig& x, double a);
};

// E[phi^+(z) prod_j (b(z+theta)-b(x_j+theta e_j))/(b(z)-b(x_j))
//   + phi^-(z) prod_j (b(z)-b(x_j+theta e_j))/(b(z)-b(x_j))], expectation by
// enumeration of {0,1}^N under the kernel defined by the setup.
Complex loop_observable(const LoopSetup& setup, Complex z, long enumeration_cap = 12);

// B(z) = G(z) phi^+(z) + phi^-(z) with G(z) = exp[theta int rho(s)/(z-s) ds].
Complex b_function(const LoopSetup& setup, const std::vector<double>& density_support,
                   double density_value, Complex z, long quad_points = 2000);

struct ResidueReport {
    double max_residue = 0;
    std::vector<double> per_particle;
};

// Trapezoid contour integral of the observable around each particle.
ResidueReport residue_scan(const LoopSetup& setup, double radius = 0.1, long nodes = 64);

}  // namespace bwalk
