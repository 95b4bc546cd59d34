#include "bwalk/loopcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace bwalk {

LoopSetup LoopSetup::identity_preset(const ParticleConfig& x, double c_plus, double c_minus) {
    LoopSetup s;
    s.x = x;
    s.b_map = [](Complex z) { return z; };
    s.phi_plus = [c_plus](Complex) { return Complex(c_plus, 0); };
    s.phi_minus = [c_minus](Complex) { return Complex(c_minus, 0); };
    s.preset_name = "identity";
    return s;
}

LoopSetup LoopSetup::qpow_preset(const ParticleConfig& x, double q, double c_plus,
                                 double c_minus) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("qpow_preset: q must be in (0,1)");
    LoopSetup s;
    s.x = x;
    double lnq = std::log(q);
    s.b_map = [lnq](Complex z) { return std::exp(lnq * z); };
    s.phi_plus = [c_plus](Complex) { return Complex(c_plus, 0); };
    s.phi_minus = [c_minus](Complex) { return Complex(c_minus, 0); };
    s.preset_name = "qpow";
    return s;
}

LoopSetup LoopSetup::exp_preset(const ParticleConfig& x, double a) {
    LoopSetup s;
    s.x = x;
    s.b_map = [](Complex z) { return z; };
    s.phi_plus = [a](Complex z) { return std::exp(a * z); };
    s.phi_minus = [](Complex) { return Complex(1, 0); };
    s.preset_name = "exp";
    return s;
}

namespace {

// Step distribution under the general kernel, by enumeration.
struct KernelTable {
    std::vector<std::vector<uint8_t>> moves;
    std::vector<double> prob;
};

KernelTable enumerate_kernel(const LoopSetup& setup) {
    const ParticleConfig& x = setup.x;
    long N = x.n();
    double theta = x.theta.value;
    KernelTable table;
    double Z = 0;
    StepVector e;
    e.e.assign(N, 0);
    for (long mask = 0; mask < (1L << N); ++mask) {
        for (long i = 0; i < N; ++i) e.e[i] = (mask >> i) & 1;
        if (!step_feasible(x, e)) continue;
        Complex w(1, 0);
        for (long i = 0; i < N; ++i)
            for (long j = i + 1; j < N; ++j) {
                Complex num = setup.b_map(x.positions[i] + theta * e.e[i]) -
                              setup.b_map(x.positions[j] + theta * e.e[j]);
                Complex den = setup.b_map(x.positions[i]) - setup.b_map(x.positions[j]);
                w *= num / den;
            }
        for (long i = 0; i < N; ++i) {
            Complex ph = e.e[i] ? setup.phi_plus(x.positions[i]) : setup.phi_minus(x.positions[i]);
            w *= ph;
        }
        if (std::abs(w.imag()) > 1e-12 * (1 + std::abs(w.real())))
            throw std::runtime_error("loop kernel: weight not real; check the preset");
        if (w.real() < 0) throw std::runtime_error("loop kernel: negative weight");
        table.moves.push_back(e.e);
        table.prob.push_back(w.real());
        Z += w.real();
    }
    if (!(Z > 0)) throw std::runtime_error("loop kernel: zero normalization");
    for (auto& p : table.prob) p /= Z;
    return table;
}

}  // namespace

Complex loop_observable(const LoopSetup& setup, Complex z, long enumeration_cap) {
    const ParticleConfig& x = setup.x;
    long N = x.n();
    if (N > enumeration_cap)
        throw std::invalid_argument("loop_observable: N above enumeration cap");
    double theta = x.theta.value;
    for (long j = 0; j < N; ++j)
        if (std::abs(z - Complex(x.positions[j], 0)) < 1e-13)
            throw std::invalid_argument("loop_observable: z collides with a particle");
    KernelTable table = enumerate_kernel(setup);
    Complex acc(0, 0);
    for (size_t m = 0; m < table.moves.size(); ++m) {
        Complex plus = setup.phi_plus(z), minus = setup.phi_minus(z);
        for (long j = 0; j < N; ++j) {
            Complex bj = setup.b_map(x.positions[j]);
            Complex bje = setup.b_map(x.positions[j] + theta * table.moves[m][j]);
            Complex bz = setup.b_map(z);
            plus *= (setup.b_map(z + theta) - bje) / (bz - bj);
            minus *= (bz - bje) / (bz - bj);
        }
        acc += table.prob[m] * (plus + minus);
    }
    return acc;
}

Complex b_function(const LoopSetup& setup, const std::vector<double>& density_support,
                   double density_value, Complex z, long quad_points) {
    if (density_support.size() != 2)
        throw std::invalid_argument("b_function: support must be [l, r]");
    double l = density_support[0], r = density_support[1];
    double theta = setup.x.theta.value;
    // G(z) = exp[theta int rho/(z-s) ds], midpoint rule.
    Complex acc(0, 0);
    double h = (r - l) / double(quad_points);
    for (long k = 0; k < quad_points; ++k) {
        double s = l + (k + 0.5) * h;
        acc += density_value / (z - s) * h;
    }
    Complex G = std::exp(theta * acc);
    return G * setup.phi_plus(z) + setup.phi_minus(z);
}

ResidueReport residue_scan(const LoopSetup& setup, double radius, long nodes) {
    ResidueReport rep;
    const double two_pi = 6.28318530717958647692;
    for (long j = 0; j < setup.x.n(); ++j) {
        Complex center(setup.x.positions[j], 0);
        Complex integral(0, 0);
        for (long k = 0; k < nodes; ++k) {
            double th = two_pi * double(k) / double(nodes);
            Complex z = center + std::polar(radius, th);
            Complex dz = Complex(0, 1) * std::polar(radius, th) * (two_pi / double(nodes));
            integral += loop_observable(setup, z) * dz;
        }
        rep.per_particle.push_back(std::abs(integral));
        rep.max_residue = std::max(rep.max_residue, std::abs(integral));
    }
    return rep;
}

}  // namespace bwalk
