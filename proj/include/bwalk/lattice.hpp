#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bwalk/rational.hpp"

namespace bwalk {

// Step parameter theta. When constructed from p/q all lattice arithmetic is
// exact; otherwise membership checks use a 1e-9 tolerance.
struct Theta {
    double value = 1.0;
    bool is_rational = false;
    long num = 1, den = 1;

    static Theta from_double(double v);
    static Theta from_fraction(long p, long q);
    static Theta parse(const std::string& s);  // "p/q" or decimal

    Rational rat() const { return Rational(num, den); }
    bool operator==(const Theta& o) const;
};

struct YoungDiagram {
    std::vector<long> rows;  // weakly decreasing, nonnegative

    YoungDiagram() = default;
    explicit YoungDiagram(std::vector<long> r);

    long n_rows() const { return static_cast<long>(rows.size()); }
    long size() const;               // number of boxes
    long row(long i) const;          // 0-based, 0 beyond the last row
    YoungDiagram transpose() const;
    bool contains(const YoungDiagram& mu) const;  // mu subset of this
    bool operator==(const YoungDiagram& o) const { return rows == o.rows; }
};

// N-point configuration on the theta lattice: x_1 > x_2 > ... > x_N with
// x_i - x_{i+1} = theta + slack_i, slack_i a nonnegative integer. The global
// offset is free (recorded implicitly in positions[0]).
struct ParticleConfig {
    Theta theta;
    std::vector<double> positions;
    std::vector<long> slack;  // size N-1

    static ParticleConfig from_positions(Theta theta, const std::vector<double>& xs);
    // Positions x_i = offset - (i-1)*theta - m_i with m weakly increasing, m_0 = 0.
    static ParticleConfig from_slack(Theta theta, double offset, const std::vector<long>& slack);

    long n() const { return static_cast<long>(positions.size()); }
    // Integer part of x_i - x_j - (j-i)*theta for i < j.
    long pair_offset(long i, long j) const;
    ParticleConfig shifted_by(const std::vector<int>& d) const;  // x + d, revalidated
    bool operator==(const ParticleConfig& o) const;
};

struct StepVector {
    std::vector<uint8_t> e;  // entries in {0,1}

    long n() const { return static_cast<long>(e.size()); }
    long total() const;
};

// x + e stays on the lattice iff no tight pair has (e_i, e_{i+1}) = (0, 1).
bool step_feasible(const ParticleConfig& x, const StepVector& e);

struct WalkEnsemble {
    Theta theta;
    ParticleConfig start;
    std::vector<StepVector> steps;  // T step vectors

    static WalkEnsemble from_configs(const std::vector<ParticleConfig>& configs);

    long n() const { return start.n(); }
    long horizon() const { return static_cast<long>(steps.size()); }
    std::vector<int> displacement(long t) const;
    ParticleConfig config(long t) const;
    std::vector<double> positions(long t) const;
};

struct GridSpec {
    double x_min = 0.0, x_max = 1.0;
    long nx = 65, nt = 2;  // node counts

    double dx() const { return (x_max - x_min) / double(nx - 1); }
};

// Rescaled height H on nodes (x_min + i*dx, j*dt), row-major in t.
struct HeightField {
    double x_min = 0, dx = 1, dt = 1;
    long nx = 0, nt = 0;
    double theta = 1, t_horizon = 0;
    bool coarse_warning = false;
    std::vector<double> H;

    double& at(long i, long j) { return H[j * nx + i]; }
    double at(long i, long j) const { return H[j * nx + i]; }
    double x_of(long i) const { return x_min + i * dx; }
    double t_of(long j) const { return j * dt; }
    // Bilinear evaluation, clamped to the grid box.
    double value(double x, double t) const;
    // inf{x : H(x,t) > y}; -inf for y < 0, +inf for y >= theta (as +/-1e300).
    double level_line(double y, double t) const;
};

// --- operations -------------------------------------------------------------

ParticleConfig diagram_to_config(const YoungDiagram& d, long N, Theta theta);
// Inverse of diagram_to_config; requires x_i + (i-1)*theta to be a
// nonnegative integer (exactly in rational mode, 1e-9 otherwise).
YoungDiagram config_to_diagram(const ParticleConfig& x);

bool path_feasible(const ParticleConfig& y, const ParticleConfig& z, long T);

// The max{y_i, z_i - (T-t)} witness path.
WalkEnsemble canonical_path(const ParticleConfig& y, const ParticleConfig& z, long T);

// Height of the rescaled-by-1/N_scale configuration at macroscopic x.
double empirical_height(const std::vector<double>& positions_micro, long N_scale, double theta,
                        double x);

HeightField height_field(const WalkEnsemble& w, long N_scale, const GridSpec& grid);

// Default grid for a walk: [min pos - theta, max pos + theta] after rescaling.
GridSpec default_grid(const WalkEnsemble& w, long N_scale, long nx = 257, long nt_per_step = 1);

// Level-line truncation of the canonical path; result height field is within
// O(eps) of H_star in sup norm.
WalkEnsemble height_to_walk(const HeightField& H_star, const ParticleConfig& y,
                            const ParticleConfig& z, long T, double eps);

}  // namespace bwalk
