#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bwalk/surface.hpp"

namespace bwalk {

// Height field on grid nodes (x0 + i dx, j dt), row-major in t. Cell (i,j)
// carries the forward-difference slope pair; admissibility means every cell
// slope lies in the gradient triangle.
struct AdmissibleGridField {
    double x0 = 0, dx = 1, dt = 1;
    long nx = 0, nt = 0;
    double theta = 1;
    std::vector<double> H;

    double& at(long i, long j) { return H[j * nx + i]; }
    double at(long i, long j) const { return H[j * nx + i]; }
    double x_of(long i) const { return x0 + i * dx; }
    double t_of(long j) const { return j * dt; }
    Slope cell_slope(long i, long j) const {
        return {(at(i + 1, j) - at(i, j)) / dx, (at(i, j + 1) - at(i, j)) / dt};
    }
    long n_cells_x() const { return nx - 1; }
    long n_cells_t() const { return nt - 1; }
    BoundaryProfile row_profile(long j) const;
    // Worst violation of the per-cell slope constraints.
    double max_cell_violation() const;
};

struct RateReport {
    double entropy_term = 0;       // iint sigma(grad H)
    double free_entropy_term = 0;  // (1/2)(E_T - E_0)
    double drift_term = 0;         // F^f(H)
    double J_value = 0;            // -entropy - drift - free_entropy_term
    double J_min = 0;              // optimum used for I (when available)
    double I_value = 0;
    bool converged = true;
    long iterations = 0;
    double grad_residual = 0;
    std::string log;
};

// Sum over cells of sigma(cell slope) dx dt; cells further than tol outside
// the triangle are an error, closer ones are clamped.
double entropy_functional(const AdmissibleGridField& F, double tol = 1e-8);

using DriftFn = std::function<double(double)>;  // f(s); empty = no drift

// F^f(H) by Abel summation: f enters through its increments and endpoint traces.
double drift_functional(const AdmissibleGridField& F, const DriftFn& f);

// Rate functional J = -iint sigma - F^f - (1/2)[free entropy]_0^T.
RateReport rate_J(const AdmissibleGridField& F, const DriftFn& f = {});

struct SolveOptions {
    long nx = 129, nt = 129;
    double pad = -1;              // domain padding; default theta + T
    double tol = 1e-9;            // relative objective change per iteration
    long tol_streak = 50;
    long max_grad_iters = 300;
    long max_newton_iters = 80;
    double eta = 1e-6;            // interior clip for gradient evaluations
    double feas_tol = 1e-11;
    int start = 0;                // 0 = max-corridor start, 1 = min-corridor
    bool collect_history = false;
};

struct SolveResult {
    AdmissibleGridField field;
    RateReport report;
    double objective = 0;  // iint sigma + F^f at the solution
    bool converged = false;
    long iterations = 0;
    double grad_residual = 0;
    std::vector<double> objective_history;
};

// Pointwise extremal admissible extensions of the boundary data; they bracket
// every admissible field and certify existence.
AdmissibleGridField max_corridor_extension(const BoundaryProfile& h0, const BoundaryProfile& hT,
                                           double T, double theta, long nx, long nt, double pad);
AdmissibleGridField min_corridor_extension(const BoundaryProfile& h0, const BoundaryProfile& hT,
                                           double T, double theta, long nx, long nt, double pad);

// Concave maximization of iint sigma + F^f over admissible fields with the
// given boundary rows: projected gradient phase, then damped Newton.
SolveResult solve_limit_shape(const BoundaryProfile& h0, const BoundaryProfile& hT, double T,
                              double theta, const DriftFn& f = {}, const SolveOptions& opt = {});

// Projected-gradient stationarity residual (for the Euler-Lagrange oracle).
double gradient_residual(const AdmissibleGridField& F, const DriftFn& f, double eta = 1e-6);

}  // namespace bwalk
