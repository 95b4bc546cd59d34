#include "bwalk/variational.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bwalk {

namespace {
constexpr double kPi = 3.14159265358979323846;

Slope clip_slope(Slope sl, double eta) {
    sl.s = std::min(std::max(sl.s, 2 * eta), 1 - eta);
    sl.t = std::min(sl.t, -eta);
    sl.t = std::max(sl.t, eta - sl.s);
    return sl;
}

struct SigmaDerivs {
    double v, ds, dt, dss, dst, dtt;
};

SigmaDerivs sigma_derivs(const Slope& sl) {
    SigmaDerivs d;
    double s = sl.s, t = sl.t;
    d.v = sigma(sl);
    double ls = std::log(std::sin(kPi * s));
    double lt = std::log(std::sin(-kPi * t));
    double lst = std::log(std::sin(kPi * (s + t)));
    d.ds = ls - lst;
    d.dt = lt - lst;
    double cot_s = 1.0 / std::tan(kPi * s);
    double cot_t = 1.0 / std::tan(-kPi * t);
    double cot_st = 1.0 / std::tan(kPi * (s + t));
    d.dss = kPi * (cot_s - cot_st);
    d.dst = -kPi * cot_st;
    d.dtt = -kPi * (cot_t + cot_st);
    return d;
}
}  // namespace

BoundaryProfile AdmissibleGridField::row_profile(long j) const {
    BoundaryProfile p;
    p.x0 = x0;
    p.dx = dx;
    p.h.resize(nx);
    for (long i = 0; i < nx; ++i) p.h[i] = at(i, j);
    return p;
}

double AdmissibleGridField::max_cell_violation() const {
    double worst = 0;
    for (long j = 0; j + 1 < nt; ++j)
        for (long i = 0; i + 1 < nx; ++i) {
            Slope sl = cell_slope(i, j);
            worst = std::max(worst, -sl.s);
            worst = std::max(worst, sl.s - 1);
            worst = std::max(worst, sl.t);
            worst = std::max(worst, -(sl.s + sl.t));
        }
    return worst;
}

double entropy_functional(const AdmissibleGridField& F, double tol) {
    double viol = F.max_cell_violation();
    if (viol > tol)
        throw std::invalid_argument("entropy_functional: cell slope violates the triangle by " +
                                    std::to_string(viol));
    double acc = 0;
    for (long j = 0; j + 1 < F.nt; ++j)
        for (long i = 0; i + 1 < F.nx; ++i) {
            Slope sl = F.cell_slope(i, j);
            sl.s = std::min(std::max(sl.s, 0.0), 1.0);
            sl.t = std::min(sl.t, 0.0);
            sl.t = std::max(sl.t, -sl.s);
            acc += sigma(sl);
        }
    return acc * F.dx * F.dt;
}

double drift_functional(const AdmissibleGridField& F, const DriftFn& f) {
    if (!f) return 0.0;
    long J = F.nt - 1;
    std::vector<double> M(F.nt, 0.0);  // column mass integral per time row
    for (long j = 0; j < F.nt; ++j) {
        double m = 0;
        for (long i = 0; i < F.nx; ++i) m += F.at(i, j);
        M[j] = m * F.dx;
    }
    auto fm = [&](long j) { return f((double(j) + 0.5) * F.dt); };  // midpoint samples
    double acc = fm(0) * M[0] - fm(J - 1) * M[J];
    for (long j = 1; j <= J - 1; ++j) acc += M[j] * (fm(j) - fm(j - 1));
    return acc;
}

RateReport rate_J(const AdmissibleGridField& F, const DriftFn& f) {
    RateReport r;
    r.entropy_term = entropy_functional(F);
    r.drift_term = drift_functional(F, f);
    double E0 = free_entropy(F.row_profile(0), F.theta, 1e-6);
    double ET = free_entropy(F.row_profile(F.nt - 1), F.theta, 1e-6);
    r.free_entropy_term = 0.5 * (ET - E0);
    r.J_value = -r.entropy_term - r.drift_term - r.free_entropy_term;
    r.J_min = r.J_value;
    r.I_value = 0;
    return r;
}

namespace {

// Linear interpolation of a profile with flat extension.
double profile_value(const BoundaryProfile& p, double x) {
    long n = static_cast<long>(p.h.size());
    double f = (x - p.x0) / p.dx;
    if (f <= 0) return p.h.front();
    if (f >= double(n - 1)) return p.h.back();
    long i = static_cast<long>(f);
    double a = f - i;
    return (1 - a) * p.h[i] + a * p.h[i + 1];
}

void check_boundary_profile(const BoundaryProfile& p, double theta, const char* name) {
    for (size_t i = 0; i + 1 < p.h.size(); ++i) {
        double d = p.h[i + 1] - p.h[i];
        if (d < -1e-9) throw std::invalid_argument(std::string(name) + ": not monotone");
        if (d > p.dx + 1e-9) throw std::invalid_argument(std::string(name) + ": density above 1");
    }
    if (std::abs(p.mass() - theta) > 1e-6)
        throw std::invalid_argument(std::string(name) + ": mass " + std::to_string(p.mass()) +
                                    " != theta");
}

struct Domain {
    double x0, dx, dt;
    long nx, nt;
};

Domain make_domain(const BoundaryProfile& h0, const BoundaryProfile& hT, double T, double theta,
                   const SolveOptions& opt) {
    double pad = opt.pad > 0 ? opt.pad : theta + T;
    double lo = std::min(h0.x0, hT.x0) - pad;
    double hi = std::max(h0.x0 + h0.dx * h0.n_cells(), hT.x0 + hT.dx * hT.n_cells()) + pad;
    Domain d;
    d.nx = opt.nx;
    d.nt = opt.nt;
    d.x0 = lo;
    d.dx = (hi - lo) / double(d.nx - 1);
    d.dt = T / double(d.nt - 1);
    return d;
}

AdmissibleGridField corridor_extension(const BoundaryProfile& h0, const BoundaryProfile& hT,
                                       double T, double theta, long nx, long nt, double pad,
                                       bool maximal) {
    SolveOptions opt;
    opt.nx = nx;
    opt.nt = nt;
    opt.pad = pad;
    Domain dom = make_domain(h0, hT, T, theta, opt);
    AdmissibleGridField F;
    F.x0 = dom.x0;
    F.dx = dom.dx;
    F.dt = dom.dt;
    F.nx = dom.nx;
    F.nt = dom.nt;
    F.theta = theta;
    F.H.assign(F.nx * F.nt, 0.0);
    for (long j = 0; j < F.nt; ++j) {
        double t = F.t_of(j);
        for (long i = 0; i < F.nx; ++i) {
            double x = F.x_of(i);
            double v = maximal ? std::min(profile_value(h0, x), profile_value(hT, x + (T - t)))
                               : std::max(profile_value(hT, x), profile_value(h0, x - t));
            F.at(i, j) = v;
        }
    }
    return F;
}

}  // namespace

AdmissibleGridField max_corridor_extension(const BoundaryProfile& h0, const BoundaryProfile& hT,
                                           double T, double theta, long nx, long nt, double pad) {
    return corridor_extension(h0, hT, T, theta, nx, nt, pad, true);
}
AdmissibleGridField min_corridor_extension(const BoundaryProfile& h0, const BoundaryProfile& hT,
                                           double T, double theta, long nx, long nt, double pad) {
    return corridor_extension(h0, hT, T, theta, nx, nt, pad, false);
}

namespace {

// Objective iint sigma + F^f and its gradient over free (interior) nodes.
// Slopes are clipped to the eta-interior before sigma_grad is evaluated.
struct Problem {
    AdmissibleGridField* F;
    DriftFn f;
    double eta;
    std::vector<uint8_t> fixed;  // per node

    long idx(long i, long j) const { return j * F->nx + i; }

    double objective() const {
        double acc = 0;
        for (long j = 0; j + 1 < F->nt; ++j)
            for (long i = 0; i + 1 < F->nx; ++i) {
                Slope sl = F->cell_slope(i, j);
                sl.s = std::min(std::max(sl.s, 0.0), 1.0);
                sl.t = std::min(sl.t, 0.0);
                sl.t = std::max(sl.t, -sl.s);
                acc += sigma(sl);
            }
        return acc * F->dx * F->dt + drift_functional(*F, f);
    }

    void gradient(std::vector<double>& g) const {
        g.assign(F->H.size(), 0.0);
        double area = F->dx * F->dt;
        for (long j = 0; j + 1 < F->nt; ++j)
            for (long i = 0; i + 1 < F->nx; ++i) {
                Slope sl = clip_slope(F->cell_slope(i, j), eta);
                auto [ds, dt_] = sigma_grad(sl, eta / 2);
                double gs = area * ds / F->dx;
                double gt = area * dt_ / F->dt;
                g[idx(i, j)] += -gs - gt;
                g[idx(i + 1, j)] += gs;
                g[idx(i, j + 1)] += gt;
            }
        if (f) {
            long J = F->nt - 1;
            for (long j = 1; j <= J - 1; ++j) {
                double coef = (f((double(j) + 0.5) * F->dt) - f((double(j) - 0.5) * F->dt)) * F->dx;
                for (long i = 0; i < F->nx; ++i) g[idx(i, j)] += coef;
            }
        }
        for (size_t k = 0; k < g.size(); ++k)
            if (fixed[k]) g[k] = 0;
    }
};

// Cyclic projection onto per-cell half-space constraints, fixed nodes pinned.
void project_feasible(AdmissibleGridField& F, const std::vector<uint8_t>& fixed, double feas_tol,
                      long max_sweeps = 400) {
    long nx = F.nx, nt = F.nt;
    double dx = F.dx, dt = F.dt;
    struct HalfSpace {
        double wa, wb, wc, beta;
    };
    // Constraints on (a,b,c) = (H[i][j], H[i+1][j], H[i][j+1]).
    const HalfSpace cons[4] = {
        {1, -1, 0, 0},                          // s >= 0
        {-1, 1, 0, dx},                         // s <= 1
        {-1, 0, 1, 0},                          // t <= 0
        {1 / dx + 1 / dt, -1 / dx, -1 / dt, 0}  // s + t >= 0
    };
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0;
        for (long j = 0; j + 1 < nt; ++j)
            for (long i = 0; i + 1 < nx; ++i) {
                long ia = j * nx + i, ib = j * nx + i + 1, ic = (j + 1) * nx + i;
                for (const auto& hs : cons) {
                    double v = hs.wa * F.H[ia] + hs.wb * F.H[ib] + hs.wc * F.H[ic] - hs.beta;
                    if (v <= 0) continue;
                    double wa = fixed[ia] ? 0 : hs.wa;
                    double wb = fixed[ib] ? 0 : hs.wb;
                    double wc = fixed[ic] ? 0 : hs.wc;
                    double nn = wa * wa + wb * wb + wc * wc;
                    if (nn == 0) continue;
                    double corr = v / nn;
                    F.H[ia] -= corr * wa;
                    F.H[ib] -= corr * wb;
                    F.H[ic] -= corr * wc;
                    worst = std::max(worst, v);
                }
            }
        if (worst < feas_tol) break;
    }
}

}  // namespace

double gradient_residual(const AdmissibleGridField& F, const DriftFn& f, double eta) {
    AdmissibleGridField tmp = F;
    Problem prob{&tmp, f, eta, {}};
    prob.fixed.assign(F.H.size(), 0);
    for (long i = 0; i < F.nx; ++i) {
        prob.fixed[i] = 1;
        prob.fixed[(F.nt - 1) * F.nx + i] = 1;
    }
    for (long j = 0; j < F.nt; ++j) {
        prob.fixed[j * F.nx] = 1;
        prob.fixed[j * F.nx + F.nx - 1] = 1;
    }
    std::vector<double> g;
    prob.gradient(g);
    double r = 0;
    for (double v : g) r = std::max(r, std::abs(v));
    return r / (F.dx * F.dt);
}

SolveResult solve_limit_shape(const BoundaryProfile& h0, const BoundaryProfile& hT, double T,
                              double theta, const DriftFn& f, const SolveOptions& opt) {
    check_boundary_profile(h0, theta, "h(.,0)");
    check_boundary_profile(hT, theta, "h(.,T)");

    AdmissibleGridField Fmax =
        max_corridor_extension(h0, hT, T, theta, opt.nx, opt.nt, opt.pad);
    AdmissibleGridField Fmin =
        min_corridor_extension(h0, hT, T, theta, opt.nx, opt.nt, opt.pad);
    // Existence: the extremal extensions must bracket and match the boundary.
    for (long i = 0; i < Fmax.nx; ++i) {
        if (Fmax.at(i, 0) < Fmin.at(i, 0) - 1e-9 ||
            Fmax.at(i, Fmax.nt - 1) < Fmin.at(i, Fmax.nt - 1) - 1e-9)
            throw std::invalid_argument("solve_limit_shape: no admissible extension (corridor)");
    }
    for (size_t k = 0; k < Fmax.H.size(); ++k)
        if (Fmax.H[k] < Fmin.H[k] - 1e-9)
            throw std::invalid_argument("solve_limit_shape: no admissible extension");

    SolveResult res;
    res.field = opt.start == 0 ? Fmax : Fmin;
    AdmissibleGridField& F = res.field;
    // Pin boundary rows to the max-corridor values (equal to min-corridor on
    // the boundary when feasible) so both starts share bit-identical rows.
    for (long i = 0; i < F.nx; ++i) {
        F.at(i, 0) = Fmax.at(i, 0);
        F.at(i, F.nt - 1) = Fmax.at(i, F.nt - 1);
    }

    std::vector<uint8_t> fixed(F.H.size(), 0);
    for (long i = 0; i < F.nx; ++i) {
        fixed[i] = 1;
        fixed[(F.nt - 1) * F.nx + i] = 1;
    }
    for (long j = 0; j < F.nt; ++j) {
        fixed[j * F.nx] = 1;
        fixed[j * F.nx + F.nx - 1] = 1;
    }

    Problem prob{&F, f, opt.eta, fixed};
    project_feasible(F, fixed, opt.feas_tol);

    double G = prob.objective();
    if (opt.collect_history) res.objective_history.push_back(G);
    std::vector<double> g;
    double alpha = F.dx / 4;
    long streak = 0;
    long iters = 0;

    // Phase 1: projected gradient ascent with backtracking.
    for (long it = 0; it < opt.max_grad_iters; ++it) {
        prob.gradient(g);
        double gmax = 0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax == 0) break;
        AdmissibleGridField trial = F;
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            trial.H = F.H;
            for (size_t k = 0; k < trial.H.size(); ++k) trial.H[k] += alpha / gmax * g[k];
            project_feasible(trial, fixed, opt.feas_tol, 60);
            Problem tp{&trial, f, opt.eta, fixed};
            double Gt = tp.objective();
            if (Gt >= G) {
                F.H = trial.H;
                improved = Gt > G + opt.tol * std::max(1.0, std::abs(G));
                streak = improved ? 0 : streak + 1;
                G = Gt;
                alpha = std::min(alpha * 1.5, F.dx);
                break;
            }
            alpha *= 0.5;
            if (bt == 29) streak++;
        }
        ++iters;
        if (opt.collect_history) res.objective_history.push_back(G);
        if (streak >= opt.tol_streak) break;
        (void)improved;
    }

    // Phase 2: damped Newton on interior nodes, feasibility-safeguarded.
    long nfree = 0;
    std::vector<long> node_id(F.H.size(), -1);
    for (long j = 1; j + 1 < F.nt; ++j)
        for (long i = 1; i + 1 < F.nx; ++i) node_id[j * F.nx + i] = nfree++;
    double lambda = 1e-8;
    for (long it = 0; it < opt.max_newton_iters && nfree > 0; ++it) {
        prob.gradient(g);
        // Assemble -Hessian (positive semidefinite) over free nodes.
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nfree * 9);
        double area = F.dx * F.dt;
        for (long j = 0; j + 1 < F.nt; ++j)
            for (long i = 0; i + 1 < F.nx; ++i) {
                Slope sl = clip_slope(F.cell_slope(i, j), opt.eta);
                SigmaDerivs d = sigma_derivs(sl);
                long nodes[3] = {j * F.nx + i, j * F.nx + i + 1, (j + 1) * F.nx + i};
                double gs[3] = {-1 / F.dx, 1 / F.dx, 0};
                double gt[3] = {-1 / F.dt, 0, 1 / F.dt};
                for (int a = 0; a < 3; ++a) {
                    long ia = node_id[nodes[a]];
                    if (ia < 0) continue;
                    for (int b = 0; b < 3; ++b) {
                        long ib = node_id[nodes[b]];
                        if (ib < 0) continue;
                        double hab = d.dss * gs[a] * gs[b] + d.dtt * gt[a] * gt[b] +
                                     d.dst * (gs[a] * gt[b] + gt[a] * gs[b]);
                        trip.emplace_back(ia, ib, -area * hab);
                    }
                }
            }
        Eigen::SparseMatrix<double> A(nfree, nfree);
        A.setFromTriplets(trip.begin(), trip.end());
        for (long k = 0; k < nfree; ++k) A.coeffRef(k, k) += lambda;
        Eigen::VectorXd rhs(nfree);
        for (size_t k = 0; k < g.size(); ++k)
            if (node_id[k] >= 0) rhs[node_id[k]] = g[k];
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
        if (solver.info() != Eigen::Success) {
            lambda *= 10;
            continue;
        }
        Eigen::VectorXd delta = solver.solve(rhs);
        // Line search with feasibility safeguard.
        double step = 1.0;
        bool accepted = false;
        AdmissibleGridField trial = F;
        for (int bt = 0; bt < 40; ++bt) {
            trial.H = F.H;
            for (size_t k = 0; k < trial.H.size(); ++k)
                if (node_id[k] >= 0) trial.H[k] += step * delta[node_id[k]];
            if (trial.max_cell_violation() <= opt.feas_tol) {
                Problem tp{&trial, f, opt.eta, fixed};
                double Gt = tp.objective();
                if (Gt >= G - 1e-15 * std::max(1.0, std::abs(G))) {
                    double rel = std::abs(Gt - G) / std::max(1.0, std::abs(G));
                    streak = rel < opt.tol ? streak + 1 : 0;
                    F.H = trial.H;
                    G = std::max(G, Gt);
                    accepted = true;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    break;
                }
            }
            step *= 0.5;
        }
        ++iters;
        if (opt.collect_history) res.objective_history.push_back(G);
        if (!accepted) {
            lambda *= 10;
            if (lambda > 1e6) break;
        }
        if (streak >= 10) break;
    }

    res.objective = G;
    res.iterations = iters;
    res.converged = streak >= 10 || streak >= opt.tol_streak;
    res.grad_residual = gradient_residual(F, f, opt.eta);
    res.report = rate_J(F, f);
    res.report.converged = res.converged;
    res.report.iterations = iters;
    res.report.grad_residual = res.grad_residual;
    std::ostringstream lg;
    lg << "objective=" << G << " iters=" << iters << " residual=" << res.grad_residual;
    res.report.log = lg.str();
    return res;
}

}  // namespace bwalk
