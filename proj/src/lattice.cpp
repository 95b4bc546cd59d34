#include "bwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bwalk {

namespace {
constexpr double kLatticeTol = 1e-9;

long round_to_integer(double v, const char* what) {
    double r = std::round(v);
    if (std::abs(v - r) > kLatticeTol)
        throw std::invalid_argument(std::string(what) + ": value " + std::to_string(v) +
                                    " is not an integer within 1e-9");
    return static_cast<long>(r);
}
}  // namespace

Theta Theta::from_double(double v) {
    if (!(v > 0)) throw std::invalid_argument("theta must be positive");
    Theta t;
    t.value = v;
    t.is_rational = false;
    return t;
}

Theta Theta::from_fraction(long p, long q) {
    if (p <= 0 || q <= 0) throw std::invalid_argument("theta must be positive");
    long g = std::gcd(p, q);
    Theta t;
    t.num = p / g;
    t.den = q / g;
    t.value = double(t.num) / double(t.den);
    t.is_rational = true;
    return t;
}

Theta Theta::parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return from_fraction(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
    // Integer literals become exact rationals, general decimals stay float.
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos == s.size()) return from_fraction(v, 1);
    } catch (...) {
    }
    return from_double(std::stod(s));
}

bool Theta::operator==(const Theta& o) const {
    if (is_rational && o.is_rational) return num == o.num && den == o.den;
    return value == o.value;
}

YoungDiagram::YoungDiagram(std::vector<long> r) : rows(std::move(r)) {
    while (!rows.empty() && rows.back() == 0) rows.pop_back();
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0) throw std::invalid_argument("YoungDiagram: negative row");
        if (i + 1 < rows.size() && rows[i] < rows[i + 1])
            throw std::invalid_argument("YoungDiagram: rows not weakly decreasing");
    }
}

long YoungDiagram::size() const { return std::accumulate(rows.begin(), rows.end(), 0L); }

long YoungDiagram::row(long i) const {
    return (i >= 0 && i < n_rows()) ? rows[i] : 0;
}

YoungDiagram YoungDiagram::transpose() const {
    std::vector<long> cols;
    if (!rows.empty()) {
        cols.assign(rows[0], 0);
        for (long j = 0; j < rows[0]; ++j)
            cols[j] = std::count_if(rows.begin(), rows.end(), [&](long r) { return r > j; });
    }
    return YoungDiagram(cols);
}

bool YoungDiagram::contains(const YoungDiagram& mu) const {
    for (long i = 0; i < mu.n_rows(); ++i)
        if (mu.rows[i] > row(i)) return false;
    return true;
}

ParticleConfig ParticleConfig::from_positions(Theta theta, const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("ParticleConfig: empty");
    ParticleConfig c;
    c.theta = theta;
    c.positions = xs;
    c.slack.resize(xs.size() - 1);
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        double gap = xs[i] - xs[i + 1];
        long k = round_to_integer(gap - theta.value, "lattice gap");
        if (k < 0)
            throw std::invalid_argument("ParticleConfig: gap " + std::to_string(gap) +
                                        " below theta at index " + std::to_string(i));
        c.slack[i] = k;
    }
    return c;
}

ParticleConfig ParticleConfig::from_slack(Theta theta, double offset,
                                          const std::vector<long>& slack) {
    ParticleConfig c;
    c.theta = theta;
    c.slack = slack;
    c.positions.resize(slack.size() + 1);
    c.positions[0] = offset;
    for (size_t i = 0; i < slack.size(); ++i) {
        if (slack[i] < 0) throw std::invalid_argument("ParticleConfig: negative slack");
        c.positions[i + 1] = c.positions[i] - theta.value - double(slack[i]);
    }
    return c;
}

long ParticleConfig::pair_offset(long i, long j) const {
    long s = 0;
    for (long m = i; m < j; ++m) s += slack[m];
    return s;
}

ParticleConfig ParticleConfig::shifted_by(const std::vector<int>& d) const {
    std::vector<double> xs(positions.size());
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = positions[i] + d[i];
    return from_positions(theta, xs);
}

bool ParticleConfig::operator==(const ParticleConfig& o) const {
    if (!(theta == o.theta) || slack != o.slack) return false;
    return std::abs(positions[0] - o.positions[0]) <= kLatticeTol;
}

long StepVector::total() const {
    long s = 0;
    for (auto v : e) s += v;
    return s;
}

bool step_feasible(const ParticleConfig& x, const StepVector& e) {
    if (e.n() != x.n()) throw std::invalid_argument("step_feasible: size mismatch");
    for (long i = 0; i + 1 < x.n(); ++i)
        if (x.slack[i] == 0 && e.e[i] == 0 && e.e[i + 1] == 1) return false;
    return true;
}

WalkEnsemble WalkEnsemble::from_configs(const std::vector<ParticleConfig>& configs) {
    if (configs.empty()) throw std::invalid_argument("WalkEnsemble: empty");
    WalkEnsemble w;
    w.theta = configs[0].theta;
    w.start = configs[0];
    for (size_t t = 0; t + 1 < configs.size(); ++t) {
        if (configs[t + 1].n() != configs[t].n() || !(configs[t + 1].theta == w.theta))
            throw std::invalid_argument("WalkEnsemble: inconsistent N or theta");
        StepVector e;
        e.e.resize(configs[t].n());
        for (long i = 0; i < configs[t].n(); ++i) {
            long step = round_to_integer(configs[t + 1].positions[i] - configs[t].positions[i],
                                         "walk step");
            if (step != 0 && step != 1)
                throw std::invalid_argument("WalkEnsemble: step not in {0,1}");
            e.e[i] = static_cast<uint8_t>(step);
        }
        if (!step_feasible(configs[t], e))
            throw std::invalid_argument("WalkEnsemble: infeasible step");
        w.steps.push_back(std::move(e));
    }
    return w;
}

std::vector<int> WalkEnsemble::displacement(long t) const {
    std::vector<int> d(n(), 0);
    for (long s = 0; s < t; ++s)
        for (long i = 0; i < n(); ++i) d[i] += steps[s].e[i];
    return d;
}

ParticleConfig WalkEnsemble::config(long t) const { return start.shifted_by(displacement(t)); }

std::vector<double> WalkEnsemble::positions(long t) const {
    auto d = displacement(t);
    std::vector<double> xs(n());
    for (long i = 0; i < n(); ++i) xs[i] = start.positions[i] + d[i];
    return xs;
}

double HeightField::value(double x, double t) const {
    auto clampl = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };
    double fi = clampl((x - x_min) / dx, 0.0, double(nx - 1));
    double fj = clampl(t / dt, 0.0, double(nt - 1));
    long i0 = std::min(long(fi), nx - 2 >= 0 ? nx - 2 : 0);
    long j0 = std::min(long(fj), nt - 2 >= 0 ? nt - 2 : 0);
    if (nx == 1) i0 = 0;
    if (nt == 1) j0 = 0;
    double ax = nx > 1 ? fi - i0 : 0.0;
    double wt = nt > 1 ? fj - j0 : 0.0;
    long i1 = std::min(i0 + 1, nx - 1), j1 = std::min(j0 + 1, nt - 1);
    return (1 - ax) * (1 - wt) * at(i0, j0) + ax * (1 - wt) * at(i1, j0) +
           (1 - ax) * wt * at(i0, j1) + ax * wt * at(i1, j1);
}

double HeightField::level_line(double y, double t) const {
    if (y < 0) return -1e300;
    // Row values at time t (linear interpolation in t).
    auto hval = [&](long i) { return value(x_of(i), t); };
    if (y >= hval(nx - 1)) return 1e300;
    if (hval(0) > y) return x_of(0);
    // Binary search for the first node with H > y, then solve on the segment.
    long lo = 0, hi = nx - 1;  // hval(lo) <= y < hval(hi)
    while (hi - lo > 1) {
        long mid = (lo + hi) / 2;
        if (hval(mid) > y)
            hi = mid;
        else
            lo = mid;
    }
    double h0 = hval(lo), h1 = hval(hi);
    if (h1 <= h0) return x_of(hi);
    // Ties broken toward smaller x: take the leftmost crossing point.
    double s = (y - h0) / (h1 - h0);
    return x_of(lo) + s * dx;
}

ParticleConfig diagram_to_config(const YoungDiagram& d, long N, Theta theta) {
    if (d.n_rows() > N)
        throw std::invalid_argument("diagram_to_config: diagram has " +
                                    std::to_string(d.n_rows()) + " rows, exceeds N = " +
                                    std::to_string(N));
    std::vector<double> xs(N);
    for (long i = 0; i < N; ++i) xs[i] = double(d.row(i)) - double(i) * theta.value;
    return ParticleConfig::from_positions(theta, xs);
}

YoungDiagram config_to_diagram(const ParticleConfig& x) {
    std::vector<long> rows(x.n());
    for (long i = 0; i < x.n(); ++i) {
        long r = round_to_integer(x.positions[i] + double(i) * x.theta.value, "diagram row");
        if (r < 0) throw std::invalid_argument("config_to_diagram: negative row");
        rows[i] = r;
    }
    return YoungDiagram(rows);
}

bool path_feasible(const ParticleConfig& y, const ParticleConfig& z, long T) {
    if (y.n() != z.n() || !(y.theta == z.theta))
        throw std::invalid_argument("path_feasible: mismatched N or theta");
    for (long i = 0; i < y.n(); ++i) {
        double d = z.positions[i] - y.positions[i];
        if (d < -kLatticeTol || d > double(T) + kLatticeTol) return false;
    }
    return true;
}

WalkEnsemble canonical_path(const ParticleConfig& y, const ParticleConfig& z, long T) {
    if (!path_feasible(y, z, T))
        throw std::invalid_argument("canonical_path: endpoints not connectable in T steps");
    std::vector<ParticleConfig> configs;
    configs.reserve(T + 1);
    for (long t = 0; t <= T; ++t) {
        std::vector<double> xs(y.n());
        for (long i = 0; i < y.n(); ++i)
            xs[i] = std::max(y.positions[i], z.positions[i] - double(T - t));
        configs.push_back(ParticleConfig::from_positions(y.theta, xs));
    }
    return WalkEnsemble::from_configs(configs);
}

double empirical_height(const std::vector<double>& positions_micro, long N_scale, double theta,
                        double x) {
    double w = theta / double(N_scale);
    double h = 0;
    for (double p : positions_micro) {
        double xi = p / double(N_scale);
        h += std::min(std::max(x - xi, 0.0), w);
    }
    return h;
}

GridSpec default_grid(const WalkEnsemble& w, long N_scale, long nx, long nt_per_step) {
    GridSpec g;
    double lo = w.start.positions.back(), hi = w.start.positions.front();
    auto zs = w.positions(w.horizon());
    lo = std::min(lo, zs.back());
    hi = std::max(hi, zs.front());
    g.x_min = (lo - w.theta.value) / double(N_scale);
    g.x_max = (hi + w.theta.value) / double(N_scale) + w.theta.value / double(N_scale);
    g.nx = nx;
    g.nt = w.horizon() * nt_per_step + 1;
    return g;
}

HeightField height_field(const WalkEnsemble& w, long N_scale, const GridSpec& grid) {
    HeightField f;
    f.x_min = grid.x_min;
    f.nx = grid.nx;
    f.nt = grid.nt;
    f.dx = grid.dx();
    f.theta = w.theta.value;
    f.t_horizon = double(w.horizon()) / double(N_scale);
    f.dt = f.nt > 1 ? f.t_horizon / double(f.nt - 1) : 1.0;
    f.coarse_warning = f.dx > w.theta.value / double(N_scale);
    f.H.assign(f.nx * f.nt, 0.0);
    for (long j = 0; j < f.nt; ++j) {
        double t = f.t_of(j) * double(N_scale);  // in step units
        long t0 = std::min(long(std::floor(t)), w.horizon() - 1);
        if (t0 < 0) t0 = 0;
        double frac = t - t0;
        auto a = w.positions(t0);
        auto b = w.positions(std::min(t0 + 1, w.horizon()));
        std::vector<double> xs(a.size());
        for (size_t i = 0; i < a.size(); ++i) xs[i] = (1 - frac) * a[i] + frac * b[i];
        for (long i = 0; i < f.nx; ++i)
            f.at(i, j) = empirical_height(xs, N_scale, w.theta.value, f.x_of(i));
    }
    return f;
}

WalkEnsemble height_to_walk(const HeightField& H_star, const ParticleConfig& y,
                            const ParticleConfig& z, long T, double eps) {
    long N = y.n();
    double theta = y.theta.value;
    if (eps < 2.0 * theta / double(N) - kLatticeTol)
        throw std::invalid_argument("height_to_walk: eps below 2*theta/N, truncation width degenerate");
    if (!path_feasible(y, z, T)) throw std::invalid_argument("height_to_walk: infeasible endpoints");
    long m = static_cast<long>(std::ceil(eps * double(N) / (2.0 * theta)));

    WalkEnsemble ref = canonical_path(y, z, T);
    std::vector<ParticleConfig> out;
    out.reserve(T + 1);
    for (long t = 0; t <= T; ++t) {
        auto ypos = ref.positions(t);  // microscopic
        double tt = double(t) / double(N);
        std::vector<double> xs(N);
        for (long i = 0; i < N; ++i) {
            // positions are ordered right-to-left; the construction counts
            // particles from the left, so particle i sits at level theta*(N-i)/N.
            double lo = H_star.level_line(theta * double(N - i - m) / double(N), tt);
            double hi = H_star.level_line(theta * double(N - i + m) / double(N), tt);
            double yi = ypos[i] / double(N);
            double x = yi;
            if (x < lo) x = yi + std::ceil((lo - yi) * N - kLatticeTol) / double(N);
            if (x > hi) x = yi - std::ceil((yi - hi) * N - kLatticeTol) / double(N);
            xs[i] = x * double(N);
        }
        out.push_back(ParticleConfig::from_positions(y.theta, xs));
    }
    return WalkEnsemble::from_configs(out);
}

}  // namespace bwalk
