#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "bwalk/lobachevsky_golden.hpp"
#include "bwalk/rng.hpp"
#include "bwalk/surface.hpp"

using namespace bwalk;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Adaptive Simpson quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb,
               double fm, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * eps)
        return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
           simpson(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b, double eps = 1e-13) {
    double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(b), f(m), eps, 40);
}

// Quadrature oracle for L(x) = -int_0^x ln(2 sin z) dz; splits off the log
// singularity at 0 analytically.
double lobachevsky_quad(double x) {
    double a = std::min(0.05, x / 2);
    // int_0^a ln(2 sin z) dz = int ln(2z) + int ln(sin z / z)
    double head = a * std::log(2 * a) - a +
                  quad([](double z) { return z == 0 ? 0.0 : std::log(std::sin(z) / z); }, 0, a);
    double tail = quad([](double z) { return std::log(2 * std::sin(z)); }, a, x);
    return -(head + tail);
}
}  // namespace

TEST_CASE("lobachevsky values against the quadrature oracle") {
    CHECK(lobachevsky(0.0) == 0.0);
    CHECK(std::abs(lobachevsky(kPi / 2)) < 1e-12);
    CHECK(std::abs(lobachevsky_quad(kPi / 2)) < 1e-10);
    for (double x : {0.1, 0.3, kPi / 6, kPi / 3, 1.0, 1.4}) {
        CHECK(lobachevsky(x) == doctest::Approx(lobachevsky_quad(x)).epsilon(1e-10));
    }
    // Fourier oracle agrees (its tail at K is O(1/(K^2 sin x))).
    for (double x : {0.4, kPi / 6, 1.2}) {
        CHECK(lobachevsky(x) == doctest::Approx(lobachevsky_fourier(x, 200000)).epsilon(1e-9));
    }
}

TEST_CASE("lobachevsky golden maximum at pi/6") {
    CHECK(lobachevsky(kPi / 6) ==
          doctest::Approx(kLobachevskyPiSixth).epsilon(1e-10));
    for (double x = 0.01; x < kPi; x += 0.01)
        CHECK(lobachevsky(x) <= kLobachevskyPiSixth + 1e-12);
}

TEST_CASE("lobachevsky periodicity and oddness") {
    for (double x = -3.0; x <= 3.0; x += 0.37) {
        CHECK(lobachevsky(x + kPi) == doctest::Approx(lobachevsky(x)).epsilon(1e-12));
        CHECK(lobachevsky(-x) == doctest::Approx(-lobachevsky(x)).epsilon(1e-12));
    }
}

TEST_CASE("lobachevsky modulus-of-continuity envelope") {
    CounterRng rng(2);
    double cmax = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        double x = rng.next_double() * kPi;
        double y = x + (rng.next_double() - 0.5) * 0.2;
        double d = std::abs(x - y);
        if (d < 1e-12 || d > 0.4) continue;
        double lhs = std::abs(lobachevsky(x) - lobachevsky(y));
        cmax = std::max(cmax, lhs / (d * std::log(1.0 / d)));
    }
    MESSAGE("fitted modulus constant ", cmax);
    CHECK(cmax < 5.0);
}

TEST_CASE("sigma zero on the boundary and symmetric") {
    CounterRng rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        double u = rng.next_double();
        CHECK(std::abs(sigma({1.0, -u})) < 1e-12);        // s = 1 edge
        CHECK(std::abs(sigma({u, 0.0})) < 1e-12);         // t = 0 edge
        CHECK(std::abs(sigma({u, -u})) < 1e-12);          // s + t = 0 edge
    }
    CHECK(sigma({2.0 / 3.0, -1.0 / 3.0}) ==
          doctest::Approx(3.0 / kPi * lobachevsky_quad(kPi / 3)).epsilon(1e-8));
    for (int rep = 0; rep < 100; ++rep) {
        double s = rng.next_double(), t = -rng.next_double() * s;
        CHECK(sigma({s, t}) == doctest::Approx(sigma({1 + t, s - 1})).epsilon(1e-12));
    }
    CHECK_THROWS(sigma({1.2, -0.1}));
}

TEST_CASE("sigma gradient: closed form vs finite differences") {
    auto [gs0, gt0] = sigma_grad({2.0 / 3.0, -1.0 / 3.0});
    CHECK(std::abs(gs0) < 1e-12);
    CHECK(std::abs(gt0) < 1e-12);

    CounterRng rng(23);
    double h = 1e-5;
    int done = 0;
    while (done < 100) {
        Slope sl{0.05 + 0.9 * rng.next_double(), 0};
        sl.t = -(0.05 + (sl.s - 0.1) * rng.next_double());
        if (sl.margin() < 0.04) continue;
        ++done;
        auto [gs, gt] = sigma_grad(sl);
        double fds = (sigma({sl.s + h, sl.t}) - sigma({sl.s - h, sl.t})) / (2 * h);
        double fdt = (sigma({sl.s, sl.t + h}) - sigma({sl.s, sl.t - h})) / (2 * h);
        CHECK(gs == doctest::Approx(fds).epsilon(1e-6));
        CHECK(gt == doctest::Approx(fdt).epsilon(1e-6));
    }
    // Symmetric slope: s + t = 1 - s makes the s-derivative vanish.
    double s = 0.6, t = 1 - 2 * s;
    auto [gs1, gt1] = sigma_grad({s, t});
    CHECK(std::abs(gs1) < 1e-12);
    (void)gt1;
    CHECK_THROWS(sigma_grad({1e-9, -1e-10}));
}

TEST_CASE("sigma concavity via difference Hessians") {
    CounterRng rng(29);
    double h = 1e-4;
    int done = 0;
    while (done < 1000) {
        Slope sl{rng.next_double(), 0};
        sl.t = -rng.next_double() * sl.s;
        if (sl.margin() < 0.02) continue;
        ++done;
        double c = sigma(sl);
        double ss = (sigma({sl.s + h, sl.t}) - 2 * c + sigma({sl.s - h, sl.t})) / (h * h);
        double tt = (sigma({sl.s, sl.t + h}) - 2 * c + sigma({sl.s, sl.t - h})) / (h * h);
        double st = (sigma({sl.s + h, sl.t + h}) - sigma({sl.s + h, sl.t - h}) -
                     sigma({sl.s - h, sl.t + h}) + sigma({sl.s - h, sl.t - h})) /
                    (4 * h * h);
        // Negative semidefinite up to 1e-8: trace and determinant tests.
        CHECK(ss <= 1e-8);
        CHECK(tt <= 1e-8);
        CHECK(ss * tt - st * st >= -1e-8 * (1 + std::abs(ss * tt)));
    }
}

TEST_CASE("free entropy of ramps") {
    auto ramp = BoundaryProfile::ramp(0.0, 1.0, 1.0, 400);
    CHECK(free_entropy(ramp, 1.0) == doctest::Approx(-1.5).epsilon(1e-10));

    // Dilation law: support [0, a] with mass a gives a^2 (ln a - 3/2).
    double a = 2.5;
    BoundaryProfile wide = BoundaryProfile::ramp(0.0, 1.0, a, 500);
    CHECK(free_entropy(wide, a) ==
          doctest::Approx(a * a * (std::log(a) - 1.5)).epsilon(1e-9));

    // Translation invariance.
    auto shifted = BoundaryProfile::ramp(3.7, 1.0, 1.0, 400);
    CHECK(free_entropy(shifted, 1.0) == doctest::Approx(free_entropy(ramp, 1.0)).epsilon(1e-12));

    // Mass mismatch rejected.
    CHECK_THROWS(free_entropy(ramp, 2.0));
}

TEST_CASE("free entropy vs discrete log-sums (vandermonde limit)") {
    // Packed configuration <-> unit ramp; the gap obeys C log N / N.
    double prevC = 0;
    for (long N : {500L, 1000L, 2000L}) {
        double sum = 0;
        for (long i = 0; i < N; ++i)
            for (long j = i + 1; j < N; ++j) sum += std::log(double(j - i) / double(N));
        double discrete = 2.0 / double(N) / double(N) * sum;  // theta = 1
        auto ramp = BoundaryProfile::ramp(-1.0 + 1.0 / N, 1.0, 1.0, 400);
        double cont = free_entropy(ramp, 1.0);
        double gap = std::abs(discrete - cont);
        double C = gap * double(N) / std::log(double(N));
        MESSAGE("N=", N, " gap=", gap, " C=", C);
        CHECK(gap <= 2.0 * std::log(double(N)) / double(N));
        if (prevC > 0) CHECK(C < 3 * prevC);
        prevC = C;
    }
}

TEST_CASE("q-deformed free entropy") {
    auto ramp = BoundaryProfile::ramp(0.0, 1.0, 1.0, 400);
    // kappa -> -infinity kills the kernel.
    CHECK(std::abs(free_entropy_q(ramp, -2e4, 1.0)) < 2e-3);
    // Small |kappa| expansion: ln(1 - e^{k u}) ~ ln(-k u).
    double k = -1e-3;
    CHECK(free_entropy_q(ramp, k, 1.0) ==
          doctest::Approx(std::log(-k) + free_entropy(ramp, 1.0)).epsilon(2e-3));
    // kappa = -1 against a 1-D reduction oracle: 2 int_0^1 (1-u) ln(1-e^{-u}) du.
    double oracle =
        2.0 * quad(
                  [](double u) {
                      if (u < 1e-300) return 0.0;
                      return (1.0 - u) * std::log(-std::expm1(-u));
                  },
                  1e-9, 1.0) +
        2.0 * (-(1e-9) * (std::log(1e-9) - 1.0));  // head of the log singularity, negligible
    CHECK(free_entropy_q(ramp, -1.0, 1.0) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("complex slope satisfies the sine law") {
    CounterRng rng(41);
    int done = 0;
    while (done < 100) {
        Slope sl{rng.next_double(), 0};
        sl.t = -rng.next_double() * sl.s;
        if (sl.margin() < 0.01) continue;
        ++done;
        auto c = complex_slope(sl);
        double r1 = std::abs(c.f) / std::sin(-kPi * sl.t);
        double r2 = std::abs(c.f + 1.0) / std::sin(kPi * sl.s);
        double r3 = 1.0 / std::sin(kPi * (sl.s + sl.t));
        CHECK(r1 == doctest::Approx(r3).epsilon(1e-12));
        CHECK(r2 == doctest::Approx(r3).epsilon(1e-12));
        // arg* identities defining the triangle.
        CHECK(std::arg(c.f) == doctest::Approx(-kPi * sl.s).epsilon(1e-12));
        CHECK(std::arg(c.f + 1.0) == doctest::Approx(kPi * sl.t).epsilon(1e-10));
    }
}

TEST_CASE("smoothed drift profile") {
    double rho = 0.5, v = 0.5, ell = 1.0, delta = 0.01;
    // Midpoint: kappa close to 1; far field: kappa = O(delta / dist).
    auto mid = smoothed_drift(0.5 + 0.0 * v, 0.0, rho, v, ell, delta);
    CHECK(mid.kappa > 1.0 - 3.0 * delta / ell);
    auto far = smoothed_drift(10.0, 0.0, rho, v, ell, delta);
    CHECK(far.kappa < 2.0 * delta / 9.0);

    // Envelope |g| <= ln(1/zeta) + ln(ell/delta) + C with a fitted constant.
    double zeta = std::min({rho, rho * v, rho * (1 - v), 1 - rho});
    double cfit = -1e9;
    for (double x = -2.0; x <= 3.0; x += 0.01) {
        auto ev = smoothed_drift(x, 0.3, rho, v, ell, delta);
        cfit = std::max(cfit, std::abs(ev.g) - std::log(1 / zeta) - std::log(ell / delta));
    }
    MESSAGE("fitted drift envelope constant ", cfit);
    CHECK(cfit < 5.0);
    CHECK_THROWS(smoothed_drift(0.0, 0.0, rho, v, 0.5, 0.6));
}
