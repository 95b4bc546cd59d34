// Build-time generator for golden Lobachevsky values. The values come from
// the Fourier partial sum (1/2) sum_{n<=K} sin(2nx)/n^2 with an Abel tail
// bound 2/(sin(x) K^2), so nothing here is hand-entered.
#include <cmath>
#include <cstdio>

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: gen_lobachevsky_golden <out.hpp>\n");
        return 1;
    }
    const double pi = 3.14159265358979323846;
    const long K = 10000000;
    auto series = [&](double x) {
        double sum = 0.0, comp = 0.0;
        for (long n = K; n >= 1; --n) {
            double term = std::sin(2.0 * double(n) * x) / (double(n) * double(n));
            double y = term - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return 0.5 * sum;
    };
    double x = pi / 6.0;
    double val = series(x);
    double tail = 2.0 / (std::sin(x) * double(K) * double(K));
    FILE* f = std::fopen(argv[1], "w");
    if (!f) return 1;
    std::fprintf(f, "// Generated by gen_lobachevsky_golden; do not edit.\n");
    std::fprintf(f, "// Fourier partial sum with K = %ld, tail bound %.3e.\n", K, tail);
    std::fprintf(f, "#pragma once\n");
    std::fprintf(f, "namespace bwalk {\n");
    std::fprintf(f, "inline constexpr double kLobachevskyPiSixth = %.17g;\n", val);
    std::fprintf(f, "inline constexpr double kLobachevskyPiSixthTailBound = %.3e;\n", tail);
    std::fprintf(f, "}  // namespace bwalk\n");
    std::fclose(f);
    return 0;
}
