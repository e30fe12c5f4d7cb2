// Serial reference against the OpenMP kernels on the same inputs.
// Usage: mokit_bench [--quick]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#include "mokit/conjugate.hpp"
#include "mokit/kernels.hpp"
#include "mokit/rng.hpp"
#include "mokit/spaces.hpp"

using namespace mokit;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void row(const char* name, const std::function<double(kernels::Exec)>& fn, int reps) {
    double vs = 0.0, vp = 0.0;
    const double ts = seconds([&] { vs = fn(kernels::Exec::Serial); }, reps);
    const double tp = seconds([&] { vp = fn(kernels::Exec::Parallel); }, reps);
    std::printf("%-28s %12.6f %12.6f %8.2fx  %s\n", name, ts, tp, ts / tp,
                std::memcmp(&vs, &vp, sizeof vs) == 0 ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const std::size_t n = quick ? 2000 : 200000;
    const int reps = quick ? 1 : 5;
    std::printf("threads %d, points %zu, reps %d\n", omp_get_max_threads(), n, reps);
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, n));
    const BoundFunction f(parse_family("nakano(p = 1.2 + t)"), sp);
    Rng rng(1, 0);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.log_uniform(1e-2, 1e1);
    const SimpleFunction xs(sp, x);

    row("modular_sum", [&](kernels::Exec e) { return kernels::modular_sum(f, x, 0.5, e).value(); }, reps);
    row("luxemburg_norm", [&](kernels::Exec e) { return luxemburg_norm(f, xs, 1e-12, e).value; }, reps);

    const std::size_t m = quick ? 64 : 2048;
    const auto small = make_space(MeasureSpace::uniform(0.0, 1.0, m));
    const ConjugateField conj(ConjugateSpec(parse_family("power(p = 2, cap = 4 + t)"), parse_family("power(p = 3)"), small),
                              Route::Generic);
    const auto pts = all_points(*small);
    const std::vector<double> grid{0.1, 0.5, 1.0, 2.0};
    row("tabulate generic conjugate",
        [&](kernels::Exec e) {
            const auto v = kernels::tabulate(conj, pts, grid, e);
            double s = 0.0;
            for (const auto& w : v) s += w.value();
            return s;
        },
        1);
    return 0;
}
