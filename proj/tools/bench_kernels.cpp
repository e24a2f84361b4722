// Benchmark: OpenMP kernels against the serial reference, plus a whole
// portfolio simulation at both execution modes. Also asserts that both modes
// produce identical results while timing them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lrbridge/formulas.hpp"
#include "lrbridge/kernels.hpp"
#include "lrbridge/portfolio.hpp"

using lrbridge::kernels::Exec;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class F>
double time_ms(F&& f, int iters = 3) {
    double best = 1e300;
    for (int i = 0; i < iters; ++i) {
        const double t0 = now_ms();
        f();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 1'000'000;
    if (argc > 1) n = std::strtoull(argv[1], nullptr, 10);

#ifdef _OPENMP
    std::printf("n = %zu, OpenMP threads = %d\n", n, omp_get_max_threads());
#else
    std::printf("n = %zu, OpenMP disabled (serial twice)\n", n);
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const double cv = 2.0;
    const double sigma2 = lrbridge::sigma2_from_rho(0.7, cv);
    const std::uint64_t seed = 20'240'601;

    std::vector<double> a(n), b(n), probs(n), conv(n);

    double ts = time_ms([&] { lrbridge::kernels::fill_true_losses(a, cv, seed, Exec::Serial); });
    std::vector<double> a_serial = a;
    double tp = time_ms([&] { lrbridge::kernels::fill_true_losses(a, cv, seed, Exec::Parallel); });
    report("fill_true_losses", ts, tp, a == a_serial);

    ts = time_ms(
        [&] { lrbridge::kernels::fill_predictions_normal(a, b, sigma2, seed, Exec::Serial); });
    std::vector<double> b_serial = b;
    tp = time_ms(
        [&] { lrbridge::kernels::fill_predictions_normal(a, b, sigma2, seed, Exec::Parallel); });
    report("fill_predictions_normal", ts, tp, b == b_serial);

    ts = time_ms(
        [&] { lrbridge::kernels::fill_conversion_probabilities(b, probs, 1.2, Exec::Serial); });
    std::vector<double> probs_serial = probs;
    tp = time_ms(
        [&] { lrbridge::kernels::fill_conversion_probabilities(b, probs, 1.2, Exec::Parallel); });
    report("fill_conversion_probs", ts, tp, probs == probs_serial);

    ts = time_ms([&] { lrbridge::kernels::fill_conversions(probs, conv, seed, Exec::Serial); });
    std::vector<double> conv_serial = conv;
    tp = time_ms([&] { lrbridge::kernels::fill_conversions(probs, conv, seed, Exec::Parallel); });
    report("fill_conversions", ts, tp, conv == conv_serial);

    double sum_s = 0.0, sum_p = 0.0;
    ts = time_ms([&] { sum_s = lrbridge::kernels::block_sum(a, Exec::Serial); });
    tp = time_ms([&] { sum_p = lrbridge::kernels::block_sum(a, Exec::Parallel); });
    report("block_sum", ts, tp, sum_s == sum_p);

    double rho_s = 0.0, rho_p = 0.0;
    ts = time_ms([&] { rho_s = lrbridge::kernels::pearson_blocked(a, b, Exec::Serial); });
    tp = time_ms([&] { rho_p = lrbridge::kernels::pearson_blocked(a, b, Exec::Parallel); });
    report("pearson_blocked", ts, tp, rho_s == rho_p);

    lrbridge::PortfolioConfig cfg;
    cfg.n_potential = n;
    cfg.seed = seed;
    cfg.min_converted = 1;
    lrbridge::SimulationOutcome out_s, out_p;
    ts = time_ms([&] { out_s = lrbridge::run_simulation(cfg, Exec::Serial); }, 2);
    tp = time_ms([&] { out_p = lrbridge::run_simulation(cfg, Exec::Parallel); }, 2);
    report("run_simulation", ts, tp,
           out_s.empirical_lr == out_p.empirical_lr && out_s.n_converted == out_p.n_converted &&
               out_s.realized_rho == out_p.realized_rho);

    std::printf("sanity: empirical LR %.6f vs closed form %.6f (n_converted %ld)\n",
                out_p.empirical_lr, out_p.predicted_lr, out_p.n_converted);
    return 0;
}
