// Wall-clock comparison of the OpenMP kernels against their serial
// reference implementations: covariance fill, phase-space operator apply,
// and Langevin ensemble statistics.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "qbm/covariance.hpp"
#include "qbm/oracle.hpp"
#include "qbm/wigner.hpp"

using namespace qbm;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    return d.count() / reps;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", name,
                1e3 * serial, 1e3 * parallel, serial / parallel);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    SpectralModel m;
    m.family = BathFamily::OhmicLorentzCutoff;
    m.gamma0 = 2.0;
    m.cutoff = 10.0;
    m.temperature = 10.0;
    m.mass = 1.0;
    m.omega = 2.0;

    {
        TimeGrid grid(3.0, 0.01);
        PropagatorTable prop = greens_function(m, grid);
        KernelTable kern = build_kernel_table(m, grid);
        report("covariance fill",
               time_of([&] { build_covariance_serial(prop, kern); }, 3),
               time_of([&] { build_covariance(prop, kern); }, 3));
    }

    {
        WignerGrid g = init_gaussian(Vec2{0.2, 0.0}, Mat2{0.25, 0.0, 0.0, 0.5},
                                     -6.0, 6.0, -8.0, 8.0, 401, 401);
        PhaseOp op(8);
        op.add_term({1, 0, 1, 0}, 0.7);
        op.add_term({0, 1, 0, 1}, -1.3);
        op.add_term({0, 2, 0, 0}, 0.4);
        op.add_term({1, 1, 1, 1}, 0.05);
        report("operator apply",
               time_of([&] { apply_serial(op, g); }, 5),
               time_of([&] { apply(op, g); }, 5));
    }

    {
        TimeGrid grid(2.0, 0.01);
        KernelTable kern = build_kernel_table(m, grid);
        NoiseEnsemble ens(kern, grid, 4096, 7);
        PolynomialForce f = PolynomialForce::linear_spring(m.mass, m.omega);
        std::vector<double> times{0.5, 1.0, 2.0};
        report("langevin ensemble",
               time_of([&] { langevin_ensemble_stats_serial(m, kern, f, ens, {0.3, 0.0}, times); }, 3),
               time_of([&] { langevin_ensemble_stats(m, kern, f, ens, {0.3, 0.0}, times); }, 3));
    }
    return 0;
}
