// Parallel batch kernels against their serial references: wall time and result equality.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "pmrhc/batch.hpp"

using namespace pmrhc;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int runs = argc > 1 ? std::atoi(argv[1]) : 64;
    const int problems = argc > 2 ? std::atoi(argv[2]) : 200000;
    std::printf("threads %d\n", omp_get_max_threads());

    std::vector<RunSpec> specs;
    for (int k = 0; k < runs; ++k) {
        Scenario s = generate_scenario({Topology::RandomGeometric, 10, 3, static_cast<std::uint64_t>(k)});
        s.noise = {NoiseModel::Growth, 0.3, 10.0, 20.0};
        specs.push_back({s, static_cast<std::uint64_t>(k)});
    }
    std::vector<RunRecord> a, b;
    const double ts = seconds([&] { a = run_batch_serial(specs); });
    const double tp = seconds([&] { b = run_batch(specs); });
    bool same = true;
    for (int k = 0; k < runs; ++k) same = same && a[k].J_T == b[k].J_T;
    std::printf("simulations  n=%-7d serial %.3fs  parallel %.3fs  speedup %.2fx  identical %s\n", runs, ts, tp, ts / tp,
                same ? "yes" : "NO");

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> num(-3, 3), den(0, 2), pos(0.5, 2), lm(0, 3);
    std::vector<RfopProblem> probs(problems);
    for (auto& p : probs) {
        for (int c = 0; c < 6; ++c) p.objective.c[c] = num(rng);
        p.objective.c[6] = den(rng);
        p.objective.c[7] = den(rng);
        p.objective.c[8] = pos(rng);
        p.bounds = {den(rng), lm(rng), den(rng), lm(rng), lm(rng)};
    }
    std::vector<RfopSolution> x, y;
    const double rs = seconds([&] { x = solve_rfop_batch_serial(probs); });
    const double rp = seconds([&] { y = solve_rfop_batch(probs); });
    same = true;
    for (int k = 0; k < problems; ++k) same = same && x[k].value == y[k].value;
    std::printf("rfop solves  n=%-7d serial %.3fs  parallel %.3fs  speedup %.2fx  identical %s  (%.2f us/solve)\n",
                problems, rs, rp, rs / rp, same ? "yes" : "NO", 1e6 * rs / problems);
    return same ? 0 : 1;
}
