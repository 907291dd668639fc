// Times the serial reference kernels against their OpenMP counterparts.
//   bench_kernels [threads] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "kge/kernels.hpp"
#include "kge/model.hpp"

namespace {

template <class F>
double best_ms(int repeats, F&& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool same) {
    std::printf("%-16s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
    std::printf("threads %d, best of %d\n", threads, repeats);

    std::mt19937_64 rng(42);
    constexpr std::uint32_t n_ent = 2000, n_rel = 20;
    kge::KnowledgeGraph kg;
    std::uniform_int_distribution<std::uint32_t> ent(0, n_ent - 1), rel(0, n_rel - 1);
    for (int i = 0; i < 20000; ++i)
        kg.add_triple("e" + std::to_string(ent(rng)), "r" + std::to_string(rel(rng)), "e" + std::to_string(ent(rng)));
    auto params = kge::init_params(kge::ModelKind::complex, 64, 1, kg.num_entities(), kg.num_relations());

    std::vector<kge::Triple> test(kg.triples().begin(), kg.triples().begin() + 300);
    std::vector<kge::SideRanks> rs, rp;
    double s = best_ms(repeats, [&] { rs = kge::serial::rank_all(params, kg, test, kge::RankMode::filtered); });
    double p = best_ms(repeats, [&] { rp = kge::parallel::rank_all(params, kg, test, kge::RankMode::filtered, threads); });
    report("rank_all", s, p, rs == rp);

    std::vector<double> bs(kg.size()), bp(kg.size());
    s = best_ms(repeats, [&] { kge::serial::score_batch(params, kg.triples(), bs); });
    p = best_ms(repeats, [&] { kge::parallel::score_batch(params, kg.triples(), bp, threads); });
    report("score_batch", s, p, bs == bp);

    constexpr std::size_t n = 200000, dim = 16, k = 32;
    std::normal_distribution<double> g;
    std::vector<double> pts(n * dim), cents(k * dim);
    for (auto& v : pts) v = g(rng);
    for (auto& v : cents) v = g(rng);
    std::vector<std::size_t> as(n), ap(n);
    double is = 0, ip = 0;
    s = best_ms(repeats, [&] { is = kge::serial::assign_nearest(pts, dim, cents, as); });
    p = best_ms(repeats, [&] { ip = kge::parallel::assign_nearest(pts, dim, cents, ap, threads); });
    report("assign_nearest", s, p, as == ap && is == ip);
    return 0;
}
