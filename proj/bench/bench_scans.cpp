// Times the region scans with the serial kernel against the OpenMP one and
// checks that both produce identical rasters. Usage: bench_scans [resolution].

#include <chrono>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "heun/regions.hpp"

using heun::regions::Exec;
using heun::regions::RegionRaster;

namespace {

int mismatches = 0;

template <class Scan>
void bench(const char* name, Scan&& scan) {
    using clock = std::chrono::steady_clock;

    auto t0 = clock::now();
    RegionRaster serial = scan(Exec::serial);
    double ts = std::chrono::duration<double>(clock::now() - t0).count();

    t0 = clock::now();
    RegionRaster parallel = scan(Exec::parallel);
    double tp = std::chrono::duration<double>(clock::now() - t0).count();

    bool equal = serial.cells == parallel.cells;
    if (!equal) ++mismatches;
    std::printf("%-18s %9.3f s serial  %9.3f s parallel  %5.2fx  %s\n", name,
                ts, tp, ts / tp, equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 1024;
    if (n < 8) n = 8;

#ifdef _OPENMP
    std::printf("threads: %d, resolution: %d\n", omp_get_max_threads(), n);
#else
    std::printf("threads: 1 (no OpenMP), resolution: %d\n", n);
#endif

    std::complex<double> a{0.5, std::sqrt(3.0)};
    bench("condition a", [&](Exec e) {
        return heun::regions::scan_condition_a(n, n, e);
    });
    bench("condition ab", [&](Exec e) {
        return heun::regions::scan_condition_ab(a, n, n, e);
    });
    int nd = std::max(8, n / 32);
    bench("dmn window", [&](Exec e) {
        return heun::regions::scan_dmn(-1.5, 2.5, -2.5, 2.5, nd, nd, 128, e);
    });

    return mismatches == 0 ? 0 : 1;
}
