// Compares the serial and parallel prefix-count kernels on expressions whose
// membership tests defeat the periodic fast path. Both must agree exactly;
// the table reports wall time and speedup.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "stnets/index_measure.hpp"

using namespace stnets;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void run(const char* label, const SetExprPtr& s, std::uint64_t k) {
    auto t0 = clock_type::now();
    std::uint64_t serial = prefix_count_serial(*s, k);
    auto t1 = clock_type::now();
    std::uint64_t parallel = prefix_count_parallel(*s, k);
    auto t2 = clock_type::now();
    if (serial != parallel) {
        std::cerr << "MISMATCH on " << label << " at k=" << k << ": serial " << serial
                  << " vs parallel " << parallel << "\n";
        std::exit(1);
    }
    double ts = seconds(t0, t1), tp = seconds(t1, t2);
    std::printf("%-34s k=2^%-2d count=%-10llu serial %8.3fs  parallel %8.3fs  x%.2f\n", label,
                (int)(63 - __builtin_clzll(k)), (unsigned long long)serial, ts, tp,
                tp > 0 ? ts / tp : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    int max_exp = argc > 1 ? std::atoi(argv[1]) : 22;
    if (max_exp < 10 || max_exp > 28) {
        std::cerr << "usage: bench-density [max_exp in 10..28]\n";
        return 2;
    }

    SetExprPtr mixed = set_union(set_intersection(set_complement(named_predicate("squares")),
                                                  arith_prog(1, 3)),
                                 set_union(named_predicate("cubes"), arith_prog(2, 7)));
    SetExprPtr sieved = set_intersection(set_complement(named_predicate("cubes")),
                                         set_complement(set_union(arith_prog(4, 9),
                                                                  named_predicate("pow4"))));

    for (int e = max_exp - 4; e <= max_exp; e += 2) {
        run("union/intersection over preds", mixed, 1ull << e);
        run("double-sieve complement", sieved, 1ull << e);
    }
    std::cout << "kernels agree on every point above\n";
    return 0;
}
