// Acceptance suite: one pass/fail line per criterion, nonzero exit if
// anything fails. Criterion ids or suite names may be passed as
// arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "triwalk/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> filter;
    for (int i = 1; i < argc; ++i) filter.emplace_back(argv[i]);
    const int threads = std::max(1u, std::thread::hardware_concurrency());

    int failures = 0;
    const auto start = std::chrono::steady_clock::now();
    const auto results = triwalk::run_acceptance(triwalk::expand_suites(filter), threads);
    for (const auto& r : results) {
        const bool ok = r.pass();
        failures += ok ? 0 : 1;
        std::printf("%-4s %-4s %s\n", r.id.c_str(), ok ? "PASS" : "FAIL",
                    r.description.c_str());
        for (const auto& c : r.checks)
            std::printf("     %s %s = %.6g (threshold %.6g)\n", c.pass() ? "ok  " : "FAIL",
                        c.name.c_str(), c.value, c.threshold);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%zu criteria, %d failed, %.1f s\n", results.size(), failures, seconds);
    return failures == 0 ? 0 : 1;
}
