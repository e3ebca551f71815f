// Acceptance gate: one line per criterion, nonzero exit when any fails.
#include <cstdio>

#include "radgreen/acceptance.hpp"

int main(int argc, char** argv) {
    radgreen::AcceptanceOptions opt;
    if (argc > 1) opt.only = argv[1];
    int failed = 0;
    radgreen::run_acceptance(opt, [&](const radgreen::CriterionResult& r) {
        std::printf("criterion %d %s  [%s] %s: %s (%.2f s)\n", r.id, r.pass ? "PASS" : "FAIL", r.suite.c_str(),
                    r.title.c_str(), r.detail.c_str(), r.seconds);
        for (const auto& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    });
    std::printf("%d failed\n", failed);
    return failed ? 1 : 0;
}
