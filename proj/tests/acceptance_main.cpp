// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "infctl/acceptance.hpp"

int main(int argc, char** argv) {
    infctl::AcceptanceOptions options;
    for (int k = 1; k < argc; ++k) options.only.push_back(std::atoi(argv[k]));
    bool all = true;
    infctl::run_acceptance(options, [&](const infctl::CriterionResult& r) {
        all = all && r.passed;
        std::printf("%s\n", infctl::format_result(r).c_str());
        std::fflush(stdout);
    });
    std::printf("%s\n", all ? "ALL PASS" : "SOME FAILED");
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
