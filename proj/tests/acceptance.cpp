// Acceptance gate: runs every numbered criterion and prints one line per
// result.  Exit status is 0 only when all criteria pass.

#include <cstdio>

#include "cvlab/checks.hpp"

int main() {
    const int count = cvlab::num_acceptance_criteria();
    int failures = 0;
    for (int n = 1; n <= count; ++n) {
        cvlab::CheckSuite suite;
        bool crashed = false;
        std::string crash_reason;
        try {
            suite = cvlab::acceptance_criterion(n);
        } catch (const std::exception& e) {
            crashed = true;
            crash_reason = e.what();
        }
        const bool passed = !crashed && suite.passed();
        std::printf("%s criterion %d%s%s (%.2fs)\n", passed ? "PASS" : "FAIL", n,
                    suite.name.empty() ? "" : ": ", suite.name.c_str(), suite.seconds);
        if (crashed) {
            std::printf("  error: %s\n", crash_reason.c_str());
        } else {
            for (const auto& item : suite.items)
                if (!item.passed)
                    std::printf("  FAIL %s: value %.6e, threshold %.6e%s%s\n",
                                item.name.c_str(), item.value, item.threshold,
                                item.detail.empty() ? "" : "  -- ", item.detail.c_str());
        }
        if (!passed) ++failures;
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
