#pragma once

// Independent reference implementation of the evidence-fold likelihood,
// written as a literal, unrefactored step-by-step fold. It shares no code
// with the library on purpose: the test suite treats it as ground truth for
// the library's likelihood_ds.

#include <algorithm>
#include <vector>

namespace oracle {

struct Mass {
    double y;
    double n;
    double o;
};

struct FoldResult {
    double value = 0.0;
    std::vector<double> conflicts;
    bool aborted = false;
};

// scores arrive already normalized and already in fold order
inline FoldResult fold(const std::vector<double>& scores, double alpha = 0.7, double beta = 0.6,
                       double threshold = 0.999) {
    FoldResult res;
    Mass m{0.0, 0.0, 1.0};  // total ignorance
    for (double s : scores) {
        Mass e;
        e.y = alpha * s;
        e.n = beta * (1.0 - s);
        e.o = std::max(0.0, 1.0 - e.y - e.n);

        const double K = m.y * e.n + m.n * e.y;
        res.conflicts.push_back(K);
        if (K >= threshold) {
            res.aborted = true;
            res.value = 0.0;
            return res;
        }
        Mass c;
        c.y = (m.y * e.y + m.y * e.o + m.o * e.y) / (1.0 - K);
        c.n = (m.n * e.n + m.n * e.o + m.o * e.n) / (1.0 - K);
        c.o = (m.o * e.o) / (1.0 - K);
        m = c;
    }
    res.value = m.y + m.o / 2.0;
    return res;
}

}  // namespace oracle
