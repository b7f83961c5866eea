#pragma once

#include <string>
#include <vector>

#include "lynx/logic.hpp"

namespace lynx {

/// A mined pattern with its statistics. supports/confidences are aligned
/// with `classes`; confidences[c] = supports[c] / freq (0 when freq = 0).
struct MinedFeature {
    Pattern pattern;
    long freq = 0;
    std::vector<std::string> classes;
    std::vector<long> supports;
    std::vector<double> confidences;

    double max_confidence() const {
        double m = 0.0;
        for (double c : confidences) m = c > m ? c : m;
        return m;
    }
};

}  // namespace lynx
