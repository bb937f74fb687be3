#pragma once

// In-memory result of one evolution: fit series per window, conserved
// quantities, center-point samples, sparse state snapshots, abort info.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsw/models.hpp"
#include "dsw/tracer.hpp"

namespace dsw {

struct TracerSample {
    double t = 0.0;
    std::optional<FitResult> fit;
    std::optional<double> alpha;
};

struct ConservedSample {
    double t = 0.0;
    double N = 0.0;
    double E = 0.0;
    double drift = 0.0;  // Delta_E against the first sample
};

struct CenterSample {
    double t = 0.0;
    double modulus = 0.0;
};

struct ExperimentRecord {
    std::string name;
    ModelKind model = ModelKind::DSII;
    ModelParams params;

    // sample series; fit series keyed by window id ("1d:w0", "1d:w1", "2d")
    std::map<std::string, std::vector<TracerSample>> fits;
    std::vector<ConservedSample> conserved;
    std::vector<CenterSample> center;

    bool aborted = false;
    std::string abort_reason;
    double t_final = 0.0;
    long steps = 0;
    double wall_seconds = 0.0;

    ModelState final_state;                            // physical space
    std::vector<std::pair<double, ModelState>> snapshots;  // physical space

    std::map<std::string, CriticalReport> detections;

    std::vector<DeltaSample> delta_series(const std::string& window_id) const {
        std::vector<DeltaSample> out;
        auto it = fits.find(window_id);
        if (it == fits.end()) return out;
        for (const auto& s : it->second)
            if (s.fit) out.push_back({s.t, s.fit->delta, s.fit->B});
        return out;
    }

    double max_drift() const {
        double m = 0.0;
        for (const auto& c : conserved) m = std::max(m, c.drift);
        return m;
    }
};

}  // namespace dsw
