#pragma once

#include <vector>

#include "config.hpp"
#include "integrate.hpp"

namespace skelink {

struct ClosenessTable {
    int n = 0;
    std::vector<std::vector<double>> c_dir;  // c_{i->j}; diagonal 1
    std::vector<std::vector<double>> c;      // c_{ij} = c_{i->j} * c_{j->i}
    std::vector<std::vector<double>> c_add;  // additive variant
};

struct SignificanceVector {
    std::vector<double> s;      // relative positional significance in [0,1]
    std::vector<double> s_abs;  // s_i * vol(Omega_i)
};

// c_{i->j} = vol(Omega_{i->j}) / vol(R_{i->j}); unlinked pairs are 0, the
// diagonal is 1. Self-linking and unlinked strata never enter the ratios.
ClosenessTable closeness(const VolumeTable& volumes);

SignificanceVector significance(const VolumeTable& volumes);

struct ThresholdCurves {
    std::vector<double> taus;
    std::vector<VolumeTable> volumes;
    std::vector<ClosenessTable> closeness;
    std::vector<SignificanceVector> significance;
};

struct ThresholdFamilyParams {
    int samples_per_boundary = 512;
    double theta_min = 0.15;
    double fan_step = M_PI / 256.0;
};

// Re-runs the linking pipeline per threshold value over shared skeletons.
ThresholdCurves threshold_family(const Configuration& config, const std::vector<double>& taus,
                                 const ThresholdFamilyParams& params = {});

}  // namespace skelink
