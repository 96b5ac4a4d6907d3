#pragma once

#include <string>
#include <vector>

#include "qpresp/explorer.hpp"

namespace qpresp {

// Everything a run can configure, parsed from a strict INI file: unknown
// sections or keys are errors, as are malformed values.
struct RunConfig {
    ModelSpec model;
    NormParams norm;
    DomainSpec domain;
    FixedPointOptions fixed_point;
    LindstedtOptions lindstedt;
    ContextOptions context;
    ScanOptions scan;
    std::vector<Complex> scan_grid;

    Complex solve_eps{0.05, 0.0};
    bool solve_start_series = false;
    int solve_start_order = -1;

    int resonance_k_max = 16;
    int resonance_n_max = 8;
    int nonresonance_k_max = 64;

    Complex gamma_eps{0.05, 0.0};
    int gamma_grid_samples = 2048;

    Complex cauchy_center{0.05, 0.0};
    double cauchy_radius = 0.0;     // 0: derive a safe default from the domain
    int cauchy_samples = 64;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace qpresp
