#pragma once

#include "qpresp/fixedpoint.hpp"
#include "qpresp/lindstedt.hpp"
#include "qpresp/model.hpp"
#include "qpresp/zeroth.hpp"

namespace qpresp {

// Fully assembled problem instance: discretization, zeroth order, working
// basis, linear operator and forcing.  Built once per model spec and shared
// by all solver entry points.
struct ModelContext {
    ModelSpec spec;
    DiscretizationPtr disc;
    EllipticPtr delta;        // -Delta basis
    EllipticPtr basis;        // working basis (L for A/B, -Delta for A'/B')
    EllipticPtr L;            // elliptic operator entering the model
    ModelOperator op;
    SpectralField forcing;    // in the working basis
    VecR c0;                  // A/A' profile (-Delta coords); empty for B/B'
    SpectralField u0;         // B/B' zeroth-order field; zero field for A/A'
    ZerothProfile c0_report;
    ZerothField u0_report;
    std::vector<ZerothBranch> branches;  // A/A' multistart summary
};

struct ContextOptions {
    MultistartOptions multistart;
    PicardZeroOptions zeroth_b;
    int branch = -1;             // A/A': multistart branch index; -1 picks the
                                 // first H2-admissible one
    bool run_multistart = true;  // false: single Newton from the zero profile
};

ModelContext build_context(const ModelSpec& spec, const ContextOptions& opts = {});

// Change of spatial coordinates between the -Delta and L eigenbases.
SpectralField to_basis(const EllipticPtr& target, const SpectralField& src);

FixedPointResult solve_response(const ModelContext& ctx, Complex eps,
                                const SpectralField& start,
                                const FixedPointOptions& opts = {});
LindstedtSeries expand_response(const ModelContext& ctx, const LindstedtOptions& opts = {});
HullResidual response_residual(const ModelContext& ctx, Complex eps, const SpectralField& u,
                               const NormParams* np = nullptr);
SpectralField zero_start(const ModelContext& ctx);

}  // namespace qpresp
