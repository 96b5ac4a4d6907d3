#include "qpresp/pipeline.hpp"

#include <cmath>

namespace qpresp {

SpectralField to_basis(const EllipticPtr& target, const SpectralField& src) {
    if (src.basis() == target) return src;
    if (src.disc() != target->disc) throw Error("basis change across discretizations");
    SpectralField out = SpectralField::zero(target);
    if (src.basis_tag() == SourceTag::MinusDelta && target->tag == SourceTag::LOperator) {
        out.coeffs() = src.coeffs() * target->q.cast<Complex>();
    } else if (src.basis_tag() == SourceTag::LOperator && target->tag == SourceTag::MinusDelta) {
        out.coeffs() = src.coeffs() * src.basis()->q.transpose().cast<Complex>();
    } else if (src.basis_tag() == SourceTag::LOperator && target->tag == SourceTag::LOperator) {
        out.coeffs() =
            src.coeffs() * (src.basis()->q.transpose() * target->q).cast<Complex>();
    } else {
        out.coeffs() = src.coeffs();
    }
    return out;
}

namespace {

VecR real_average(const SpectralField& f) {
    const Vec avg = f.theta_average();
    if (avg.size() != 0 && avg.imag().cwiseAbs().maxCoeff() >
                               1e-12 * std::max(1.0, avg.cwiseAbs().maxCoeff()))
        throw Error("forcing average is not real");
    return avg.real();
}

}  // namespace

ModelContext build_context(const ModelSpec& spec, const ContextOptions& opts) {
    spec.trunc.validate();
    spec.validate();
    ModelContext ctx;
    ctx.spec = spec;
    ctx.disc = make_discretization(spec.omega.dim(), spec.trunc);
    ctx.delta = minus_delta_operator(ctx.disc);
    const SpectralField f_delta = spec.build_forcing(ctx.delta);

    switch (spec.variant) {
        case Variant::A:
        case Variant::APrime: {
            const VecR favg = real_average(f_delta);
            if (opts.run_multistart) {
                ctx.branches = multistart_c0(ctx.disc, spec.h, favg, opts.multistart);
            } else {
                ZerothProfile prof = solve_c0(ctx.disc, spec.h, favg,
                                              VecR::Zero(ctx.disc->n_x()), opts.multistart.newton);
                if (prof.converged) {
                    ZerothBranch b;
                    b.profile = std::move(prof);
                    const EllipticPtr L0 = build_L(ctx.disc, spec.h, b.profile.c0, false);
                    b.lambda1 = L0->lambda[0];
                    b.h2_ok = L0->h2_ok;
                    ctx.branches.push_back(std::move(b));
                }
            }
            if (ctx.branches.empty())
                throw Error("no converged zeroth-order profile");
            int pick = opts.branch;
            if (pick < 0) {
                for (std::size_t i = 0; i < ctx.branches.size(); ++i)
                    if (ctx.branches[i].h2_ok) {
                        pick = static_cast<int>(i);
                        break;
                    }
                if (pick < 0)
                    throw HypothesisError("H2", "no profile branch has a positive ground state");
            }
            if (pick >= static_cast<int>(ctx.branches.size()))
                throw ConfigError("zeroth-order branch index out of range");
            ctx.c0_report = ctx.branches[pick].profile;
            ctx.c0 = ctx.c0_report.c0;
            ctx.L = build_L(ctx.disc, spec.h, ctx.c0, true);
            ctx.basis = spec.variant == Variant::A ? ctx.L : ctx.delta;
            ctx.forcing = to_basis(ctx.basis, f_delta);
            ctx.u0 = SpectralField::zero(ctx.basis);
            break;
        }
        case Variant::B: {
            ctx.L = build_L(ctx.disc, spec.h, VecR::Zero(ctx.disc->n_x()), true);
            ctx.basis = ctx.L;
            ctx.forcing = to_basis(ctx.basis, f_delta);
            ctx.u0_report = solve_U0_modelB(ctx.forcing, spec.h, spec.omega, opts.zeroth_b);
            if (ctx.u0_report.status != IterationStatus::Converged)
                throw Error("model-B zeroth order did not converge");
            ctx.u0 = ctx.u0_report.u0;
            break;
        }
        case Variant::BPrime: {
            ctx.L = ctx.delta;
            ctx.basis = ctx.delta;
            ctx.forcing = f_delta;
            ctx.u0 = solve_U0_modelBprime(ctx.forcing, spec.omega);
            break;
        }
    }
    ctx.op = ModelOperator{spec.variant, spec.omega, ctx.basis, ctx.L};
    return ctx;
}

FixedPointResult solve_response(const ModelContext& ctx, Complex eps,
                                const SpectralField& start, const FixedPointOptions& opts) {
    return picard_solve(ctx.op, eps, ctx.forcing, ctx.spec.h, ctx.c0, start, opts);
}

LindstedtSeries expand_response(const ModelContext& ctx, const LindstedtOptions& opts) {
    LindstedtSeries s = lindstedt_expand(ctx.op, ctx.forcing, ctx.spec.h, ctx.c0, ctx.u0, opts);
    s.model_hash = ctx.spec.hash();
    return s;
}

HullResidual response_residual(const ModelContext& ctx, Complex eps, const SpectralField& u,
                               const NormParams* np) {
    return hull_residual(ctx.op, eps, u, ctx.forcing, ctx.spec.h, ctx.c0, np);
}

SpectralField zero_start(const ModelContext& ctx) { return SpectralField::zero(ctx.basis); }

}  // namespace qpresp
