#include "qpresp/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "qpresp/norms.hpp"

namespace qpresp {

std::vector<Complex> epsilon_grid_real(double lo, double hi, int count) {
    if (count < 1) throw ConfigError("epsilon grid needs at least one point");
    std::vector<Complex> out;
    out.reserve(count);
    if (count == 1) {
        out.emplace_back(lo, 0.0);
        return out;
    }
    for (int i = 0; i < count; ++i)
        out.emplace_back(lo + (hi - lo) * i / (count - 1), 0.0);
    return out;
}

std::vector<Complex> epsilon_grid_box(Complex corner_lo, Complex corner_hi, int nx, int ny) {
    if (nx < 1 || ny < 1) throw ConfigError("epsilon grid needs at least one point per axis");
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const double eta = ny == 1 ? corner_lo.imag()
                                   : corner_lo.imag() +
                                         (corner_hi.imag() - corner_lo.imag()) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            const double xi = nx == 1 ? corner_lo.real()
                                      : corner_lo.real() +
                                            (corner_hi.real() - corner_lo.real()) * i / (nx - 1);
            out.emplace_back(xi, eta);
        }
    }
    return out;
}

std::vector<ScanPoint> scan_epsilon(const ModelContext& ctx,
                                    const std::vector<Complex>& eps_values,
                                    const DomainSpec& domain, const LindstedtSeries* series,
                                    const ScanOptions& opts) {
    if (opts.use_series_start && series == nullptr)
        throw ConfigError("series start requested without an expansion");
    ResonanceTable table;
    if (opts.resonance_k_max > 0)
        table = resonance_locations(ctx.op, opts.resonance_k_max, opts.resonance_n_max);

    std::vector<ScanPoint> points(eps_values.size());
    std::atomic<std::size_t> cursor{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            ScanPoint& p = points[i];
            p.eps = eps_values[i];
            p.in_domain = domain.contains(p.eps);
            if (opts.resonance_k_max > 0)
                p.resonance_distance = nearest_resonance_distance(table, p.eps);
            if (opts.strict && !p.in_domain) continue;
            p.attempted = true;
            try {
                const SpectralField start = opts.use_series_start
                                                ? series->evaluate(p.eps, opts.start_order)
                                                : zero_start(ctx);
                FixedPointResult r = solve_response(ctx, p.eps, start, opts.fixed_point);
                if (r.status == FixedPointStatus::MultiplierUnderflow &&
                    r.min_abs_multiplier == 0.0) {
                    // The grid point hit an exact multiplier zero; nudge it off
                    // the resonance and record the perturbed sample instead.
                    p.eps += 1e-12 * Complex(std::sqrt(0.5), std::sqrt(0.5));
                    r = solve_response(ctx, p.eps, start, opts.fixed_point);
                }
                p.status = r.status;
                p.iterations = r.iterations;
                p.contraction = r.contraction;
                p.min_abs_multiplier = r.min_abs_multiplier;
                if (r.status == FixedPointStatus::Converged) {
                    const HullResidual res = response_residual(ctx, p.eps, r.u);
                    p.residual_raw = res.raw_sup;
                    p.residual_scaled = res.scaled_sup;
                    p.solution_norm = norm(r.u, opts.norm);
                }
            } catch (const std::exception& e) {
                p.error = e.what();
            }
        }
    };

    const int n_threads = std::max(1, opts.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return points;
}

ResidualOrderFit fit_residual_points(const std::vector<double>& eps_abs,
                                     const std::vector<double>& residuals, int expected,
                                     double floor) {
    if (eps_abs.size() != residuals.size())
        throw ConfigError("residual fit needs one residual per epsilon");
    ResidualOrderFit fit;
    fit.expected = expected;
    fit.floor = floor;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fit.slope = fit.intercept = fit.r_squared = nan;
    for (std::size_t i = 0; i < eps_abs.size(); ++i) {
        if (residuals[i] < floor) {
            ++fit.skipped_underflow;
            continue;
        }
        fit.eps_abs.push_back(eps_abs[i]);
        fit.residuals.push_back(residuals[i]);
    }
    const std::size_t n = fit.eps_abs.size();
    if (n < 2) return fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(fit.eps_abs[i]);
        const double y = std::log(fit.residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(fit.eps_abs[i]);
        const double y = std::log(fit.residuals[i]);
        const double yhat = fit.intercept + fit.slope * x;
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

ResidualOrderFit fit_residual_order(const ModelContext& ctx, const LindstedtSeries& series,
                                    const std::vector<Complex>& eps_values, double floor) {
    if (eps_values.size() < 5)
        throw ConfigError("the residual-order fit needs at least 5 ladder points");
    std::vector<double> eps_abs, residuals;
    eps_abs.reserve(eps_values.size());
    residuals.reserve(eps_values.size());
    for (const Complex eps : eps_values) {
        const SpectralField u = series.evaluate(eps);
        eps_abs.push_back(std::abs(eps));
        residuals.push_back(response_residual(ctx, eps, u).raw_sup);
    }
    return fit_residual_points(eps_abs, residuals, series.order() + 1, floor);
}

CauchyCheck cauchy_check(const ModelContext& ctx, Complex center, double radius, int samples,
                         const DomainSpec& domain, const LindstedtSeries* series,
                         const FixedPointOptions& fp) {
    if (samples < 8) throw ConfigError("circle quadrature needs at least 8 samples");
    if (radius <= 0.0) throw ConfigError("circle radius must be positive");
    const auto require_inside = [&](Complex eps) {
        if (domain.contains_union(eps)) return;
        std::ostringstream os;
        os << "cauchy circle leaves the epsilon domain " << domain.describe() << " at eps = ("
           << eps.real() << ", " << eps.imag() << "); shrink the radius or move the center";
        throw ConfigError(os.str());
    };
    require_inside(center);
    for (int j = 0; j < samples; ++j) {
        const double phi = kTwoPi * j / samples;
        require_inside(center + radius * Complex(std::cos(phi), std::sin(phi)));
    }

    CauchyCheck out;
    out.center = center;
    out.radius = radius;
    out.samples = samples;
    out.domain_ok = true;

    const auto start_at = [&](Complex eps, const SpectralField* cont) -> SpectralField {
        if (series != nullptr) return series->evaluate(eps);
        if (cont != nullptr) return *cont;
        return zero_start(ctx);
    };

    const FixedPointResult rc = solve_response(ctx, center, start_at(center, nullptr), fp);
    if (rc.status != FixedPointStatus::Converged) {
        ++out.failures;
        return out;
    }

    Mat mean = Mat::Zero(rc.u.coeffs().rows(), rc.u.coeffs().cols());
    std::vector<Mat> moments(9, mean);
    const SpectralField* previous = nullptr;
    SpectralField last = rc.u;
    for (int j = 0; j < samples; ++j) {
        const double phi = kTwoPi * j / samples;
        const Complex eps = center + radius * Complex(std::cos(phi), std::sin(phi));
        const FixedPointResult r = solve_response(ctx, eps, start_at(eps, previous), fp);
        if (r.status != FixedPointStatus::Converged) {
            ++out.failures;
            continue;
        }
        last = r.u;
        previous = &last;
        mean += last.coeffs() / static_cast<double>(samples);
        for (int p = 0; p < static_cast<int>(moments.size()); ++p) {
            const Complex w =
                std::polar(1.0, -phi * p) / (samples * std::pow(radius, p));
            moments[p] += w * last.coeffs();
        }
    }
    if (out.failures > 0) return out;
    const double scale = std::max(1.0, rc.u.max_abs_coeff());
    out.center_defect = (mean - rc.u.coeffs()).cwiseAbs().maxCoeff() / scale;
    out.coeff_sups.reserve(moments.size());
    for (const Mat& m : moments) out.coeff_sups.push_back(m.cwiseAbs().maxCoeff());
    return out;
}

}  // namespace qpresp
