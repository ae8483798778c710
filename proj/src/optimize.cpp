#include "riskdual/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "riskdual/extreal.hpp"
#include "riskdual/rng.hpp"

namespace riskdual {

namespace {

struct EvalCounter {
    const Objective* f;
    int count = 0;
    int cap = 0;
    bool hit_cap = false;

    double operator()(std::span<const double> x) {
        if (count >= cap) {
            hit_cap = true;
            return ext::inf;  // starve further exploration
        }
        ++count;
        return (*f)(x);
    }
};

}  // namespace

std::optional<RayCertificate> probe_ray(const Objective& f, std::span<const double> from,
                                        std::span<const double> direction,
                                        const MinimizeOptions& opts, int* evals) {
    const int dim = static_cast<int>(from.size());
    std::vector<double> x(from.begin(), from.end());
    double prev = f(x);
    if (evals) ++*evals;
    if (ext::is_minf(prev)) {
        RayCertificate cert;
        cert.direction.assign(direction.begin(), direction.end());
        cert.note = "objective already -inf at the probe origin";
        cert.last_value = prev;
        return cert;
    }
    // The decrease has to be sustained through the FINAL doublings: a bounded
    // objective with big early drops flattens out and loses the streak, while
    // a genuine descent ray keeps dropping proportionally to the step forever.
    double step = 1.0;
    int consecutive = 0;
    double slope_seen = 0.0, last_v = prev;
    for (int t = 0; t < opts.ray_doublings; ++t) {
        for (int i = 0; i < dim; ++i) x[i] = from[i] + step * direction[i];
        double v = f(x);
        if (evals) ++*evals;
        if (ext::is_minf(v)) {
            RayCertificate cert;
            cert.direction.assign(direction.begin(), direction.end());
            cert.observed_slope = ext::inf;
            cert.last_value = v;
            cert.note = "objective reached -inf at step " + std::to_string(step);
            return cert;
        }
        double drop = prev - v;
        if (ext::is_finite(v) && ext::is_finite(prev) && drop >= opts.unbounded_slope * step) {
            ++consecutive;
            slope_seen = drop / step;
            if (consecutive >= 3 && v < -1e12) {
                RayCertificate cert;
                cert.direction.assign(direction.begin(), direction.end());
                cert.observed_slope = slope_seen;
                cert.last_value = v;
                cert.note = "sustained decrease crossed -1e12 at step " + std::to_string(step);
                return cert;
            }
        } else {
            consecutive = 0;
        }
        prev = v;
        last_v = v;
        step *= 2.0;
    }
    if (consecutive >= 3) {
        RayCertificate cert;
        cert.direction.assign(direction.begin(), direction.end());
        cert.observed_slope = slope_seen;
        cert.last_value = last_v;
        cert.note = "decrease sustained through the last " + std::to_string(consecutive) +
                    " doublings";
        return cert;
    }
    return std::nullopt;
}

namespace {

std::vector<std::vector<double>> probe_directions(int dim, Rng& rng) {
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < dim; ++i) {
        std::vector<double> d(dim, 0.0);
        d[i] = 1.0;
        dirs.push_back(d);
        d[i] = -1.0;
        dirs.push_back(d);
    }
    if (dim > 1) {
        double u = 1.0 / std::sqrt(static_cast<double>(dim));
        dirs.push_back(std::vector<double>(dim, u));
        dirs.push_back(std::vector<double>(dim, -u));
    }
    for (int r = 0; r < std::min(4, dim); ++r) {
        std::vector<double> d(dim);
        double nrm = 0.0;
        for (auto& v : d) {
            v = rng.uniform(-1.0, 1.0);
            nrm += v * v;
        }
        nrm = std::sqrt(std::max(nrm, 1e-12));
        for (auto& v : d) v /= nrm;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

}  // namespace

MinimizeResult minimize_pattern(const Objective& f, int dim, const MinimizeOptions& opts,
                                const std::vector<std::vector<double>>& extra_starts) {
    MinimizeResult res;
    EvalCounter counted{&f, 0, opts.max_evals, false};
    auto fc = [&counted](std::span<const double> x) { return counted(x); };

    // start list: origin, caller-provided, then seeded random points
    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(dim, 0.0));
    for (const auto& s : extra_starts) starts.push_back(s);
    Rng rng(opts.seed);
    while (static_cast<int>(starts.size()) < opts.multistarts) {
        std::vector<double> s(dim);
        for (auto& v : s) v = rng.uniform(-3.0, 3.0);
        starts.push_back(std::move(s));
    }

    res.value = ext::inf;
    res.arg.assign(dim, 0.0);
    if (dim == 0) {
        res.value = f(std::span<const double>{});
        res.evals = 1;
        res.converged = true;
        return res;
    }

    std::vector<std::vector<double>> dirs = probe_directions(dim, rng);

    if (opts.rays_first) {
        // screen for unboundedness before spending the descent budget; on
        // plateau-heavy objectives the certificate is the whole answer
        for (const auto& d : dirs) {
            auto cert = probe_ray(f, starts.front(), d, opts, &counted.count);
            if (cert) {
                res.unbounded = true;
                res.value = -ext::inf;
                // park the reported point one step along the certified ray so
                // downstream consumers can keep walking it
                res.arg = starts.front();
                for (int i = 0; i < dim; ++i) res.arg[i] += 4.0 * cert->direction[i];
                res.certificate = std::move(cert);
                res.evals = counted.count;
                return res;
            }
        }
    }

    for (const auto& start : starts) {
        std::vector<double> x = start;
        double fx = fc(x);
        double step = opts.init_step;
        for (int sweep = 0; sweep < opts.max_sweeps && step >= opts.step_tol; ++sweep) {
            bool improved = false;
            // coordinate moves first, composite directions after: max-type
            // objectives need the diagonals to leave tied corners
            for (const auto& d : dirs) {
                std::vector<double> y = x;
                for (int i = 0; i < dim; ++i) y[i] += step * d[i];
                double fy = fc(y);
                if (fy < fx) {
                    // keep walking while the same move pays off
                    for (int walk = 0; walk < 64; ++walk) {
                        std::vector<double> y2 = y;
                        for (int i = 0; i < dim; ++i) y2[i] += step * d[i];
                        double fy2 = fc(y2);
                        if (!(fy2 < fy)) break;
                        y = std::move(y2);
                        fy = fy2;
                    }
                    x = std::move(y);
                    fx = fy;
                    improved = true;
                    break;
                }
            }
            if (!improved) step *= opts.shrink;
            if (counted.hit_cap) break;
        }
        if (step < opts.step_tol) res.converged = true;
        if (fx < res.value) {
            res.value = fx;
            res.arg = x;
        }
        if (counted.hit_cap) break;
    }

    // ray screening from the incumbent
    for (const auto& d : dirs) {
        if (counted.count >= opts.max_evals) break;
        auto cert = probe_ray(f, res.arg, d, opts, &counted.count);
        if (cert) {
            res.unbounded = true;
            res.value = -ext::inf;
            for (int i = 0; i < dim; ++i) res.arg[i] += 4.0 * cert->direction[i];
            res.certificate = std::move(cert);
            break;
        }
    }

    res.evals = counted.count;
    res.budget_exhausted = counted.hit_cap;
    return res;
}

MinimizeResult maximize_pattern(const Objective& f, int dim, const MinimizeOptions& opts,
                                const std::vector<std::vector<double>>& extra_starts) {
    Objective neg = [&f](std::span<const double> x) {
        double v = f(x);
        if (ext::is_pinf(v)) return -ext::inf;
        if (ext::is_minf(v)) return ext::inf;
        return -v;
    };
    MinimizeResult r = minimize_pattern(neg, dim, opts, extra_starts);
    if (ext::is_finite(r.value)) r.value = -r.value;
    else r.value = ext::is_minf(r.value) ? ext::inf : -ext::inf;
    return r;
}

}  // namespace riskdual
