#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Derivative-free minimization used by the numeric dual paths: multistart
// coordinate pattern search plus explicit ray probes. A minimum reported as
// -inf is always backed by a certificate (a direction along which the value
// kept dropping at a bounded-below rate through consecutive step doublings),
// never by a guess.

namespace riskdual {

struct RayCertificate {
    std::vector<double> direction;
    double observed_slope = 0.0;
    double last_value = 0.0;
    std::string note;
};

struct MinimizeOptions {
    int multistarts = 8;
    int max_sweeps = 500;
    double init_step = 1.0;
    double shrink = 0.5;
    double step_tol = 1e-10;
    int max_evals = 40000;
    // unboundedness: value must fall by at least slope * step on the last 3
    // consecutive doublings of the probe step
    double unbounded_slope = 1e-7;
    int ray_doublings = 40;
    bool rays_first = true;  // screen rays from the first start before descending
    std::uint64_t seed = 1;
};

struct MinimizeResult {
    double value = 0.0;
    std::vector<double> arg;
    bool unbounded = false;
    std::optional<RayCertificate> certificate;
    int evals = 0;
    bool converged = false;         // some start shrank its step below tol
    bool budget_exhausted = false;  // eval cap hit before convergence
};

using Objective = std::function<double(std::span<const double>)>;

MinimizeResult minimize_pattern(const Objective& f, int dim, const MinimizeOptions& opts,
                                const std::vector<std::vector<double>>& extra_starts = {});

// convenience wrapper: maximize f = minimize -f; result.value is the max
MinimizeResult maximize_pattern(const Objective& f, int dim, const MinimizeOptions& opts,
                                const std::vector<std::vector<double>>& extra_starts = {});

// Probe a single ray from `from`: returns a certificate when the objective
// decreases at a bounded-below rate through 3 consecutive doublings.
std::optional<RayCertificate> probe_ray(const Objective& f, std::span<const double> from,
                                        std::span<const double> direction,
                                        const MinimizeOptions& opts, int* evals);

}  // namespace riskdual
