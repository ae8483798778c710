#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "riskdual/probspace.hpp"
#include "riskdual/rng.hpp"
#include "riskdual/scenarios.hpp"

namespace riskdual {

// Property labels a measure can declare; audits check declared sets.
enum class Property { reg, mon_down, qco, evq, cas, csa, convex };

std::string property_name(Property p);

// Conditional risk measure: finite-valued positions in, one extended value
// per block out. Catalog measures carry a per-block evaluator (what the
// numeric layer optimizes over); ad-hoc measures built from a whole-space
// lambda can skip it, at the cost of being usable in audits only.
class RiskMeasure {
  public:
    using BlockEval = std::function<double(std::span<const double> values,
                                           std::span<const double> cond_weights, int block)>;
    using FullEval = std::function<Rv(const Rv&, const FilteredSpace&)>;

    RiskMeasure() = default;
    RiskMeasure(std::string name, BlockEval block_eval, std::set<Property> declared);
    static RiskMeasure from_full(std::string name, FullEval full, std::set<Property> declared);

    const std::string& name() const { return name_; }
    const std::set<Property>& declared() const { return declared_; }
    bool declares(Property p) const { return declared_.count(p) > 0; }
    bool has_block_eval() const { return static_cast<bool>(block_eval_); }

    Rv evaluate(const Rv& x, const FilteredSpace& sp) const;
    double evaluate_block(std::span<const double> values, std::span<const double> cond_weights,
                          int block) const;
    // evaluate_block on the atoms of one block of a full variable
    double evaluate_on_block(const Rv& x, const FilteredSpace& sp, int block) const;

    // exact +inf blocks when the catalog knows them
    const std::optional<GSet>& known_upsilon() const { return upsilon_; }
    void set_known_upsilon(GSet u) { upsilon_ = u; }

    const std::map<std::string, double>& params() const { return params_; }
    void set_param(const std::string& k, double v) { params_[k] = v; }

  private:
    std::string name_;
    BlockEval block_eval_;
    FullEval full_eval_;
    std::set<Property> declared_;
    std::optional<GSet> upsilon_;
    std::map<std::string, double> params_;
};

// ---- catalog ----------------------------------------------------------

RiskMeasure expected_loss_measure();
RiskMeasure worst_case_measure();
// (1/gamma) log E[exp(-gamma X) | blocks]; gamma > 0
RiskMeasure entropic_measure(double gamma);
// -u^{-1}(E[u(X)|blocks]) with the quadratic utility u(x) = x - x^2/(2 kappa)
// capped flat above kappa; increasingly risk averse, so cash subadditive but
// not cash additive. Intended for positions well inside (-kappa, kappa).
RiskMeasure certainty_equivalent_measure(double kappa);
// left-continuous lambda-quantile of the loss -X under conditional weights
RiskMeasure conditional_var_measure(double lambda);
// +inf identically on the given blocks, expected loss elsewhere
RiskMeasure pathological_infinite_measure(GSet upsilon);

// every catalog entry under its config name, for listings and parsing
std::vector<std::string> catalog_names();

// ---- audits ------------------------------------------------------------

struct AuditViolation {
    std::string what;
    int block = -1;
    double lhs = 0.0, rhs = 0.0;
};

struct AuditReport {
    std::string audit;
    std::string measure;
    int samples = 0;
    bool pass = false;
    std::vector<AuditViolation> violations;  // capped
    std::vector<std::string> notes;
};

AuditReport audit_reg(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                      double tol = 1e-9);
AuditReport audit_mon_down(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                           double tol = 1e-9);
AuditReport audit_qco(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                      double tol = 1e-9);

struct CasCsaReport {
    AuditReport cas;
    AuditReport csa;
};
CasCsaReport audit_cas_csa(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                           double tol = 1e-9);

// midpoint convexity, the cash-additive companion of quasiconvexity
AuditReport audit_convex(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                         double tol = 1e-9);

struct EffectivenessPartition {
    GSet t_rho;     // some position evaluates finite per block
    GSet upsilon;   // +inf for every probe
    bool exact = false;  // catalog override vs probing
    std::vector<std::string> witnesses;
};

EffectivenessPartition effectiveness_partition(const RiskMeasure& rho, const FilteredSpace& sp,
                                               Rng rng, int probe_count = 16);

// Lower level sets are sampled for conditional convexity, and sampled outside
// points are separated through the LP layer; necessarily a sampler, reported
// as such.
AuditReport audit_evq(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int levels = 6,
                      int members_per_level = 24, double tol = 1e-7);

// run the audits matching the measure's declared properties
std::vector<AuditReport> audit_declared(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng,
                                        int samples, double tol = 1e-9);

}  // namespace riskdual
