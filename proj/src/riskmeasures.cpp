#include "riskdual/riskmeasures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "riskdual/sampling.hpp"
#include "riskdual/separation.hpp"

namespace riskdual {

std::string property_name(Property p) {
    switch (p) {
        case Property::reg: return "REG";
        case Property::mon_down: return "MON";
        case Property::qco: return "QCO";
        case Property::evq: return "EVQ";
        case Property::cas: return "CAS";
        case Property::csa: return "CSA";
        case Property::convex: return "CONVEX";
    }
    return "?";
}

RiskMeasure::RiskMeasure(std::string name, BlockEval block_eval, std::set<Property> declared)
    : name_(std::move(name)), block_eval_(std::move(block_eval)), declared_(std::move(declared)) {}

RiskMeasure RiskMeasure::from_full(std::string name, FullEval full, std::set<Property> declared) {
    RiskMeasure m;
    m.name_ = std::move(name);
    m.full_eval_ = std::move(full);
    m.declared_ = std::move(declared);
    return m;
}

Rv RiskMeasure::evaluate(const Rv& x, const FilteredSpace& sp) const {
    validate_rv(x, sp, /*require_finite=*/true);
    if (full_eval_) return full_eval_(x, sp);
    Rv out(sp.atom_count());
    for (int b = 0; b < sp.block_count(); ++b) {
        double v = evaluate_on_block(x, sp, b);
        for (int a : sp.block_atoms(b)) out[a] = v;
    }
    return out;
}

double RiskMeasure::evaluate_block(std::span<const double> values,
                                   std::span<const double> cond_weights, int block) const {
    if (!block_eval_) throw std::logic_error("measure '" + name_ + "' has no per-block evaluator");
    return block_eval_(values, cond_weights, block);
}

double RiskMeasure::evaluate_on_block(const Rv& x, const FilteredSpace& sp, int block) const {
    const auto& atoms = sp.block_atoms(block);
    std::vector<double> vals(atoms.size()), cw(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        vals[i] = x[atoms[i]];
        cw[i] = sp.cond_weight(atoms[i]);
    }
    return evaluate_block(vals, cw, block);
}

// ---- catalog ----------------------------------------------------------

RiskMeasure expected_loss_measure() {
    auto eval = [](std::span<const double> v, std::span<const double> c, int) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s -= c[i] * v[i];
        return s;
    };
    RiskMeasure m("expected_loss", eval,
                  {Property::reg, Property::mon_down, Property::qco, Property::evq, Property::cas,
                   Property::csa, Property::convex});
    m.set_known_upsilon(GSet::empty());
    return m;
}

RiskMeasure worst_case_measure() {
    auto eval = [](std::span<const double> v, std::span<const double>, int) {
        double worst = -ext::inf;
        for (double x : v) worst = std::max(worst, -x);
        return worst;
    };
    RiskMeasure m("worst_case", eval,
                  {Property::reg, Property::mon_down, Property::qco, Property::evq, Property::cas,
                   Property::csa, Property::convex});
    m.set_known_upsilon(GSet::empty());
    return m;
}

RiskMeasure entropic_measure(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("entropic: gamma must be > 0");
    auto eval = [gamma](std::span<const double> v, std::span<const double> c, int) {
        // (1/gamma) log sum c_i exp(-gamma v_i), stabilized
        double top = -ext::inf;
        for (double x : v) top = std::max(top, -gamma * x);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += c[i] * std::exp(-gamma * v[i] - top);
        return (top + std::log(s)) / gamma;
    };
    RiskMeasure m("entropic", eval,
                  {Property::reg, Property::mon_down, Property::qco, Property::evq, Property::cas,
                   Property::csa, Property::convex});
    m.set_param("gamma", gamma);
    m.set_known_upsilon(GSet::empty());
    return m;
}

namespace {

// quadratic utility, flat above kappa so monotonicity survives far samples
double quad_u(double x, double kappa) {
    if (x >= kappa) return kappa / 2.0;
    return x - x * x / (2.0 * kappa);
}

double quad_u_inv(double v, double kappa) {
    // lower branch of u^{-1}; v <= kappa/2 always holds for averages of u
    double arg = std::max(1.0 - 2.0 * v / kappa, 0.0);
    return kappa * (1.0 - std::sqrt(arg));
}

}  // namespace

RiskMeasure certainty_equivalent_measure(double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("cert_equiv: kappa must be > 0");
    auto eval = [kappa](std::span<const double> v, std::span<const double> c, int) {
        double eu = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) eu += c[i] * quad_u(v[i], kappa);
        return -quad_u_inv(eu, kappa);
    };
    RiskMeasure m("cert_equiv", eval,
                  {Property::reg, Property::mon_down, Property::qco, Property::evq, Property::csa});
    m.set_param("kappa", kappa);
    m.set_known_upsilon(GSet::empty());
    return m;
}

RiskMeasure conditional_var_measure(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("conditional_var: lambda must lie in (0,1)");
    auto eval = [lambda](std::span<const double> v, std::span<const double> c, int) {
        // left-continuous lambda-quantile of the losses -v under c
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (-v[a] != -v[b]) return -v[a] < -v[b];
            return a < b;
        });
        double cum = 0.0;
        for (std::size_t idx : order) {
            cum += c[idx];
            if (cum >= lambda - 1e-12) return -v[idx];
        }
        return -v[order.back()];
    };
    // the quantile is translation equivariant but its level sets are unions
    // of boxes, so quasiconvexity is deliberately not declared
    RiskMeasure m("conditional_var", eval,
                  {Property::reg, Property::mon_down, Property::cas, Property::csa});
    m.set_param("lambda", lambda);
    m.set_known_upsilon(GSet::empty());
    return m;
}

RiskMeasure pathological_infinite_measure(GSet upsilon) {
    auto eval = [upsilon](std::span<const double> v, std::span<const double> c, int block) {
        if (upsilon.contains(block)) return ext::inf;
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s -= c[i] * v[i];
        return s;
    };
    RiskMeasure m("pathological_infinite", eval,
                  {Property::reg, Property::mon_down, Property::qco, Property::evq, Property::cas,
                   Property::csa, Property::convex});
    m.set_param("blocks", static_cast<double>(upsilon.mask));
    m.set_known_upsilon(upsilon);
    return m;
}

std::vector<std::string> catalog_names() {
    return {"expected_loss", "worst_case", "entropic:gamma=<g>", "cert_equiv:kappa=<k>",
            "conditional_var:lambda=<l>", "pathological_infinite:blocks=<mask>"};
}

// ---- audits ------------------------------------------------------------

namespace {

void record(AuditReport& rep, const std::string& what, int block, double lhs, double rhs) {
    if (rep.violations.size() < 8) rep.violations.push_back({what, block, lhs, rhs});
}

AuditReport make_report(const std::string& audit, const RiskMeasure& rho) {
    AuditReport rep;
    rep.audit = audit;
    rep.measure = rho.name();
    return rep;
}

}  // namespace

AuditReport audit_reg(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                      double tol) {
    AuditReport rep = make_report("reg", rho);
    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv x1 = random_rv(r, sp), x2 = random_rv(r, sp);
        GSet a = random_gset(r, sp);
        GSet ac = a.complement(sp.block_count());
        Rv pasted = paste({x1, x2}, {a, ac}, sp);
        Rv lhs = rho.evaluate(pasted, sp);
        Rv r1 = rho.evaluate(x1, sp), r2 = rho.evaluate(x2, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            double want = a.contains(b) ? r1[sp.block_atoms(b)[0]] : r2[sp.block_atoms(b)[0]];
            double got = lhs[sp.block_atoms(b)[0]];
            if (ext::gap(got, want) > tol) record(rep, "two-part pasting", b, got, want);
        }
        // three-part pasting, the finite stand-in for countable regularity
        if (sp.block_count() >= 3) {
            Rv x3 = random_rv(r, sp);
            GSet p1 = GSet::single(0), p2 = GSet::single(1),
                 p3 = p1.unite(p2).complement(sp.block_count());
            Rv pasted3 = paste({x1, x2, x3}, {p1, p2, p3}, sp);
            Rv lhs3 = rho.evaluate(pasted3, sp);
            Rv r3 = rho.evaluate(x3, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                double want = p1.contains(b)   ? r1[sp.block_atoms(b)[0]]
                              : p2.contains(b) ? r2[sp.block_atoms(b)[0]]
                                               : r3[sp.block_atoms(b)[0]];
                double got = lhs3[sp.block_atoms(b)[0]];
                if (ext::gap(got, want) > tol) record(rep, "three-part pasting", b, got, want);
            }
        }
    }
    rep.samples = samples;
    rep.pass = rep.violations.empty();
    return rep;
}

AuditReport audit_mon_down(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                           double tol) {
    AuditReport rep = make_report("mon_down", rho);
    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv x2 = random_rv(r, sp);
        Rv x1 = x2;
        for (auto& v : x1) v += r.uniform(0.0, 3.0);
        Rv r1 = rho.evaluate(x1, sp), r2 = rho.evaluate(x2, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            if (!ext::le(r1[a0], r2[a0], tol)) record(rep, "larger position, larger risk", b, r1[a0], r2[a0]);
        }
    }
    rep.samples = samples;
    rep.pass = rep.violations.empty();
    return rep;
}

AuditReport audit_qco(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                      double tol) {
    AuditReport rep = make_report("qco", rho);
    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv x1 = random_rv(r, sp), x2 = random_rv(r, sp);
        Rv lam = random_mixing(r, sp);
        Rv mix(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a)
            mix[a] = lam[a] * x1[a] + (1.0 - lam[a]) * x2[a];
        Rv rm = rho.evaluate(mix, sp);
        Rv r1 = rho.evaluate(x1, sp), r2 = rho.evaluate(x2, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            double cap = std::max(r1[a0], r2[a0]);
            if (!ext::le(rm[a0], cap, tol)) record(rep, "mix above both risks", b, rm[a0], cap);
        }
    }
    rep.samples = samples;
    rep.pass = rep.violations.empty();
    return rep;
}

CasCsaReport audit_cas_csa(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                           double tol) {
    CasCsaReport out{make_report("cas", rho), make_report("csa", rho)};
    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv x = random_rv(r, sp);
        Rv lam_any = random_g_measurable(r, sp, -3.0, 3.0);
        Rv lam_pos = random_g_measurable(r, sp, 0.0, 3.0);
        Rv rx = rho.evaluate(x, sp);

        Rv shifted(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a) shifted[a] = x[a] + lam_any[a];
        Rv lhs = rho.evaluate(shifted, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            double want = ext::sub(rx[a0], lam_any[a0]);
            if (ext::gap(lhs[a0], want) > tol)
                record(out.cas, "cash shift not subtracted exactly", b, lhs[a0], want);
        }

        for (int a = 0; a < sp.atom_count(); ++a) shifted[a] = x[a] + lam_pos[a];
        Rv lhs2 = rho.evaluate(shifted, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            double floor = ext::sub(rx[a0], lam_pos[a0]);
            if (!ext::le(floor, lhs2[a0], tol))
                record(out.csa, "cash shift over-subtracted", b, lhs2[a0], floor);
        }
    }
    out.cas.samples = out.csa.samples = samples;
    out.cas.pass = out.cas.violations.empty();
    out.csa.pass = out.csa.violations.empty();
    return out;
}

AuditReport audit_convex(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int samples,
                         double tol) {
    AuditReport rep = make_report("convex", rho);
    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv x1 = random_rv(r, sp), x2 = random_rv(r, sp);
        Rv mid(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a) mid[a] = 0.5 * (x1[a] + x2[a]);
        Rv rm = rho.evaluate(mid, sp);
        Rv r1 = rho.evaluate(x1, sp), r2 = rho.evaluate(x2, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            double avg = ext::add(r1[a0], r2[a0]);
            if (ext::is_finite(avg)) avg *= 0.5;
            if (!ext::le(rm[a0], avg, tol)) record(rep, "midpoint above average", b, rm[a0], avg);
        }
    }
    rep.samples = samples;
    rep.pass = rep.violations.empty();
    return rep;
}

EffectivenessPartition effectiveness_partition(const RiskMeasure& rho, const FilteredSpace& sp,
                                               Rng rng, int probe_count) {
    EffectivenessPartition part;
    if (rho.known_upsilon()) {
        part.upsilon = *rho.known_upsilon();
        part.t_rho = part.upsilon.complement(sp.block_count());
        part.exact = true;
        part.witnesses.push_back("catalog partition");
        return part;
    }
    std::vector<Rv> probes;
    probes.push_back(Rv(sp.atom_count(), 0.0));
    probes.push_back(Rv(sp.atom_count(), 2.0));
    probes.push_back(Rv(sp.atom_count(), -2.0));
    for (int i = 0; i < probe_count; ++i) {
        Rng r = rng.fork(i);
        probes.push_back(random_rv(r, sp, -8.0, 8.0));
    }
    part.upsilon = GSet::empty();
    for (int b = 0; b < sp.block_count(); ++b) {
        bool all_inf = true;
        for (const auto& p : probes) {
            Rv v = rho.evaluate(p, sp);
            if (!ext::is_pinf(v[sp.block_atoms(b)[0]])) {
                all_inf = false;
                part.witnesses.push_back("block " + std::to_string(b) + ": finite probe found");
                break;
            }
        }
        if (all_inf) part.upsilon = part.upsilon.unite(GSet::single(b));
    }
    part.t_rho = part.upsilon.complement(sp.block_count());
    part.exact = false;
    return part;
}

AuditReport audit_evq(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng, int levels,
                      int members_per_level, double tol) {
    AuditReport rep = make_report("evq", rho);
    EffectivenessPartition part = effectiveness_partition(rho, sp, rng.fork(9001));

    auto below_level = [&](const Rv& xi, const Rv& level) {
        Rv v = rho.evaluate(xi, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            if (!part.t_rho.contains(b)) continue;
            int a0 = sp.block_atoms(b)[0];
            if (!ext::le(v[a0], level[a0], 1e-12)) return false;
        }
        return true;
    };

    int separations_ok = 0, separations_run = 0;
    for (int t = 0; t < levels; ++t) {
        Rng r = rng.fork(t);
        // anchor the level at a sampled position so the level set is inhabited
        Rv anchor = random_rv(r, sp, -2.0, 2.0);
        Rv ranchor = rho.evaluate(anchor, sp);
        std::vector<double> lvl(sp.block_count());
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            lvl[b] = ext::is_finite(ranchor[a0]) ? ranchor[a0] + r.uniform(0.3, 1.2) : 0.0;
        }
        Rv level = from_block_values(lvl, sp);

        // members: the anchor pushed up plus accepted rejection samples
        std::vector<Rv> members;
        members.push_back(anchor);
        int tries = 0;
        while (static_cast<int>(members.size()) < members_per_level && tries < 40 * members_per_level) {
            ++tries;
            Rv cand;
            if (r.coin()) {
                cand = anchor;
                for (auto& v : cand) v += r.uniform(0.0, 3.0);
            } else {
                cand = random_rv(r, sp, -3.0, 3.0);
            }
            if (below_level(cand, level)) members.push_back(std::move(cand));
        }

        // conditional convexity on sampled pairs
        for (int s = 0; s + 1 < static_cast<int>(members.size()) && s < 16; ++s) {
            const Rv& m1 = members[s];
            const Rv& m2 = members[(s * 7 + 3) % members.size()];
            Rv lam = random_mixing(r, sp);
            Rv mix(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a)
                mix[a] = lam[a] * m1[a] + (1.0 - lam[a]) * m2[a];
            Rv v = rho.evaluate(mix, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                if (!part.t_rho.contains(b)) continue;
                int a0 = sp.block_atoms(b)[0];
                if (!ext::le(v[a0], level[a0], tol))
                    record(rep, "level set not conditionally convex", b, v[a0], lvl[b]);
            }
        }

        // separation of a clearly-outside point through the LP layer
        Rv outside = anchor;
        bool found = false;
        for (int push = 0; push < 12 && !found; ++push) {
            for (auto& v : outside) v -= 1.0;
            Rv v = rho.evaluate(outside, sp);
            found = true;
            for (int b = 0; b < sp.block_count() && found; ++b) {
                if (!part.t_rho.contains(b)) continue;
                int a0 = sp.block_atoms(b)[0];
                if (!(ext::is_pinf(v[a0]) || v[a0] > lvl[b] + 0.2)) found = false;
            }
        }
        if (!found || part.t_rho.empty_set()) {
            rep.notes.push_back("level " + std::to_string(t) + ": no outside point constructed");
            continue;
        }
        ++separations_run;
        HullSet hull;
        hull.generators = members;
        hull.mode = HullMode::convex;
        if (rho.declares(Property::mon_down)) {
            for (int a = 0; a < sp.atom_count(); ++a) {
                Rv ray(sp.atom_count(), 0.0);
                ray[a] = 1.0;
                hull.rays.push_back(std::move(ray));
            }
        }
        SeparationResult sep = separate(outside, hull, sp);
        bool good = true;
        for (int b = 0; b < sp.block_count(); ++b) {
            if (!part.t_rho.contains(b) || !sep.d_c.contains(b)) continue;
            if (!(sep.margins[b] > 0.0)) {
                record(rep, "no separating functional found", b, sep.margins[b], 0.0);
                good = false;
            }
        }
        // re-verify the functional against fresh members, independent of the LP
        for (int f = 0; f < 24 && good; ++f) {
            Rv cand = members[f % members.size()];
            for (auto& v : cand) v += r.uniform(0.0, 2.0);
            if (!below_level(cand, level)) continue;
            for (int b = 0; b < sp.block_count(); ++b) {
                if (!part.t_rho.contains(b) || !sep.d_c.contains(b)) continue;
                double zx = 0.0, zc = 0.0;
                for (int a : sp.block_atoms(b)) {
                    zx += sp.cond_weight(a) * sep.z[a] * outside[a];
                    zc += sp.cond_weight(a) * sep.z[a] * cand[a];
                }
                if (!(zx > zc)) {
                    record(rep, "fresh member beats the separator", b, zx, zc);
                    good = false;
                }
            }
        }
        if (good) ++separations_ok;
    }
    rep.samples = levels;
    rep.notes.push_back("separations verified: " + std::to_string(separations_ok) + "/" +
                        std::to_string(separations_run));
    rep.pass = rep.violations.empty() && separations_ok == separations_run;
    return rep;
}

std::vector<AuditReport> audit_declared(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng,
                                        int samples, double tol) {
    std::vector<AuditReport> out;
    CasCsaReport cc = audit_cas_csa(rho, sp, rng.fork(4), samples, tol);
    for (Property p : rho.declared()) {
        switch (p) {
            case Property::reg: out.push_back(audit_reg(rho, sp, rng.fork(1), samples, tol)); break;
            case Property::mon_down:
                out.push_back(audit_mon_down(rho, sp, rng.fork(2), samples, tol));
                break;
            case Property::qco: out.push_back(audit_qco(rho, sp, rng.fork(3), samples, tol)); break;
            case Property::cas: out.push_back(cc.cas); break;
            case Property::csa: out.push_back(cc.csa); break;
            case Property::convex:
                out.push_back(audit_convex(rho, sp, rng.fork(5), samples, tol));
                break;
            case Property::evq:
                out.push_back(audit_evq(rho, sp, rng.fork(6)));
                break;
        }
    }
    return out;
}

}  // namespace riskdual
