// Batch harness over the library: audits, dual-surface dumps, duality
// verification, dual-class checks, acceptance-family roundtrips, maximal-set
// and separation diagnostics. Reports are deterministic for a fixed
// (config, seed) pair; exit code 0 on clean runs, 1 on failed assertions,
// 2 on configuration errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "riskdual/acceptance.hpp"
#include "riskdual/config.hpp"
#include "riskdual/dualtransform.hpp"
#include "riskdual/maximalsets.hpp"
#include "riskdual/mclass.hpp"
#include "riskdual/report.hpp"
#include "riskdual/sampling.hpp"
#include "riskdual/separation.hpp"

using namespace riskdual;

namespace {

struct CommonArgs {
    std::string space_file;
    std::string measure_spec = "expected_loss";
    std::uint64_t seed = 1;
    double tol = 1e-6;
    int grid = 8;
    int budget = 200;
    std::string format = "csv";
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--space", args.space_file, "space description file (weight block per line)");
    cmd->add_option("--measure", args.measure_spec, "measure spec, e.g. entropic:gamma=1");
    cmd->add_option("--seed", args.seed, "PRNG seed; identical seeds give identical reports");
    cmd->add_option("--tol", args.tol, "assertion tolerance");
    cmd->add_option("--grid", args.grid, "scenario lattice resolution");
    cmd->add_option("--budget", args.budget, "ascent refinement budget per block");
    cmd->add_option("--format", args.format, "report format: csv or md")
        ->check(CLI::IsMember({"csv", "md"}));
    cmd->add_option("--out", args.out_dir, "directory for report files (stdout when omitted)");
}

FilteredSpace resolve_space(const CommonArgs& args) {
    if (args.space_file.empty()) return FilteredSpace::uniform({2, 2});
    FilteredSpace sp = load_space(args.space_file);
    if (sp.atom_count() > 16 || sp.block_count() > 4)
        std::cerr << "warning: space exceeds the desk-scale defaults (16 atoms, 4 blocks)\n";
    return sp;
}

void check_grid(const CommonArgs& args) {
    if (args.grid > 12) std::cerr << "warning: grid resolution above the desk-scale default 12\n";
}

void emit(const CommonArgs& args, const std::string& stem, const ReportTable& table) {
    if (args.out_dir.empty()) {
        if (args.format == "md") write_markdown(std::cout, table);
        else write_csv(std::cout, table);
    } else {
        write_table_file(args.out_dir, stem, args.format, table);
    }
}

std::string pass_str(bool ok) { return ok ? "pass" : "FAIL"; }

int run_audit_measure(const CommonArgs& args) {
    FilteredSpace sp = resolve_space(args);
    RiskMeasure rho = parse_measure_spec(args.measure_spec);
    auto reports = audit_declared(rho, sp, Rng(args.seed), 200, 1e-9);
    EffectivenessPartition part = effectiveness_partition(rho, sp, Rng(args.seed).fork(99));

    ReportTable t;
    t.title = "audit " + rho.name();
    t.columns = {"audit", "measure", "samples", "result", "violations"};
    bool all = true;
    for (const auto& rep : reports) {
        t.add_row({rep.audit, rep.measure, std::to_string(rep.samples), pass_str(rep.pass),
                   std::to_string(rep.violations.size())});
        all = all && rep.pass;
    }
    t.add_row({"effectiveness_partition", rho.name(), "-",
               part.exact ? "exact" : "probe-based",
               "upsilon_mask=" + std::to_string(part.upsilon.mask)});
    emit(args, "audit_" + rho.name(), t);
    return all ? 0 : 1;
}

int run_compute_r(const CommonArgs& args) {
    FilteredSpace sp = resolve_space(args);
    check_grid(args);
    RiskMeasure rho = parse_measure_spec(args.measure_spec);
    std::vector<ScenarioDensity> grid = scenario_grid(sp, std::max(args.grid, 1), 4000);

    ReportTable t;
    t.title = "dual surface of " + rho.name();
    t.columns = {"block", "level", "scenario", "value", "method", "certificate"};
    std::vector<double> levels{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    for (double lv : levels) {
        Rv level(sp.atom_count(), lv);
        for (std::size_t qi = 0; qi < grid.size(); ++qi) {
            DualValue v = dual_value(rho, level, grid[qi], sp);
            for (int b = 0; b < sp.block_count(); ++b)
                t.add_row({std::to_string(b), format_number(lv), std::to_string(qi),
                           format_number(v.value[b]),
                           v.method[b] == DualMethod::analytic ? "analytic" : "numeric",
                           v.note[b].empty() ? "-" : v.note[b]});
        }
    }
    emit(args, "dual_surface_" + rho.name(), t);
    return 0;
}

int run_verify_duality(const CommonArgs& args) {
    FilteredSpace sp = resolve_space(args);
    check_grid(args);
    RiskMeasure rho = parse_measure_spec(args.measure_spec);
    SupSearchOptions opts;
    opts.grid_resolution = args.grid;
    opts.refine_budget = args.budget;

    ReportTable t;
    t.title = "duality gaps for " + rho.name();
    t.columns = {"sample", "block", "measure_value", "supremum", "gap", "result"};
    Rng rng(args.seed);
    bool all = true;
    for (int s = 0; s < 12; ++s) {
        Rng r = rng.fork(s);
        Rv x = random_rv(r, sp);
        DualitySupResult res = duality_sup(rho, x, sp, opts);
        for (int b = 0; b < sp.block_count(); ++b) {
            bool ok = res.gap[b] <= args.tol;
            all = all && ok;
            t.add_row({std::to_string(s), std::to_string(b), format_number(res.rho_value[b]),
                       format_number(res.sup[b]), format_number(res.gap[b]), pass_str(ok)});
        }
    }
    emit(args, "duality_" + rho.name(), t);
    return all ? 0 : 1;
}

int run_check_mclass(const CommonArgs& args) {
    FilteredSpace sp = resolve_space(args);
    RiskMeasure rho = parse_measure_spec(args.measure_spec);
    DualCandidate k = candidate_from_measure(rho);
    KkAuditOptions opts;
    opts.samples = 60;
    opts.separation_trials = 12;
    opts.seed = args.seed;
    KkReport rep = audit_kk(k, sp, Rng(args.seed), opts);

    ReportTable t;
    t.title = "dual-class axioms for " + rho.name();
    t.columns = {"item", "samples", "result", "notes"};
    bool all = true;
    for (const auto& item : rep.items) {
        std::string result = item.pass ? "pass" : (item.inconclusive ? "inconclusive" : "FAIL");
        if (!item.pass && !item.inconclusive) all = false;
        t.add_row({item.item, std::to_string(item.samples), result,
                   item.details.empty() ? "-" : item.details.front()});
    }
    t.add_row({"separation_tally", std::to_string(rep.separation_trials),
               std::to_string(rep.separation_successes) + "/" +
                   std::to_string(rep.separation_trials),
               "-"});
    // a fixed-point spot check at a seeded anchor
    Rng r(args.seed);
    Rv y = random_g_measurable(r, sp, -2.0, 2.0);
    ScenarioDensity q = random_density(sp, r);
    CheckReport fixed = sup_inf_fixed_point_check(k, y, q, sp, r.fork(5), 1e-4);
    t.add_row({"sup_inf_fixed_point", std::to_string(fixed.samples), pass_str(fixed.pass),
               fixed.details.empty() ? "-" : fixed.details.front()});
    all = all && fixed.pass;
    emit(args, "mclass_" + rho.name(), t);
    return all ? 0 : 1;
}

int run_acceptance_roundtrip(const CommonArgs& args) {
    FilteredSpace sp = resolve_space(args);
    RiskMeasure rho = parse_measure_spec(args.measure_spec);
    RoundtripReport rep = roundtrip_check(rho, sp, Rng(args.seed), 60, args.tol);
    RiskAcceptanceFamily fam = family_from_measure(rho, sp);
    FamilyAuditReport audits = audit_family(fam, sp, Rng(args.seed).fork(1), 60);

    ReportTable t;
    t.title = "acceptance family of " + rho.name();
    t.columns = {"check", "result", "max_gap"};
    t.add_row({"measure_roundtrip", pass_str(rep.measure_side.pass),
               format_number(rep.measure_side.max_gap)});
    t.add_row({"family_roundtrip", pass_str(rep.family_side.pass), "-"});
    t.add_row({"family_convexity", pass_str(audits.convexity.pass), "-"});
    t.add_row({"family_monotonicity", pass_str(audits.monotonicity.pass), "-"});
    t.add_row({"family_regularity", pass_str(audits.regularity.pass), "-"});
    emit(args, "acceptance_" + rho.name(), t);
    return rep.pass() && audits.all_pass() ? 0 : 1;
}

int run_maximal_sets(const CommonArgs& args, const std::string& elements_file, double y0,
                     const std::string& relation) {
    FilteredSpace sp = resolve_space(args);
    std::vector<Rv> elements = load_rv_rows(elements_file, sp);
    Relation rel;
    if (relation == "ge") rel = Relation::ge;
    else if (relation == "le") rel = Relation::le;
    else if (relation == "eq") rel = Relation::eq;
    else if (relation == "gt") rel = Relation::gt;
    else if (relation == "lt") rel = Relation::lt;
    else throw ConfigError(0, "relation must be one of ge, le, eq, gt, lt");

    MaximalSetsResult res = maximal_sets(elements, Rv(sp.atom_count(), y0), rel, sp);
    ReportTable t;
    t.title = "maximal sets";
    t.columns = {"field", "value"};
    t.add_row({"holds_mask", std::to_string(res.a_m.mask)});
    t.add_row({"violates_mask", std::to_string(res.a_m_perp.mask)});
    t.add_row({"cover", res.cover_ok ? "complete" : "INCOMPLETE"});
    for (int b : res.uncovered_blocks) t.add_row({"uncovered_block", std::to_string(b)});
    std::string w;
    for (double v : res.witness) w += format_number(v) + " ";
    t.add_row({"witness", w});
    emit(args, "maximal_sets", t);
    return res.cover_ok ? 0 : 1;
}

int run_separate(const CommonArgs& args, const std::string& point_file,
                 const std::string& generators_file, const std::string& hull) {
    FilteredSpace sp = resolve_space(args);
    auto points = load_rv_rows(point_file, sp);
    if (points.size() != 1) throw ConfigError(0, "point file must hold exactly one row");
    HullSet c;
    c.generators = load_rv_rows(generators_file, sp);
    if (c.generators.empty()) throw ConfigError(0, "generator file holds no rows");
    auto mode = parse_hull_mode(hull);
    if (!mode) throw ConfigError(0, "hull must be one of convex, cone, affine, linear, concat");
    c.mode = *mode;

    OutsideReport outside = is_outside(points[0], c, sp);
    SeparationResult sep = separate(points[0], c, sp);

    ReportTable t;
    t.title = "separation certificate";
    t.columns = {"block", "outside", "margin", "dual_vector"};
    for (int b = 0; b < sp.block_count(); ++b) {
        if (!sep.d_c.contains(b)) {
            t.add_row({std::to_string(b), "trivial-component", "-", "-"});
            continue;
        }
        bool is_out = false;
        for (const auto& v : outside.verdicts)
            if (v.block == b) is_out = v.outside;
        std::string zs;
        for (int a : sp.block_atoms(b)) zs += format_number(sep.z[a]) + " ";
        t.add_row({std::to_string(b), is_out ? "yes" : "no", format_number(sep.margins[b]), zs});
    }
    emit(args, "separation", t);
    return sep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-scale conditional risk duality toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string elements_file, point_file, generators_file;
    std::string relation = "ge", hull = "convex";
    double y0 = 0.0;

    CLI::App* audit = app.add_subcommand("audit-measure", "run the declared property audits");
    add_common(audit, args);
    CLI::App* computer = app.add_subcommand("compute-R", "tabulate the dual surface");
    add_common(computer, args);
    CLI::App* duality = app.add_subcommand("verify-duality", "measure vs dual supremum gaps");
    add_common(duality, args);
    CLI::App* mclass = app.add_subcommand("check-mclass", "dual-class axiom audit");
    add_common(mclass, args);
    CLI::App* roundtrip =
        app.add_subcommand("acceptance-roundtrip", "acceptance-family bijection checks");
    add_common(roundtrip, args);
    CLI::App* maximal = app.add_subcommand("maximal-sets", "two-maximal-sets diagnostic");
    add_common(maximal, args);
    maximal->add_option("--elements", elements_file, "file of variable rows")->required();
    maximal->add_option("--y0", y0, "comparison level");
    maximal->add_option("--relation", relation, "ge, le, eq, gt or lt");
    CLI::App* separate_cmd = app.add_subcommand("separate", "LP separation certificate");
    add_common(separate_cmd, args);
    separate_cmd->add_option("--point", point_file, "file with one variable row")->required();
    separate_cmd->add_option("--generators", generators_file, "file of generator rows")
        ->required();
    separate_cmd->add_option("--hull", hull, "convex, cone, affine, linear or concat");

    CLI11_PARSE(app, argc, argv);

    try {
        if (audit->parsed()) return run_audit_measure(args);
        if (computer->parsed()) return run_compute_r(args);
        if (duality->parsed()) return run_verify_duality(args);
        if (mclass->parsed()) return run_check_mclass(args);
        if (roundtrip->parsed()) return run_acceptance_roundtrip(args);
        if (maximal->parsed()) return run_maximal_sets(args, elements_file, y0, relation);
        if (separate_cmd->parsed()) return run_separate(args, point_file, generators_file, hull);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
