#include "mfs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "mfs/census.hpp"
#include "mfs/dual.hpp"
#include "mfs/empirical.hpp"
#include "mfs/errors.hpp"
#include "mfs/output.hpp"
#include "mfs/spectrum.hpp"

namespace mfs {

std::string RunSummary::text() const {
    std::ostringstream os;
    for (const auto& [k, v] : entries) os << k << ": " << v << "\n";
    for (const auto& w : warnings) os << "warning: " << w << "\n";
    if (partial) os << "partial: " << partial_reason << "\n";
    return os.str();
}

namespace {

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string status(const Status& s) {
    return to_string(s.value) + (s.source.empty() ? "" : " [" + s.source + "]");
}

struct Ctx {
    const RunConfig& cfg;
    RunSummary& sum;
    std::optional<OverlapCensus> census;
    std::optional<SeparationReport> sep;
    std::optional<SpectrumResult> spec;
    std::vector<std::string> report;  // markdown lines
    std::vector<std::string> alarms;

    std::string path(const std::string& name) {
        sum.files.push_back(name);
        return cfg.out_dir + "/" + name;
    }
    void md(const std::string& line) { report.push_back(line); }
    void entry(const std::string& k, const std::string& v) {
        sum.add(k, v);
        md("- " + k + ": " + v);
    }
};

std::vector<double> spectrum_grid(const RunConfig& cfg) { return cfg.q_grid.empty() ? default_q_grid() : cfg.q_grid; }

void census_part(Ctx& x) {
    const auto& cfg = x.cfg;
    const auto& ifs = cfg.ifs;
    x.md("## Overlap census");
    if (ifs.ambient_dim != 1) {
        x.entry("census", "skipped [needs a one-dimensional system]");
        return;
    }
    const Hull1D hull = attractor_hull(ifs);
    x.entry("hull", "[" + fmt(hull.lo) + ", " + fmt(hull.hi) + "]" + (hull.exact ? " [exact]" : " [numeric]"));

    if (!ifs.is_homogeneous_algebraic()) {
        CsvTable t({"n", "N_n", "t_n_dyadic", "t_n_beta", "delta_n", "delta_tilde_n", "h_n", "dim_growth", "dim_garsia"});
        int last = 0;
        try {
            for (int n = 1; n <= cfg.n_max; ++n) {
                const auto r = t_n_section(ifs, hull, n, cfg.word_budget);
                t.add({std::to_string(n), "", std::to_string(r.t), "", "", "", "", "", ""});
                last = n;
            }
        } catch (const BudgetError& e) {
            x.sum.partial = true;
            x.sum.partial_reason = e.what();
        }
        t.write(x.path("census.csv"));
        x.entry("census", "t_n from W_n sections up to n = " + std::to_string(last) +
                              " [no exact class table for non-homogeneous systems]");
        if (ifs.rational_integer && last > 0) {
            const auto rb = rational_bound_check(ifs, last, cfg.word_budget);
            x.entry("rational bound", std::string(rb.ok ? "pass" : "FAIL") + " for n <= " + std::to_string(last) +
                                          " (r = " + rb.r.get_str() + ", Q = " + rb.Q.get_str() +
                                          ") [proven bound for integer contraction factors]");
        }
        return;
    }

    CensusOptions opt;
    opt.class_budget = cfg.class_budget;
    if (!cfg.census.snapshot_in.empty()) {
        x.census = OverlapCensus::load(cfg.census.snapshot_in, ifs);
        x.census->extend(cfg.n_max, opt);
    } else {
        x.census = OverlapCensus::run(ifs, cfg.n_max, opt);
    }
    auto& c = *x.census;
    if (c.partial()) {
        x.sum.partial = true;
        x.sum.partial_reason = c.partial_reason();
    }
    const int D = c.depth();
    const int refine = cfg.census.tn_cover_refinement;
    std::vector<TnResult> tb, td;
    for (int n = 1; n <= D; ++n) {
        tb.push_back(t_n_homogeneous(c, hull, n, TnVariant::SigmaBeta, refine));
        td.push_back(t_n_homogeneous(c, hull, n, TnVariant::WnDyadic, refine));
    }
    const auto esc = esc_diagnostic(c);
    const auto gars = garsia_dimension(c);
    std::optional<GrowthExponent> growth;
    if (D >= 2) growth = growth_exponent(c);

    CsvTable t({"n", "N_n", "t_n_dyadic", "t_n_beta", "delta_n", "delta_tilde_n", "h_n", "dim_growth", "dim_garsia"});
    for (int n = 1; n <= D; ++n) {
        const auto k = static_cast<std::size_t>(n - 1);
        const auto& e = esc.rows[k];
        const double g = std::log(static_cast<double>(c.N(n))) / (n * c.log_abs_beta());
        t.add({std::to_string(n), std::to_string(c.N(n)), td[k].available ? std::to_string(td[k].t) : "",
               std::to_string(tb[k].t), fmt(e.delta), fmt(e.delta_tilde), fmt(gars[k].h), fmt(std::min(1.0, g)),
               fmt(gars[k].estimate)});
    }
    t.write(x.path("census.csv"));

    CsvTable tn({"n", "q", "T_n", "T"});
    const auto rw = RatioWeights::from(ifs);
    for (int n = 1; n <= D; ++n) {
        for (double q : {0.5, 2.0, 3.0}) tn.add({std::to_string(n), fmt(q), fmt(T_n(c, n, q)), fmt(solve_T(rw, q))});
    }
    tn.write(x.path("tn.csv"));

    x.entry("census depth", std::to_string(D));
    if (D >= 1) x.entry("N_n at depth " + std::to_string(D), std::to_string(c.N(D)));
    x.entry("first exact overlap", esc.first_overlap ? "depth " + std::to_string(*esc.first_overlap) + " [exact]"
                                                      : "none up to depth " + std::to_string(D) + " [exact]");
    x.entry("fitted delta_tilde rate", fmt(esc.fitted_c) + " [diagnostic]");
    if (growth) {
        x.entry("growth exponent bound", fmt(growth->upper_bound) + " [exact counts, min over n]");
        x.entry("dim K estimate", fmt(std::min(1.0, growth->estimate)) + " [diagnostic, upper bound " +
                                      fmt(std::min(1.0, growth->upper_bound)) + "]");
    }
    if (!gars.empty()) x.entry("Garsia entropy estimate", fmt(gars.back().estimate) + " [diagnostic]");
    x.entry("t_n", std::string("upper bounds from the hull cover") + (refine ? " refined to depth " + std::to_string(refine) : ""));

    const auto inv = check_census(c, tb, hull);
    x.entry("census invariants", inv.failures.empty() ? "pass" : "FAIL");
    for (const auto& f : inv.failures) x.alarms.push_back("census invariant: " + f);

    if (ifs.rational_integer && D >= 1) {
        const auto rb = rational_bound_check(ifs, D, cfg.word_budget, &c);
        x.entry("rational bound", std::string(rb.ok ? "pass" : "FAIL") + " for n <= " + std::to_string(D) +
                                      " (r = " + rb.r.get_str() + ", Q = " + rb.Q.get_str() +
                                      ") [proven bound for integer contraction factors]");
    }
    if (!cfg.census.snapshot_out.empty()) {
        c.save(cfg.census.snapshot_out);
        x.entry("snapshot", cfg.census.snapshot_out);
    }
}

void classify_part(Ctx& x) {
    ClassifyEvidence ev;
    if (x.census && x.census->depth() >= 2) ev.growth_upper_bound = growth_exponent(*x.census).upper_bound;
    if (x.census && x.census->depth() >= 1) {
        const auto e = esc_diagnostic(*x.census);
        ev.exact_overlap_depth = e.first_overlap;
    }
    x.sep = classify(x.cfg.ifs, ev);
    x.md("## Separation");
    x.entry("OSC", status(x.sep->osc));
    x.entry("WSC", status(x.sep->wsc));
    x.entry("AWSC", status(x.sep->awsc));
    x.entry("ESC", status(x.sep->esc));
    x.entry("WESC", status(x.sep->wesc));
    for (const auto& n : x.sep->notes) x.entry("note", n);
}

void spectrum_part(Ctx& x) {
    const auto& cfg = x.cfg;
    const bool awsc = x.sep && x.sep->awsc.value == Truth::True;
    x.spec = compute_spectrum(cfg.ifs, spectrum_grid(cfg), Exec::Parallel, awsc);
    const auto& s = *x.spec;
    CsvTable t({"q", "T", "T_prime", "tau", "branch", "validity"});
    for (std::size_t k = 0; k < s.q.size(); ++k) {
        t.add({fmt(s.q[k]), fmt(s.T[k]), fmt(s.T_prime[k]), fmt(s.tau[k]), s.branch[k], s.validity[k]});
    }
    t.write(x.path("spectrum.csv"));

    const auto leg = legendre(s, slope_alpha_grid(s));
    CsvTable lt({"alpha", "f", "validity"});
    for (std::size_t k = 0; k < leg.alpha.size(); ++k) lt.add({fmt(leg.alpha[k]), fmt(leg.f[k]), leg.validity[k]});
    lt.write(x.path("legendre.csv"));

    const std::string unit_src = cfg.ifs.assertions.dimensional_regular ? "proven: dimensional regular"
                                                                         : "conditional on dimensional regularity";
    x.md("## Spectrum");
    x.entry("unit-interval case", std::string(1, s.unit.case_label) + " [" + unit_src + "]");
    x.entry("T'(1)", fmt(s.unit.T_prime_1));
    x.entry("T(0)", fmt(s.unit.T_0));
    if (s.unit.q_tilde) x.entry("q_tilde", fmt(*s.unit.q_tilde) + " [" + unit_src + "]");
    x.entry("similarity dimension of the measure", fmt(s.dims.sim_dim_measure));
    x.entry("similarity dimension of the set", fmt(s.dims.s));
    x.entry("dim_H mu", fmt(s.dims.hausdorff_measure) + " [" + unit_src + "]");
    if (s.upper.q_zero) x.entry("min-branch kink q0", fmt(*s.upper.q_zero));
    x.entry("q > 1 branch", s.upper.conditional ? "min{d(q-1), T(q)} [heuristic without ESC]"
                                                : "min{q-1, T(q)} [proven under ESC]");
    x.entry("alpha range on [0,1]", "[" + fmt(s.alpha_unit_lo) + ", " + fmt(s.alpha_unit_hi) + "]");
    x.entry("alpha range for q > 1", "[" + fmt(s.alpha_upper_lo) + ", " + fmt(s.alpha_upper_hi) + "] (slope at infinity error " +
                                         fmt(s.slope_infinity_error) + ")");
    x.entry("tau concavity defect", fmt(concavity_defect(s.q, s.tau)));

    if (cfg.svg) {
        SvgPlot p{"L^q spectrum", "q", "value", {}};
        PlotSeries T{"T(q)", {}, {}}, tau{"tau(q)", {}, {}};
        for (std::size_t k = 0; k < s.q.size(); ++k) {
            if (s.q[k] > 8) continue;
            T.x.push_back(s.q[k]);
            T.y.push_back(s.T[k]);
            tau.x.push_back(s.q[k]);
            tau.y.push_back(s.tau[k]);
        }
        p.series = {T, tau};
        p.write(x.path("spectrum.svg"));
        SvgPlot lp{"Legendre transform", "alpha", "f(alpha)", {{"f", leg.alpha, leg.f}}};
        lp.write(x.path("legendre.svg"));
    }
}

void dual_part(Ctx& x) {
    const auto& cfg = x.cfg;
    x.md("## Dual system");
    if (!x.census || x.census->depth() < 1) {
        x.entry("dual system", "skipped [needs a homogeneous algebraic system with a census]");
        return;
    }
    const auto& c = *x.census;
    const auto d = build_dual(cfg.ifs);
    for (const auto& w : d.warnings) x.sum.warnings.push_back(w);
    x.entry("m", std::to_string(d.m));
    x.entry("m'", std::to_string(d.m_prime));
    x.entry("d", std::to_string(d.d));
    x.entry("M", d.M.get_str());
    x.entry("D", fmt(d.D));
    x.entry("C", fmt(d.C));
    x.entry("dual attractor diameter bound", fmt(d.diam_bound));
    if (d.unit_circle_structural) x.entry("unit-circle conjugates", std::to_string(*d.unit_circle_structural) + " [exact root count]");

    const int pd = std::min(cfg.dual.property_p_depth, c.depth());
    std::size_t pairs = 0, viol = 0;
    bool exhaustive = true;
    for (int n = 1; n <= pd; ++n) {
        const auto r = verify_property_P(d, c, n, 6561, 100000, cfg.seed);
        pairs += r.pairs;
        viol += r.violations;
        exhaustive = exhaustive && r.exhaustive;
    }
    x.entry("property (P)", std::to_string(viol) + " violations in " + std::to_string(pairs) + " word pairs up to depth " +
                                std::to_string(pd) + (exhaustive ? " (exhaustive)" : " (sampled)") + " [proven]");

    CsvTable t({"n", "kappa_lower", "kappa_upper", "min_pair_distance", "claim_bound", "kappa_envelope"});
    long long kmax = 0;
    double worst_ratio = 0;
    for (int n = 1; n <= c.depth(); ++n) {
        const auto k = kappa_n(d, c, n);
        const auto s = separation_claim_check(d, c, n, cfg.dual.exhaustive_limit);
        t.add({std::to_string(n), std::to_string(k.lower), std::to_string(k.upper),
               (s.distance_is_lower_bound ? ">=" : "") + fmt(s.min_distance), fmt(s.bound), fmt(k.envelope)});
        kmax = std::max(kmax, k.upper);
        worst_ratio = std::max(worst_ratio, static_cast<double>(k.lower) / k.envelope);
        if (static_cast<double>(k.lower) > k.envelope) {
            x.alarms.push_back("kappa_" + std::to_string(n) + " exceeds its envelope");
        }
    }
    t.write(x.path("dual.csv"));
    x.entry("separation claim", "holds for n <= " + std::to_string(c.depth()) + " [proven]");
    x.entry("max kappa_n", std::to_string(kmax) + " (max kappa/envelope " + fmt(worst_ratio) + ")");

    const auto ir = integrality_check(d, c, cfg.dual.integrality_pairs, cfg.dual.integrality_depth, cfg.seed);
    x.entry("integrality", std::to_string(ir.pairs - ir.failures) + "/" + std::to_string(ir.pairs) +
                               " pairs give nonzero integers, " + std::to_string(ir.exact_mismatches) +
                               " disagree with the exact norm [proven]");
    if (ir.failures > 0 || ir.exact_mismatches > 0) x.alarms.push_back("integrality invariant failed");
}

void empirical_part(Ctx& x) {
    const auto& cfg = x.cfg;
    x.md("## Empirical spectrum");
    if (cfg.ifs.ambient_dim != 1) {
        x.entry("empirical", "skipped [one-dimensional systems only]");
        return;
    }
    EmpiricalOptions opt;
    opt.guard_bits = cfg.empirical.guard_bits;
    opt.word_budget = cfg.word_budget;
    const auto m1 = discretize(cfg.ifs, cfg.empirical.n1, opt);
    const auto m2 = discretize(cfg.ifs, cfg.empirical.n2, opt);
    const bool awsc = x.sep && x.sep->awsc.value == Truth::True;
    const auto s = compute_spectrum(cfg.ifs, cfg.empirical.q, Exec::Parallel, awsc);
    CsvTable t({"q", "n1", "n2", "empirical_tau", "theoretical_tau", "abs_error"});
    double worst = 0;
    std::vector<double> emp;
    for (std::size_t k = 0; k < s.q.size(); ++k) {
        const double e = empirical_tau_two_scale(m1, m2, s.q[k]);
        emp.push_back(e);
        const double err = std::fabs(e - s.tau[k]);
        worst = std::max(worst, err);
        t.add({fmt(s.q[k]), std::to_string(m1.n), std::to_string(m2.n), fmt(e), fmt(s.tau[k]), fmt(err)});
    }
    t.write(x.path("empirical.csv"));

    double amin = INFINITY, amax = -INFINITY;
    for (const auto& [k, v] : m2.boxes()) {
        const double a = -std::log2(v) / m2.n;
        amin = std::min(amin, a);
        amax = std::max(amax, a);
    }
    const auto bins = coarse_spectrum(m2, amin - 0.05, amax + 0.05, 40);
    CsvTable ct({"alpha_lo", "alpha_hi", "count", "f"});
    for (const auto& b : bins) ct.add({fmt(b.alpha_lo), fmt(b.alpha_hi), std::to_string(b.count), fmt(b.f)});
    ct.write(x.path("coarse_spectrum.csv"));

    x.entry("empirical scales", std::to_string(m1.n) + ", " + std::to_string(m2.n) + " (guard bits " +
                                    std::to_string(m2.guard_bits) + ", " + std::to_string(m2.words) + " words)");
    x.entry("total mass error", fmt(std::fabs(m2.total() - 1)));
    x.entry("max |empirical - theoretical tau|", fmt(worst) + " [diagnostic]");
    if (cfg.svg) {
        SvgPlot p{"Empirical vs theoretical tau", "q", "tau(q)", {{"two-scale estimate", s.q, emp}, {"theory", s.q, s.tau}}};
        p.write(x.path("empirical.svg"));
    }
}

void cross_checks(Ctx& x) {
    x.md("## Cross-checks");
    if (x.census && x.census->depth() >= 1 && x.spec) {
        const int n = x.census->depth();
        const auto rw = RatioWeights::from(x.cfg.ifs);
        for (double q : {2.0, 3.0}) {
            x.entry("T_n(" + fmt(q) + ") at n = " + std::to_string(n),
                    fmt(T_n(*x.census, n, q)) + " vs T = " + fmt(solve_T(rw, q)) + " [diagnostic]");
        }
    }
}

}  // namespace

RunSummary run(const RunConfig& cfg) {
    if (cfg.threads > 0) set_threads(cfg.threads);
    ensure_dir(cfg.out_dir);
    RunSummary sum;
    Ctx x{cfg, sum, std::nullopt, std::nullopt, std::nullopt, {}, {}};
    write_text(x.path("resolved_config.json"), resolved_json(cfg).dump(2) + "\n");
    sum.add("task", to_string(cfg.task));
    sum.add("maps", std::to_string(cfg.ifs.size()));

    switch (cfg.task) {
        case Task::Spectrum:
            classify_part(x);
            spectrum_part(x);
            break;
        case Task::Census:
            census_part(x);
            classify_part(x);
            break;
        case Task::Dual:
            if (!cfg.ifs.is_homogeneous_algebraic()) throw ParseError("task dual needs a homogeneous algebraic system");
            census_part(x);
            dual_part(x);
            break;
        case Task::Empirical:
            classify_part(x);
            empirical_part(x);
            break;
        case Task::Report:
            census_part(x);
            classify_part(x);
            spectrum_part(x);
            if (cfg.ifs.is_homogeneous_algebraic()) dual_part(x);
            empirical_part(x);
            cross_checks(x);
            break;
    }

    write_text(x.path("summary.txt"), sum.text());
    if (cfg.task == Task::Report) {
        std::string doc = "# Multifractal report\n\n";
        for (const auto& l : x.report) doc += (l.rfind("## ", 0) == 0 ? "\n" : "") + l + "\n";
        for (const auto& w : sum.warnings) doc += "\nwarning: " + w + "\n";
        write_text(x.path("report.md"), doc);
    }
    if (!x.alarms.empty()) {
        std::string msg;
        for (const auto& a : x.alarms) msg += (msg.empty() ? "" : "; ") + a;
        throw CorrectnessAlarm(msg);
    }
    if (sum.partial) throw BudgetError(sum.partial_reason);
    return sum;
}

}  // namespace mfs
