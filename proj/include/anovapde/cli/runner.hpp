#pragma once

// Runs the experiments of a Config and turns the results into table rows.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "anovapde/anova/plan.hpp"
#include "anovapde/cli/reference.hpp"
#include "anovapde/cli/spec.hpp"
#include "anovapde/cli/table.hpp"
#include "anovapde/mcbench/bermudan_mc.hpp"
#include "anovapde/mcbench/ratchet_mc.hpp"
#include "anovapde/mcbench/vrst_mc.hpp"
#include "anovapde/parallel.hpp"
#include "anovapde/pricing/expansion.hpp"
#include "anovapde/products/bermudan.hpp"
#include "anovapde/products/ratchet.hpp"

namespace anovapde::cli {

/// One point of an experiment's sweep.
struct Job {
    std::size_t experiment = 0;
    int n = 0;
    double strike = 0.0;
    RatchetCoefficients coef;  // ratchets only
};

inline std::vector<Job> expand_jobs(const ExperimentSpec& e, std::size_t index) {
    std::vector<Job> jobs;
    if (e.is_bermudan()) {
        for (double k : std::get<BermudanBlock>(e.product).strikes)
            for (int n : e.model.n) jobs.push_back({index, n, k, {}});
    } else {
        const auto& r = std::get<RatchetBlock>(e.product);
        for (double k : r.strikes)
            for (const auto& c : r.coefficients)
                for (int n : e.model.n) jobs.push_back({index, n, k, c});
    }
    return jobs;
}

inline std::string format_coefficients(const RatchetCoefficients& c) {
    return format_g(c.a) + "/" + format_g(c.b) + "/" + format_g(c.c);
}

/// V_rst label of level m: t is the stencil order actually used (0 for the base level).
inline std::string term_label(int r, int m, int t) {
    const int te = m == 0 ? 0 : (t == 0 ? m : t);
    return "V" + std::to_string(r) + std::to_string(m) + std::to_string(te);
}

inline std::vector<int> bermudan_dates(const BermudanBlock& b, int n) {
    if (b.schedule == "yearly") return periodic_schedule(n, 4, true);
    if (b.schedule == "every_tenor") return periodic_schedule(n, 1, false);
    std::vector<int> out;
    for (int d : b.dates) {
        if (d < 1 || d > n)
            throw ConfigError("bermudan.schedule: tenor " + std::to_string(d) + " outside [1, " + std::to_string(n) + "]");
        out.push_back(d - 1);
    }
    return out;
}

class Runner {
public:
    Runner(const Config& cfg, int threads, ReferenceTable refs, std::ostream* log = nullptr)
        : cfg_(cfg), threads_(threads > 0 ? threads : hardware_threads()), refs_(std::move(refs)), log_(log) {}

    int threads() const { return threads_; }

    /// Appends rows as jobs finish so a failure leaves the completed ones in `rows`.
    void run_all(std::vector<Row>& rows) {
        for (std::size_t i = 0; i < cfg_.experiments.size(); ++i)
            for (const Job& j : expand_jobs(cfg_.experiments[i], i)) run_job(j, rows);
    }

    void run_job(const Job& job, std::vector<Row>& rows) {
        const ExperimentSpec& e = cfg_.experiments[job.experiment];
        const std::string where = "experiments[" + std::to_string(job.experiment) + "] (" + e.name +
                                  ", N=" + std::to_string(job.n) + ")";
        try {
            run_job_impl(e, job, rows);
        } catch (const ConfigError& x) {
            throw ConfigError(where + ": " + x.what());
        } catch (const DomainError& x) {
            throw ConfigError(where + ": " + x.what());
        } catch (const IncompletePlanError& x) {
            throw NumericalError(where + ": " + x.what());
        } catch (const NumericalError& x) {
            throw NumericalError(where + ": " + x.what());
        }
    }

private:
    using Clock = std::chrono::steady_clock;

    static double seconds_since(Clock::time_point t0) {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    void note(const std::string& s) const {
        if (log_) *log_ << "[anovapde] " << s << std::endl;
    }

    static void check_finite(double v, const char* what) {
        if (!std::isfinite(v)) throw NumericalError(std::string(what) + " is not finite");
    }

    Row base_row(const ExperimentSpec& e, const Job& job, const std::string& method, const std::string& item) const {
        Row r;
        r.experiment = e.name;
        r.product = e.product_name();
        r.n = job.n;
        r.strike = job.strike;
        if (!e.is_bermudan()) r.coefficients = format_coefficients(job.coef);
        r.method = method;
        r.item = item;
        return r;
    }

    std::optional<double> lookup(const ExperimentSpec& e, const Job& job, const std::string& source,
                                 const std::string& item, std::optional<int> k = std::nullopt) const {
        if (!e.reference || !e.model.flat) return std::nullopt;
        ReferenceKey key;
        key.product = e.product_name();
        key.vol = e.model.vol;
        key.phi = e.model.phi;
        key.level = *e.model.flat;
        key.n = job.n;
        key.strike = job.strike;
        if (!e.is_bermudan()) key.coefficients = format_coefficients(job.coef);
        key.k = k;
        key.source = source;
        key.item = item;
        if (std::abs(e.model.alpha - 0.25) > 1e-12) return std::nullopt;
        return refs_.value(key);
    }

    void with_data_reference(Row& r, std::optional<double> v) const {
        if (v) {
            r.reference = v;
            r.reference_source = "data";
        }
    }

    LmmConfig model_config(const ExperimentSpec& e, int n) const {
        LmmConfig c;
        c.n = n;
        c.alpha = e.model.alpha;
        c.phi = e.model.phi;
        c.vol = e.model.vol;
        c.initial_rates = e.model.flat ? std::vector<double>(static_cast<std::size_t>(n), *e.model.flat) : e.model.curve;
        return c;
    }

    void run_job_impl(const ExperimentSpec& e, const Job& job, std::vector<Row>& rows) {
        const LmmModel model(model_config(e, job.n));
        if (e.is_bermudan()) {
            const BermudanSwaption product(job.n, e.model.alpha, job.strike,
                                           bermudan_dates(std::get<BermudanBlock>(e.product), job.n));
            run_methods(e, job, model, product, rows);
        } else {
            const RatchetFloor product(job.n, e.model.alpha, job.strike, job.coef,
                                       std::get<RatchetBlock>(e.product).floorlets);
            run_methods(e, job, model, product, rows);
        }
    }

    struct McSummary {
        double value = 0.0;  // best estimate: midpoint (Bermudan) or mean (ratchet)
        std::optional<double> std_error, lower, upper, gap_se, midpoint;
        long paths = 0;
        std::uint64_t seed = 0;
        double seconds = 0.0;
    };

    template <class Product>
    void run_methods(const ExperimentSpec& e, const Job& job, const LmmModel& model, const Product& product,
                     std::vector<Row>& rows) {
        std::optional<McSummary> mc;
        if (e.mc) mc = run_mc(e, job, model, product);
        const std::string pde_method = e.mc ? "both" : "pde";
        std::vector<Row> details;
        if (e.pde) run_pde(e, job, model, product, pde_method, mc, rows, details);
        if (mc) {
            Row r = base_row(e, job, "mc", "value");
            r.value = mc->value;
            r.std_error = mc->std_error;
            r.lower = mc->lower;
            r.upper = mc->upper;
            r.gap_std_error = mc->gap_se;
            r.midpoint = mc->midpoint;
            r.paths = mc->paths;
            r.seed = mc->seed;
            r.wall_seconds = mc->seconds;
            const std::string src = std::string("mc_") + to_string(e.mc->mode);
            with_data_reference(r, lookup(e, job, src, e.is_bermudan() ? "midpoint" : "value"));
            rows.push_back(r);
        }
        rows.insert(rows.end(), details.begin(), details.end());
        if constexpr (std::is_same_v<Product, RatchetFloor>) {
            if (e.vrst) run_vrst(e, job, model, product, rows);
        }
    }

    McConfig mc_config(const McBlock& b) const {
        McConfig c;
        c.policy_paths = b.policy_paths;
        c.valuation_paths = b.valuation_paths;
        c.outer_paths = b.outer_paths;
        c.inner_paths = b.inner_paths;
        c.substeps = b.substeps;
        c.mode = b.mode;
        c.seed = b.seed;
        c.threads = threads_;
        return c;
    }

    McSummary run_mc(const ExperimentSpec& e, const Job& job, const LmmModel& model, const BermudanSwaption& p) const {
        const auto t0 = Clock::now();
        const McConfig c = mc_config(*e.mc);
        note(e.name + " N=" + std::to_string(job.n) + " K=" + format_g(job.strike) + ": learning policy on " +
             std::to_string(c.policy_paths) + " paths");
        const PolicyThresholds pol = learn_policy(model, p, c);
        note(e.name + " N=" + std::to_string(job.n) + ": bounds from " + std::to_string(c.valuation_paths) +
             " paths, " + std::to_string(c.outer_paths) + " x " + std::to_string(c.inner_paths) + " nested");
        const BoundEstimate b = bermudan_bounds(model, p, pol, c);
        check_finite(b.lower, "MC lower bound");
        check_finite(b.gap, "duality gap");
        McSummary s;
        s.value = b.midpoint();
        s.std_error = b.lower_se;
        s.lower = b.lower;
        s.upper = b.upper();
        s.gap_se = b.gap_se;
        s.midpoint = b.midpoint();
        s.paths = b.lower_paths;
        s.seed = c.seed;
        s.seconds = seconds_since(t0);
        return s;
    }

    McSummary run_mc(const ExperimentSpec& e, const Job& job, const LmmModel& model, const RatchetFloor& p) const {
        const auto t0 = Clock::now();
        const McConfig c = mc_config(*e.mc);
        note(e.name + " N=" + std::to_string(job.n) + " K1=" + format_g(job.strike) + " " +
             format_coefficients(job.coef) + ": MC on " + std::to_string(c.policy_paths) + " paths");
        const PriceEstimate est = mc_price_ratchet(model, p, c);
        check_finite(est.value, "MC price");
        McSummary s;
        s.value = est.value;
        s.std_error = est.std_error;
        s.paths = est.paths;
        s.seed = c.seed;
        s.seconds = seconds_since(t0);
        return s;
    }

    template <class Product>
    void run_pde(const ExperimentSpec& e, const Job& job, const LmmModel& model, const Product& product,
                 const std::string& method, const std::optional<McSummary>& mc, std::vector<Row>& rows,
                 std::vector<Row>& details) const {
        const PdeBlock& b = *e.pde;
        PdeConfig pc;
        pc.points = b.points;
        pc.steps_per_alpha = b.steps;
        pc.g_max = b.g_max;
        const auto t0 = Clock::now();
        note(e.name + " N=" + std::to_string(job.n) + " K=" + format_g(job.strike) + ": PDE (r,s,t)=(" +
             std::to_string(b.r) + "," + std::to_string(b.s) + "," + std::to_string(b.t) + "), J=" +
             std::to_string(b.points) + ", M=" + std::to_string(b.steps));

        double value = 0.0;
        std::vector<std::pair<std::string, double>> terms;
        std::vector<double> profile;
        std::size_t clamps = 0;
        if (b.r == 1 && b.s == 1 && b.t <= 1) {
            const FirstOrderResult f = price_first_order(model, product, pc, threads_);
            value = f.value;
            profile = f.profile;
            clamps = f.strike_clamps;
            terms = {{term_label(1, 0, 0), f.base}, {term_label(1, 1, b.t), f.value - f.base}};
        } else {
            const ExpansionPlan plan(job.n, b.r, b.s, b.t);
            const PlanValues pv = evaluate_plan_pde(model, plan, product, pc, threads_);
            const VrstResult v = assemble_vrst(plan, pv.values);
            value = v.total();
            clamps = pv.strike_clamps;
            for (int m = 0; m <= b.s; ++m) terms.emplace_back(term_label(b.r, m, b.t), v.level[static_cast<std::size_t>(m)]);
        }
        check_finite(value, "PDE value");
        const double secs = seconds_since(t0);
        if (clamps > 0) note(e.name + ": " + std::to_string(clamps) + " strike updates clamped at the top of the strike axis");

        Row r = base_row(e, job, method, "value");
        r.value = value;
        r.wall_seconds = secs;
        if (mc) {
            r.std_error = mc->std_error;
            r.lower = mc->lower;
            r.upper = mc->upper;
            r.gap_std_error = mc->gap_se;
            r.midpoint = mc->midpoint;
            r.reference = mc->value;
            r.reference_source = "mc";
            r.paths = mc->paths;
            r.seed = mc->seed;
        } else {
            with_data_reference(r, lookup(e, job, "pde", "value"));
        }
        rows.push_back(r);

        if (b.terms) {
            double run = 0.0;
            for (std::size_t m = 0; m < terms.size(); ++m) {
                Row t = base_row(e, job, "pde", terms[m].first);
                t.value = terms[m].second;
                with_data_reference(t, lookup(e, job, "mc_terms", terms[m].first));
                details.push_back(t);
                run += terms[m].second;
                Row s = base_row(e, job, "pde", "total_" + terms[m].first);
                s.value = run;
                details.push_back(s);
            }
        }
        if (b.profile) {
            for (std::size_t k = 0; k < profile.size(); ++k) {
                Row p = base_row(e, job, "pde", "partial_sum");
                p.k = static_cast<int>(k + 1);
                p.value = profile[k];
                with_data_reference(p, lookup(e, job, "pde", "partial_sum", p.k));
                details.push_back(p);
            }
        }
    }

    void run_vrst(const ExperimentSpec& e, const Job& job, const LmmModel& model, const RatchetFloor& product,
                  std::vector<Row>& rows) const {
        const VrstBlock& b = *e.vrst;
        const auto t0 = Clock::now();
        note(e.name + " N=" + std::to_string(job.n) + ": shared-noise terms (r,s,t)=(" + std::to_string(b.r) + "," +
             std::to_string(b.s) + "," + std::to_string(b.t) + ") on " + std::to_string(b.paths) + " paths");
        const ExpansionPlan plan(job.n, b.r, b.s, b.t);
        const VrstEstimate v = mc_vrst(model, plan, product, b.paths, b.seed, threads_);
        const double secs = seconds_since(t0);
        auto push = [&](const std::string& item, const PriceEstimate& est) {
            check_finite(est.value, "term estimate");
            Row r = base_row(e, job, "vrst", item);
            r.value = est.value;
            r.std_error = est.std_error;
            r.paths = est.paths;
            r.seed = b.seed;
            r.wall_seconds = secs;
            with_data_reference(r, lookup(e, job, "mc_terms", item));
            rows.push_back(r);
        };
        for (int m = 0; m <= b.s; ++m) {
            const auto mu = static_cast<std::size_t>(m);
            const std::string label = term_label(b.r, m, b.t);
            push(label, v.level[mu]);
            push("total_" + label, v.running_total[mu]);
            push("error_" + label, v.error[mu]);
        }
        push("V_full", v.full);
    }

    const Config& cfg_;
    int threads_;
    ReferenceTable refs_;
    std::ostream* log_;
};

}  // namespace anovapde::cli
