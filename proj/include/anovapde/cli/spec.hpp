#pragma once

// Experiment files (YAML). Grammar, with defaults:
//
//   run:
//     threads: 0                 # 0 = all hardware threads
//     seed: 20100101             # default seed for every MC block
//     timing: false              # adds wall_seconds (breaks byte-identical output)
//     full_precision: false      # adds value_exact
//     references: <path>         # reference CSV, relative to this file
//   experiments:
//     - name: <string>
//       model:   {N: int | [int], alpha: 0.25, phi: 0.0413, c: 0.2, L0: 0.1 | [N rates]}
//       product:                 # exactly one of
//         bermudan: {K: real | [real], schedule: yearly | every_tenor | [1-based tenors]}
//         ratchet:  {K1: real | [real], coefficients: [a, b, c] | [[a, b, c], ...],
//                    floorlets: last | all}
//       method:                  # at least one of
//         pde:  {r: 1, s: 1, t: 0, J: 601 | 401, M: 10, g_max: 1000, profile: false, terms: false}
//         mc:   {mode: full, N1: 1e6 | 1e7, N2: 1e7, outer: 5000, inner: 1000, M: 5 | 10, seed: run.seed}
//         vrst: {r: 1, s: 1, t: 0, paths: 1e6, seed: run.seed}
//       reference: true          # fill reference / delta columns from the bundled data
//
// List values sweep; jobs run in the order K, coefficients, N.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "anovapde/error.hpp"
#include "anovapde/mcbench/simulate.hpp"
#include "anovapde/products/ratchet.hpp"

namespace anovapde::cli {

struct RunOptions {
    int threads = 0;
    std::uint64_t seed = 20100101;
    bool timing = false;
    bool full_precision = false;
    std::string references;  // resolved path, empty = none
};

struct ModelBlock {
    std::vector<int> n;
    double alpha = 0.25;
    double phi = 0.0413;
    double vol = 0.2;
    std::optional<double> flat = 0.1;
    std::vector<double> curve;  // used when flat is unset
};

struct BermudanBlock {
    std::vector<double> strikes;
    std::string schedule = "yearly";  // yearly | every_tenor | list
    std::vector<int> dates;           // 1-based, for schedule == list
};

struct RatchetBlock {
    std::vector<double> strikes;
    std::vector<RatchetCoefficients> coefficients;
    FloorletSet floorlets = FloorletSet::last;
};

struct PdeBlock {
    int r = 1, s = 1, t = 0;
    int points = 601;
    int steps = 10;
    double g_max = 1000.0;
    bool profile = false;
    bool terms = false;
};

struct McBlock {
    DriftMode mode = DriftMode::full;
    long policy_paths = 1000000;
    long valuation_paths = 10000000;
    long outer_paths = 5000;
    long inner_paths = 1000;
    int substeps = 5;
    std::uint64_t seed = 20100101;
};

struct VrstBlock {
    int r = 1, s = 1, t = 0;
    long paths = 1000000;
    std::uint64_t seed = 20100101;
};

struct ExperimentSpec {
    std::string name;
    ModelBlock model;
    std::variant<BermudanBlock, RatchetBlock> product;
    std::optional<PdeBlock> pde;
    std::optional<McBlock> mc;
    std::optional<VrstBlock> vrst;
    bool reference = true;

    bool is_bermudan() const { return std::holds_alternative<BermudanBlock>(product); }
    const char* product_name() const { return is_bermudan() ? "bermudan" : "ratchet"; }
};

struct Config {
    RunOptions run;
    std::vector<ExperimentSpec> experiments;
};

namespace detail {

inline std::string node_path(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

inline void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
    if (!n.IsMap()) throw ConfigError(path + ": expected a mapping");
    for (const auto& kv : n) {
        const std::string k = kv.first.as<std::string>();
        if (!allowed.count(k)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ConfigError(node_path(path, k) + ": unknown key (expected one of: " + list + ")");
        }
    }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path, const char* what) {
    if (!n.IsScalar()) throw ConfigError(path + ": expected " + what);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path + ": expected " + what + ", got '" + n.Scalar() + "'");
    }
}

inline double real(const YAML::Node& n, const std::string& path) {
    const double v = scalar<double>(n, path, "a number");
    if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
    return v;
}

inline int integer(const YAML::Node& n, const std::string& path) {
    const double v = real(n, path);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError(path + ": expected an integer");
    return static_cast<int>(v);
}

/// Path counts may be written as 1e6.
inline long count(const YAML::Node& n, const std::string& path) {
    const double v = real(n, path);
    if (v != std::floor(v) || v < 1 || v > 9e15) throw ConfigError(path + ": expected an integer >= 1");
    return static_cast<long>(v);
}

inline std::uint64_t seed(const YAML::Node& n, const std::string& path) {
    return scalar<std::uint64_t>(n, path, "a non-negative integer seed");
}

template <class F>
auto one_or_many(const YAML::Node& n, const std::string& path, F&& item) {
    using T = decltype(item(n, path));
    std::vector<T> out;
    if (n.IsSequence()) {
        if (n.size() == 0) throw ConfigError(path + ": empty list");
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(item(n[i], path + "[" + std::to_string(i) + "]"));
    } else {
        out.push_back(item(n, path));
    }
    return out;
}

inline RatchetCoefficients triple(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence() || n.size() != 3) throw ConfigError(path + ": expected [a, b, c]");
    return {real(n[0], path + "[0]"), real(n[1], path + "[1]"), real(n[2], path + "[2]")};
}

inline ModelBlock parse_model(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, {"N", "alpha", "phi", "c", "L0"});
    ModelBlock m;
    if (!n["N"]) throw ConfigError(path + ".N: required");
    m.n = one_or_many(n["N"], path + ".N", integer);
    for (int v : m.n)
        if (v < 2) throw ConfigError(path + ".N: must be >= 2");
    if (n["alpha"]) m.alpha = real(n["alpha"], path + ".alpha");
    if (n["phi"]) m.phi = real(n["phi"], path + ".phi");
    if (n["c"]) m.vol = real(n["c"], path + ".c");
    if (!(m.alpha > 0)) throw ConfigError(path + ".alpha: must be > 0");
    if (!(m.phi > 0)) throw ConfigError(path + ".phi: must be > 0");
    if (!(m.vol > 0)) throw ConfigError(path + ".c: must be > 0");
    if (const YAML::Node l = n["L0"]) {
        if (l.IsSequence()) {
            m.flat.reset();
            m.curve = one_or_many(l, path + ".L0", real);
            if (m.n.size() != 1 || static_cast<int>(m.curve.size()) != m.n[0])
                throw ConfigError(path + ".L0: a rate list needs a single N with N entries");
        } else {
            m.flat = real(l, path + ".L0");
        }
    }
    for (double v : m.flat ? std::vector<double>{*m.flat} : m.curve)
        if (!(v > 0)) throw ConfigError(path + ".L0: rates must be > 0");
    return m;
}

inline std::variant<BermudanBlock, RatchetBlock> parse_product(const YAML::Node& n, const std::string& path) {
    if (!n || !n.IsMap() || n.size() == 0) throw ConfigError(path + ": exactly one of bermudan, ratchet is required");
    check_keys(n, path, {"bermudan", "ratchet"});
    if (n.size() != 1) throw ConfigError(path + ": exactly one of bermudan, ratchet is required");
    if (const YAML::Node b = n["bermudan"]) {
        const std::string p = path + ".bermudan";
        check_keys(b, p, {"K", "schedule"});
        BermudanBlock out;
        if (!b["K"]) throw ConfigError(p + ".K: required");
        out.strikes = one_or_many(b["K"], p + ".K", real);
        if (const YAML::Node s = b["schedule"]) {
            if (s.IsSequence()) {
                out.schedule = "list";
                out.dates = one_or_many(s, p + ".schedule", integer);
            } else {
                out.schedule = scalar<std::string>(s, p + ".schedule", "a string");
                if (out.schedule != "yearly" && out.schedule != "every_tenor")
                    throw ConfigError(p + ".schedule: expected yearly, every_tenor or a list of tenors");
            }
        }
        return out;
    }
    const YAML::Node r = n["ratchet"];
    const std::string p = path + ".ratchet";
    check_keys(r, p, {"K1", "coefficients", "floorlets"});
    RatchetBlock out;
    if (!r["K1"]) throw ConfigError(p + ".K1: required");
    out.strikes = one_or_many(r["K1"], p + ".K1", real);
    for (double k : out.strikes)
        if (!(k >= 0)) throw ConfigError(p + ".K1: must be >= 0");
    if (!r["coefficients"]) throw ConfigError(p + ".coefficients: required");
    const YAML::Node c = r["coefficients"];
    if (c.IsSequence() && c.size() > 0 && c[0].IsSequence()) out.coefficients = one_or_many(c, p + ".coefficients", triple);
    else out.coefficients.push_back(triple(c, p + ".coefficients"));
    if (const YAML::Node f = r["floorlets"]) {
        const std::string s = scalar<std::string>(f, p + ".floorlets", "a string");
        if (s == "last") out.floorlets = FloorletSet::last;
        else if (s == "all") out.floorlets = FloorletSet::all;
        else throw ConfigError(p + ".floorlets: expected last or all");
    }
    return out;
}

inline void check_expansion(int r, int s, int t, const std::string& path) {
    if (r < 1) throw ConfigError(path + ".r: must be >= 1");
    if (s < 0) throw ConfigError(path + ".s: must be >= 0");
    if (t != 0 && t < s) throw ConfigError(path + ".t: must be 0 (default) or >= s");
    if (t > 3) throw ConfigError(path + ".t: stencils exist for t <= 3");
}

inline PdeBlock parse_pde(const YAML::Node& n, const std::string& path, bool bermudan) {
    PdeBlock b;
    b.points = bermudan ? 601 : 401;
    if (n.IsNull()) return b;
    check_keys(n, path, {"r", "s", "t", "J", "M", "g_max", "profile", "terms"});
    if (n["r"]) b.r = integer(n["r"], path + ".r");
    if (n["s"]) b.s = integer(n["s"], path + ".s");
    if (n["t"]) b.t = integer(n["t"], path + ".t");
    check_expansion(b.r, b.s, b.t, path);
    if (b.r + b.s > 2) throw ConfigError(path + ": PDE terms need r + s <= 2");
    if (n["J"]) b.points = integer(n["J"], path + ".J");
    if (b.points < 17) throw ConfigError(path + ".J: must be >= 17");
    if (n["M"]) b.steps = integer(n["M"], path + ".M");
    if (b.steps < 1) throw ConfigError(path + ".M: must be >= 1");
    if (n["g_max"]) b.g_max = real(n["g_max"], path + ".g_max");
    if (!(b.g_max > 0)) throw ConfigError(path + ".g_max: must be > 0");
    if (n["profile"]) b.profile = scalar<bool>(n["profile"], path + ".profile", "true or false");
    if (n["terms"]) b.terms = scalar<bool>(n["terms"], path + ".terms", "true or false");
    if (b.profile && !(b.r == 1 && b.s == 1 && b.t <= 1))
        throw ConfigError(path + ".profile: partial sums need r = 1, s = 1, t <= 1");
    return b;
}

inline McBlock parse_mc(const YAML::Node& n, const std::string& path, bool bermudan, std::uint64_t run_seed) {
    McBlock b;
    b.seed = run_seed;
    if (!bermudan) {
        b.policy_paths = 10000000;
        b.substeps = 10;
    }
    if (n.IsNull()) return b;
    check_keys(n, path, {"mode", "N1", "N2", "outer", "inner", "M", "seed"});
    if (n["mode"]) {
        try {
            b.mode = parse_drift_mode(scalar<std::string>(n["mode"], path + ".mode", "a string"));
        } catch (const ConfigError&) {
            throw ConfigError(path + ".mode: expected full or frozen");
        }
    }
    if (n["N1"]) b.policy_paths = count(n["N1"], path + ".N1");
    if (n["N2"]) b.valuation_paths = count(n["N2"], path + ".N2");
    if (n["outer"]) b.outer_paths = count(n["outer"], path + ".outer");
    if (n["inner"]) b.inner_paths = count(n["inner"], path + ".inner");
    if (n["M"]) b.substeps = integer(n["M"], path + ".M");
    if (b.substeps < 1) throw ConfigError(path + ".M: must be >= 1");
    if (n["seed"]) b.seed = seed(n["seed"], path + ".seed");
    if (!bermudan && (n["N2"] || n["outer"] || n["inner"]))
        throw ConfigError(path + ": N2, outer and inner apply to Bermudan swaptions only");
    return b;
}

inline VrstBlock parse_vrst(const YAML::Node& n, const std::string& path, std::uint64_t run_seed) {
    VrstBlock b;
    b.seed = run_seed;
    if (n.IsNull()) return b;
    check_keys(n, path, {"r", "s", "t", "paths", "seed"});
    if (n["r"]) b.r = integer(n["r"], path + ".r");
    if (n["s"]) b.s = integer(n["s"], path + ".s");
    if (n["t"]) b.t = integer(n["t"], path + ".t");
    check_expansion(b.r, b.s, b.t, path);
    if (n["paths"]) b.paths = count(n["paths"], path + ".paths");
    if (b.paths < 2) throw ConfigError(path + ".paths: must be >= 2");
    if (n["seed"]) b.seed = seed(n["seed"], path + ".seed");
    return b;
}

inline ExperimentSpec parse_experiment(const YAML::Node& n, const std::string& path, const RunOptions& run) {
    check_keys(n, path, {"name", "model", "product", "method", "reference"});
    ExperimentSpec e;
    e.name = n["name"] ? scalar<std::string>(n["name"], path + ".name", "a string") : path;
    if (!n["model"]) throw ConfigError(path + ".model: required");
    e.model = parse_model(n["model"], path + ".model");
    e.product = parse_product(n["product"], path + ".product");
    const bool berm = e.is_bermudan();
    const YAML::Node m = n["method"];
    const std::string mp = path + ".method";
    if (!m || !m.IsMap() || m.size() == 0) throw ConfigError(mp + ": at least one of pde, mc, vrst is required");
    check_keys(m, mp, {"pde", "mc", "vrst"});
    if (m["pde"]) e.pde = parse_pde(m["pde"], mp + ".pde", berm);
    if (m["mc"]) e.mc = parse_mc(m["mc"], mp + ".mc", berm, run.seed);
    if (m["vrst"]) {
        if (berm) throw ConfigError(mp + ".vrst: shared-noise term estimates are implemented for ratchet floors");
        e.vrst = parse_vrst(m["vrst"], mp + ".vrst", run.seed);
    }
    for (int nn : e.model.n) {
        if (e.pde && (e.pde->r >= nn || e.pde->r + e.pde->s > nn))
            throw ConfigError(mp + ".pde: need r < N and r + s <= N for N = " + std::to_string(nn));
        if (e.vrst && (e.vrst->r >= nn || e.vrst->r + e.vrst->s > nn))
            throw ConfigError(mp + ".vrst: need r < N and r + s <= N for N = " + std::to_string(nn));
    }
    if (n["reference"]) e.reference = scalar<bool>(n["reference"], path + ".reference", "true or false");
    return e;
}

}  // namespace detail

/// Parse a YAML document. `base_dir` resolves a relative run.references path.
inline Config parse_config(const YAML::Node& root, const std::filesystem::path& base_dir = {}) {
    using namespace detail;
    if (!root || !root.IsMap()) throw ConfigError("config: expected a mapping with 'experiments'");
    check_keys(root, "", {"run", "experiments"});
    Config cfg;
    if (const YAML::Node r = root["run"]) {
        check_keys(r, "run", {"threads", "seed", "timing", "full_precision", "references"});
        if (r["threads"]) cfg.run.threads = integer(r["threads"], "run.threads");
        if (cfg.run.threads < 0) throw ConfigError("run.threads: must be >= 0");
        if (r["seed"]) cfg.run.seed = seed(r["seed"], "run.seed");
        if (r["timing"]) cfg.run.timing = scalar<bool>(r["timing"], "run.timing", "true or false");
        if (r["full_precision"])
            cfg.run.full_precision = scalar<bool>(r["full_precision"], "run.full_precision", "true or false");
        if (r["references"]) {
            std::filesystem::path p = scalar<std::string>(r["references"], "run.references", "a path");
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            cfg.run.references = p.lexically_normal().string();
        }
    }
    const YAML::Node ex = root["experiments"];
    if (!ex || !ex.IsSequence() || ex.size() == 0) throw ConfigError("experiments: expected a non-empty list");
    for (std::size_t i = 0; i < ex.size(); ++i)
        cfg.experiments.push_back(parse_experiment(ex[i], "experiments[" + std::to_string(i) + "]", cfg.run));
    return cfg;
}

inline Config load_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw IoError("cannot read config '" + path + "'");
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(root, std::filesystem::path(path).parent_path());
}

/// Override every seed (the --seed flag).
inline void override_seed(Config& cfg, std::uint64_t seed) {
    cfg.run.seed = seed;
    for (auto& e : cfg.experiments) {
        if (e.mc) e.mc->seed = seed;
        if (e.vrst) e.vrst->seed = seed;
    }
}

/// Fully resolved configuration, defaults included, in the input grammar.
inline YAML::Node resolved_yaml(const Config& cfg) {
    YAML::Node root;
    YAML::Node run;
    run["threads"] = cfg.run.threads;
    run["seed"] = cfg.run.seed;
    run["timing"] = cfg.run.timing;
    run["full_precision"] = cfg.run.full_precision;
    run["references"] = cfg.run.references;
    root["run"] = run;
    for (const auto& e : cfg.experiments) {
        YAML::Node x;
        x["name"] = e.name;
        YAML::Node m;
        m["N"] = e.model.n;
        m["alpha"] = e.model.alpha;
        m["phi"] = e.model.phi;
        m["c"] = e.model.vol;
        if (e.model.flat) m["L0"] = *e.model.flat;
        else m["L0"] = e.model.curve;
        x["model"] = m;
        YAML::Node p;
        if (e.is_bermudan()) {
            const auto& b = std::get<BermudanBlock>(e.product);
            p["bermudan"]["K"] = b.strikes;
            if (b.schedule == "list") p["bermudan"]["schedule"] = b.dates;
            else p["bermudan"]["schedule"] = b.schedule;
        } else {
            const auto& r = std::get<RatchetBlock>(e.product);
            p["ratchet"]["K1"] = r.strikes;
            YAML::Node co;
            for (const auto& c : r.coefficients) co.push_back(std::vector<double>{c.a, c.b, c.c});
            p["ratchet"]["coefficients"] = co;
            p["ratchet"]["floorlets"] = r.floorlets == FloorletSet::last ? "last" : "all";
        }
        x["product"] = p;
        YAML::Node meth;
        if (e.pde) {
            YAML::Node d;
            d["r"] = e.pde->r;
            d["s"] = e.pde->s;
            d["t"] = e.pde->t;
            d["J"] = e.pde->points;
            d["M"] = e.pde->steps;
            d["g_max"] = e.pde->g_max;
            d["profile"] = e.pde->profile;
            d["terms"] = e.pde->terms;
            meth["pde"] = d;
        }
        if (e.mc) {
            YAML::Node d;
            d["mode"] = to_string(e.mc->mode);
            d["N1"] = e.mc->policy_paths;
            if (e.is_bermudan()) {
                d["N2"] = e.mc->valuation_paths;
                d["outer"] = e.mc->outer_paths;
                d["inner"] = e.mc->inner_paths;
            }
            d["M"] = e.mc->substeps;
            d["seed"] = e.mc->seed;
            meth["mc"] = d;
        }
        if (e.vrst) {
            YAML::Node d;
            d["r"] = e.vrst->r;
            d["s"] = e.vrst->s;
            d["t"] = e.vrst->t;
            d["paths"] = e.vrst->paths;
            d["seed"] = e.vrst->seed;
            meth["vrst"] = d;
        }
        x["method"] = meth;
        x["reference"] = e.reference;
        root["experiments"].push_back(x);
    }
    return root;
}

inline std::string resolved_text(const Config& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << resolved_yaml(cfg);
    return std::string(out.c_str()) + "\n";
}

}  // namespace anovapde::cli
