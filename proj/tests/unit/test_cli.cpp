#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "anovapde/cli/reference.hpp"
#include "anovapde/cli/runner.hpp"
#include "anovapde/cli/spec.hpp"
#include "anovapde/cli/table.hpp"

using namespace anovapde;
using namespace anovapde::cli;

namespace {

Config parse(const std::string& text) { return parse_config(YAML::Load(text)); }

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kMinimal = R"(
experiments:
  - name: b
    model: {N: 5}
    product: {bermudan: {K: 0.1}}
    method: {pde: {}}
)";

}  // namespace

TEST(Spec, Defaults) {
    const Config c = parse(kMinimal);
    EXPECT_EQ(c.run.threads, 0);
    EXPECT_EQ(c.run.seed, 20100101u);
    ASSERT_EQ(c.experiments.size(), 1u);
    const ExperimentSpec& e = c.experiments[0];
    EXPECT_EQ(e.model.n, std::vector<int>{5});
    EXPECT_DOUBLE_EQ(e.model.alpha, 0.25);
    EXPECT_DOUBLE_EQ(e.model.phi, 0.0413);
    EXPECT_DOUBLE_EQ(e.model.vol, 0.2);
    EXPECT_DOUBLE_EQ(*e.model.flat, 0.1);
    ASSERT_TRUE(e.pde);
    EXPECT_EQ(e.pde->points, 601);
    EXPECT_EQ(e.pde->steps, 10);
    EXPECT_EQ(e.pde->r, 1);
    EXPECT_EQ(e.pde->s, 1);
    EXPECT_FALSE(e.mc);
    EXPECT_TRUE(e.is_bermudan());
    EXPECT_EQ(std::get<BermudanBlock>(e.product).schedule, "yearly");
}

TEST(Spec, RatchetDefaultsAndSweep) {
    const Config c = parse(R"(
run: {seed: 7}
experiments:
  - name: r
    model: {N: [5, 11, 21]}
    product:
      ratchet:
        K1: [0.09, 0.1, 0.11]
        coefficients: [[0, 1, 0], [0.2, 0.9, 0], [0.25, 0.95, -0.01]]
    method: {pde: {}, mc: {N1: 1e5}}
)");
    const ExperimentSpec& e = c.experiments[0];
    EXPECT_EQ(e.pde->points, 401);
    EXPECT_EQ(e.mc->substeps, 10);
    EXPECT_EQ(e.mc->policy_paths, 100000);
    EXPECT_EQ(e.mc->seed, 7u);
    const auto jobs = expand_jobs(e, 0);
    ASSERT_EQ(jobs.size(), 27u);
    EXPECT_EQ(jobs[0].n, 5);
    EXPECT_EQ(jobs[1].n, 11);
    EXPECT_DOUBLE_EQ(jobs[3].coef.a, 0.2);
    EXPECT_DOUBLE_EQ(jobs[9].strike, 0.1);
    EXPECT_EQ(format_coefficients(jobs[26].coef), "0.25/0.95/-0.01");
}

TEST(Spec, ErrorsNameTheField) {
    EXPECT_NE(error_of(R"(
experiments:
  - name: b
    model: {N: 5, colour: red}
    product: {bermudan: {K: 0.1}}
    method: {pde: {}}
)").find("experiments[0].model.colour"), std::string::npos);
    EXPECT_NE(error_of(R"(
experiments:
  - name: b
    model: {N: 5}
    product: {bermudan: {K: 0.1}, ratchet: {K1: 0.1}}
    method: {pde: {}}
)").find("experiments[0].product"), std::string::npos);
    EXPECT_NE(error_of(R"(
experiments:
  - name: b
    model: {N: 5}
    product: {bermudan: {K: 0.1}}
    method: {pde: {r: 1, s: 2}}
)").find("experiments[0].method.pde"), std::string::npos);
    EXPECT_NE(error_of(R"(
experiments:
  - name: b
    model: {N: 5}
    product: {bermudan: {K: 0.1}}
    method: {vrst: {}}
)").find("vrst"), std::string::npos);
    EXPECT_NE(error_of(R"(
experiments:
  - name: b
    model: {N: five}
    product: {bermudan: {K: 0.1}}
    method: {pde: {}}
)").find("experiments[0].model.N"), std::string::npos);
    EXPECT_NE(error_of("experiments: []").find("experiments"), std::string::npos);
    EXPECT_NE(error_of(R"(
experiments:
  - name: b
    model: {N: 5}
    product: {bermudan: {K: 0.1}}
    method: {}
)"), "");
}

TEST(Spec, MissingFileIsIoError) {
    EXPECT_THROW(load_config("/nonexistent/dir/x.yaml"), IoError);
}

TEST(Spec, ResolvedTextRoundTrips) {
    const Config c = parse(kMinimal);
    const std::string text = resolved_text(c);
    const Config back = parse(text);
    EXPECT_EQ(resolved_text(back), text);
    EXPECT_NE(text.find("J: 601"), std::string::npos);
}

TEST(Spec, SeedOverride) {
    Config c = parse(R"(
experiments:
  - name: r
    model: {N: 5}
    product: {ratchet: {K1: 0.1, coefficients: [0, 1, 0]}}
    method: {mc: {seed: 3}, vrst: {}}
)");
    override_seed(c, 99);
    EXPECT_EQ(c.experiments[0].mc->seed, 99u);
    EXPECT_EQ(c.experiments[0].vrst->seed, 99u);
}

TEST(Runner, TermLabelsAndSchedules) {
    EXPECT_EQ(term_label(1, 0, 0), "V100");
    EXPECT_EQ(term_label(1, 1, 0), "V111");
    EXPECT_EQ(term_label(1, 2, 3), "V123");
    EXPECT_EQ(term_label(2, 0, 3), "V200");
    BermudanBlock b;
    b.schedule = "list";
    b.dates = {1, 3};
    EXPECT_EQ(bermudan_dates(b, 4), (std::vector<int>{0, 2}));
    b.dates = {5};
    EXPECT_THROW(bermudan_dates(b, 4), ConfigError);
    b.schedule = "every_tenor";
    EXPECT_EQ(bermudan_dates(b, 3), (std::vector<int>{0, 1, 2}));
}

TEST(Table, CsvQuotingAndHeader) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    Row r;
    r.experiment = "x,y";
    r.product = "ratchet";
    r.n = 5;
    r.strike = 0.1;
    r.method = "pde";
    r.item = "value";
    r.value = 0.00704191;
    r.reference = 0.00704;
    r.reference_source = "data";
    std::ostringstream os;
    emit_table(os, {r}, TableOptions{});
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("experiment,product,N,K,coefficients,method,item,k,value,", 0), 0u);
    EXPECT_NE(s.find("\"x,y\",ratchet,5,0.1,,pde,value,,0.00704191,"), std::string::npos);
    EXPECT_NE(s.find("\r\n"), std::string::npos);
    EXPECT_EQ(format_g(0.000123456789), "0.000123457");
}

TEST(Table, PlainAlignsColumns) {
    Row r;
    r.experiment = "e";
    r.product = "bermudan";
    r.n = 11;
    r.strike = 0.1;
    r.method = "pde";
    r.item = "value";
    r.value = 1.0;
    std::ostringstream os;
    emit_table(os, {r, r}, TableOptions{TableFormat::plain, false, false});
    std::istringstream in(os.str());
    std::string a, b;
    std::getline(in, a);
    std::getline(in, b);
    EXPECT_EQ(a.find("product"), b.find("bermudan"));
    EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Reference, BundledTableLookup) {
    const ReferenceTable t = ReferenceTable::load(std::string(ANOVAPDE_SOURCE_DIR) + "/data/reference_values.csv");
    EXPECT_GT(t.size(), 200u);
    ReferenceKey k;
    k.product = "bermudan";
    k.vol = 0.2;
    k.phi = 0.0413;
    k.level = 0.1;
    k.n = 11;
    k.strike = 0.1;
    k.source = "pde";
    k.item = "value";
    ASSERT_TRUE(t.value(k));
    EXPECT_NEAR(*t.value(k), 1.24e-2, 1e-12);
    k.n = 12;
    EXPECT_FALSE(t.value(k));
    EXPECT_THROW(ReferenceTable::load("/nonexistent.csv"), IoError);
    std::istringstream bad("nope,header\n");
    EXPECT_THROW(ReferenceTable::parse(bad, "bad"), ConfigError);
}

TEST(Runner, OutputIsReproducible) {
    const Config c = parse(R"(
run: {threads: 1, seed: 5}
experiments:
  - name: berm
    model: {N: 4}
    product: {bermudan: {K: 0.1, schedule: every_tenor}}
    method:
      pde: {J: 61, profile: true, terms: true}
      mc: {N1: 2000, N2: 4000, outer: 20, inner: 20}
  - name: rat
    model: {N: 4}
    product: {ratchet: {K1: 0.1, coefficients: [0.2, 0.9, 0]}}
    method:
      pde: {J: 61}
      mc: {N1: 4000, M: 2}
      vrst: {s: 2, paths: 2000}
)");
    auto run = [&](int threads) {
        Runner runner(c, threads, ReferenceTable{});
        std::vector<Row> rows;
        runner.run_all(rows);
        std::ostringstream os;
        emit_table(os, rows, TableOptions{});
        return std::pair{rows, os.str()};
    };
    const auto [rows, text] = run(1);
    EXPECT_EQ(run(2).second, text);
    // berm: summary, mc, 2 levels x (term + total), 4 partial sums; rat: summary, mc, 3 levels x 3 + full
    EXPECT_EQ(rows.size(), 2u + 4u + 4u + 2u + 10u);
    EXPECT_EQ(rows[0].method, "both");
    ASSERT_TRUE(rows[0].reference);
    EXPECT_EQ(rows[0].reference_source, "mc");
    EXPECT_EQ(rows[1].method, "mc");
    EXPECT_EQ(rows.back().item, "V_full");
    EXPECT_NE(text.find("error_V122"), std::string::npos);
}
