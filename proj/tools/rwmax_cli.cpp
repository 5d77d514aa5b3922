// rwmax command-line front end: every subcommand reads exact rational
// parameters, emits a machine-readable report on stdout (JSON, or CSV for
// the Doob tables) and reserves stderr for diagnostics.
//
// Exit status: 0 all checks pass, 1 a verification failed (the report
// carries the counterexample), 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rwmax/azema_yor.hpp"
#include "rwmax/embedding.hpp"
#include "rwmax/inequalities.hpp"
#include "rwmax/joint_dist.hpp"
#include "rwmax/kennedy.hpp"
#include "rwmax/measures.hpp"
#include "rwmax/report.hpp"
#include "rwmax/walk.hpp"

namespace {

using nlohmann::json;
using namespace rwmax;

struct Output {
    std::string path;  // empty: stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out) throw std::invalid_argument("cannot open output file: " + path);
        out << text;
    }
};

void emit_json(const Output& out, const json& doc) { out.write(doc.dump(2) + "\n"); }

struct ParamFlags {
    std::string p, q, r = "0";

    void attach(CLI::App* cmd) {
        cmd->add_option("--p", p, "up-step probability, rational string")->required();
        cmd->add_option("--q", q, "down-step probability, rational string")->required();
        cmd->add_option("--r", r, "stay probability, rational string (default 0)");
    }
    WalkParams build() const { return WalkParams::from_strings(p, q, r); }
    json echo() const { return json{{"p", p}, {"q", q}, {"r", r}}; }
};

int run_simulate(const ParamFlags& flags, long long horizon, std::uint64_t seed, bool summary_only,
                 const Output& out) {
    const WalkParams params = flags.build();
    const PathSample path = simulate(params, horizon, seed);
    json config = flags.echo();
    config["horizon"] = horizon;
    config["seed"] = seed;
    json doc = report_header("simulate", config);
    json report;
    report["final_z"] = path.z.back();
    report["final_m"] = path.m.back();
    report["mean_step"] =
        horizon == 0 ? 0.0 : static_cast<double>(path.z.back()) / static_cast<double>(horizon);
    report["value_mode"] = {{"final_z", "exact"}, {"final_m", "exact"}, {"mean_step", "float"}};
    if (!summary_only) {
        report["steps"] = path.steps;
        report["z"] = path.z;
        report["m"] = path.m;
    }
    doc["report"] = std::move(report);
    emit_json(out, doc);
    return 0;
}

int run_joint(const ParamFlags& flags, long long t, const Output& out) {
    const WalkParams params = flags.build();
    const JointDist dist = joint_dist(params, t);
    dist.validate();
    json config = flags.echo();
    config["t"] = t;
    json doc = report_header("joint", config);
    json atoms = json::array();
    Rat mean(0);
    for (const auto& [state, mass] : dist.mass) {
        atoms.push_back({{"z", state.z}, {"m", state.m}, {"mass", format_rational(mass)}});
        mean += Rat(state.z) * mass;
    }
    doc["report"] = {{"t", t},
                     {"atoms", std::move(atoms)},
                     {"total_mass", "1"},
                     {"mean_z", format_rational(mean)},
                     {"value_mode", "exact"}};
    emit_json(out, doc);
    return 0;
}

int run_verify_martingale(const std::string& spec_path, long long t_max, const Output& out) {
    const AzemaYorSpec spec = AzemaYorSpec::load(spec_path);
    const MartingaleVerdict verdict = verify_martingale_H(spec, t_max);

    bool expectation_constant = true;
    std::string expectation_detail;
    for (long long t = 0; t <= t_max && expectation_constant; ++t) {
        const Rat mean = azema_yor_expectation(spec, t);
        if (mean != spec.boundary[0]) {
            expectation_constant = false;
            expectation_detail = "E[H] at t=" + std::to_string(t) + " is " + format_rational(mean) +
                                 ", expected F(0) = " + format_rational(spec.boundary[0]);
        }
    }

    const bool pass = verdict.pass && expectation_constant;
    json config{{"spec", spec_path}, {"t_max", t_max}};
    json doc = report_header("verify-martingale", config);
    json report;
    report["pass"] = pass;
    report["states_checked"] = verdict.states_checked;
    report["value_mode"] = "exact";
    if (verdict.counterexample)
        report["counterexample"] = {{"z", verdict.counterexample->z}, {"m", verdict.counterexample->m}};
    if (!verdict.detail.empty()) report["detail"] = verdict.detail;
    report["expectation_constant"] = expectation_constant;
    if (!expectation_detail.empty()) report["expectation_detail"] = expectation_detail;
    doc["report"] = std::move(report);
    emit_json(out, doc);
    return pass ? 0 : 1;
}

int run_kennedy(const ParamFlags& flags, const std::string& a_text, const std::string& b_text, int n,
                long long grid_t, long long grid_x, long long grid_y, long long horizon, double tolerance,
                const Output& out) {
    const WalkParams params = flags.build();
    const Rat a = parse_rational(a_text);
    const Rat b = parse_rational(b_text);
    const long long x_max = std::max({grid_x, static_cast<long long>(n), 2LL});
    const KennedyParams kp = kennedy_build(a, b, n, params, x_max, tolerance);

    const auto table = kennedy_time_space(kp, grid_t, grid_x, grid_y);
    const auto condition = check_sufficient_condition(table, params);

    const double closed = kennedy_pgf(kp);
    const Rat truncated = kennedy_pgf_truncated(a, b, n, params, horizon);
    const double bound = kennedy_tail_bound(a, b, horizon);
    const bool within = std::abs(closed - to_double(truncated)) <= bound + 1e-12;

    json config = flags.echo();
    config["a"] = a_text;
    config["b"] = b_text;
    config["n"] = n;
    config["grid"] = {grid_t, grid_x, grid_y};
    config["horizon"] = horizon;
    config["tolerance"] = tolerance;
    json doc = report_header("kennedy", config);
    doc["report"] = {
        {"alpha_plus", kp.alpha_plus},
        {"alpha_minus", kp.alpha_minus},
        {"h", kp.h},
        {"recurrence_residual", kp.recurrence_residual},
        {"initial_residual", kp.initial_residual},
        {"sufficient_condition",
         {{"max_interior_residual", condition.max_interior_residual},
          {"max_boundary_residual", condition.max_boundary_residual},
          {"interior_points", condition.interior_points},
          {"boundary_points", condition.boundary_points}}},
        {"pgf",
         {{"closed_form", closed},
          {"truncated_dp", to_double(truncated)},
          {"truncated_dp_exact", format_rational(truncated)},
          {"horizon", horizon},
          {"tail_bound", bound},
          {"within_bound", within}}},
        {"value_mode", {{"roots", "float"}, {"truncated_dp_exact", "exact"}}},
    };
    emit_json(out, doc);
    return within ? 0 : 1;
}

int run_doob(const ParamFlags& flags, long long t, const std::vector<std::string>& lambdas,
             const std::optional<std::string>& pi_text, const std::string& format, const Output& out) {
    const WalkParams params = flags.build();

    if (pi_text) {
        const DoobLpReport report = doob_lp(params, t, parse_rational(*pi_text));
        if (format == "csv") {
            std::ostringstream text;
            text << "# tool=" << kToolName << " version=" << kToolVersion << " prng=" << SplitMix64::kAlgorithm
                 << " command=doob-lp p=" << flags.p << " q=" << flags.q << " r=" << flags.r << "\n";
            text << "t,pi,lhs,rhs,mode,holds\n";
            text << report.t << ',' << format_rational(report.exponent) << ',';
            if (report.exact)
                text << format_rational(report.lhs_exact) << ',' << format_rational(report.rhs_exact) << ",exact,";
            else
                text << report.lhs << ',' << report.rhs << ",float,";
            text << (report.holds ? "1" : "0") << "\n";
            out.write(text.str());
        } else {
            json config = flags.echo();
            config["t"] = t;
            config["pi"] = *pi_text;
            json doc = report_header("doob-lp", config);
            json body{{"t", report.t},
                      {"pi", format_rational(report.exponent)},
                      {"lhs", report.lhs},
                      {"rhs", report.rhs},
                      {"value_mode", report.exact ? "exact" : "float"},
                      {"holds", report.holds}};
            if (report.exact) {
                body["lhs_exact"] = format_rational(report.lhs_exact);
                body["rhs_exact"] = format_rational(report.rhs_exact);
                body["intermediate"] = format_rational(*report.intermediate);
            }
            doc["report"] = std::move(body);
            emit_json(out, doc);
        }
        return report.holds ? 0 : 1;
    }

    if (lambdas.empty()) throw std::invalid_argument("doob: give at least one --lambda, or --pi");
    std::vector<DoobMaximalReport> rows;
    rows.reserve(lambdas.size());
    bool all_hold = true;
    for (const std::string& text : lambdas) {
        rows.push_back(doob_maximal(params, t, parse_rational(text)));
        all_hold = all_hold && rows.back().holds;
    }
    if (format == "csv") {
        std::ostringstream text;
        text << "# tool=" << kToolName << " version=" << kToolVersion << " prng=" << SplitMix64::kAlgorithm
             << " command=doob p=" << flags.p << " q=" << flags.q << " r=" << flags.r
             << " values=exact-rational\n";
        text << doob_csv_header() << "\n";
        for (const auto& row : rows) text << to_csv_row(row) << "\n";
        out.write(text.str());
    } else {
        json config = flags.echo();
        config["t"] = t;
        config["lambda"] = lambdas;
        json doc = report_header("doob", config);
        json list = json::array();
        for (const auto& row : rows)
            list.push_back({{"t", row.t},
                            {"lambda", format_rational(row.lambda)},
                            {"ceil_lambda", row.ceil_lambda.str()},
                            {"prob", format_rational(row.prob)},
                            {"lhs", format_rational(row.lhs)},
                            {"rhs", format_rational(row.rhs)},
                            {"relation", relation_label(row.relation)},
                            {"regime", regime_label(row.regime)},
                            {"holds", row.holds}});
        doc["report"] = {{"rows", std::move(list)}, {"all_hold", all_hold}, {"value_mode", "exact"}};
        emit_json(out, doc);
    }
    return all_hold ? 0 : 1;
}

int run_embed(const ParamFlags& flags, const std::string& measure_path, std::string mode,
              const std::string& method_text, std::uint64_t runs, std::uint64_t seed, int threads,
              std::uint64_t step_cap, const Output& out) {
    const WalkParams params = flags.build();
    const CenteredMeasure measure = CenteredMeasure::load(measure_path);
    const EmbeddingPlan plan = build_plan(measure);
    if (mode == "auto") mode = measure.kind() == MeasureKind::finite ? "exact" : "mc";

    StoppedLaw law;
    if (mode == "exact") {
        ExactMethod method = ExactMethod::automatic;
        if (method_text == "solve") method = ExactMethod::linear_solve;
        else if (method_text == "iterate") method = ExactMethod::iteration;
        else if (method_text != "auto") throw std::invalid_argument("embed: unknown --method " + method_text);
        law = stopped_law_exact(plan, params, method);
    } else if (mode == "mc") {
        McOptions options;
        options.threads = threads;
        options.step_cap = step_cap;
        law = stopped_law_mc(plan, params, runs, seed, options);
    } else {
        throw std::invalid_argument("embed: unknown --mode " + mode);
    }
    const EmbeddingVerdict verdict = verify_embedding(plan, params, law);

    json config = flags.echo();
    config["measure"] = measure_path;
    config["mode"] = mode;
    if (mode == "exact") config["method"] = method_text;
    if (mode == "mc") {
        config["runs"] = runs;
        config["seed"] = seed;
        config["threads"] = threads;
        config["step_cap"] = step_cap;
    }
    json doc = report_header("embed", config);
    json plan_doc{{"support", plan.support()}, {"psi", plan.psi()}, {"shift", plan.shift()}};
    json verification{{"pass", verdict.pass}, {"checks", verdict.checks}, {"failures", verdict.failures}};
    if (measure.kind() == MeasureKind::geometric)
        verification["truncation_budget"] = format_rational(measure.truncation_tail());
    doc["report"] = {{"plan", std::move(plan_doc)},
                     {"law", law.to_json()},
                     {"verification", std::move(verification)},
                     {"value_mode", mode == "exact" ? "exact" : "float"}};
    emit_json(out, doc);
    return verdict.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"martingales, Doob inequalities and Skorokhod embeddings of the simple random walk"};
    app.require_subcommand(1);

    Output out;
    app.add_option("--out", out.path, "write the report to a file instead of stdout");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "sample one path with its running maximum");
    ParamFlags simulate_params;
    simulate_params.attach(simulate_cmd);
    long long horizon = 0;
    std::uint64_t simulate_seed = 0;
    bool summary_only = false;
    simulate_cmd->add_option("--horizon", horizon, "number of steps")->required();
    simulate_cmd->add_option("--seed", simulate_seed, "PRNG seed")->required();
    simulate_cmd->add_flag("--summary-only", summary_only, "omit the step/z/m arrays");

    // joint
    auto* joint_cmd = app.add_subcommand("joint", "exact joint law of (Z_t, M_t)");
    ParamFlags joint_params;
    joint_params.attach(joint_cmd);
    long long joint_t = 0;
    joint_cmd->add_option("--t", joint_t, "time index")->required();

    // verify-martingale
    auto* verify_cmd = app.add_subcommand("verify-martingale", "exact martingale verification of a boundary spec");
    std::string spec_path;
    long long t_max = 0;
    verify_cmd->add_option("--spec", spec_path, "spec file (params + F table)")->required();
    verify_cmd->add_option("--t-max", t_max, "verification horizon")->required();

    // kennedy
    auto* kennedy_cmd = app.add_subcommand("kennedy", "Kennedy martingale construction and generating function");
    ParamFlags kennedy_params;
    kennedy_params.attach(kennedy_cmd);
    std::string a_text, b_text;
    int kennedy_n = 1;
    long long grid_t = 10, grid_x = 10, grid_y = 10, kennedy_horizon = 200;
    double kennedy_tolerance = 1e-10;
    kennedy_cmd->add_option("--a", a_text, "spatial base, rational string")->required();
    kennedy_cmd->add_option("--b", b_text, "temporal base, rational string")->required();
    kennedy_cmd->add_option("--n", kennedy_n, "target drawdown of tau")->required();
    kennedy_cmd->add_option("--grid-t", grid_t, "sufficient-condition grid bound in t");
    kennedy_cmd->add_option("--grid-x", grid_x, "sufficient-condition grid bound in x");
    kennedy_cmd->add_option("--grid-y", grid_y, "sufficient-condition grid bound in y");
    kennedy_cmd->add_option("--horizon", kennedy_horizon, "truncation horizon of the DP cross-check");
    kennedy_cmd->add_option("--tolerance", kennedy_tolerance, "relative tolerance for root/recurrence checks");

    // doob
    auto* doob_cmd = app.add_subcommand("doob", "Doob maximal (and L^p) statements from the exact law");
    ParamFlags doob_params;
    doob_params.attach(doob_cmd);
    long long doob_t = 0;
    std::vector<std::string> lambdas;
    std::string pi_text;
    std::string format = "json";
    doob_cmd->add_option("--t", doob_t, "time index")->required();
    doob_cmd->add_option("--lambda", lambdas, "level(s), rational strings");
    doob_cmd->add_option("--pi", pi_text, "L^p exponent; switches to the L^p report");
    doob_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Skorokhod embedding of a centered measure");
    ParamFlags embed_params;
    embed_params.attach(embed_cmd);
    std::string measure_path, mode = "auto", method_text = "auto";
    std::uint64_t runs = 100000, embed_seed = 0, step_cap = 10'000'000;
    int threads = 1;
    embed_cmd->add_option("--measure", measure_path, "measure file")->required();
    embed_cmd->add_option("--mode", mode, "exact, mc or auto (exact for finite measures, mc otherwise)")
        ->check(CLI::IsMember({"auto", "exact", "mc"}));
    embed_cmd->add_option("--method", method_text, "exact mode: auto, solve or iterate")
        ->check(CLI::IsMember({"auto", "solve", "iterate"}));
    embed_cmd->add_option("--runs", runs, "Monte Carlo runs");
    embed_cmd->add_option("--seed", embed_seed, "PRNG seed");
    embed_cmd->add_option("--threads", threads, "Monte Carlo worker threads");
    embed_cmd->add_option("--step-cap", step_cap, "per-run step cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (simulate_cmd->parsed())
            return run_simulate(simulate_params, horizon, simulate_seed, summary_only, out);
        if (joint_cmd->parsed()) return run_joint(joint_params, joint_t, out);
        if (verify_cmd->parsed()) return run_verify_martingale(spec_path, t_max, out);
        if (kennedy_cmd->parsed())
            return run_kennedy(kennedy_params, a_text, b_text, kennedy_n, grid_t, grid_x, grid_y,
                               kennedy_horizon, kennedy_tolerance, out);
        if (doob_cmd->parsed())
            return run_doob(doob_params, doob_t, lambdas,
                            pi_text.empty() ? std::nullopt : std::optional<std::string>(pi_text), format, out);
        if (embed_cmd->parsed())
            return run_embed(embed_params, measure_path, mode, method_text, runs, embed_seed, threads,
                             step_cap, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
