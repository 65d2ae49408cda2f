// concnls command line: ground-state shooting, mass-constrained minimization,
// fermionic SCF and two-center binding diagnostics, verification suites and
// regression fixtures.  Results are deterministic JSON (schema "1"); scan
// tables go to CSV.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "concnls/asymptotics.hpp"
#include "concnls/bosonic.hpp"
#include "concnls/fermionic.hpp"
#include "concnls/grid.hpp"
#include "concnls/model.hpp"
#include "concnls/shoot.hpp"

using json = nlohmann::ordered_json;
using namespace concnls;

namespace {

constexpr const char* kSchema = "1";

struct CommonArgs {
    int d = 3;
    double q = 2.0;
    double r = 4.0 / 3.0;
    double alpha = 1.0;
    std::string config;
    std::string out;
    std::string table;
};

void add_model_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--d", a.d, "spatial dimension");
    cmd->add_option("--q", a.q, "supercritical exponent");
    cmd->add_option("--r", a.r, "subcritical exponent");
    cmd->add_option("--alpha", a.alpha, "regularization threshold");
    cmd->add_option("--config", a.config, "JSON config file (flags take precedence)");
    cmd->add_option("--out", a.out, "write the JSON result to this path");
    cmd->add_option("--table", a.table, "write the CSV scan table to this path");
}

// config precedence: flags > config file > defaults; unknown keys rejected
void merge_config(const CLI::App* cmd, CommonArgs& a, double* lambda = nullptr,
                  double* mu = nullptr) {
    if (a.config.empty()) return;
    std::ifstream in(a.config);
    if (!in) throw std::runtime_error("config: cannot open " + a.config);
    json j = json::parse(in);
    static const std::set<std::string> known = {"d",  "q",  "r",   "alpha",
                                                "lambda", "mu", "out", "table"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw std::runtime_error("config: unknown key '" + key + "'");
    auto given = [&](const std::string& flag) {
        const auto* opt = cmd->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    if (j.contains("d") && !given("--d")) a.d = j["d"].get<int>();
    if (j.contains("q") && !given("--q")) a.q = j["q"].get<double>();
    if (j.contains("r") && !given("--r")) a.r = j["r"].get<double>();
    if (j.contains("alpha") && !given("--alpha")) a.alpha = j["alpha"].get<double>();
    if (lambda && j.contains("lambda") && !given("--lambda")) *lambda = j["lambda"].get<double>();
    if (mu && j.contains("mu") && !given("--mu")) *mu = j["mu"].get<double>();
    if (j.contains("out") && !given("--out")) a.out = j["out"].get<std::string>();
    if (j.contains("table") && !given("--table")) a.table = j["table"].get<std::string>();
}

void emit(const CommonArgs& a, const json& j) {
    if (a.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(a.out);
        os << j.dump(2) << "\n";
    }
}

void emit_table(const CommonArgs& a, const std::string& csv) {
    if (a.table.empty()) return;
    std::ofstream os(a.table);
    os << csv;
}

json model_json(const ModelParams& p) {
    return json{{"d", p.d}, {"q", p.q}, {"r", p.r}, {"alpha", p.alpha}};
}

json ground_state_json(const ModelParams& p, const GroundState& gs) {
    return json{{"schema", kSchema},
                {"operation", "shoot"},
                {"params", model_json(p)},
                {"mu", gs.mu},
                {"lambda_mass", gs.lambda_mass},
                {"energy", gs.energy},
                {"grad_sq", gs.grad_sq},
                {"pohozaev_residual", gs.pohozaev_residual},
                {"pde_residual", gs.pde_residual},
                {"shoot_height", gs.shoot_height},
                {"bisection_steps", gs.bisection_steps},
                {"decay", json{{"rate", gs.decay.rate},
                               {"power", gs.decay.power},
                               {"amplitude", gs.decay.amplitude}}}};
}

// ---- fixtures ----------------------------------------------------------------

struct FixtureEntry {
    std::string key;
    json params;
    double value;
    double tolerance;
};

std::vector<FixtureEntry> fixture_battery() {
    std::vector<FixtureEntry> out;
    {
        const auto p = make_model_params(3, 2.0, 4.0 / 3.0, 1.0);
        const auto v0 = solve_v0(p);
        out.push_back({"v0-center_d3_q2", model_json(p), v0.shoot_height, 1e-5});
        const auto Q = solve_q_profile(p);
        out.push_back({"q-center_d3_q2_r1.33", model_json(p), Q.shoot_height, 1e-5});
        const auto br = shooting_branch(p);
        out.push_back({"lambda-c_d3_q2_r1.33", model_json(p), br.lambda_c, 1e-4});
        out.push_back({"mu-star_d3_q2_r1.33", model_json(p), br.mu_star, 1e-4});
    }
    {
        const auto p = make_model_params(3, 1.8, 1.4, 1.0);
        const auto br = shooting_branch(p);
        out.push_back({"lambda-c_d3_q1.8_r1.4", model_json(p), br.lambda_c, 1e-4});
        out.push_back({"mu-star_d3_q1.8_r1.4", model_json(p), br.mu_star, 1e-4});
    }
    return out;
}

// ---- verify ------------------------------------------------------------------

int run_verify(const std::string& suite, const CommonArgs& a) {
    const auto p = make_model_params(a.d, a.q, a.r, a.alpha);
    SuiteReport rep;
    if (suite == "subcritical") rep = run_subcritical_suite(p);
    else if (suite == "supercritical") rep = run_supercritical_suite(p);
    else if (suite == "critical") rep = run_critical_suite(p);
    else if (suite == "mu-infinity") rep = run_mu_infinity_suite(p);
    else if (suite == "scaling") rep = run_scaling_suite(p);
    else throw CLI::ValidationError("verify", "unknown suite '" + suite + "'");
    rep.print_table(std::cerr);
    json j = json::parse(rep.to_json().dump());
    j["schema"] = kSchema;
    j["params"] = model_json(p);
    emit(a, j);
    return rep.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"solvers and verification suites for a concave-regularized "
                 "multi-particle Schrodinger model"};
    app.require_subcommand(1);

    // ---- shoot ----
    CommonArgs sa;
    double s_mu = 1.0;
    std::string s_equation = "el";
    std::vector<double> s_mu_list;
    std::string s_profile_csv;
    auto* shoot_cmd = app.add_subcommand("shoot", "radial ground states by shooting");
    add_model_flags(shoot_cmd, sa);
    shoot_cmd->add_option("--mu", s_mu, "EL multiplier (equation 'el')");
    shoot_cmd->add_option("--equation", s_equation,
                          "el | v0 | zero-mass | q-profile");
    shoot_cmd->add_option("--mu-list", s_mu_list, "scan multipliers (CSV table output)");
    shoot_cmd->add_option("--profile-csv", s_profile_csv, "write the profile as CSV (r,u)");

    // ---- bosonic ----
    CommonArgs ba;
    double b_lambda = 25.0, b_lo = 15.0, b_hi = 26.0, b_tol = 1e-3;
    std::size_t b_n = 1500;
    auto* bos = app.add_subcommand("bosonic", "mass-constrained minimization");
    bos->require_subcommand(1);
    auto* bmin = bos->add_subcommand("minimize", "projected gradient flow at fixed mass");
    add_model_flags(bmin, ba);
    bmin->add_option("--lambda", b_lambda, "mass constraint");
    bmin->add_option("--n", b_n, "flow grid nodes");
    auto* blc = bos->add_subcommand("lambda-c", "critical-mass bisection");
    add_model_flags(blc, ba);
    blc->add_option("--bracket", [&b_lo, &b_hi](const std::vector<std::string>& v) {
        if (v.empty()) return false;
        std::istringstream is(v.back());
        char comma = 0;
        return static_cast<bool>(is >> b_lo >> comma >> b_hi) && comma == ',';
    }, "bracket lo,hi")->type_name("LO,HI");
    blc->add_option("--tol", b_tol, "bisection tolerance in the mass");
    blc->add_option("--n", b_n, "flow grid nodes");

    // ---- fermi ----
    CommonArgs fa;
    int f_N = 2;
    double f_lo = 0.0, f_hi = 0.0, f_tol = 0.0;
    std::vector<double> f_r_list;
    auto* fer = app.add_subcommand("fermi", "fermionic SCF and binding diagnostics");
    fer->require_subcommand(1);
    auto* fscf = fer->add_subcommand("scf", "radial SCF over angular channels");
    add_model_flags(fscf, fa);
    fscf->add_option("--N", f_N, "particle number");
    auto* fbind = fer->add_subcommand("binding", "strong-binding inequality report");
    add_model_flags(fbind, fa);
    fbind->add_option("--N", f_N, "particle number");
    auto* fac = fer->add_subcommand("alpha-c", "critical-coupling bisection");
    add_model_flags(fac, fa);
    fac->add_option("--N", f_N, "particle number");
    fac->add_option("--bracket", [&f_lo, &f_hi](const std::vector<std::string>& v) {
        if (v.empty()) return false;
        std::istringstream is(v.back());
        char comma = 0;
        return static_cast<bool>(is >> f_lo >> comma >> f_hi) && comma == ',';
    }, "bracket lo,hi in the threshold")->type_name("LO,HI");
    fac->add_option("--tol", f_tol, "bisection tolerance (0: 1e-6 relative)");
    auto* ftc = fer->add_subcommand("two-center", "rank-2 separated-state energies");
    add_model_flags(ftc, fa);
    ftc->add_option("--R-list", f_r_list, "separations (rescaled frame); empty = auto");

    // ---- verify ----
    CommonArgs va;
    std::string v_suite;
    auto* ver = app.add_subcommand("verify", "run a verification suite (CI-friendly)");
    ver->add_option("suite", v_suite,
                    "subcritical | supercritical | critical | mu-infinity | scaling")
        ->required();
    add_model_flags(ver, va);

    // ---- fixtures ----
    CommonArgs xa;
    std::string x_mode = "compare", x_dir = "fixtures";
    auto* fix = app.add_subcommand("fixtures", "record or compare regression fixtures");
    fix->add_option("mode", x_mode, "record | compare")->required();
    fix->add_option("--dir", x_dir, "fixture directory");
    fix->add_option("--out", xa.out, "write the JSON result to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage error
    }

    try {
        if (shoot_cmd->parsed()) {
            merge_config(shoot_cmd, sa, nullptr, &s_mu);
            const auto p = make_model_params(sa.d, sa.q, sa.r, sa.alpha);
            if (!s_mu_list.empty()) {
                const auto rows = lambda_of_mu_curve(p, s_mu_list);
                std::ostringstream csv;
                csv << "mu,lambda,energy,ok\n";
                json jr = json::array();
                for (const auto& r : rows) {
                    csv << r.mu << "," << r.lambda << "," << r.energy << ","
                        << (r.ok ? 1 : 0) << "\n";
                    jr.push_back(json{{"mu", r.mu},
                                      {"lambda", r.lambda},
                                      {"energy", r.energy},
                                      {"ok", r.ok},
                                      {"error", r.error}});
                }
                emit_table(sa, csv.str());
                emit(sa, json{{"schema", kSchema},
                              {"operation", "shoot-scan"},
                              {"params", model_json(p)},
                              {"rows", jr}});
                return 0;
            }
            GroundState gs;
            if (s_equation == "el") gs = solve_ground_state(p, s_mu);
            else if (s_equation == "v0") gs = solve_v0(p);
            else if (s_equation == "zero-mass") gs = solve_zero_mass(p);
            else if (s_equation == "q-profile") gs = solve_q_profile(p);
            else throw std::runtime_error("shoot: unknown equation '" + s_equation + "'");
            if (!s_profile_csv.empty()) {
                std::ofstream os(s_profile_csv);
                profile_to_csv(gs.profile, os);
            }
            emit(sa, ground_state_json(p, gs));
            return 0;
        }

        if (bmin->parsed()) {
            merge_config(bmin, ba, &b_lambda);
            const auto p = make_model_params(ba.d, ba.q, ba.r, ba.alpha);
            FlowOpts o;
            o.n_nodes = b_n;
            const auto res = minimize(p, b_lambda, o);
            emit(ba, json{{"schema", kSchema},
                          {"operation", "bosonic-minimize"},
                          {"params", model_json(p)},
                          {"lambda", res.lambda},
                          {"energy", res.energy},
                          {"mu", res.mu},
                          {"iterations", res.iterations},
                          {"gradient_residual", res.gradient_residual},
                          {"converged", res.converged},
                          {"diagnostic", res.diagnostic}});
            return 0;
        }

        if (blc->parsed()) {
            merge_config(blc, ba);
            const auto p = make_model_params(ba.d, ba.q, ba.r, ba.alpha);
            FlowOpts o;
            o.n_nodes = b_n;
            const auto scan = find_lambda_c(p, b_lo, b_hi, b_tol, o);
            std::ostringstream csv;
            csv << "lambda,J,mu,iterations\n";
            json steps = json::array();
            for (const auto& st : scan.steps) {
                csv << st.x << "," << st.value << "," << st.mu << "," << st.iterations
                    << "\n";
                steps.push_back(json{{"lambda", st.x},
                                     {"J", st.value},
                                     {"mu", st.mu},
                                     {"iterations", st.iterations}});
            }
            emit_table(ba, csv.str());
            emit(ba, json{{"schema", kSchema},
                          {"operation", "bosonic-lambda-c"},
                          {"params", model_json(p)},
                          {"estimate", scan.estimate},
                          {"lo", scan.lo},
                          {"hi", scan.hi},
                          {"tolerance", scan.tolerance},
                          {"iterations", scan.iterations},
                          {"steps", steps}});
            return 0;
        }

        if (fscf->parsed()) {
            merge_config(fscf, fa);
            const auto p = make_model_params(fa.d, fa.q, fa.r, fa.alpha);
            const auto st = scf(p, f_N);
            json levels = json::array();
            for (const auto& lev : st.levels)
                levels.push_back(json{{"l", lev.l},
                                      {"k", lev.k},
                                      {"eigenvalue_beta", lev.eigenvalue},
                                      {"eigenvalue", st.energy_factor * lev.eigenvalue},
                                      {"occupation", lev.occupation}});
            emit(fa, json{{"schema", kSchema},
                          {"operation", "fermi-scf"},
                          {"params", model_json(p)},
                          {"N", st.n_particles},
                          {"beta", st.beta},
                          {"energy", st.energy},
                          {"energy_beta", st.energy_beta},
                          {"fermi_gap", st.fermi_gap},
                          {"fermi_gap_beta", st.fermi_gap_beta},
                          {"fermi_gap_multiplicity_beta", st.fermi_gap_multiplicity_beta},
                          {"iterations", st.iterations},
                          {"converged", st.converged},
                          {"levels", levels},
                          {"note", "radial m-averaged estimator: upper bound"}});
            return 0;
        }

        if (fbind->parsed()) {
            merge_config(fbind, fa);
            const auto p = make_model_params(fa.d, fa.q, fa.r, fa.alpha);
            const auto rep = binding_report(p, f_N);
            std::ostringstream csv;
            csv << "k,I_upper\n";
            for (std::size_t k = 1; k < rep.i_upper.size(); ++k)
                csv << k << "," << rep.i_upper[k] << "\n";
            emit_table(fa, csv.str());
            json lines = json::array();
            for (const auto& l : rep.inequalities)
                lines.push_back(json{{"k", l.k},
                                     {"lhs", l.lhs},
                                     {"rhs", l.rhs},
                                     {"margin", l.margin},
                                     {"holds", l.holds}});
            emit(fa, json{{"schema", kSchema},
                          {"operation", "fermi-binding"},
                          {"params", model_json(p)},
                          {"N", rep.n},
                          {"i_upper", rep.i_upper},
                          {"inequalities", lines},
                          {"binding_evidence", rep.binding_evidence},
                          {"note", rep.note}});
            return 0;
        }

        if (fac->parsed()) {
            merge_config(fac, fa);
            const auto fam = make_model_params(fa.d, fa.q, fa.r, 1.0);
            if (f_lo <= 0.0 || f_hi <= 0.0)
                throw std::runtime_error("fermi alpha-c: --bracket lo,hi is required");
            const double tol = f_tol > 0.0 ? f_tol : 1e-6 * f_hi;
            const auto out = find_alpha_c(fam, f_N, f_lo, f_hi, tol);
            std::ostringstream csv;
            csv << "alpha,I\n";
            json steps = json::array();
            for (const auto& st : out.scan.steps) {
                csv << st.x << "," << st.value << "\n";
                steps.push_back(json{{"alpha", st.x}, {"I", st.value}});
            }
            emit_table(fa, csv.str());
            emit(fa, json{{"schema", kSchema},
                          {"operation", "fermi-alpha-c"},
                          {"params", model_json(fam)},
                          {"N", f_N},
                          {"estimator", out.estimator},
                          {"estimate", out.scan.estimate},
                          {"exact_relation_alpha", out.exact_relation_alpha},
                          {"tolerance", out.scan.tolerance},
                          {"iterations", out.scan.iterations},
                          {"steps", steps}});
            return 0;
        }

        if (ftc->parsed()) {
            merge_config(ftc, fa);
            const auto fam = make_model_params(fa.d, fa.q, fa.r, 1.0);
            const auto co = critical_orbital(fam);
            const double alpha = fa.alpha != 1.0 ? fa.alpha : co.alpha_c1;
            const auto pa = with_alpha(fam, alpha);
            std::vector<double> rs = f_r_list;
            if (rs.empty()) {
                const double unit = 1.0 / std::sqrt(co.orbital.mu);
                for (double x = 5.0; x <= 11.0; x += 1.0) rs.push_back(x * unit);
            }
            std::ostringstream csv;
            csv << "R,eps_R,margin,attraction,total_beta\n";
            json rows = json::array();
            for (double R : rs) {
                const auto tc = two_center_energy(pa, co.orbital, R);
                csv << R << "," << tc.overlap << "," << tc.margin_beta << ","
                    << tc.attraction << "," << tc.total_beta << "\n";
                rows.push_back(json{{"R", R},
                                    {"overlap", tc.overlap},
                                    {"kinetic", tc.kinetic},
                                    {"nonlinear", tc.nonlinear},
                                    {"total_beta", tc.total_beta},
                                    {"total", tc.total},
                                    {"margin_beta", tc.margin_beta},
                                    {"margin", tc.margin},
                                    {"attraction", tc.attraction}});
            }
            emit_table(fa, csv.str());
            emit(fa, json{{"schema", kSchema},
                          {"operation", "fermi-two-center"},
                          {"params", model_json(pa)},
                          {"alpha_c1", co.alpha_c1},
                          {"lambda_c", co.lambda_c},
                          {"orbital_mu", co.orbital.mu},
                          {"rows", rows}});
            return 0;
        }

        if (ver->parsed()) {
            merge_config(ver, va);
            return run_verify(v_suite, va);
        }

        if (fix->parsed()) {
            if (x_mode != "record" && x_mode != "compare")
                throw std::runtime_error("fixtures: mode must be record or compare");
            namespace fs = std::filesystem;
            const auto battery = fixture_battery();
            if (x_mode == "record") {
                fs::create_directories(x_dir);
                for (const auto& e : battery) {
                    json j{{"schema", kSchema},
                           {"key", e.key},
                           {"params", e.params},
                           {"value", e.value},
                           {"tolerance", e.tolerance}};
                    std::ofstream os(fs::path(x_dir) / (e.key + ".json"));
                    os << j.dump(2) << "\n";
                }
                emit(xa, json{{"schema", kSchema},
                              {"operation", "fixtures-record"},
                              {"count", battery.size()},
                              {"dir", x_dir}});
                return 0;
            }
            json drifted = json::array();
            for (const auto& e : battery) {
                const auto path = fs::path(x_dir) / (e.key + ".json");
                std::ifstream in(path);
                if (!in) {
                    drifted.push_back(json{{"key", e.key}, {"reason", "missing"}});
                    continue;
                }
                const json stored = json::parse(in);
                const double want = stored.at("value").get<double>();
                const double tol = stored.at("tolerance").get<double>();
                if (std::abs(want - e.value) >
                    tol * std::max(1.0, std::abs(want))) {
                    drifted.push_back(json{{"key", e.key},
                                           {"stored", want},
                                           {"computed", e.value},
                                           {"tolerance", tol}});
                }
            }
            emit(xa, json{{"schema", kSchema},
                          {"operation", "fixtures-compare"},
                          {"checked", battery.size()},
                          {"drifted", drifted}});
            return drifted.empty() ? 0 : 1;
        }
    } catch (const SolverError& e) {
        std::cout << json{{"schema", kSchema}, {"error", e.what()}}.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << json{{"schema", kSchema}, {"error", e.what()}}.dump(2) << "\n";
        return 1;
    }
    return 2;
}
