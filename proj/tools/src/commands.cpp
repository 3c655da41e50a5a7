/*
 Copyright 2026 The clmatch Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "clmatch/cartpend.hpp"
#include "clmatch/csv.hpp"
#include "clmatch/linalg.hpp"
#include "clmatch/matching.hpp"
#include "clmatch/rbf_inertia.hpp"
#include "clmatch/sim.hpp"
#include "clmatch/stability.hpp"

namespace clmatch::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const fs::path &p) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw ConfigError("cannot write '" + p.string() + "'");
    }
    return os;
}

fs::path prepare_dir(const ExperimentConfig &cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + dir.string() +
                          "': " + ec.message());
    }
    return dir;
}

std::string vec_str(const Vector &v) {
    std::ostringstream os;
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << csv::format_double(v(i));
    }
    os << ')';
    return os.str();
}

std::string state_str(const State &s) { return "q = " + vec_str(s.q) + ", qd = " + vec_str(s.qd); }

std::shared_ptr<const RBFInertiaModel> load_model(const ExperimentConfig &cfg) {
    auto m = std::make_shared<const RBFInertiaModel>(
        RBFInertiaModel::load_file(cfg.resolved_model_path()));
    if (m->dof() != 2) {
        throw ModelIoError("model '" + cfg.resolved_model_path() + "' is not a 2-DoF model");
    }
    return m;
}

SimConfig sim_config(const ExperimentConfig &cfg, const std::array<double, 4> &ic) {
    SimConfig sc;
    sc.t_end = cfg.simulation.t_end;
    sc.dt = cfg.simulation.dt;
    sc.stride = cfg.simulation.stride;
    sc.initial.q = Vector(2);
    sc.initial.q << ic[0], ic[1];
    sc.initial.qd = Vector(2);
    sc.initial.qd << ic[2], ic[3];
    return sc;
}

void write_json(const fs::path &p, const ojson &doc) {
    auto os = open_out(p);
    os << doc.dump(2) << '\n';
}

} // namespace

int cmd_synth(const ExperimentConfig &cfg, std::ostream &log) {
    const fs::path dir = prepare_dir(cfg);
    const auto &p = cfg.params;
    const auto sys = cartpend::build_system(p);
    const CenterSet cs = cartpend::center_family(p, cfg.centers);
    const auto vg = [p](const Vector &q) { return cartpend::vc_grad(p, q); };

    FitResult fr = [&] {
        try {
            return fit(cs, *sys, vg, cfg.fit);
        } catch (const FitError &e) {
            auto os = open_out(dir / "fit_error.txt");
            os << e.what() << '\n';
            for (const auto &q : e.violating_points()) {
                os << "violating q = " << vec_str(q) << '\n';
            }
            throw;
        }
    }();

    fr.model.save_file(cfg.resolved_model_path());
    {
        auto os = open_out(dir / "residual_map.csv");
        auto header = cfg.echo();
        header.emplace_back("fit.status", to_string(fr.status));
        write_matching_csv(os, fr.after, header);
    }
    ojson doc;
    doc["status"] = to_string(fr.status);
    doc["iterations"] = fr.iterations;
    doc["centers"] = fr.model.size();
    doc["initial_cost"] = fr.initial_cost;
    doc["final_cost"] = fr.final_cost;
    doc["max_residual_before"] = fr.before.max_norm;
    doc["max_residual_after"] = fr.after.max_norm;
    doc["rms_residual_after"] = fr.after.rms_norm;
    doc["min_grid_eigenvalue"] = fr.min_grid_eigenvalue;
    doc["widths"] = fr.model.widths();
    write_json(dir / "synth.json", doc);

    log << "synth: " << fr.model.size() << " centers, status " << to_string(fr.status)
        << " after " << fr.iterations << " iterations, max grid residual "
        << csv::format_double(fr.after.max_norm) << '\n';
    if (fr.warning()) {
        log << "synth: warning: iteration budget exhausted, best-so-far model saved\n";
    }
    return kOk;
}

int cmd_simulate(const ExperimentConfig &cfg, std::ostream &log) {
    const auto model = load_model(cfg);
    const fs::path dir = prepare_dir(cfg);
    const auto &p = cfg.params;
    const ControllerSpec spec = cartpend::controller_for_model(p, model);
    const auto header = cfg.echo();

    int code = kOk;
    for (std::size_t i = 0; i < cfg.simulation.initial_conditions.size(); ++i) {
        const auto &ic = cfg.simulation.initial_conditions[i];
        const StateTrajectory tr = run(*spec.system, &spec, sim_config(cfg, ic));
        auto h = header;
        h.emplace_back("run", std::to_string(i + 1));
        auto os = open_out(dir / ("trajectory_" + std::to_string(i + 1) + ".csv"));
        write_trajectory_csv(os, tr, h);
        const auto &last = tr.rows.back();
        log << "simulate: run " << i + 1 << " t = " << csv::format_double(last.t)
            << " q = " << vec_str(last.q) << " qd = " << vec_str(last.qd) << '\n';
        if (!tr.ok()) {
            log << "simulate: run " << i + 1 << " stopped: " << *tr.error << '\n';
            code = kCheckFailed;
        }
    }

    auto os = open_out(dir / "vc_surface.csv");
    csv::write_header_block(os, header);
    csv::write_row(os, std::vector<std::string>{"q1[rad]", "q2[m]", "vc[1]"});
    const auto &sf = cfg.surface;
    for (int j = 0; j < sf.q2_count; ++j) {
        const double q2 = sf.q2_lo + (sf.q2_hi - sf.q2_lo) * j / (sf.q2_count - 1);
        for (int k = 0; k < sf.q1_count; ++k) {
            const double q1 = -cartpend::kRegionHalfWidth +
                              2.0 * cartpend::kRegionHalfWidth * k / (sf.q1_count - 1);
            Vector q(2);
            q << q1, q2;
            csv::write_row(os, std::vector<double>{q1, q2, cartpend::vc(p, q)});
        }
    }
    return code;
}

std::vector<CheckResult> run_checks(const ExperimentConfig &cfg, std::ostream &log) {
    const auto model = load_model(cfg);
    const fs::path dir = prepare_dir(cfg);
    const auto &p = cfg.params;
    const auto &vs = cfg.verify;
    const ControllerSpec spec = cartpend::controller_for_model(p, model);
    const ELSystem &sys = *spec.system;
    const auto vg = [p](const Vector &q) { return cartpend::vc_grad(p, q); };
    std::vector<CheckResult> out;
    auto add = [&](std::string name, bool pass, double value, double tol, std::string where) {
        log << (pass ? "PASS " : "FAIL ") << name << " value " << csv::format_double(value)
            << " tolerance " << csv::format_double(tol) << (where.empty() ? "" : " at ")
            << where << '\n';
        out.push_back({std::move(name), pass, value, tol, std::move(where)});
    };

    const CenterSet cs = cartpend::center_family(p, static_cast<int>(model->size()));
    const Lemma1Result lem = lemma1_check(cs, sys, 1e-12);
    add("lemma1", lem.passed, lem.max_deviation, 1e-12,
        "centers " + std::to_string(lem.worst_i + 1) + ", " + std::to_string(lem.worst_j + 1));

    {
        const auto res = pe_residual_at_centers(cs, sys, vg);
        double worst = 0.0;
        std::size_t wi = 0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            if (res[i].norm() > worst) {
                worst = res[i].norm();
                wi = i;
            }
        }
        add("center_pe_residual", worst <= vs.tolerance, worst, vs.tolerance,
            "center " + std::to_string(wi + 1));
    }

    {
        double lam = std::numeric_limits<double>::infinity();
        double hmin = std::numeric_limits<double>::infinity();
        Vector wq, wh;
        for (const auto &q : cfg.fit.grid.points()) {
            const double l = linalg::min_eigenvalue(model->evaluate(q));
            if (l < lam) {
                lam = l;
                wq = q;
            }
            const double hl = linalg::min_eigenvalue(cartpend::vc_hessian(p, q));
            if (hl < hmin) {
                hmin = hl;
                wh = q;
            }
        }
        add("mc_hat_pd_grid", lam > 0.0, lam, 0.0, "q = " + vec_str(wq));
        add("vc_hessian_pd_grid", hmin > 0.0, hmin, 0.0, "q = " + vec_str(wh));
    }

    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double w = cartpend::kRegionHalfWidth;
        double j_skew = 0.0, r_sym = 0.0, r_min = std::numeric_limits<double>::infinity();
        double e19 = 0.0, e21 = 0.0;
        State s_skew, s_sym, s_min, s19, s21;
        for (int k = 0; k < vs.random_states; ++k) {
            State s{Vector(2), Vector(2)};
            s.q << -w + 2.0 * w * u01(rng), p.q2_star - 3.0 + 6.0 * u01(rng);
            s.qd << vs.max_speed * (2.0 * u01(rng) - 1.0), vs.max_speed * (2.0 * u01(rng) - 1.0);
            const ControlBreakdown b = control_breakdown(spec, s);
            const double js = (b.J + b.J.transpose()).cwiseAbs().maxCoeff();
            const double rs = (b.R - b.R.transpose()).cwiseAbs().maxCoeff();
            const double rm = linalg::min_eigenvalue(b.R);
            const double r19 =
                ke_residual(sys, s, b.terms.Mc, b.terms.Cc, b.J, b.R).lpNorm<Eigen::Infinity>();
            const double r21 = dissipation_residual(b.terms, b.R).lpNorm<Eigen::Infinity>();
            if (js >= j_skew) { j_skew = js; s_skew = s; }
            if (rs >= r_sym) { r_sym = rs; s_sym = s; }
            if (rm < r_min) { r_min = rm; s_min = s; }
            if (r19 >= e19) { e19 = r19; s19 = s; }
            if (r21 >= e21) { e21 = r21; s21 = s; }
        }
        add("J_skew_symmetric", j_skew <= 1e-12, j_skew, 1e-12, state_str(s_skew));
        add("R_symmetric", r_sym <= 1e-12, r_sym, 1e-12, state_str(s_sym));
        add("R_positive_semidefinite", r_min >= -vs.tolerance, r_min, -vs.tolerance,
            state_str(s_min));
        add("kinetic_matching_residual", e19 <= vs.tolerance, e19, vs.tolerance, state_str(s19));
        add("dissipation_residual", e21 <= vs.tolerance, e21, vs.tolerance, state_str(s21));
    }

    {
        Vector qs(2);
        qs << 0.0, p.q2_star;
        const double u0 = control(spec, State{qs, Vector::Zero(2)}).norm();
        add("equilibrium_input", u0 <= 1e-12, u0, 1e-12, "q = " + vec_str(qs));
    }

    const StateTrajectory tr =
        run(sys, &spec, sim_config(cfg, cfg.simulation.initial_conditions.front()));
    add("nominal_run_finite", tr.ok(), static_cast<double>(tr.rows.size()), 0.0,
        tr.error.value_or(""));
    const auto &last = tr.rows.back();
    const double conv = std::sqrt(last.q(0) * last.q(0) + last.qd.squaredNorm());
    add("nominal_convergence", conv < vs.conv_tolerance, conv, vs.conv_tolerance,
        "t = " + csv::format_double(last.t));
    const double dq2 = std::abs(last.q(1) - p.q2_star);
    add("nominal_cart_position", dq2 < vs.q2_tolerance, dq2, vs.q2_tolerance,
        "t = " + csv::format_double(last.t));
    add("hc_net_decrease", last.hc < tr.rows.front().hc, last.hc - tr.rows.front().hc, 0.0, "");

    double dec = 0.0, pmax = -std::numeric_limits<double>::infinity();
    double t_dec = 0.0, t_p = 0.0;
    for (const auto &r : tr.rows) {
        const double d = std::abs(r.hc_dot - (r.p_dot + r.eps));
        if (d > dec) { dec = d; t_dec = r.t; }
        if (r.p_dot > pmax) { pmax = r.p_dot; t_p = r.t; }
    }
    add("hc_dot_decomposition", dec <= 1e-14, dec, 1e-14, "t = " + csv::format_double(t_dec));
    add("p_dot_nonpositive", pmax <= 0.0, pmax, 0.0, "t = " + csv::format_double(t_p));

    ScanConfig sc;
    sc.pairs = ScanConfig::default_pairs();
    sc.rho = vs.rho;
    sc.q_star = Vector(2);
    sc.q_star << 0.0, p.q2_star;
    const LyapunovScan scan = lagrange_scan(tr, sc);
    {
        auto os = open_out(dir / "scan.csv");
        write_scan_csv(os, scan, cfg.echo());
    }
    std::size_t passing = 0;
    for (const auto &pr : scan.pairs) {
        passing += pr.pass ? 1 : 0;
    }
    add("lagrange_scan", scan.verdict, static_cast<double>(passing), 1.0, "");

    const PathIntegral pi = error_path_integral(tr);
    std::size_t kc = tr.rows.size();
    while (kc > 0) {
        const auto &r = tr.rows[kc - 1];
        const double d = std::sqrt((r.q - sc.q_star).squaredNorm() + r.qd.squaredNorm());
        if (d > vs.rho) {
            break;
        }
        --kc;
    }
    bool bounded = std::isfinite(pi.value) && std::isfinite(pi.max_abs) && kc < tr.rows.size();
    double growth = std::numeric_limits<double>::infinity();
    if (bounded) {
        double env_c = 0.0;
        for (std::size_t k = 0; k <= kc; ++k) {
            env_c = std::max(env_c, std::abs(pi.running[k]));
        }
        growth = pi.max_abs - env_c;
        bounded = growth <= 1e-6;
    }
    add("path_integral_bounded", bounded, growth, 1e-6,
        "t_c = " + (kc < tr.rows.size() ? csv::format_double(tr.rows[kc].t) : std::string("none")));
    return out;
}

int cmd_verify(const ExperimentConfig &cfg, std::ostream &log) {
    const auto checks = run_checks(cfg, log);
    ojson doc;
    doc["passed"] = true;
    doc["checks"] = ojson::array();
    std::size_t failed = 0;
    for (const auto &c : checks) {
        ojson j;
        j["name"] = c.name;
        j["passed"] = c.passed;
        j["value"] = c.value;
        j["tolerance"] = c.tolerance;
        j["location"] = c.location;
        doc["checks"].push_back(j);
        failed += c.passed ? 0 : 1;
    }
    doc["passed"] = failed == 0;
    doc["failed"] = failed;
    write_json(fs::path(cfg.output_dir) / "verify.json", doc);
    log << "verify: " << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? kOk : kCheckFailed;
}

int cmd_report(const ExperimentConfig &cfg, std::ostream &log) {
    const auto model = load_model(cfg);
    const fs::path dir = prepare_dir(cfg);
    const auto &p = cfg.params;
    const auto sys = cartpend::build_system(p);
    const auto rep = matching_report(
        *sys, [&model](const Vector &q) { return model->evaluate(q); },
        [p](const Vector &q) { return cartpend::vc_grad(p, q); }, cfg.fit.grid.points());

    std::ostringstream os;
    os << "# clmatch report\n\n";
    os << "model: " << cfg.resolved_model_path() << '\n';
    os << "centers: " << model->size() << '\n';
    os << "widths:";
    for (double w : model->widths()) {
        os << ' ' << csv::format_double(w);
    }
    os << "\n\npotential matching residual over " << rep.samples.size() << " grid points\n";
    os << "  max  " << csv::format_double(rep.max_norm) << '\n';
    os << "  mean " << csv::format_double(rep.mean_norm) << '\n';
    os << "  rms  " << csv::format_double(rep.rms_norm) << '\n';

    const fs::path vpath = dir / "verify.json";
    if (fs::exists(vpath)) {
        std::ifstream in(vpath);
        const auto doc = ojson::parse(in, nullptr, false);
        if (!doc.is_discarded() && doc.contains("checks")) {
            os << "\nchecks (" << vpath.string() << ")\n";
            for (const auto &c : doc["checks"]) {
                os << "  " << (c.value("passed", false) ? "PASS " : "FAIL ")
                   << c.value("name", std::string("?")) << '\n';
            }
        }
    } else {
        os << "\nno verify.json in " << dir.string() << "; run `clmatch verify` first\n";
    }
    for (std::size_t i = 0; i < cfg.simulation.initial_conditions.size(); ++i) {
        const fs::path t = dir / ("trajectory_" + std::to_string(i + 1) + ".csv");
        os << (fs::exists(t) ? "trajectory: " : "missing trajectory: ") << t.string() << '\n';
    }
    auto f = open_out(dir / "report.txt");
    f << os.str();
    log << os.str();
    return kOk;
}

int dispatch(const std::string &command, const Overrides &ov, std::ostream &log,
             std::ostream &err) {
    ExperimentConfig cfg;
    try {
        cfg = ov.config_path ? load_config(*ov.config_path) : default_config();
        if (ov.out) {
            cfg.output_dir = *ov.out;
        }
        if (ov.seed) {
            cfg.seed = *ov.seed;
        }
        if (ov.stride) {
            cfg.simulation.stride = *ov.stride;
        }
        cfg.validate();
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    }

    try {
        if (command == "synth") {
            return cmd_synth(cfg, log);
        }
        if (command == "simulate") {
            return cmd_simulate(cfg, log);
        }
        if (command == "verify") {
            return cmd_verify(cfg, log);
        }
        if (command == "report") {
            return cmd_report(cfg, log);
        }
        err << "error: unknown command '" << command << "'\n";
        return kInvalidConfig;
    } catch (const ModelIoError &e) {
        err << "error: " << e.what() << '\n';
        return kModelLoad;
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const FitError &e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
}

} // namespace clmatch::cli
