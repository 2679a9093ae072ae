#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mterm/builders.hpp"
#include "mterm/deviations.hpp"
#include "mterm/dictionary.hpp"
#include "mterm/hardy.hpp"
#include "mterm/kernels.hpp"
#include "mterm/realize.hpp"
#include "mterm/report.hpp"
#include "mterm/rng.hpp"
#include "mterm/slimness.hpp"
#include "mterm/stepdict.hpp"

namespace {

using nlohmann::json;
using namespace mterm;

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        std::string tok = s.substr(pos, next - pos);
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse number: '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size())
            throw std::invalid_argument("cannot parse number: '" + tok + "'");
        out.push_back(v);
        pos = next + 1;
        if (next == s.size()) break;
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

std::vector<double> parse_vector_arg(const std::string& s) {
    if (std::filesystem::exists(s)) {
        json j = json::parse(read_text_file(s));
        if (!j.is_array()) throw std::invalid_argument("vector file must hold a JSON array: " + s);
        return j.get<std::vector<double>>();
    }
    return parse_numbers(s);
}

Dictionary parse_dict_spec(const std::string& spec) {
    std::size_t colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string head = spec.substr(0, colon);
        std::string rest = spec.substr(colon + 1);
        if (head == "std") {
            auto v = parse_numbers(rest);
            if (v.size() != 1 || v[0] < 1 || v[0] != static_cast<std::size_t>(v[0]))
                throw std::invalid_argument("std:N needs a positive integer N");
            return standard_basis(static_cast<std::size_t>(v[0]));
        }
        if (head == "exact" || head == "remark4")
            return exact_deviation_dict(parse_numbers(rest)).dict;
        if (head == "tri") {
            auto v = parse_numbers(rest);
            if (v.size() != 4)
                throw std::invalid_argument("tri:N,eps,M,seed needs four values");
            return triangular_basis(static_cast<std::size_t>(v[0]), v[1], v[2],
                                    static_cast<std::uint64_t>(v[3]));
        }
        throw std::invalid_argument("unknown dictionary builder: " + head);
    }
    return load_dictionary(spec);
}

void emit_outputs(const json& report, const std::string& json_out,
                  const std::string& csv, const std::string& csv_out) {
    if (!json_out.empty()) write_text_file(json_out, report.dump(2) + "\n");
    if (!csv_out.empty()) write_text_file(csv_out, csv);
    if (json_out.empty() && csv_out.empty())
        std::fputs((report.dump(2) + "\n").c_str(), stdout);
}

std::string join_indices(const std::vector<std::size_t>& idx) {
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(idx[i]);
    }
    return s;
}

struct CommonFlags {
    std::uint64_t seed = 1;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string kernel = "auto";
    std::string json_out, csv_out;
};

void add_common(CLI::App* cmd, CommonFlags& cf, bool with_csv = true) {
    cmd->add_option("--seed", cf.seed, "RNG seed");
    cmd->add_option("--threads", cf.threads, "worker thread cap");
    cmd->add_option("--kernel", cf.kernel, "compute kernel: auto|scalar|avx2|neon");
    cmd->add_option("--json-out", cf.json_out, "write JSON report here");
    if (with_csv) cmd->add_option("--csv-out", cf.csv_out, "write CSV table here");
}

void apply_kernel(const CommonFlags& cf) {
    if (!kernels::select(cf.kernel))
        throw std::invalid_argument("unknown kernel: " + cf.kernel);
}

int run_deviations(const std::string& x_arg, const std::string& dict_arg,
                   std::int64_t max_m, std::uint64_t budget, const CommonFlags& cf) {
    apply_kernel(cf);
    Vec x(parse_vector_arg(x_arg));
    Dictionary dict = parse_dict_spec(dict_arg);
    if (x.dim() != dict.ambient_dim)
        throw std::invalid_argument("vector and dictionary dimensions differ");
    std::size_t top = dict.ambient_dim;
    if (max_m >= 0) top = std::min<std::size_t>(top, static_cast<std::size_t>(max_m));

    json results = json::array();
    std::string csv = "m,sigma,subset\n";
    for (std::size_t m = 0; m <= top; ++m) {
        SigmaResult r = sigma_brute(x, dict, m, budget, cf.threads);
        results.push_back({{"m", m}, {"sigma", r.value}, {"subset", r.best_subset}});
        csv += std::to_string(m) + "," + fmt_double(r.value) + ",\"" +
               join_indices(r.best_subset) + "\"\n";
    }
    json report = report_skeleton("deviations", cf.seed,
                                  {{"x", x.coords()},
                                   {"dict", dict_arg},
                                   {"max_m", top},
                                   {"budget", budget},
                                   {"threads", cf.threads}});
    report["results"] = results;
    emit_outputs(report, cf.json_out, csv, cf.csv_out);
    return 0;
}

int run_construct(const std::string& builder, const std::string& out_path,
                  std::size_t n, const std::string& target, double epsilon,
                  double ball, const CommonFlags& cf) {
    Dictionary d;
    if (builder == "std") {
        if (n == 0) throw std::invalid_argument("construct std needs --n");
        d = standard_basis(n);
    } else if (builder == "exact" || builder == "remark4") {
        if (target.empty()) throw std::invalid_argument("construct exact needs --target");
        d = exact_deviation_dict(parse_numbers(target)).dict;
    } else if (builder == "tri") {
        if (n == 0) throw std::invalid_argument("construct tri needs --n");
        d = triangular_basis(n, epsilon, ball, cf.seed);
    } else {
        throw std::invalid_argument("unknown builder: " + builder);
    }
    save_dictionary(d, out_path);
    json report = report_skeleton("construct", cf.seed,
                                  {{"builder", builder},
                                   {"n", n},
                                   {"target", target},
                                   {"epsilon", epsilon},
                                   {"ball", ball},
                                   {"out", out_path}});
    report["atoms"] = d.size();
    report["ambient_dim"] = d.ambient_dim;
    emit_outputs(report, cf.json_out, "", "");
    return 0;
}

int run_rho(const std::string& dict_arg, unsigned restarts, const CommonFlags& cf) {
    apply_kernel(cf);
    Dictionary dict = parse_dict_spec(dict_arg);
    RhoEstimate est = rho_estimate(dict, restarts, cf.seed);
    json report = report_skeleton(
        "rho", cf.seed, {{"dict", dict_arg}, {"restarts", restarts}});
    report["rho_upper"] = est.value;
    report["converged"] = est.converged;
    report["witness"] = est.witness.coords();
    try {
        report["certified_lower"] = certified_rho_lower(dict);
    } catch (const std::exception&) {
        report["certified_lower"] = nullptr;
    }
    emit_outputs(report, cf.json_out, "", "");
    return 0;
}

int run_thinboard(const std::string& next_arg, const std::string& cur_arg,
                  const CommonFlags& cf) {
    apply_kernel(cf);
    Dictionary next = parse_dict_spec(next_arg);
    Dictionary cur = parse_dict_spec(cur_arg);
    ThinBoardResult r = thin_board_estimate(next, cur);
    json report = report_skeleton("thinboard", cf.seed,
                                  {{"next", next_arg}, {"current", cur_arg}});
    report["value"] = r.value;
    report["witness_index"] = r.witness_index;
    report["witness_label"] = next.labels.at(r.witness_index);
    emit_outputs(report, cf.json_out, "", "");
    return 0;
}

int run_realize(const std::string& target_arg, const std::string& route,
                double epsilon, double ball, double tol, double lambda,
                std::size_t max_iters, const std::string& trace_out,
                const CommonFlags& cf) {
    apply_kernel(cf);
    if (route != "fixedpoint")
        throw std::invalid_argument("unknown route: " + route);
    std::vector<double> d = parse_vector_arg(target_arg);
    if (d.size() > 1) {
        double min_gap = d[0];
        for (std::size_t i = 1; i < d.size(); ++i)
            min_gap = std::min(min_gap, d[i - 1] - d[i]);
        if (epsilon <= 0.0) epsilon = 0.9 * min_gap;
    } else if (epsilon <= 0.0) {
        epsilon = 0.5;
    }
    if (ball <= 0.0 && !d.empty()) ball = 2.0 * d[0];

    json params = {{"target", d},       {"route", route},
                   {"epsilon", epsilon}, {"ball", ball},
                   {"tol", tol},        {"lambda", lambda},
                   {"max_iters", max_iters}};
    try {
        RealizeResult r = realize_fixed_point(d, epsilon, ball, cf.seed, tol,
                                              lambda, max_iters, cf.threads);
        json report = report_skeleton("realize", cf.seed, params);
        report["converged"] = true;
        report["iterations"] = r.iterations;
        report["t"] = r.t;
        report["sigma"] = r.sigma;
        report["residuals"] = r.residuals_per_n;
        report["residual"] = r.residual;
        report["clamp_activations"] = r.trace.clamp_activations;
        report["dict_atoms"] = r.dict.size();
        std::string csv = "n,target,t,sigma,residual\n";
        for (std::size_t n = 0; n < r.sigma.size(); ++n) {
            csv += std::to_string(n) + "," + fmt_double(d[n]) + ",";
            csv += (n == 0 ? std::string() : fmt_double(r.t[n - 1]));
            csv += "," + fmt_double(r.sigma[n]) + "," +
                   fmt_double(r.residuals_per_n[n]) + "\n";
        }
        emit_outputs(report, cf.json_out, csv, cf.csv_out);
        return 0;
    } catch (const ConvergenceError& e) {
        json report = report_skeleton("realize", cf.seed, params);
        report["converged"] = false;
        report["error"] = e.what();
        report["residual_trace"] = e.trace.residuals;
        report["iterate_trace"] = e.trace.iterates;
        std::string path = !trace_out.empty() ? trace_out : cf.json_out;
        if (!path.empty()) {
            write_text_file(path, report.dump(2) + "\n");
            std::fprintf(stderr, "did not converge; trace written to %s\n",
                         path.c_str());
        } else {
            std::fprintf(stderr, "did not converge: %s\n", e.what());
        }
        return 3;
    }
}

int run_hardy_verify(std::size_t samples, double adversarial_fraction,
                     bool demo, const CommonFlags& cf) {
    if (!(adversarial_fraction >= 0.0 && adversarial_fraction <= 1.0))
        throw std::invalid_argument("--adversarial-fraction must be in [0,1]");
    Rng rng(cf.seed);
    std::size_t adversarial = static_cast<std::size_t>(
        static_cast<double>(samples) * adversarial_fraction);

    std::map<std::string, std::size_t> branch_counts;
    double min_value = std::numeric_limits<double>::infinity();
    json worst;
    std::size_t failures = 0;
    PairGeometry worst_geom;
    bool have_worst = false;

    for (std::size_t i = 0; i < samples; ++i) {
        double a, b, g, t;
        if (i < adversarial) {
            // Near-coincident pair: |r| stays below 1e-3.
            a = std::exp(rng.uniform() * 4.0 - 2.0);
            double h = std::exp(rng.uniform() * std::log(2e-4 / 1e-12) + std::log(1e-12));
            double gg = std::exp(rng.uniform() * std::log(2e-4 / 1e-12) + std::log(1e-12));
            b = a * (1.0 - h);
            g = a * gg;
            double phi = std::atan2(g, a + b);
            double psi = (rng.uniform() * 2.0 - 1.0) *
                         std::exp(rng.uniform() * std::log(2e-4 / 1e-12) + std::log(1e-12));
            t = phi + psi;
        } else {
            double ratio = std::exp(rng.uniform() * std::log(1e3));
            b = std::exp(rng.uniform() * 4.0 - 2.0);
            a = b * ratio;
            g = (rng.uniform() < 0.125)
                    ? 0.0
                    : a * std::exp(rng.uniform() * std::log(1e3 / 1e-6) + std::log(1e-6));
            t = (rng.uniform() * 2.0 - 1.0) * 3.141592653589793;
        }
        PairGeometry geom = pair_geometry(a, b, g, t);
        if (!(geom.r_norm > 0.0)) continue;  // exactly coincident sample
        CertResult c = pair_corr_certify(geom);
        ++branch_counts[branch_name(c.branch)];
        if (!c.passes) ++failures;
        if (c.value < min_value) {
            min_value = c.value;
            worst = {{"alpha", a},     {"beta", b},
                     {"gamma", g},     {"theta", t},
                     {"branch", branch_name(c.branch)},
                     {"value", c.value}};
            worst_geom = geom;
            have_worst = true;
        }
    }

    json report = report_skeleton("hardy-verify", cf.seed,
                                  {{"samples", samples},
                                   {"adversarial_fraction", adversarial_fraction}});
    report["branch_counts"] = branch_counts;
    report["min_value"] = min_value;
    report["failures"] = failures;
    report["all_passed"] = failures == 0;
    report["worst"] = worst;
    if (demo && have_worst) {
        report["demo"] = {{"grid_sup", grid_sup_estimate(worst_geom, 120)},
                          {"note", "plain lattice scan, not certified"}};
    }
    emit_outputs(report, cf.json_out, "", "");
    std::fprintf(stdout, "hardy-verify: %zu samples, min value %.6g, %s\n",
                 samples, min_value, failures == 0 ? "all passed" : "FAILURES");
    return 0;
}

int run_step_verify(std::size_t samples, std::size_t m_min, std::size_t m_max,
                    const std::string& spikes_arg, const CommonFlags& cf) {
    if (m_min < 1 || m_max < m_min)
        throw std::invalid_argument("need 1 <= m-min <= m-max");
    Rng rng(cf.seed);
    json per_m = json::array();
    std::size_t total_violations = 0;
    for (std::size_t m = m_min; m <= m_max; ++m) {
        std::size_t violations = 0;
        double min_value = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples; ++i) {
            StepElement h;
            for (;;) {
                std::vector<double> cuts(m);
                for (double& c : cuts) c = rng.uniform();
                std::sort(cuts.begin(), cuts.end());
                h.breakpoints.assign(1, 0.0);
                for (double c : cuts)
                    if (c > h.breakpoints.back() && c < 1.0) h.breakpoints.push_back(c);
                h.breakpoints.push_back(1.0);
                if (h.breakpoints.size() != m + 2) continue;
                h.values.assign(m + 1, 0.0);
                for (double& v : h.values) v = rng.normal();
                double nn = h.norm();
                if (nn > 1e-6) {
                    for (double& v : h.values) v /= nn;
                    break;
                }
            }
            PigeonholeCertificate cert = pigeonhole_certificate(h);
            if (!cert.bound_holds) ++violations;
            min_value = std::min(min_value, cert.value);
        }
        total_violations += violations;
        per_m.push_back({{"m", m},
                         {"samples", samples},
                         {"violations", violations},
                         {"min_value", min_value},
                         {"bound", 1.0 / std::sqrt(static_cast<double>(m + 1))}});
    }

    json spikes = json::array();
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double nv : parse_numbers(spikes_arg)) {
        std::size_t n = static_cast<std::size_t>(nv);
        SupCorrResult sc = sup_corr_step(step_spike(n));
        bool ok = sc.value <= 2.0 / std::sqrt(static_cast<double>(n)) + 1e-12;
        if (sc.value >= prev) monotone = false;
        prev = sc.value;
        spikes.push_back({{"n", n},
                          {"value", sc.value},
                          {"s_star", sc.s_star},
                          {"bound", 2.0 / std::sqrt(static_cast<double>(n))},
                          {"within_bound", ok}});
    }

    json report = report_skeleton("step-verify", cf.seed,
                                  {{"samples", samples},
                                   {"m_min", m_min},
                                   {"m_max", m_max},
                                   {"spikes", spikes_arg}});
    report["pigeonhole"] = {{"per_m", per_m}, {"total_violations", total_violations}};
    report["spikes"] = spikes;
    report["spikes_decreasing"] = monotone;
    emit_outputs(report, cf.json_out, "", "");
    std::fprintf(stdout, "step-verify: %zu pigeonhole violations, spikes %s\n",
                 total_violations, monotone ? "decreasing" : "NOT DECREASING");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for m-term deviations"};
    app.require_subcommand(1);
    int rc = 0;

    auto* dev = app.add_subcommand("deviations", "exhaustive m-term deviations of a vector");
    static CommonFlags dev_cf;
    static std::string dev_x, dev_dict;
    static std::int64_t dev_max_m = -1;
    static std::uint64_t dev_budget = kDefaultSubsetBudget;
    dev->add_option("--x", dev_x, "vector: inline comma list or JSON file")->required();
    dev->add_option("--dict", dev_dict, "dictionary: builder spec or JSON file")->required();
    dev->add_option("--max-m", dev_max_m, "largest m (default: ambient dim)");
    dev->add_option("--budget", dev_budget, "subset enumeration budget");
    add_common(dev, dev_cf);
    dev->callback([&] { rc = run_deviations(dev_x, dev_dict, dev_max_m, dev_budget, dev_cf); });

    auto* con = app.add_subcommand("construct", "build a dictionary and save it as JSON");
    static CommonFlags con_cf;
    static std::string con_builder, con_out, con_target;
    static std::size_t con_n = 0;
    static double con_eps = 0.05, con_ball = 2.0;
    con->add_option("--builder", con_builder, "std | exact (alias remark4) | tri")->required();
    con->add_option("--out", con_out, "output dictionary path")->required();
    con->add_option("--n", con_n, "ambient dimension");
    con->add_option("--target", con_target, "deviation targets d0,d1,...");
    con->add_option("--epsilon", con_eps, "tri builder board width");
    con->add_option("--ball", con_ball, "tri builder radius bound");
    add_common(con, con_cf, false);
    con->callback([&] {
        rc = run_construct(con_builder, con_out, con_n, con_target, con_eps, con_ball, con_cf);
    });

    auto* rho = app.add_subcommand("rho", "slimness estimate of a dictionary");
    static CommonFlags rho_cf;
    static std::string rho_dict;
    static unsigned rho_restarts = 20;
    rho->add_option("--dict", rho_dict, "dictionary: builder spec or JSON file")->required();
    rho->add_option("--restarts", rho_restarts, "multistart count");
    add_common(rho, rho_cf, false);
    rho->callback([&] { rc = run_rho(rho_dict, rho_restarts, rho_cf); });

    auto* thin = app.add_subcommand("thinboard", "min over next atoms of max correlation with current atoms");
    static CommonFlags thin_cf;
    static std::string thin_next, thin_cur;
    thin->add_option("--next", thin_next, "dictionary holding the candidate atoms")->required();
    thin->add_option("--current", thin_cur, "dictionary correlated against")->required();
    add_common(thin, thin_cf, false);
    thin->callback([&] { rc = run_thinboard(thin_next, thin_cur, thin_cf); });

    auto* rea = app.add_subcommand("realize", "find a vector with prescribed deviations");
    static CommonFlags rea_cf;
    static std::string rea_target, rea_route = "fixedpoint", rea_trace;
    static double rea_eps = 0.0, rea_ball = 0.0, rea_tol = 1e-6, rea_lambda = 0.5;
    static std::size_t rea_iters = 500;
    rea->add_option("--target", rea_target, "deviation targets d0,d1,...")->required();
    rea->add_option("--route", rea_route, "solution route (fixedpoint)");
    rea->add_option("--epsilon", rea_eps, "perturbation cap (default 0.9 * min gap)");
    rea->add_option("--ball", rea_ball, "dictionary radius bound (default 2 d0)");
    rea->add_option("--tol", rea_tol, "residual tolerance");
    rea->add_option("--lambda", rea_lambda, "damping weight");
    rea->add_option("--max-iters", rea_iters, "iteration cap");
    rea->add_option("--trace-out", rea_trace, "write the trace here on non-convergence");
    add_common(rea, rea_cf);
    rea->callback([&] {
        rc = run_realize(rea_target, rea_route, rea_eps, rea_ball, rea_tol,
                         rea_lambda, rea_iters, rea_trace, rea_cf);
    });

    auto* hv = app.add_subcommand("hardy-verify", "certify the pairwise correlation bound on sampled pole geometries");
    static CommonFlags hv_cf;
    static std::size_t hv_samples = 1000;
    static double hv_frac = 0.1;
    static bool hv_demo = false;
    hv->add_option("--samples", hv_samples, "number of sampled geometries");
    hv->add_option("--adversarial-fraction", hv_frac, "share of near-coincident pairs");
    hv->add_flag("--demo", hv_demo, "append an uncertified lattice scan of the worst geometry");
    add_common(hv, hv_cf, false);
    hv->callback([&] { rc = run_hardy_verify(hv_samples, hv_frac, hv_demo, hv_cf); });

    auto* sv = app.add_subcommand("step-verify", "step-function certificates and the spike sweep");
    static CommonFlags sv_cf;
    static std::size_t sv_samples = 1000, sv_m_min = 2, sv_m_max = 6;
    static std::string sv_spikes = "4,9,16,25,36,100";
    sv->add_option("--samples", sv_samples, "random unit elements per m");
    sv->add_option("--m-min", sv_m_min, "smallest m");
    sv->add_option("--m-max", sv_m_max, "largest m");
    sv->add_option("--spikes", sv_spikes, "spike family indices");
    add_common(sv, sv_cf, false);
    sv->callback([&] { rc = run_step_verify(sv_samples, sv_m_min, sv_m_max, sv_spikes, sv_cf); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const BudgetError& e) {
        std::fprintf(stderr, "budget exceeded: %s\n", e.what());
        return 2;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
