// Acceptance gate for the m-term deviation laboratory.  Each criterion
// prints exactly one [PASS]/[FAIL] line; the process exits nonzero if any
// criterion fails.  All tolerances are pinned here, in code.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mterm/builders.hpp"
#include "mterm/combos.hpp"
#include "mterm/deviations.hpp"
#include "mterm/hardy.hpp"
#include "mterm/numcore.hpp"
#include "mterm/realize.hpp"
#include "mterm/rng.hpp"
#include "mterm/slimness.hpp"
#include "mterm/stepdict.hpp"

using namespace mterm;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Gate {
    bool all_ok = true;
    void report(int idx, const std::string& name, bool ok, const std::string& detail) {
        std::printf("[%s] criterion %d: %-34s %s\n", ok ? "PASS" : "FAIL", idx,
                    name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) all_ok = false;
    }
};

double now_seconds() {
    using clk = std::chrono::steady_clock;
    static const clk::time_point t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::vector<double> random_decreasing(std::size_t len, Rng& rng) {
    std::vector<double> d(len);
    double v = 0.5 + 1.5 * rng.uniform();
    for (std::size_t i = 0; i < len; ++i) {
        d[i] = v;
        v *= 0.3 + 0.5 * rng.uniform();
    }
    return d;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---- criterion 1: the exact-realization dictionary is exact ----
void criterion1(Gate& gate, std::vector<Vec>* replay_x,
                std::vector<Dictionary>* replay_d,
                std::vector<std::vector<SigmaResult>>* replay_r) {
    double t0 = now_seconds();
    Rng rng(1001);
    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t len = 1 + trial % 9;  // d_0 .. d_N with N <= 8
        auto d = random_decreasing(len, rng);
        ExactRealization er = exact_deviation_dict(d);
        std::vector<SigmaResult> rs;
        for (std::size_t m = 0; m <= len; ++m) {
            SigmaResult r = sigma_brute(er.target, er.dict, m);
            double want = m < len ? d[m] : 0.0;
            max_err = std::max(max_err, std::abs(r.value - want));
            rs.push_back(std::move(r));
        }
        if (trial % 10 == 0) {
            replay_x->push_back(er.target);
            replay_d->push_back(er.dict);
            replay_r->push_back(std::move(rs));
        }
    }
    double dt = now_seconds() - t0;
    bool ok = max_err < 1e-9 && dt < 10.0;
    gate.report(1, "exact realization dictionary", ok,
                "max |sigma_m - d_m| = " + fmt(max_err) + " over 100 targets (N <= 8), " +
                    fmt(dt) + " s");
}

// ---- criterion 2: closed forms beat or match enumeration ----
void criterion2(Gate& gate) {
    Rng rng(2002);
    double max_diff = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + trial % 8;
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
        Dictionary d = standard_basis(n);
        auto closed = sigma_onbasis_closed(x);
        for (std::size_t m = 0; m <= n; ++m)
            max_diff = std::max(max_diff,
                                std::abs(closed[m] - sigma_brute(x, d, m).value));
    }
    std::size_t violations = 0;
    for (int mat = 0; mat < 20; ++mat) {
        ColMatrix f(4, 4);
        for (double& a : f.a) a = rng.normal();
        auto closed = sigma_rankone_closed(f);
        for (std::size_t m = 1; m <= 3; ++m) {
            for (int cand = 0; cand < 10000; ++cand) {
                double gg = 0.0, gf = 0.0, ff = 0.0;
                std::vector<double> u(4 * m), v(4 * m);
                for (double& e : u) e = rng.normal();
                for (double& e : v) e = rng.normal();
                for (std::size_t i = 0; i < 4; ++i)
                    for (std::size_t j = 0; j < 4; ++j) {
                        double gij = 0.0;
                        for (std::size_t t = 0; t < m; ++t)
                            gij += u[t * 4 + i] * v[t * 4 + j];
                        double fij = f.at(i, j);
                        gg += gij * gij;
                        gf += gij * fij;
                        ff += fij * fij;
                    }
                double dist = std::sqrt(std::max(0.0, ff - (gg > 0.0 ? gf * gf / gg : 0.0)));
                if (dist < closed[m] - 1e-10) ++violations;
            }
        }
    }
    bool ok = max_diff <= 1e-10 && violations == 0;
    gate.report(2, "closed-form deviations", ok,
                "basis diff " + fmt(max_diff) + ", rank-one violations " +
                    std::to_string(violations) + "/600000");
}

// ---- criterion 3: fixed-point realization converges and certifies ----
void criterion3(Gate& gate) {
    double t0 = now_seconds();
    Rng rng(3003);
    std::size_t failures = 0;
    double worst_resid = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t len = 1 + trial % 5;  // N <= 4, ambient dim <= 5
        auto d = random_decreasing(len, rng);
        double min_gap = d[0];
        for (std::size_t i = 1; i < len; ++i) min_gap = std::min(min_gap, d[i - 1] - d[i]);
        double eps = len > 1 ? 0.9 * min_gap : 0.5 * d[0];
        try {
            RealizeResult r = realize_fixed_point(d, eps, 2.0 * d[0], 3100 + trial);
            // Independent re-verification pass.
            double resid = std::abs(r.x.norm() - d[0]);
            for (std::size_t m = 1; m < len; ++m)
                resid = std::max(resid,
                                 std::abs(sigma_brute(r.x, r.dict, m).value - d[m]));
            worst_resid = std::max(worst_resid, resid);
            if (!(resid < 1e-6)) ++failures;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    double dt = now_seconds() - t0;
    bool ok = failures == 0 && dt < 60.0;
    gate.report(3, "fixed-point realization", ok,
                std::to_string(50 - failures) + "/50 targets realized, worst residual " +
                    fmt(worst_resid) + ", " + fmt(dt) + " s");
}

// ---- criterion 4: pairwise correlation certificates at scale ----
void criterion4(Gate& gate) {
    double t0 = now_seconds();
    // The three fixed lower constants must equal the chain arithmetic of
    // their extremal configurations.
    bool constants_ok =
        std::abs(kPi / 600.0 - 2.0 * kPi * 3.0 / (16.0 * 25.0 * 9.0)) <= 1e-12 &&
        std::abs(kPi / 162.0 - kPi * (1.0 / 3.0) * (1.0 / 3.0) / 18.0) <= 1e-12 &&
        std::abs(16.0 * kPi / 164025.0 - 16.0 * kPi * (1.0 / 9.0) / (81.0 * 25.0 * 9.0)) <=
            1e-12;

    Rng rng(4004);
    std::size_t total = 0, adversarial_small = 0, failures = 0;
    double min_value = 1e300;
    for (int trial = 0; trial < 100000; ++trial) {
        double a, b, g, t;
        if (trial < 10000) {
            a = std::exp(rng.uniform(-2.0, 2.0));
            double h = std::exp(rng.uniform(std::log(1e-12), std::log(2e-4)));
            double gg = std::exp(rng.uniform(std::log(1e-12), std::log(2e-4)));
            b = a * (1.0 - h);
            g = a * gg;
            double phi = std::atan2(g, a + b);
            t = phi + rng.uniform(-1.0, 1.0) *
                          std::exp(rng.uniform(std::log(1e-12), std::log(2e-4)));
        } else {
            b = std::exp(rng.uniform(-2.0, 2.0));
            a = b * std::exp(rng.uniform(0.0, std::log(1e3)));
            g = (rng.uniform() < 0.125) ? 0.0
                                        : a * std::exp(rng.uniform(std::log(1e-6), std::log(1e3)));
            t = rng.uniform(-kPi, kPi);
        }
        PairGeometry geom = pair_geometry(a, b, g, t);
        if (!(geom.r_norm > 0.0)) continue;
        ++total;
        if (trial < 10000 && geom.r_norm < 1e-3) ++adversarial_small;
        CertResult c = pair_corr_certify(geom);
        if (!c.passes) ++failures;
        min_value = std::min(min_value, c.value);
    }
    double dt = now_seconds() - t0;
    bool ok = constants_ok && failures == 0 && min_value > 1e-2 &&
              adversarial_small >= 10000 * 99 / 100 && dt < 30.0;
    gate.report(4, "correlation certificates", ok,
                std::to_string(total) + " geometries (" +
                    std::to_string(adversarial_small) + " with |r| < 1e-3), min value " +
                    fmt(min_value) + ", failures " + std::to_string(failures) + ", " +
                    fmt(dt) + " s" + (constants_ok ? "" : ", CONSTANTS DRIFTED"));
}

// ---- criterion 5: exponential decay bound with certified slimness ----
void criterion5(Gate& gate) {
    Rng rng(5005);
    double min_margin = 1e300;
    std::size_t x_count = 0;
    for (std::size_t n = 2; n <= 6; ++n) {
        Dictionary d = standard_basis(n);
        double rho = 1.0 / std::sqrt(static_cast<double>(n));
        for (int trial = 0; trial < 150; ++trial) {
            Vec x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
            min_margin = std::min(min_margin, exp_rate_check(x, d, 1, rho).min_margin);
            ++x_count;
        }
    }
    // Mild shrink targets keep the bases well conditioned, so the certified
    // lower bounds stay macroscopic rather than float-noise positives.
    struct TriCase { std::size_t n; double eps, ball; std::uint64_t seed; int trials; };
    const TriCase tris[] = {
        {4, 0.90, 1.0, 5100, 85}, {3, 0.90, 1.0, 5100, 85}, {4, 0.95, 1.0, 5100, 80}};
    double min_certified = 1e300;
    bool audits_ok = true;
    std::string cert_detail;
    for (const TriCase& tc : tris) {
        Dictionary tri = triangular_basis(tc.n, tc.eps, tc.ball, tc.seed);
        double certified = certified_rho_lower(tri);
        min_certified = std::min(min_certified, certified);
        HullBallAudit audit = hull_ball_audit(tri, Vec(tc.n + 1), certified, 300, 5200);
        audits_ok = audits_ok && audit.contained && audit.consistent &&
                    audit.max_coeff_l1 <= 1.0 + 1e-9;
        for (int trial = 0; trial < tc.trials; ++trial) {
            Vec x(tc.n + 1);
            for (std::size_t i = 0; i <= tc.n; ++i) x[i] = rng.normal();
            min_margin = std::min(min_margin, exp_rate_check(x, tri, 1, certified).min_margin);
            ++x_count;
        }
        if (!cert_detail.empty()) cert_detail += "/";
        cert_detail += fmt(certified);
    }
    bool ok = min_margin >= -1e-10 && audits_ok && min_certified > 1e-6;
    gate.report(5, "exponential decay bound", ok,
                std::to_string(x_count) + " targets, min margin " + fmt(min_margin) +
                    ", certified rho " + cert_detail + ", hull audits " +
                    (audits_ok ? "clean" : "BROKEN"));
}

// ---- criterion 6: step-function certificates ----
void criterion6(Gate& gate) {
    Rng rng(6006);
    std::size_t violations = 0, total = 0;
    for (std::size_t m = 2; m <= 6; ++m) {
        for (int trial = 0; trial < 1000; ++trial) {
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
            ++total;
            if (!cert.bound_holds) ++violations;
        }
    }
    bool spikes_ok = true;
    double prev = 1e300;
    for (std::size_t n : {4u, 9u, 16u, 25u, 36u, 100u}) {
        SupCorrResult sc = sup_corr_step(step_spike(n));
        if (sc.value > 2.0 / std::sqrt(static_cast<double>(n)) + 1e-12) spikes_ok = false;
        if (sc.value >= prev) spikes_ok = false;
        prev = sc.value;
    }
    bool ok = violations == 0 && spikes_ok;
    gate.report(6, "step-function certificates", ok,
                std::to_string(violations) + "/" + std::to_string(total) +
                    " pigeonhole violations, spike sweep " +
                    (spikes_ok ? "within 2/sqrt(n) and decreasing" : "BROKEN"));
}

// ---- criterion 7: hiding constructions and the slow element ----
void criterion7(Gate& gate) {
    // Triangular gap audit, exhaustive: every subset of every size k <= n
    // must sit within gap eps/ball of the k-dim coordinate prefix.
    bool gaps_ok = true;
    std::size_t gap_checks = 0;
    for (int seed = 0; seed < 20; ++seed) {
        std::size_t n = 2 + seed % 4;  // ambient dim n+1 <= 6
        double eps = 0.05, ball = 2.0;
        Dictionary d = triangular_basis(n, eps, ball, 7100 + seed);
        for (std::size_t k = 1; k <= n; ++k) {
            std::vector<Vec> board;
            for (std::size_t i = 0; i < k; ++i) board.push_back(Vec::axis(n + 1, i));
            Subspace B = orthonormalize(n + 1, board);
            std::vector<std::size_t> idx(k);
            std::iota(idx.begin(), idx.end(), 0);
            do {
                std::vector<Vec> sub;
                for (std::size_t r : idx) sub.push_back(d.atoms[r]);
                Subspace S = orthonormalize(n + 1, sub);
                if (S.dim() != k || ball * subspace_gap(S, B) >= eps) gaps_ok = false;
                ++gap_checks;
            } while (next_subset(idx, d.size()));
        }
    }

    // Single-block omit-one hiding.
    Rng rng(7007);
    bool block_ok = true;
    {
        std::size_t m = 3;
        double eps = 0.2;
        Vec s = Vec::axis(m + 1, m);
        std::vector<Vec> atoms = block_basis(m, eps, s);
        for (int trial = 0; trial < 10000; ++trial) {
            std::size_t omit = static_cast<std::size_t>(rng.uniform() * double(m + 1));
            Vec w(m + 1);
            for (std::size_t j = 0; j < atoms.size(); ++j)
                if (j != omit) w += rng.normal() * atoms[j];
            if (w.norm() <= 1e-12) continue;
            if (std::abs(inner(w, s)) > eps * w.norm() * (1.0 + 1e-9)) block_ok = false;
        }
    }

    // Multiblock cross-block hiding.
    std::size_t m = 3, blocks = 3;
    std::vector<double> eps = {0.02, 0.02, 0.02};
    Multiblock mb = multiblock_dict(m, blocks, eps, 60, 7300);
    double ratio = multiblock_projection_ratio_max(mb, m, 10000, 7400);
    double corr = multiblock_marker_corr_max(mb, m, 10000, 7500);
    bool mb_ok = ratio <= 1.0 + 1e-9 && corr <= 2.0 * eps.back() + 1e-9;

    // Slow element over a sampled family of iterated dictionaries.
    std::vector<Dictionary> family;
    family.push_back(mb.dict);
    family.push_back(sample_combination_sphere(mb.dict, 2, 400, 7601));
    family.push_back(sample_combination_sphere(mb.dict, 3, 400, 7602));
    std::vector<double> alpha = {1.0 / 12.0, 1.0 / 24.0, 1.0 / 48.0};
    SlowElementResult slow = slow_element(family, alpha, 8, 7700);
    bool slow_ok = slow.certificate_valid;
    for (std::size_t i = 0; i < slow.rows.size(); ++i)
        if (slow.rows[i].corr > slow.rows[i].corr_budget) slow_ok = false;
    for (std::size_t mm = 0; mm < alpha.size(); ++mm) {
        if (!(slow.slack[mm] < alpha[mm] / 10.0)) slow_ok = false;
        std::printf("        slow element m=%zu: sigma_m >= %.6f (alpha_m %.6f, "
                    "slack %.2e)\n",
                    mm, slow.bound[mm], alpha[mm], slow.slack[mm]);
    }

    bool ok = gaps_ok && block_ok && mb_ok && slow_ok;
    gate.report(7, "hiding constructions", ok,
                std::string("triangular gaps ") + (gaps_ok ? "ok" : "BROKEN") +
                    " (" + std::to_string(gap_checks) + " subsets)" +
                    ", omit-one ok=" + (block_ok ? "yes" : "no") +
                    ", multiblock ratio " + fmt(ratio) + ", marker corr " + fmt(corr) +
                    ", slow-element slack " + (slow_ok ? "< alpha/10" : "TOO LARGE"));
}

// ---- criterion 8: two-sided tail bounds ----
void criterion8(Gate& gate) {
    Rng rng(8008);
    double min_margin = 1e300;
    int configs = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t L = 1 + trial % 3;
        std::vector<double> alpha(L + 1);
        double v = 0.4 + 0.5 * rng.uniform();
        for (std::size_t i = 0; i <= L; ++i) {
            alpha[i] = v;
            v *= 0.35 + 0.4 * rng.uniform();
        }
        std::vector<std::size_t> k(L);
        std::size_t kk = 3 + static_cast<std::size_t>(rng.uniform() * 2.0);
        for (std::size_t i = 0; i < L; ++i) {
            k[i] = kk;
            kk += 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
        }
        std::size_t extra = static_cast<std::size_t>(rng.uniform() * 3.0);
        TailBoundDemo demo = tail_bound_demo(alpha, k, extra, 8100 + trial);
        min_margin = std::min(min_margin, demo.min_margin);
        ++configs;
    }
    bool ok = min_margin >= -1e-9;
    gate.report(8, "two-sided tail bounds", ok,
                std::to_string(configs) + " configurations (L <= 3), min margin " +
                    fmt(min_margin));
}

// ---- criterion 9: determinism ----
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion9(Gate& gate, const std::vector<Vec>& replay_x,
                const std::vector<Dictionary>& replay_d,
                const std::vector<std::vector<SigmaResult>>& replay_r) {
    // Byte-identical CLI reports for a fixed seed.
    bool bytes_ok = true;
#ifdef MTERM_CLI_PATH
    auto run = [](const std::string& args) {
        std::string cmd = std::string(MTERM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return rc == -1 ? -1 : WEXITSTATUS(rc);
    };
    bytes_ok =
        run("hardy-verify --samples 2000 --seed 7 --json-out /tmp/mterm_acc_h1.json") == 0 &&
        run("hardy-verify --samples 2000 --seed 7 --json-out /tmp/mterm_acc_h2.json") == 0 &&
        slurp("/tmp/mterm_acc_h1.json") == slurp("/tmp/mterm_acc_h2.json") &&
        !slurp("/tmp/mterm_acc_h1.json").empty();
    bytes_ok = bytes_ok &&
        run("deviations --x 0.3,-1.2,0.5,2 --dict exact:1,0.6,0.3,0.1 --seed 5 "
            "--json-out /tmp/mterm_acc_d1.json --csv-out /tmp/mterm_acc_d1.csv") == 0 &&
        run("deviations --x 0.3,-1.2,0.5,2 --dict exact:1,0.6,0.3,0.1 --seed 5 "
            "--json-out /tmp/mterm_acc_d2.json --csv-out /tmp/mterm_acc_d2.csv") == 0 &&
        slurp("/tmp/mterm_acc_d1.json") == slurp("/tmp/mterm_acc_d2.json") &&
        slurp("/tmp/mterm_acc_d1.csv") == slurp("/tmp/mterm_acc_d2.csv");
#endif

    // Thread-count invariance on the criterion-1 instances.
    bool threads_ok = true;
    for (std::size_t i = 0; i < replay_x.size(); ++i)
        for (std::size_t mm = 0; mm < replay_r[i].size(); ++mm) {
            SigmaResult again =
                sigma_brute(replay_x[i], replay_d[i], mm, kDefaultSubsetBudget, 3);
            if (again.value != replay_r[i][mm].value ||
                again.best_subset != replay_r[i][mm].best_subset)
                threads_ok = false;
        }
    bool ok = bytes_ok && threads_ok;
    gate.report(9, "determinism", ok,
                std::string("CLI reports byte-identical: ") + (bytes_ok ? "yes" : "NO") +
                    ", thread-count invariance: " + (threads_ok ? "yes" : "NO"));
}

}  // namespace

int main() {
    Gate gate;
    std::vector<Vec> replay_x;
    std::vector<Dictionary> replay_d;
    std::vector<std::vector<SigmaResult>> replay_r;
    criterion1(gate, &replay_x, &replay_d, &replay_r);
    criterion2(gate);
    criterion3(gate);
    criterion4(gate);
    criterion5(gate);
    criterion6(gate);
    criterion7(gate);
    criterion8(gate);
    criterion9(gate, replay_x, replay_d, replay_r);
    if (!gate.all_ok) {
        std::printf("acceptance: FAILED\n");
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
