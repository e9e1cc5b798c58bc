// Command line front end: region-distance tables, selection probabilities,
// outage sweeps and channel-estimation-error sweeps, all emitted as CSV with
// a config-echo header.  Exit codes: 0 ok, 1 usage, 2 numeric failure,
// 3 I/O failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <cmf/cmf.hpp>

namespace {

using cmf::csv::KV;

struct Grid {
    double start = 0.0;
    double stop = 20.0;
    double step = 2.0;
};

std::vector<double> grid_values(const Grid& g) {
    if (!(g.step > 0.0) || g.stop < g.start)
        throw std::invalid_argument("SNR grid: need step > 0 and stop >= start");
    std::vector<double> v;
    for (double x = g.start; x <= g.stop + 1e-9; x += g.step) v.push_back(x);
    return v;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ';';
        os << v[i];
    }
    return os.str();
}

// Sized for both the SNR sweep tail quantile and the requested set sizes.
cmf::GminTable build_table(double cap, size_t min_rows) {
    for (int i = 0;; ++i) {
        cmf::GminTable t = cmf::build_gmin_table(cap);
        if (t.entries.size() >= min_rows || i >= 20) return t;
        cap *= 2.0;
    }
}

std::string strategy_label(bool optimal, int k) {
    return optimal ? std::string("optimal") : "cmf" + std::to_string(k);
}

struct GminArgs {
    double cap = 2200.0;
    std::string out = "gmin_table.csv";
};

void run_gmin_table(const GminArgs& a) {
    cmf::GminTable table = cmf::build_gmin_table(a.cap);
    std::ostringstream os;
    os << cmf::csv::comment_header({{"command", "gmin-table"},
                                    {"cap", cmf::csv::sig6(a.cap)},
                                    {"rows", std::to_string(table.entries.size())}});
    table.to_csv(os);
    cmf::csv::atomic_write(a.out, os.str());
}

struct SelArgs {
    Grid grid;
    bool optimal = false;
    std::vector<int> ks;
    int relays = 2;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 12345;
    int threads = 1;
    std::string out = "selection_prob.csv";
};

void run_selection_prob(const SelArgs& a) {
    auto snrs = grid_values(a.grid);
    if (!a.optimal && a.ks.empty())
        throw std::invalid_argument("selection-prob: pass --optimal and/or --k");
    size_t max_k = 0;
    for (int k : a.ks) max_k = std::max<size_t>(max_k, k);
    double maxp = cmf::db_to_linear(snrs.back());
    cmf::GminTable table = build_table(cmf::recommended_table_cap(maxp), max_k);

    std::ostringstream os;
    os << cmf::csv::comment_header({{"command", "selection-prob"},
                                    {"snr_start", cmf::csv::sig6(a.grid.start)},
                                    {"snr_stop", cmf::csv::sig6(a.grid.stop)},
                                    {"snr_step", cmf::csv::sig6(a.grid.step)},
                                    {"optimal", a.optimal ? "1" : "0"},
                                    {"k", join(a.ks)},
                                    {"relays", std::to_string(a.relays)},
                                    {"trials", std::to_string(a.trials)},
                                    {"seed", std::to_string(a.seed)}});
    os << "snr_db,strategy,a1,a2,probability,std_error\n";
    for (double snr : snrs) {
        cmf::SourcePowers p = cmf::powers_from_snr_db(snr);
        if (a.optimal) {
            cmf::SimConfig cfg;
            cfg.m_relays = a.relays;
            cfg.powers = p;
            cfg.trials = a.trials;
            cfg.seed = a.seed;
            cfg.optimal = true;
            cfg.threads = a.threads;
            cmf::MonteCarloResult res = cmf::run_monte_carlo(cfg, table);
            double n = static_cast<double>(res.trials) * res.m_relays;
            for (const auto& [ecv, cnt] : res.selection_counts) {
                double pr = static_cast<double>(cnt) / n;
                double se = std::sqrt(pr * (1.0 - pr) / n);
                os << cmf::csv::sig6(snr) << ",optimal," << ecv.a1 << ',' << ecv.a2 << ','
                   << cmf::csv::sig6(pr) << ',' << cmf::csv::sig6(se) << '\n';
            }
        }
        for (int k : a.ks) {
            cmf::CandidateSet set = cmf::candidate_set(table, k);
            cmf::FadingModel fm{p};
            cmf::SelectionProfile prof =
                cmf::build_selection_profile(set, fm, 0.0, {}, false);
            for (size_t i = 0; i < set.size(); ++i)
                os << cmf::csv::sig6(snr) << ',' << strategy_label(false, k) << ','
                   << set.ecvs[i].a1 << ',' << set.ecvs[i].a2 << ','
                   << cmf::csv::sig6(prof.probs[i]) << ','
                   << cmf::csv::sig6(prof.err_bound) << '\n';
        }
    }
    cmf::csv::atomic_write(a.out, os.str());
}

struct OutageArgs {
    Grid grid;
    std::vector<int> ms{2, 6};
    bool optimal = false;
    std::vector<int> ks{3, 5};
    double target_rate = 0.5;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 12345;
    int threads = 1;
    std::vector<double> sigmas;  // empty: plain outage command
    std::string out = "outage.csv";
};

void run_outage_like(const OutageArgs& a, bool cee) {
    auto snrs = grid_values(a.grid);
    if (!a.optimal && a.ks.empty())
        throw std::invalid_argument("outage: pass --optimal and/or --k");
    std::vector<double> sigmas = a.sigmas;
    if (!cee) sigmas = {0.0};
    if (cee && sigmas.empty()) sigmas = {0.0, 0.01, 0.05, 0.1};

    size_t max_k = 0;
    for (int k : a.ks) max_k = std::max<size_t>(max_k, k);
    double maxp = cmf::db_to_linear(snrs.back());
    double max_sigma = *std::max_element(sigmas.begin(), sigmas.end());
    cmf::GminTable table =
        build_table(cmf::recommended_table_cap(maxp, max_sigma), max_k);

    std::vector<KV> header{{"command", cee ? "cee" : "outage"},
                           {"snr_start", cmf::csv::sig6(a.grid.start)},
                           {"snr_stop", cmf::csv::sig6(a.grid.stop)},
                           {"snr_step", cmf::csv::sig6(a.grid.step)},
                           {"relays", join(a.ms)},
                           {"optimal", a.optimal ? "1" : "0"},
                           {"k", join(a.ks)},
                           {"target_rate", cmf::csv::sig6(a.target_rate)},
                           {"trials", std::to_string(a.trials)},
                           {"seed", std::to_string(a.seed)}};
    if (cee) header.push_back({"cee_var", join(sigmas)});

    std::ostringstream os;
    os << cmf::csv::comment_header(header);
    if (cee)
        os << "snr_db,m,strategy,sigma_e_sq,trials,sim_outage,sim_outage_se,"
              "sim_rank_fail,sim_rank_fail_se,sim_relay_outage,sim_relay_outage_se\n";
    else
        os << "snr_db,m,strategy,trials,sim_outage,sim_outage_se,"
              "sim_rank_fail,sim_rank_fail_se,sim_relay_outage,sim_relay_outage_se,"
              "ana_outage,ana_rank_fail,ana_relay_outage\n";

    for (double snr : snrs) {
        cmf::SourcePowers p = cmf::powers_from_snr_db(snr);
        cmf::FadingModel fm{p};
        // One profile per candidate set size; every m reuses it.
        std::map<int, cmf::SelectionProfile> profiles;
        if (!cee)
            for (int k : a.ks)
                profiles.emplace(k, cmf::build_selection_profile(
                                        cmf::candidate_set(table, k), fm, a.target_rate));
        for (int m : a.ms) {
            auto emit = [&](bool optimal, int k) {
                for (double sg : sigmas) {
                    cmf::SimConfig cfg;
                    cfg.m_relays = m;
                    cfg.powers = p;
                    cfg.target_rate = a.target_rate;
                    cfg.trials = a.trials;
                    cfg.seed = a.seed;
                    cfg.optimal = optimal;
                    cfg.set_size = k;
                    cfg.cee_sigma_sq = sg;
                    cfg.threads = a.threads;
                    cmf::MonteCarloResult res = cmf::run_monte_carlo(cfg, table);
                    os << cmf::csv::sig6(snr) << ',' << m << ','
                       << strategy_label(optimal, k) << ',';
                    if (cee) os << cmf::csv::sig6(sg) << ',';
                    os << a.trials << ',' << cmf::csv::sig6(res.outage.value) << ','
                       << cmf::csv::sig6(res.outage.std_error) << ','
                       << cmf::csv::sig6(res.rank_failure.value) << ','
                       << cmf::csv::sig6(res.rank_failure.std_error) << ','
                       << cmf::csv::sig6(res.relay_outage.value) << ','
                       << cmf::csv::sig6(res.relay_outage.std_error);
                    if (!cee) {
                        if (optimal) {
                            os << ",,,";
                        } else {
                            const cmf::SelectionProfile& prof = profiles.at(k);
                            os << ',' << cmf::csv::sig6(cmf::system_outage_from_profile(prof, m))
                               << ',' << cmf::csv::sig6(cmf::rank_failure_from_profile(prof, m))
                               << ',' << cmf::csv::sig6(cmf::relay_outage_from_profile(prof));
                        }
                    }
                    os << '\n';
                }
            };
            if (a.optimal) emit(true, 0);
            for (int k : a.ks) emit(false, k);
        }
    }
    cmf::csv::atomic_write(a.out, os.str());
}

int dispatch_preset(const std::string& name, const std::uint64_t* trials,
                    const std::uint64_t* seed, const int* threads, const std::string* out) {
    auto fill = [&](OutageArgs& a) {
        if (trials) a.trials = *trials;
        if (seed) a.seed = *seed;
        if (threads) a.threads = *threads;
        if (out) a.out = *out;
    };
    if (name == "table1") {
        GminArgs a;
        a.out = out ? *out : "table1.csv";
        run_gmin_table(a);
        return 0;
    }
    if (name == "fig2") {
        SelArgs a;
        a.optimal = true;
        a.out = out ? *out : "fig2.csv";
        if (trials) a.trials = *trials;
        if (seed) a.seed = *seed;
        if (threads) a.threads = *threads;
        run_selection_prob(a);
        return 0;
    }
    OutageArgs a;
    if (name == "fig3") {
        a.optimal = true;
        a.out = "fig3.csv";
    } else if (name == "fig4") {
        a.out = "fig4.csv";
    } else if (name == "fig5") {
        a.optimal = true;
        a.ks = {5};
        a.ms = {6};
        a.out = "fig5.csv";
    } else {  // fig6
        a.optimal = true;
        a.ks = {5};
        a.ms = {6};
        a.out = "fig6.csv";
    }
    std::string keep_out = a.out;
    fill(a);
    if (!out) a.out = keep_out;
    run_outage_like(a, name == "fig6");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compute-and-forward equation selection toolkit"};
    app.require_subcommand(0, 1);

    std::string preset;
    app.add_option("--preset", preset, "canned run: table1, fig2..fig6")
        ->check(CLI::IsMember({"table1", "fig2", "fig3", "fig4", "fig5", "fig6"}));
    std::uint64_t p_trials = 0, p_seed = 0;
    int p_threads = 1;
    std::string p_out;
    auto* o_trials = app.add_option("--trials", p_trials, "override preset trial count");
    auto* o_seed = app.add_option("--seed", p_seed, "override preset seed");
    auto* o_threads = app.add_option("--threads", p_threads, "override preset thread count");
    auto* o_out = app.add_option("--out", p_out, "override preset output path");

    GminArgs ga;
    auto* sc_gmin = app.add_subcommand("gmin-table", "emit the ECV region-distance table");
    sc_gmin->add_option("--cap", ga.cap, "largest squared region distance kept")
        ->check(CLI::PositiveNumber);
    sc_gmin->add_option("--out", ga.out, "output CSV path");

    SelArgs sa;
    auto* sc_sel = app.add_subcommand("selection-prob",
                                      "selection probabilities per ECV over an SNR sweep");
    sc_sel->add_option("--snr-start", sa.grid.start);
    sc_sel->add_option("--snr-stop", sa.grid.stop);
    sc_sel->add_option("--snr-step", sa.grid.step);
    sc_sel->add_flag("--optimal", sa.optimal, "Monte Carlo histogram of the optimal rule");
    sc_sel->add_option("--k", sa.ks, "analytic profile of the simplified rule with k ECVs")
        ->check(CLI::Range(2, 8));
    sc_sel->add_option("--relays", sa.relays)->check(CLI::Range(2, 64));
    sc_sel->add_option("--trials", sa.trials)->check(CLI::PositiveNumber);
    sc_sel->add_option("--seed", sa.seed);
    sc_sel->add_option("--threads", sa.threads)->check(CLI::Range(1, 64));
    sc_sel->add_option("--out", sa.out);

    OutageArgs oa;
    auto* sc_out = app.add_subcommand("outage", "simulated plus analytic outage sweep");
    sc_out->add_option("--snr-start", oa.grid.start);
    sc_out->add_option("--snr-stop", oa.grid.stop);
    sc_out->add_option("--snr-step", oa.grid.step);
    sc_out->add_option("--relays", oa.ms, "relay counts, repeatable")->check(CLI::Range(2, 64));
    sc_out->add_flag("--optimal", oa.optimal);
    sc_out->add_option("--k", oa.ks, "simplified-rule sizes, repeatable")->check(CLI::Range(2, 8));
    sc_out->add_option("--target-rate", oa.target_rate)->check(CLI::NonNegativeNumber);
    sc_out->add_option("--trials", oa.trials)->check(CLI::PositiveNumber);
    sc_out->add_option("--seed", oa.seed);
    sc_out->add_option("--threads", oa.threads)->check(CLI::Range(1, 64));
    sc_out->add_option("--out", oa.out);

    OutageArgs ca;
    ca.ms = {6};
    ca.ks = {5};
    ca.out = "cee.csv";
    auto* sc_cee = app.add_subcommand("cee", "outage sweep under channel estimation error");
    sc_cee->add_option("--snr-start", ca.grid.start);
    sc_cee->add_option("--snr-stop", ca.grid.stop);
    sc_cee->add_option("--snr-step", ca.grid.step);
    sc_cee->add_option("--relays", ca.ms)->check(CLI::Range(2, 64));
    sc_cee->add_flag("--optimal", ca.optimal);
    sc_cee->add_option("--k", ca.ks)->check(CLI::Range(2, 8));
    sc_cee->add_option("--target-rate", ca.target_rate)->check(CLI::NonNegativeNumber);
    sc_cee->add_option("--cee-var", ca.sigmas, "estimation error variances, repeatable")
        ->check(CLI::NonNegativeNumber);
    sc_cee->add_option("--trials", ca.trials)->check(CLI::PositiveNumber);
    sc_cee->add_option("--seed", ca.seed);
    sc_cee->add_option("--threads", ca.threads)->check(CLI::Range(1, 64));
    sc_cee->add_option("--out", ca.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (!preset.empty()) {
            if (app.get_subcommands().size() > 0) {
                std::cerr << "--preset cannot be combined with a subcommand\n";
                return 1;
            }
            return dispatch_preset(preset, o_trials->count() ? &p_trials : nullptr,
                                   o_seed->count() ? &p_seed : nullptr,
                                   o_threads->count() ? &p_threads : nullptr,
                                   o_out->count() ? &p_out : nullptr);
        }
        if (sc_gmin->parsed()) {
            run_gmin_table(ga);
        } else if (sc_sel->parsed()) {
            run_selection_prob(sa);
        } else if (sc_out->parsed()) {
            run_outage_like(oa, false);
        } else if (sc_cee->parsed()) {
            run_outage_like(ca, true);
        } else {
            std::cerr << app.help();
            return 1;
        }
    } catch (const cmf::csv::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
