// cqdual: batch front-end for exponent sweeps, duality reports, operational
// code experiments, and entropic channel quantities.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 input invalid,
// 3 budget refused.

#include "cqdual/codes.hpp"
#include "cqdual/duality.hpp"
#include "cqdual/spec_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace {

using namespace cqdual;

struct Common {
    std::string spec_path;
    std::uint64_t seed = 0;
    int jobs = 0; // 0: resolve from CQDUAL_JOBS, else 1
    double tol = 0.0;
    int grid_depth = 3;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, double default_tol) {
    c.tol = default_tol;
    sub->add_option("--spec", c.spec_path, "Ensemble specification (JSON)");
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--jobs", c.jobs, "Worker threads (default: CQDUAL_JOBS or 1)");
    sub->add_option("--tol", c.tol, "Check tolerance")->capture_default_str();
    sub->add_option("--grid-depth", c.grid_depth, "Simplex grid refinement depth")
        ->capture_default_str();
    sub->add_option("--out", c.out, "Output path (default: stdout)");
    sub->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

int resolved_jobs(const Common& c) {
    if (c.jobs > 0) return c.jobs;
    if (const char* env = std::getenv("CQDUAL_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

/// Evaluates fn(i) for i in [0, n) on `jobs` threads; slot i of the caller's
/// storage is written only by fn(i), so assembly order is deterministic.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex mtx;
    std::vector<std::thread> pool;
    const int workers = std::min<std::size_t>(jobs, n);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

CqEnsemble require_spec(const Common& c) {
    if (c.spec_path.empty()) throw std::invalid_argument("--spec is required for this command");
    return load_ensemble(c.spec_path);
}

std::vector<double> resolve_q(const std::vector<double>& q_flag, const CqEnsemble& ens) {
    if (q_flag.empty()) return ens.prior();
    if (static_cast<int>(q_flag.size()) != ens.alphabet_size())
        throw std::invalid_argument("--q length does not match the ensemble alphabet");
    double sum = 0.0;
    for (double v : q_flag) {
        if (v < 0.0) throw std::invalid_argument("--q entries must be nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("--q must sum to 1");
    return q_flag;
}

std::string fmt_bool(bool b) { return b ? "1" : "0"; }

void emit(const Common& c, const std::string& command, const nlohmann::json& config,
          const Table& table) {
    std::string payload =
        (c.format == "csv") ? to_csv(table) : table_json(table).dump(2) + "\n";
    const nlohmann::json manifest =
        manifest_json(make_manifest(command, config, c.seed));
    if (c.out.empty()) {
        std::cout << payload;
        std::cerr << manifest.dump(2) << "\n";
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output path " + c.out);
        f << payload;
        std::ofstream mf(c.out + ".manifest.json", std::ios::binary);
        mf << manifest.dump(2) << "\n";
    }
}

nlohmann::json base_config(const Common& c) {
    return {{"spec", c.spec_path}, {"seed", c.seed},   {"jobs", resolved_jobs(c)},
            {"tol", c.tol},        {"grid_depth", c.grid_depth}, {"format", c.format}};
}

// ---------------------------------------------------------------- exponent

int cmd_exponent(const Common& c, const std::string& kind_name,
                 const std::vector<double>& q_flag, std::vector<double> rates,
                 double rate_min, double rate_max, int rate_count) {
    static const std::map<std::string, ExponentKind> kinds = {
        {"r-source", ExponentKind::r_source},
        {"r-channel", ExponentKind::r_channel},
        {"sp-source", ExponentKind::sp_source},
        {"sp-channel", ExponentKind::sp_channel},
        {"sc-source", ExponentKind::sc_source},
        {"sc-channel", ExponentKind::sc_channel},
        {"r-source-iid", ExponentKind::r_source_iid},
        {"sp-source-iid", ExponentKind::sp_source_iid},
        {"sc-source-iid", ExponentKind::sc_source_iid}};
    const auto it = kinds.find(kind_name);
    if (it == kinds.end()) throw std::invalid_argument("unknown exponent kind " + kind_name);
    const CqEnsemble ens = require_spec(c);
    const std::vector<double> q = resolve_q(q_flag, ens);
    if (rates.empty()) {
        if (rate_count < 1) throw std::invalid_argument("--rate-count must be >= 1");
        for (int i = 0; i < rate_count; ++i)
            rates.push_back(rate_count == 1
                                ? rate_min
                                : rate_min + (rate_max - rate_min) * i / (rate_count - 1));
    }

    std::vector<ExponentValue> vals(rates.size());
    parallel_for(rates.size(), resolved_jobs(c),
                 [&](std::size_t i) { vals[i] = exponent(it->second, rates[i], q, ens); });

    Table t;
    t.columns = {"rate", "value", "optimizer_s", "inf_flag", "converged", "tolerance"};
    bool all_ok = true;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        t.add_row({format_double(rates[i]), format_double(vals[i].value),
                   format_double(vals[i].s_star), fmt_bool(vals[i].infinite),
                   fmt_bool(vals[i].converged), format_double(c.tol)});
        all_ok = all_ok && vals[i].converged;
    }
    nlohmann::json cfg = base_config(c);
    cfg["kind"] = kind_name;
    cfg["q"] = q;
    cfg["rates"] = rates;
    emit(c, "exponent", cfg, t);
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------- duality

int cmd_duality(const Common& c, const std::string& kind_name, std::vector<double> params,
                const std::vector<double>& q_flag, int denominator) {
    const CqEnsemble ens = require_spec(c);
    const std::vector<double> q = resolve_q(q_flag, ens);
    const SimplexGrid grid{ens.alphabet_size(), denominator};
    if (params.empty()) throw std::invalid_argument("duality: provide --s or --rates values");

    struct Rec {
        DualityReport rep;
        double param = 0.0;
    };
    std::vector<Rec> recs(params.size());
    auto run = [&](const std::function<DualityReport(double)>& f) {
        parallel_for(params.size(), resolved_jobs(c), [&](std::size_t i) {
            recs[i] = {f(params[i]), params[i]};
        });
    };

    if (kind_name == "aux-petz") {
        run([&](double s) {
            if (s <= 0.0) throw std::invalid_argument("aux-petz: s must be > 0");
            return aux_duality_check(AuxVariant::petz, s, ens, grid, c.grid_depth, c.tol);
        });
    } else if (kind_name == "aux-sandwiched") {
        run([&](double s) {
            if (s <= -1.0 || s >= 0.0)
                throw std::invalid_argument("aux-sandwiched: s must be in (-1,0)");
            return aux_duality_check(AuxVariant::sandwiched, s, ens, grid, c.grid_depth, c.tol);
        });
    } else if (kind_name == "mirror-sp" || kind_name == "mirror-r" || kind_name == "mirror-sc") {
        const MirrorKind mk = kind_name == "mirror-sp"   ? MirrorKind::sp
                              : kind_name == "mirror-r" ? MirrorKind::r_down
                                                         : MirrorKind::sc;
        run([&](double rate) { return mirror_symmetry_check(mk, rate, q, ens, c.tol); });
    } else if (kind_name == "exponent-sp" || kind_name == "exponent-sc") {
        const ExponentDualityKind ek = kind_name == "exponent-sp" ? ExponentDualityKind::sp
                                                                  : ExponentDualityKind::sc;
        run([&](double rate) {
            return exponent_duality_check(ek, rate, ens, grid, c.grid_depth, c.tol);
        });
    } else if (kind_name == "interchange") {
        run([&](double s) {
            return minimax_interchange_check(s, ens, grid, c.grid_depth, c.tol);
        });
    } else if (kind_name == "r-probe") {
        run([&](double rate) { return r_duality_probe(rate, ens, grid, c.grid_depth); });
    } else if (kind_name == "variational") {
        run([&](double s) {
            if (s <= -1.0) throw std::invalid_argument("variational: s must be > -1");
            const VariationalReport v =
                classical_variational_check(ens.prior(), q, s, c.grid_depth);
            DualityReport rep;
            rep.lhs = v.closed_form;
            rep.rhs = v.grid_min;
            rep.grid_gap = v.grid_gap;
            rep.tolerance = c.tol;
            rep.pass = v.pass;
            return rep;
        });
    } else {
        throw std::invalid_argument("unknown duality kind " + kind_name);
    }

    Table t;
    t.columns = {"kind",  "param",     "lhs",  "rhs",      "grid_gap",
                 "depth", "tolerance", "pass", "converged"};
    bool all_ok = true;
    for (const Rec& r : recs) {
        t.add_row({kind_name, format_double(r.param), format_double(r.rep.lhs),
                   format_double(r.rep.rhs), format_double(r.rep.grid_gap),
                   std::to_string(r.rep.depth), format_double(r.rep.tolerance),
                   fmt_bool(r.rep.pass), fmt_bool(r.rep.converged)});
        all_ok = all_ok && r.rep.pass;
    }
    nlohmann::json cfg = base_config(c);
    cfg["kind"] = kind_name;
    cfg["params"] = params;
    cfg["q"] = q;
    cfg["denominator"] = denominator;
    emit(c, "duality", cfg, t);
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------- codes

TypeDistribution resolve_type(const std::vector<int>& counts_flag, int n,
                              const CqEnsemble& ens) {
    if (!counts_flag.empty()) {
        if (static_cast<int>(counts_flag.size()) != ens.alphabet_size())
            throw std::invalid_argument("--type length does not match the alphabet");
        return TypeDistribution(n, counts_flag);
    }
    // default: counts proportional to the prior, largest-remainder rounding
    std::vector<int> counts(ens.alphabet_size(), 0);
    std::vector<std::pair<double, int>> rem;
    int assigned = 0;
    for (int x = 0; x < ens.alphabet_size(); ++x) {
        const double exact = ens.prior()[x] * n;
        counts[x] = static_cast<int>(exact);
        assigned += counts[x];
        rem.push_back({exact - counts[x], x});
    }
    std::sort(rem.rbegin(), rem.rend());
    for (int i = 0; i < n - assigned; ++i) ++counts[rem[i % rem.size()].second];
    return TypeDistribution(n, counts);
}

int cmd_codes(const Common& c, const std::string& task, int n, double rate,
              const std::vector<int>& type_flag, int trials, int m_flag, int u_size) {
    if (task == "inequalities") {
        const OperatorInequalityReport rep = operator_inequality_checks(c.seed, trials);
        Table t;
        t.columns = {"hn_min_slack", "audenaert_min_slack", "trials", "pass", "tolerance"};
        t.add_row({format_double(rep.hn_min_slack), format_double(rep.audenaert_min_slack),
                   std::to_string(rep.trials), fmt_bool(rep.pass), format_double(1e-9)});
        nlohmann::json cfg = base_config(c);
        cfg["task"] = task;
        cfg["trials"] = trials;
        emit(c, "codes", cfg, t);
        return rep.pass ? 0 : 1;
    }

    const CqEnsemble ens = require_spec(c);
    const Alphabet alphabet(ens.alphabet_size());
    const TypeDistribution q = resolve_type(type_flag, n, ens);
    const std::vector<Sequence> tc = enumerate_type_class(q);
    const double h_q = entropy_bits(q);
    const int m_count =
        m_flag > 0 ? m_flag
                   : std::max(2, static_cast<int>(std::llround(std::exp2(n * (h_q - rate)))));
    nlohmann::json cfg = base_config(c);
    cfg["task"] = task;
    cfg["n"] = n;
    cfg["rate"] = rate;
    cfg["type"] = q.counts;
    cfg["trials"] = trials;
    cfg["messages"] = m_count;

    Rng master(c.seed);
    Table t;
    bool all_ok = true;

    if (task == "cover") {
        t.columns = {"trial", "L_Q", "batches", "covered", "fallback", "tolerance"};
        for (int trial = 0; trial < trials; ++trial) {
            Rng local = master.child(trial);
            std::vector<Sequence> u;
            std::vector<char> used(tc.size(), 0);
            const int want = std::min<int>(u_size, static_cast<int>(tc.size()));
            while (static_cast<int>(u.size()) < want) {
                const std::size_t pick = local.below(tc.size());
                if (!used[pick]) {
                    used[pick] = 1;
                    u.push_back(tc[pick]);
                }
            }
            const CoveringResult res = cover_type_class(u, alphabet, local.bits());
            t.add_row({std::to_string(trial), std::to_string(res.L_Q),
                       std::to_string(res.batches_drawn), fmt_bool(res.covered),
                       fmt_bool(res.fallback), format_double(0.0)});
            all_ok = all_ok && res.covered;
        }
        cfg["u_size"] = u_size;
    } else if (task == "build-source") {
        auto [chan, shot] = random_channel_code(ens, tc, m_count, master.bits());
        (void)shot;
        chan.constant_composition = true;
        auto [src, rep] = source_from_channel(chan, ens, master.bits());
        (void)src;
        t.columns = {"source_error", "two_channel_error", "error_ok", "L_Q",
                     "rate_bound",   "rate_ok",           "fallback", "tolerance"};
        t.add_row({format_double(rep.source_error),
                   format_double(2.0 * rep.channel_avg_error), fmt_bool(rep.error_ok),
                   std::to_string(rep.L_Q), format_double(rep.rate_bound),
                   fmt_bool(rep.rate_ok), fmt_bool(rep.fallback), format_double(0.0)});
        all_ok = rep.error_ok && rep.rate_ok;
    } else if (task == "build-channel") {
        auto [chan, shot] = random_channel_code(ens, tc, m_count, master.bits());
        (void)shot;
        chan.constant_composition = true;
        auto [src, srep] = source_from_channel(chan, ens, master.bits());
        (void)srep;
        auto [chan2, rep] = channel_from_source(src, ens);
        (void)chan2;
        t.columns = {"channel_error", "channel_bound", "error_ok", "rate",
                     "rate_bound",    "rate_ok",       "chosen_z", "tolerance"};
        t.add_row({format_double(rep.channel_avg_error),
                   format_double((1.0 + 1.0 / n) * rep.source_error), fmt_bool(rep.error_ok),
                   format_double(rep.rate), format_double(rep.rate_bound),
                   fmt_bool(rep.rate_ok), std::to_string(rep.chosen_z),
                   format_double(0.0)});
        all_ok = rep.error_ok && rep.rate_ok;
    } else if (task == "random-code") {
        // i.i.d. codewords from the full product alphabet: P(B) = 1
        std::vector<Sequence> b;
        Sequence cur(n, 0);
        while (true) {
            b.push_back(cur);
            int pos = n - 1;
            for (; pos >= 0; --pos) {
                if (++cur[pos] < ens.alphabet_size()) break;
                cur[pos] = 0;
            }
            if (pos < 0) break;
        }
        t.columns = {"trial", "avg_error", "bound", "best_alpha", "pass", "tolerance"};
        double mean = 0.0, bound = 1.0, best_alpha = 1.0;
        for (int trial = 0; trial < trials; ++trial) {
            auto [code, rep] = random_channel_code(ens, b, m_count, master.child(trial).bits());
            (void)code;
            mean += rep.avg_error;
            bound = rep.bound; // depends on (B, M) only: identical across trials
            best_alpha = rep.best_alpha;
            t.add_row({std::to_string(trial), format_double(rep.avg_error),
                       format_double(rep.bound), format_double(rep.best_alpha), "",
                       format_double(0.0)});
        }
        mean /= trials;
        const bool ok = mean <= bound;
        t.add_row({"mean", format_double(mean), format_double(bound),
                   format_double(best_alpha), fmt_bool(ok), format_double(0.0)});
        all_ok = ok;
    } else if (task == "round-trip") {
        const DualityExperimentReport rep =
            duality_inequality_experiment(ens, n, rate, q, trials, c.seed);
        t.columns = {"trial",         "source_error",  "two_channel_error", "source_ok",
                     "channel_error", "channel_bound", "channel_ok",        "tolerance"};
        for (std::size_t i = 0; i < rep.records.size(); ++i) {
            const DualityExperimentRecord& r = rep.records[i];
            t.add_row({std::to_string(i), format_double(r.source_error),
                       format_double(r.two_channel_error), fmt_bool(r.source_ok),
                       format_double(r.channel_error), format_double(r.channel_bound),
                       fmt_bool(r.channel_ok), format_double(0.0)});
        }
        all_ok = rep.all_pass;
    } else {
        throw std::invalid_argument("unknown codes task " + task);
    }
    emit(c, "codes", cfg, t);
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------- quantities

int cmd_quantities(const Common& c, const std::vector<double>& q_flag) {
    const CqEnsemble ens = require_spec(c);
    const std::vector<double> q = resolve_q(q_flag, ens);
    const ChannelQuantities cq = channel_quantities(q, ens);
    Table t;
    t.columns = {"name", "value", "tolerance"};
    t.add_row({"mutual_info", format_double(cq.mutual_info), format_double(c.tol)});
    t.add_row({"zero_order_info", format_double(cq.zero_order), format_double(c.tol)});
    t.add_row({"cond_entropy", format_double(cq.cond_entropy), format_double(c.tol)});
    t.add_row({"h0_hat", format_double(cq.h0_hat), format_double(c.tol)});
    t.add_row({"h0_up", format_double(cq.h0_up), format_double(c.tol)});
    t.add_row({"entropy_q", format_double(entropy_bits(q)), format_double(c.tol)});
    nlohmann::json cfg = base_config(c);
    cfg["q"] = q;
    emit(c, "quantities", cfg, t);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cqdual: entropic exponents, duality reports, and finite-blocklength "
                 "code experiments for c-q channels and sources"};
    app.require_subcommand(1);

    Common c_exp, c_dual, c_codes, c_quant;

    // exponent
    auto* exp_sub = app.add_subcommand("exponent", "Exponent curve sweep");
    add_common(exp_sub, c_exp, 1e-6);
    std::string exp_kind = "r-source";
    std::vector<double> exp_q, exp_rates;
    double rate_min = 0.0, rate_max = 1.0;
    int rate_count = 11;
    exp_sub->add_option("--kind", exp_kind,
                        "r-source|r-channel|sp-source|sp-channel|sc-source|sc-channel|"
                        "r-source-iid|sp-source-iid|sc-source-iid")
        ->capture_default_str();
    exp_sub->add_option("--q", exp_q, "Type/input distribution (default: spec prior)")
        ->delimiter(',');
    exp_sub->add_option("--rates", exp_rates, "Explicit rate list")->delimiter(',');
    exp_sub->add_option("--rate-min", rate_min, "Grid start")->capture_default_str();
    exp_sub->add_option("--rate-max", rate_max, "Grid end")->capture_default_str();
    exp_sub->add_option("--rate-count", rate_count, "Grid points")->capture_default_str();

    // duality
    auto* dual_sub = app.add_subcommand("duality", "Duality identity reports");
    add_common(dual_sub, c_dual, 1e-3);
    std::string dual_kind = "aux-petz";
    std::vector<double> dual_s, dual_rates, dual_q;
    int denominator = 8;
    dual_sub->add_option("--kind", dual_kind,
                         "aux-petz|aux-sandwiched|mirror-sp|mirror-r|mirror-sc|"
                         "exponent-sp|exponent-sc|interchange|r-probe|variational")
        ->capture_default_str();
    dual_sub->add_option("--s", dual_s, "s values")->delimiter(',');
    dual_sub->add_option("--rates", dual_rates, "Rate values")->delimiter(',');
    dual_sub->add_option("--q", dual_q, "Type distribution (default: spec prior)")
        ->delimiter(',');
    dual_sub->add_option("--denominator", denominator, "Base simplex grid denominator")
        ->capture_default_str();

    // codes
    auto* codes_sub = app.add_subcommand("codes", "Finite-blocklength experiments");
    add_common(codes_sub, c_codes, 1e-12);
    std::string codes_task = "round-trip";
    int n = 4, trials = 20, m_flag = 0, u_size = 2;
    double rate = 0.5;
    std::vector<int> type_flag;
    codes_sub->add_option("--task", codes_task,
                          "cover|build-source|build-channel|random-code|round-trip|inequalities")
        ->capture_default_str();
    codes_sub->add_option("--n", n, "Blocklength")->capture_default_str();
    codes_sub->add_option("--rate", rate, "Source rate R")->capture_default_str();
    codes_sub->add_option("--type", type_flag, "Type counts (default: prior-proportional)")
        ->delimiter(',');
    codes_sub->add_option("--trials", trials, "Seeds / trial count")->capture_default_str();
    codes_sub->add_option("--messages", m_flag, "Message count (default: 2^{n(H(Q)-R)})");
    codes_sub->add_option("--u-size", u_size, "Codebook size for cover task")
        ->capture_default_str();

    // quantities
    auto* quant_sub = app.add_subcommand("quantities", "Entropic channel/source quantities");
    add_common(quant_sub, c_quant, 1e-9);
    std::vector<double> quant_q;
    quant_sub->add_option("--q", quant_q, "Input distribution (default: spec prior)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (exp_sub->parsed())
            return cmd_exponent(c_exp, exp_kind, exp_q, exp_rates, rate_min, rate_max,
                                rate_count);
        if (dual_sub->parsed()) {
            std::vector<double> params = dual_s;
            params.insert(params.end(), dual_rates.begin(), dual_rates.end());
            return cmd_duality(c_dual, dual_kind, params, dual_q, denominator);
        }
        if (codes_sub->parsed())
            return cmd_codes(c_codes, codes_task, n, rate, type_flag, trials, m_flag, u_size);
        if (quant_sub->parsed()) return cmd_quantities(c_quant, quant_q);
    } catch (const std::length_error& e) {
        std::cerr << "budget refused: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
