#include "omerg_cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "omerg/averaging.hpp"
#include "omerg/checkpoint_io.hpp"
#include "omerg/dynamics.hpp"
#include "omerg/maximal.hpp"
#include "omerg/sieve.hpp"
#include "omerg/sweeping_out.hpp"
#include "omerg/weights.hpp"

namespace omerg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// JSON number, or null when not finite.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0')
        return env;
    return "omerg_out";
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_text(path, text);
}

struct SieveRun {
    std::vector<WeightTable> tables;
    std::vector<ArithmeticDistribution> distributions;
};

SieveRun sieve_tables(std::uint64_t n_max, const std::vector<std::uint64_t>& grid, std::uint64_t block_size,
                      unsigned threads, bool distributions) {
    SieveConfig config;
    config.n_max = n_max;
    config.block_size = std::min(block_size, n_max);
    config.checkpoints = grid;
    WeightAccumulator weights;
    DistributionAccumulator dist;
    std::vector<BlockConsumer*> consumers{&weights};
    if (distributions)
        consumers.push_back(&dist);
    stream_stats(config, consumers, threads);
    return {weights.tables(), dist.snapshots()};
}

void require_domain(std::uint64_t n_max) {
    if (n_max < SieveConfig::kMinCheckpoint)
        throw std::invalid_argument("--n-max must be at least 16 (double-logarithmic quantities need ln ln N >= 1)");
}

// ---- sieve ---------------------------------------------------------------------

struct SieveOptions {
    std::string n_max;
    std::string grid = "geometric";
    std::string block_size = "1048576";
    std::string out;
    unsigned threads = 1;
};

int cmd_sieve(const SieveOptions& o, std::ostream& out, std::ostream& err) {
    const auto n_max = parse_count(o.n_max);
    require_domain(n_max);
    const auto grid = parse_grid(o.grid, n_max);
    const auto block = parse_count(o.block_size);
    const fs::path dir = run_directory(o.out.empty() ? default_out_dir() : o.out, n_max, grid);

    const auto run = sieve_tables(n_max, grid, block, o.threads, false);
    for (const auto& t : run.tables)
        write_checkpoint(dir, t);

    json manifest;
    manifest["n_max"] = n_max;
    manifest["checkpoints"] = grid;
    manifest["config_hash"] = config_hash(n_max, grid);
    manifest["format"] = 1;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    err << "sieved [1, " << n_max << "] with " << grid.size() << " checkpoints\n";
    out << dir.string() << "\n";
    return kExitOk;
}

// ---- verify --------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;
};

std::vector<Check> verify_tables(const fs::path& dir, const std::vector<WeightTable>& tables, double tol) {
    std::vector<Check> checks;
    auto add = [&](std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass, std::move(detail)});
    };

    // one direct pass over n <= N_max, recording H_N and Σ 1/(n ln n) at each N
    std::vector<double> harmonic;
    std::vector<double> dlog;
    {
        CompensatedSum h;
        CompensatedSum e;
        std::uint64_t n = 0;
        for (const auto& t : tables) {
            for (; n < t.n; ++n) {
                const auto x = static_cast<double>(n + 1);
                h.add(1.0 / x);
                if (n + 1 >= 2)
                    e.add(1.0 / (x * std::log(x)));
            }
            harmonic.push_back(h.value());
            dlog.push_back(e.value());
        }
    }

    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto& t = tables[i];
        const std::string at = "N=" + std::to_string(t.n);

        std::uint64_t total = 0;
        ExactSum xs;
        ExactSum es;
        for (unsigned k = 0; k <= t.k_max; ++k) {
            total += t.pi[k];
            xs.add(t.xi[k]);
            es.add(t.eta[k]);
        }
        add("partition_pi", total == t.n, at + " sum(pi)=" + std::to_string(total));
        const double rx = std::abs(xs.value() - harmonic[i]) / harmonic[i];
        add("partition_xi", rx <= tol, at + " rel.err=" + fmt17(rx));
        const double re = dlog[i] == 0.0 ? std::abs(es.value()) : std::abs(es.value() - dlog[i]) / dlog[i];
        add("partition_eta", re <= tol, at + " rel.err=" + fmt17(re));
        add("k_max", t.k_max == floor_log2(t.n), at + " k_max=" + std::to_string(t.k_max));

        bool non_negative = true;
        for (unsigned k = 0; k <= t.k_max; ++k)
            non_negative = non_negative && t.xi[k] >= 0.0 && t.eta[k] >= 0.0;
        add("non_negative", non_negative, at);

        const auto hist_file = histogram_path(dir, t.n);
        if (fs::exists(hist_file)) {
            const auto h = read_histogram(hist_file);
            const bool same = h.bins == t.ek_hist.bins && h.underflow == t.ek_hist.underflow &&
                              h.overflow == t.ek_hist.overflow;
            add("histogram_consistent", same, at);
        } else {
            add("histogram_consistent", false, at + " missing " + hist_file.filename().string());
        }

        if (t.n >= 16) {
            bool monotone_c = true;
            double prev = 1.0;
            for (double c : {0.5, 1.0, 2.0, 3.0, 4.0}) {
                const double f = hr_fraction(t, c);
                monotone_c = monotone_c && f <= prev;
                prev = f;
            }
            add("hr_nonincreasing_in_C", monotone_c, at);
        }
    }

    for (std::size_t i = 1; i < tables.size(); ++i) {
        const auto& a = tables[i - 1];
        const auto& b = tables[i];
        bool mono = b.k_max >= a.k_max;
        for (unsigned k = 0; mono && k <= a.k_max; ++k)
            mono = b.pi[k] >= a.pi[k] && b.xi[k] >= a.xi[k] && b.eta[k] >= a.eta[k];
        add("monotone_in_N", mono, "N=" + std::to_string(a.n) + " -> " + std::to_string(b.n));
        if (a.k_max >= 1 && b.k_max >= 1)
            add("eta1_increasing", b.pi[1] > a.pi[1] ? b.eta[1] > a.eta[1] : b.eta[1] == a.eta[1],
                "N=" + std::to_string(b.n));
    }

    const auto& last = tables.back();
    if (last.k_max >= 1 && last.n >= 2) {
        const auto bracket = eta_bracket(last);
        bool bounded = true;
        std::string where;
        for (const auto& t : tables)
            for (unsigned k = 0; k <= t.k_max; ++k)
                if (t.eta[k] > bracket.upper) {
                    bounded = false;
                    where = "N=" + std::to_string(t.n) + " k=" + std::to_string(k);
                }
        add("eta_uniform_bound", bounded, where.empty() ? "upper=" + fmt17(bracket.upper) : where);
    }
    return checks;
}

int cmd_verify(const std::string& dir, double tol, const std::string& output, std::ostream& out) {
    const auto tables = read_run(dir);
    const auto checks = verify_tables(dir, tables, tol);
    json report;
    report["dir"] = dir;
    report["checkpoints"] = tables.size();
    bool all = true;
    std::map<std::string, std::pair<int, int>> summary;
    for (const auto& c : checks) {
        all = all && c.pass;
        auto& s = summary[c.name];
        ++s.first;
        s.second += c.pass ? 1 : 0;
        if (!c.pass)
            report["failures"].push_back({{"check", c.name}, {"detail", c.detail}});
    }
    for (const auto& [name, s] : summary)
        report["suites"][name] = {{"cases", s.first}, {"passed", s.second}, {"pass", s.first == s.second}};
    if (!report.contains("failures"))
        report["failures"] = json::array();
    report["pass"] = all;
    emit(report.dump(2) + "\n", output, out);
    return all ? kExitOk : kExitVerifyFailed;
}

// ---- shared table loading ----------------------------------------------------------

struct TableSource {
    std::string dir;
    std::string n_max;
    std::string grid = "geometric";
    unsigned threads = 1;
};

std::vector<WeightTable> load_tables(const TableSource& s) {
    if (!s.dir.empty())
        return read_run(s.dir);
    if (s.n_max.empty())
        throw std::invalid_argument("give --dir with a sieve run or --n-max to sieve now");
    const auto n_max = parse_count(s.n_max);
    require_domain(n_max);
    return sieve_tables(n_max, parse_grid(s.grid, n_max), std::uint64_t{1} << 20, s.threads, false).tables;
}

std::vector<WeightTable> in_domain(std::vector<WeightTable> tables) {
    std::erase_if(tables, [](const WeightTable& t) { return t.n < SieveConfig::kMinCheckpoint; });
    if (tables.empty())
        throw std::invalid_argument("no checkpoint with N >= 16");
    return tables;
}

// ---- average -------------------------------------------------------------------

struct AverageOptions {
    TableSource source;
    std::string scheme = "all";
    std::string system = "periodic:2";
    std::string system_config;
    std::string output;
};

int cmd_average(const AverageOptions& o, std::ostream& out) {
    const auto system = o.system_config.empty() ? parse_system(o.system) : parse_system_config(read_text(o.system_config));
    std::vector<AveragingScheme> schemes;
    if (o.scheme == "all")
        schemes = {Cesaro{}, Logarithmic{}, DoubleLog{false}, DoubleLog{true}};
    else
        schemes.push_back(parse_scheme(o.scheme));
    const auto tables = in_domain(load_tables(o.source));
    unsigned k_max = 0;
    for (const auto& t : tables)
        k_max = std::max(k_max, t.k_max);
    const auto orbit = orbit_values(system, k_max);

    std::string csv = "scheme,N,value,normalizer\n";
    for (const auto& s : schemes) {
        for (const auto& t : tables) {
            double norm = 0.0;
            if (std::holds_alternative<DoubleLog>(s) && std::get<DoubleLog>(s).exact_mass) {
                ExactSum m;
                for (unsigned k = 0; k <= t.k_max; ++k)
                    m.add(t.eta[k]);
                norm = m.value();
            } else {
                norm = scheme_normalizer(s, t.n);
            }
            csv += scheme_name(s) + "," + std::to_string(t.n) + "," + fmt17(omega_average_regrouped(orbit, t, s)) +
                   "," + fmt17(norm) + "\n";
        }
    }
    emit(csv, o.output, out);
    return kExitOk;
}

// ---- sweepout ------------------------------------------------------------------

struct SweepOptions {
    std::string seq = "floor_log2";
    std::string a_seq;
    std::string perturbation = "exact";
    double c = 5.0;
    double eps = 0.1;
    std::uint64_t r_base = 0;
    std::string n_floor = "1";
    unsigned budget_bits = 1024;
    std::string n_max;
    unsigned threads = 1;
    bool jw = false;
    std::uint64_t jw_u = 8;
    std::string jw_budget = "1048576";
    std::string output;
};

json certificate_json(const SweepOutCertificate& c, const SweepVerification* v) {
    json j;
    j["a"] = c.a_name;
    j["b"] = c.b_name;
    j["eps"] = c.eps;
    j["C"] = c.c;
    j["R"] = c.r_base;
    j["built"] = c.built;
    if (!c.built) {
        j["failed_gate"] = c.failed_gate;
        j["detail"] = c.detail;
    } else {
        j["K0"] = c.k0;
        j["r"] = c.r;
        j["p_margin"] = c.p_margin.str();
        for (const auto& iv : c.intervals) {
            j["intervals"].push_back({{"N", iv.n.str()},
                                      {"J", {iv.lo.str(), iv.hi.str()}},
                                      {"hits", iv.hits.str()},
                                      {"hit_fraction", iv.hit_fraction}});
        }
        j["union_size"] = c.union_size.str();
        j["max_length"] = c.max_length.str();
        j["cover_ratio"] = c.cover_ratio;
    }
    if (c.witness) {
        const auto& w = *c.witness;
        j["periodic_witness"] = {{"L", w.l.str()},     {"M", w.m.str()},
                                 {"E", {BigInt(-w.m).str(), w.m.str()}},
                                 {"E_size", w.e_size.str()},
                                 {"D", w.d},           {"exceedance", w.exceedance.str()},
                                 {"holds", w.holds}};
        if (w.failing_k)
            j["periodic_witness"]["failing_k"] = w.failing_k->str();
    }
    if (v) {
        j["verification"] = {{"hit_fractions", v->hits},
                             {"cover_ratio", v->cover},
                             {"exceedance", v->exceedance},
                             {"exceedance_count", v->exceedance_count.str()},
                             {"pass", v->pass()}};
        if (!v->detail.empty())
            j["verification"]["detail"] = v->detail;
    }
    j["verdict"] = c.verdict() && v != nullptr && v->pass();
    return j;
}

int cmd_sweepout(const SweepOptions& o, std::ostream& out) {
    const std::uint64_t n_max = o.n_max.empty() ? 0 : parse_count(o.n_max);
    const auto b = IntegerSequence::parse(o.seq, n_max, o.threads);
    std::optional<IntegerSequence> a;
    if (!o.a_seq.empty())
        a = IntegerSequence::parse(o.a_seq, n_max, o.threads);

    SweepParams params;
    params.eps = o.eps;
    params.c = o.c;
    params.r_base = o.r_base;
    params.n_floor = BigInt(parse_count(o.n_floor));
    params.budget_bits = o.budget_bits;

    PerturbationBound bound;
    if (a) {
        if (o.perturbation == "exact")
            bound = exact_perturbation(*a, b);
        else if (o.perturbation == "hr")
            bound = exact_perturbation(*a, b, ExceptionalFilter::HardyRamanujan);
        else if (o.perturbation != "none")
            throw std::invalid_argument("--perturbation must be exact, hr or none");
    }
    const IntegerSequence& seq_a = a ? *a : b;
    auto cert = interval_condition_build(b, params, bound, a ? &*a : nullptr);
    std::optional<SweepVerification> v;
    if (cert.built) {
        periodic_witness(cert, seq_a);
        v = verify_certificate(cert, seq_a);
    }
    json j = certificate_json(cert, v ? &*v : nullptr);
    if (o.jw) {
        const auto r = jw_search(seq_a, o.eps, o.jw_u, o.c, parse_count(o.jw_budget));
        j["jw"] = {{"found", r.found}, {"u", o.jw_u}, {"scanned_q", r.scanned}};
        if (r.found) {
            j["jw"]["p"] = r.p;
            j["jw"]["q"] = r.q;
            j["jw"]["gap"] = r.gap.str();
            j["jw"]["phi"] = r.phi.str();
            j["jw"]["ratio"] = real(r.ratio);
        }
    }
    emit(j.dump(2) + "\n", o.output, out);
    return j["verdict"].get<bool>() ? kExitOk : kExitVerifyFailed;
}

// ---- maximal -------------------------------------------------------------------

struct MaximalOptions {
    TableSource source;
    std::string phi;
    double lambda = 1.0;
    std::string output;
};

int cmd_maximal(const MaximalOptions& o, std::ostream& out) {
    const auto phi = FiniteSignal::read(o.phi);
    if (!(o.lambda > 0.0))
        throw std::invalid_argument("--lambda must be positive");
    const auto tables = in_domain(load_tables(o.source));
    const auto grid = MaximalGrid::from_tables(tables);
    const auto bracket = eta_bracket(tables.back());
    const auto cert = greedy_cover(phi, o.lambda, grid, bracket.upper);
    const auto report = weak11_verify(phi, cert);

    json j;
    j["lambda"] = o.lambda;
    j["mass"] = report.mass;
    j["grid"] = json::array();
    for (const auto& s : grid.scales)
        j["grid"].push_back(s.n);
    j["eta1_bracket"] = {{"N", bracket.n}, {"lower", bracket.lower}, {"upper", bracket.upper}};
    j["D"] = cert.d;
    j["exceedance"] = cert.exceedance;
    j["exceedance_size"] = report.exceedance_size;
    j["bound"] = report.bound_value;
    j["intervals"] = json::array();
    for (const auto& iv : cert.intervals)
        j["intervals"].push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"witness_N", iv.witness}});
    j["checks"] = {{"disjoint", report.disjoint}, {"covers", report.covers}, {"bound", report.bound}};
    j["pass"] = report.pass();
    emit(j.dump(2) + "\n", o.output, out);
    return report.pass() ? kExitOk : kExitVerifyFailed;
}

// ---- report --------------------------------------------------------------------

struct ReportOptions {
    TableSource source;
    double c = 3.0;
    bool clt = false;
    unsigned glw_lo = 0;
    unsigned glw_hi = 0;
    std::string output;
};

int cmd_report(const ReportOptions& o, std::ostream& out) {
    auto tables = in_domain(load_tables(o.source));
    json j;
    j["C"] = o.c;
    for (const auto& t : tables) {
        const auto r = asymptotic_report(t, o.c);
        json e;
        e["N"] = t.n;
        e["landau_ratio"] = json::array();
        for (double v : r.landau)
            e["landau_ratio"].push_back(real(v));
        e["erdos_log_ratio"] = json::array();
        for (double v : r.erdos_log)
            e["erdos_log_ratio"].push_back(real(v));
        e["gaussian_ratio"] = json::array();
        for (double v : r.gaussian)
            e["gaussian_ratio"].push_back(real(v));
        e["hr_fraction"] = r.hr;
        e["ek_distance"] = r.ek_distance;
        e["eta_head_hr"] = {{"head", r.head_hr.head}, {"tail", r.head_hr.tail}, {"window_end", r.head_hr.window_end}};
        e["eta_head_double"] = {
            {"head", r.head_double.head}, {"tail", r.head_double.tail}, {"window_end", r.head_double.window_end}};
        e["xi_window_mass"] = r.xi_window;
        e["eta1_bracket"] = {{"lower", r.eta1.lower}, {"upper", r.eta1.upper}};
        j["checkpoints"].push_back(e);
    }

    if (o.glw_hi != 0) {
        try {
            const auto fit = glw_fit(tables, o.glw_lo, o.glw_hi);
            j["glw"] = {{"d", fit.d}, {"k", fit.k}, {"observed", fit.observed}, {"model", fit.model},
                        {"residual", fit.residual}};
        } catch (const DomainError& e) {
            j["glw"] = {{"error", e.what()}};
        }
    }

    if (o.clt) {
        const auto n_max = tables.back().n;
        std::vector<std::uint64_t> grid;
        for (const auto& t : tables)
            grid.push_back(t.n);
        const auto run = sieve_tables(n_max, grid, std::uint64_t{1} << 20, o.source.threads, true);
        for (const auto& d : run.distributions) {
            j["clt"].push_back({{"N", d.n},
                                {"omega", clt_standardize(CltStatistic::Omega, d).distance},
                                {"little_omega", clt_standardize(CltStatistic::LittleOmega, d).distance},
                                {"log2_divisors", clt_standardize(CltStatistic::Log2Divisors, d).distance}});
        }
    }
    emit(j.dump(2) + "\n", o.output, out);
    return kExitOk;
}

void add_source(CLI::App* sub, TableSource& s) {
    sub->add_option("--dir", s.dir, "Run directory written by 'sieve'");
    sub->add_option("--n-max", s.n_max, "Sieve [1, N] now instead of reading --dir");
    sub->add_option("--checkpoints", s.grid, "Grid used with --n-max")->capture_default_str();
    sub->add_option("--threads", s.threads, "Sieve worker threads")->capture_default_str();
}

}  // namespace

std::uint64_t parse_count(const std::string& text) {
    if (text.empty())
        throw std::invalid_argument("empty count");
    if (text.find_first_not_of("0123456789") == std::string::npos) {
        try {
            return std::stoull(text);
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("count out of range: " + text);
        }
    }
    std::size_t used = 0;
    long double v = 0;
    try {
        v = std::stold(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v >= 0) || v != std::floor(v) || v > 1.8e19L)
        throw std::invalid_argument("not a non-negative integer: " + text);
    return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_grid(const std::string& spec, std::uint64_t n_max) {
    std::vector<std::uint64_t> out;
    std::istringstream parts(spec);
    std::string part;
    while (std::getline(parts, part, '+')) {
        if (part == "geometric") {
            const auto g = geometric_checkpoints(n_max);
            out.insert(out.end(), g.begin(), g.end());
        } else if (part.rfind("lacunary:", 0) == 0) {
            const double rho = std::stod(part.substr(9));
            const auto g = lacunary_checkpoints(rho, n_max);
            out.insert(out.end(), g.n.begin(), g.n.end());
        } else if (part.rfind("list:", 0) == 0) {
            std::istringstream items(part.substr(5));
            std::string item;
            while (std::getline(items, item, ','))
                if (!item.empty())
                    out.push_back(parse_count(item));
        } else {
            throw std::invalid_argument("unknown checkpoint grid '" + part + "' (geometric, lacunary:rho, list:a,b)");
        }
    }
    std::erase_if(out, [&](std::uint64_t n) { return n < SieveConfig::kMinCheckpoint || n > n_max; });
    out.push_back(n_max);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Almost-prime weights, weighted Ω-averages and sweeping-out certificates"};
    app.name(args.empty() ? "omerg" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    SieveOptions sieve;
    auto* s_sieve = app.add_subcommand("sieve", "Sieve [1, N] and write checkpoint tables");
    s_sieve->add_option("--n-max", sieve.n_max, "Upper end N (accepts 1e6)")->required();
    s_sieve->add_option("--checkpoints", sieve.grid, "geometric | lacunary:rho | list:a,b joined by '+'")
        ->capture_default_str();
    s_sieve->add_option("--block-size", sieve.block_size, "Integers per sieve block")->capture_default_str();
    s_sieve->add_option("--out", sieve.out, std::string("Output root (default $") + kOutDirEnv + " or ./omerg_out)");
    s_sieve->add_option("--threads", sieve.threads, "Sieve worker threads")->capture_default_str();

    std::string verify_dir;
    std::string verify_output;
    double verify_tol = 1e-10;
    auto* s_verify = app.add_subcommand("verify", "Run the identity suites on a sieve run");
    s_verify->add_option("--dir", verify_dir, "Run directory")->required();
    s_verify->add_option("--tol", verify_tol, "Relative tolerance for the real partition identities")
        ->capture_default_str();
    s_verify->add_option("--output", verify_output, "Write the JSON report here instead of stdout");

    AverageOptions avg;
    auto* s_avg = app.add_subcommand("average", "Ω-averages of a dynamical system at each checkpoint (CSV)");
    add_source(s_avg, avg.source);
    s_avg->add_option("--scheme", avg.scheme, "cesaro | log | loglog | loglog-exact | all")->capture_default_str();
    s_avg->add_option("--system", avg.system, "periodic:m[:s[:e,...]] | rotation[:alpha[:x0[:a[:b]]]] | table:v,...")
        ->capture_default_str();
    s_avg->add_option("--system-config", avg.system_config, "key=value system file (overrides --system)");
    s_avg->add_option("--output", avg.output, "CSV path (default stdout)");

    SweepOptions sw;
    auto* s_sw = app.add_subcommand("sweepout", "Build and verify an interval-condition certificate (JSON)");
    s_sw->add_option("--seq", sw.seq, "b: floor_log2 | floor_loglog | floor_log_pow:c | lacunary:k | linear | omega | "
                                      "little_omega | log2_divisors | file:path")
        ->capture_default_str();
    s_sw->add_option("--a", sw.a_seq, "Perturbed sequence a (default: a = b)");
    s_sw->add_option("--perturbation", sw.perturbation, "p_N when --a is given: exact | hr | none")
        ->capture_default_str();
    s_sw->add_option("--C", sw.c, "Cover constant C")->capture_default_str();
    s_sw->add_option("--eps", sw.eps, "epsilon")->capture_default_str();
    s_sw->add_option("--R", sw.r_base, "Base R of N_i = R^(K0+i); 0 = least power of 2 above 1/eps")
        ->capture_default_str();
    s_sw->add_option("--n-floor", sw.n_floor, "Lower bound N0 for every N_i")->capture_default_str();
    s_sw->add_option("--budget-bits", sw.budget_bits, "Require N_r <= 2^bits")->capture_default_str();
    s_sw->add_option("--n-max", sw.n_max, "Sieve range for omega-type sequences");
    s_sw->add_option("--threads", sw.threads, "Sieve worker threads")->capture_default_str();
    s_sw->add_flag("--jw", sw.jw, "Also run the Jones-Wierdl search on a");
    s_sw->add_option("--jw-u", sw.jw_u, "Smallest p for the JW search")->capture_default_str();
    s_sw->add_option("--jw-budget", sw.jw_budget, "Largest q for the JW search")->capture_default_str();
    s_sw->add_option("--output", sw.output, "JSON path (default stdout)");

    MaximalOptions mx;
    auto* s_mx = app.add_subcommand("maximal", "Greedy weak-(1,1) certificate for a signal (JSON)");
    add_source(s_mx, mx.source);
    s_mx->add_option("--phi", mx.phi, "Two-column file: offset value")->required();
    s_mx->add_option("--lambda", mx.lambda, "Threshold")->capture_default_str();
    s_mx->add_option("--output", mx.output, "JSON path (default stdout)");

    ReportOptions rep;
    auto* s_rep = app.add_subcommand("report", "Asymptotic estimates at each checkpoint (JSON)");
    add_source(s_rep, rep.source);
    s_rep->add_option("--C", rep.c, "Window constant C")->capture_default_str();
    s_rep->add_flag("--clt", rep.clt, "Re-sieve for the Ω, ω and log d central-limit distances");
    s_rep->add_option("--glw-lo", rep.glw_lo, "Lower k of the shape fit");
    s_rep->add_option("--glw-hi", rep.glw_hi, "Upper k of the shape fit (0 = skip)");
    s_rep->add_option("--output", rep.output, "JSON path (default stdout)");

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*s_sieve)
            return cmd_sieve(sieve, out, err);
        if (*s_verify)
            return cmd_verify(verify_dir, verify_tol, verify_output, out);
        if (*s_avg)
            return cmd_average(avg, out);
        if (*s_sw)
            return cmd_sweepout(sw, out);
        if (*s_mx)
            return cmd_maximal(mx, out);
        if (*s_rep)
            return cmd_report(rep, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, out, err);
}

}  // namespace omerg::cli
