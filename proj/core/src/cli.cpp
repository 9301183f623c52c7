#include "cachekit/cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cachekit/bounds.hpp"
#include "cachekit/entropy_lp.hpp"
#include "cachekit/network.hpp"
#include "cachekit/proof.hpp"
#include "cachekit/schemes.hpp"

namespace cachekit {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitVerification = 3;
constexpr int kExitLp = 4;

std::uint64_t fnv1a(const std::string& data)
{
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

Rational parse_cli_rational(const std::string& text)
{
    try {
        return parse_rational(text);
    } catch (const DomainError&) {
        throw DomainError("expected an exact rational 'p/q' (floats are rejected), got '" +
                          text + "'");
    }
}

std::vector<Demand> parse_demand_list(const std::string& text, const NetworkConfig& cfg)
{
    std::vector<Demand> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ';'))
        if (!token.empty())
            out.push_back(demand_from_string(token, cfg));
    return out;
}

json bound_to_obj(const LinearBound& b)
{
    return json{{"a", to_string(b.m_coeff)},
                {"b", to_string(b.r_coeff)},
                {"c", to_string(b.rhs)},
                {"origin", b.origin}};
}

json segment_to_obj(const Segment& s)
{
    json j;
    j["m_lo"] = to_string(s.m_lo);
    j["m_hi"] = to_string(s.m_hi);
    j["status"] = s.exact ? "exact" : "gap";
    j["lower"] = {{"slope", to_string(s.lower.slope)},
                  {"intercept", to_string(s.lower.intercept)},
                  {"origin", s.lower.origin}};
    j["upper"] = {{"slope", to_string(s.upper.slope)},
                  {"intercept", to_string(s.upper.intercept)},
                  {"origin", s.upper.origin}};
    return j;
}

int cmd_bounds(const NetworkConfig& cfg, const std::optional<Rational>& m,
               const std::string& format, std::ostream& out)
{
    auto bounds = all_bounds(cfg);
    auto segments = exact_segments(cfg);
    if (format == "csv") {
        out << "m_lo,m_hi,status,lower_slope,lower_intercept,lower_origin,"
               "upper_slope,upper_intercept,upper_origin\n";
        for (auto& s : segments)
            out << to_string(s.m_lo) << ',' << to_string(s.m_hi) << ','
                << (s.exact ? "exact" : "gap") << ',' << to_string(s.lower.slope) << ','
                << to_string(s.lower.intercept) << ',' << s.lower.origin << ','
                << to_string(s.upper.slope) << ',' << to_string(s.upper.intercept) << ','
                << s.upper.origin << '\n';
        return kExitOk;
    }
    json j;
    j["format_version"] = 1;
    j["n"] = cfg.n_files;
    j["k"] = cfg.n_users;
    j["case"] = to_string(cfg.regime());
    j["case_boundary"] = cfg.on_case_boundary();
    json blist = json::array();
    for (auto& b : bounds)
        blist.push_back(bound_to_obj(b));
    j["bounds"] = blist;
    json slist = json::array();
    for (auto& s : segments)
        slist.push_back(segment_to_obj(s));
    j["segments"] = slist;
    if (m) {
        json at;
        at["m"] = to_string(*m);
        at["bound_envelope"] = to_string(lower_envelope(bounds, *m));
        TradeoffCurve env = achievable_envelope(cfg);
        at["achievable_envelope"] = to_string(env.value_at(*m));
        bool exact = false, found = false;
        for (auto& s : segments)
            if (*m >= s.m_lo && *m <= s.m_hi) {
                found = true;
                exact = exact || s.exact;
            }
        if (found)
            at["status"] = exact ? "exact" : "gap";
        j["envelope_at"] = at;
    }
    if (cfg.n_files >= 2)
        j["comparison"] = json::parse(comparison_table_row(cfg).to_json());
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_simulate(const NetworkConfig& cfg, const std::string& scheme_name,
                 std::optional<int> t, const std::string& demand_text,
                 std::uint64_t seed, int file_bits, std::ostream& out)
{
    SchemeKind scheme;
    if (scheme_name == "chen")
        scheme = SchemeKind::chen;
    else if (scheme_name == "yu")
        scheme = SchemeKind::yu;
    else
        throw DomainError("scheme must be chen or yu, got '" + scheme_name + "'");

    std::vector<Demand> demands;
    if (!demand_text.empty())
        demands.push_back(demand_from_string(demand_text, cfg));
    else
        demands = demand_family(cfg, cfg.regime());

    bool all_ok = true;
    for (auto& d : demands) {
        SimReport report = simulate(cfg, scheme, t, d, file_bits, seed);
        out << report.to_json() << '\n';
        all_ok = all_ok && report.decode_ok;
    }
    return all_ok ? kExitOk : kExitVerification;
}

int cmd_lp(const NetworkConfig& cfg, const Rational& m, const std::string& demands_text,
           bool file_symmetry, bool no_symmetry, int cap,
           const std::string& emit_certificate, std::ostream& out)
{
    std::vector<Demand> demands;
    if (demands_text.empty() || demands_text == "preset" || demands_text == "family")
        demands = demand_family(cfg, cfg.regime());
    else
        demands = parse_demand_list(demands_text, cfg);

    GroundSet gs = build_ground_set(cfg, demands, cap);
    LpOptions options;
    options.symmetry = !no_symmetry;
    options.file_symmetry = file_symmetry;
    LpProblem problem = build_lp(gs, options);
    SolveResult result = solve_min_rate(problem, m);
    json j;
    j["format_version"] = 1;
    j["n"] = cfg.n_files;
    j["k"] = cfg.n_users;
    j["m"] = to_string(m);
    j["value"] = to_string(result.value);
    j["pivots"] = result.pivots;
    j["constraints"] = problem.constraints.size();
    j["implied_bound"] = bound_to_obj(result.certificate.implied);
    out << j.dump(2) << '\n';
    if (!emit_certificate.empty()) {
        std::ofstream file(emit_certificate);
        if (!file)
            throw DomainError("cannot write certificate file '" + emit_certificate + "'");
        file << certificate_file_json(problem, result.certificate, m, result.value);
    }
    return kExitOk;
}

int cmd_lp_verify(const std::string& path, std::ostream& out)
{
    std::ifstream file(path);
    if (!file)
        throw DomainError("cannot read certificate file '" + path + "'");
    std::stringstream buf;
    buf << file.rdbuf();
    CertificateFile cert = certificate_from_json(buf.str());
    GroundSet gs = build_ground_set(cert.cfg, cert.demands);
    LpOptions options;
    options.file_symmetry = cert.file_symmetry;
    LpProblem problem = build_lp(gs, options);
    LinearBound implied = verify_certificate(problem, cert.certificate);
    json j;
    j["format_version"] = 1;
    j["implied_bound"] = bound_to_obj(implied);
    j["value_at_m"] = to_string(implied.value_at(cert.m));
    j["recorded_value"] = to_string(cert.value);
    bool dominates = implied.value_at(cert.m) >= cert.value;
    j["dominates_recorded_value"] = dominates;
    out << j.dump(2) << '\n';
    return dominates ? kExitOk : kExitVerification;
}

int cmd_prove(const NetworkConfig& cfg, int theorem, bool force,
              const std::string& transcript_out, const std::string& json_out,
              std::ostream& out)
{
    ProofChain chain = theorem == 1 ? build_theorem1_chain(cfg, force)
                                    : build_theorem2_chain(cfg, force);
    LinearBound bound = verify_chain(chain);
    out << "OK theorem" << theorem << " (" << cfg.n_files << "," << cfg.n_users
        << "): " << to_string(bound.m_coeff) << "M+" << to_string(bound.r_coeff)
        << "R>=" << to_string(bound.rhs) << " steps=" << chain.steps.size() << '\n';
    if (!transcript_out.empty()) {
        std::ofstream file(transcript_out);
        if (!file)
            throw DomainError("cannot write transcript '" + transcript_out + "'");
        file << chain_to_transcript(chain);
    }
    if (!json_out.empty()) {
        std::ofstream file(json_out);
        if (!file)
            throw DomainError("cannot write transcript '" + json_out + "'");
        file << chain_to_json(chain);
    }
    return kExitOk;
}

int cmd_plotdata(const NetworkConfig& cfg, const Rational& step, std::ostream& out)
{
    if (step <= 0)
        throw DomainError("grid step must be positive");
    auto bounds = all_bounds(cfg);
    auto segments = exact_segments(cfg);
    TradeoffCurve env = achievable_envelope(cfg);

    auto exact_at = [&](const Rational& m) -> const Segment* {
        for (auto& s : segments)
            if (m >= s.m_lo && m <= s.m_hi && s.exact)
                return &s;
        return nullptr;
    };
    auto lower_origin_at = [&](const Rational& m) {
        for (auto& s : segments)
            if (m >= s.m_lo && m <= s.m_hi)
                return s.lower.origin;
        return std::string("cutset");
    };

    std::vector<Rational> grid;
    for (Rational m = 0; m <= rat(cfg.n_files); m += step)
        grid.push_back(m);
    for (auto& s : segments) {
        grid.push_back(s.m_lo);
        grid.push_back(s.m_hi);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    out << "M,R,source\n";
    for (auto& m : grid) {
        if (const Segment* s = exact_at(m)) {
            out << to_string(m) << ',' << to_string(s->lower.value_at(m)) << ",exact\n";
            continue;
        }
        Rational lo = lower_envelope(bounds, m);
        std::string origin = lower_origin_at(m);
        bool new_bound = origin.rfind("theorem", 0) == 0;
        out << to_string(m) << ',' << to_string(lo) << ','
            << (new_bound ? "new_bound" : "known_bound") << '\n';
        out << to_string(m) << ',' << to_string(env.value_at(m)) << ",achievable\n";
    }
    return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& path, std::ostream& out, std::ostream& err)
{
    std::ifstream file(path);
    if (!file)
        throw DomainError("cannot read run record '" + path + "'");
    json j = json::parse(file);
    std::vector<std::string> argv;
    for (auto& a : j.at("command"))
        argv.push_back(a.get<std::string>());
    std::ostringstream replay_out;
    int code = dispatch(argv, replay_out, err);
    out << replay_out.str();
    std::uint64_t expected = j.at("output_fnv64").get<std::uint64_t>();
    if (fnv1a(replay_out.str()) != expected) {
        err << "replay: output differs from the recorded run\n";
        return kExitVerification;
    }
    err << "replay: output identical to the recorded run (exit " << code << ")\n";
    return code;
}

void write_run_record(const std::string& path, const std::vector<std::string>& args,
                      const std::string& output)
{
    json j;
    j["format_version"] = 1;
    j["version"] = kToolkitVersion;
    std::vector<std::string> stored;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--run-record") {
            ++i;
            continue;
        }
        stored.push_back(args[i]);
    }
    j["command"] = stored;
    j["output_fnv64"] = fnv1a(output);
    j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    std::ofstream file(path);
    if (!file)
        throw DomainError("cannot write run record '" + path + "'");
    file << j.dump(2) << '\n';
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"coded-caching rate-memory tradeoff toolkit"};
    app.set_config("--config", "", "read options from an ini-style key=value file");
    app.require_subcommand(1);

    std::string run_record;
    app.add_option("--run-record", run_record,
                   "write a reproducible run record to this file");

    int n = 0, k = 0;
    std::string m_text, format = "json", scheme = "chen", demand_text, demands_text;
    std::string emit_certificate, verify_path, transcript_out, json_out, step_text,
        record_path;
    int t = -1, theorem = 1, cap = kDefaultVariableCap;
    std::uint64_t seed = 0;
    int file_bits = 0;
    bool file_symmetry = false, no_symmetry = false, force = false;

    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bounds, envelopes and "
                                                    "exact tradeoff segments");
    bounds_cmd->add_option("--n", n, "number of files N")->required();
    bounds_cmd->add_option("--k", k, "number of users K")->required();
    bounds_cmd->add_option("--m", m_text, "memory point as an exact rational p/q");
    bounds_cmd->add_option("--format", format, "json or csv");

    auto* sim_cmd = app.add_subcommand("simulate", "bit-exact scheme simulation");
    sim_cmd->add_option("--n", n)->required();
    sim_cmd->add_option("--k", k)->required();
    sim_cmd->add_option("--scheme", scheme, "chen or yu")->required();
    sim_cmd->add_option("--t", t, "uncoded placement parameter (yu)");
    sim_cmd->add_option("--demand", demand_text, "single demand, e.g. 1,2,3,1");
    sim_cmd->add_option("--seed", seed, "rng seed for file contents");
    sim_cmd->add_option("--file-bits", file_bits, "file size in bits (0 = minimal)");

    auto* lp_cmd = app.add_subcommand("lp", "entropy-cone LP oracle with dual "
                                            "certificates");
    lp_cmd->add_option("--n", n);
    lp_cmd->add_option("--k", k);
    lp_cmd->add_option("--m", m_text, "memory point as an exact rational p/q");
    lp_cmd->add_option("--demands", demands_text,
                       "preset | semicolon-separated demands");
    lp_cmd->add_option("--cap", cap, "ground-set variable cap");
    lp_cmd->add_flag("--file-symmetry", file_symmetry,
                     "also impose file-permutation symmetry");
    lp_cmd->add_flag("--no-symmetry", no_symmetry, "drop symmetry constraints");
    lp_cmd->add_option("--emit-certificate", emit_certificate,
                       "write the dual certificate to this file");
    lp_cmd->add_option("--verify", verify_path, "re-check a certificate file");

    auto* prove_cmd = app.add_subcommand("prove", "build and verify a theorem's proof "
                                                  "chain");
    prove_cmd->add_option("--n", n)->required();
    prove_cmd->add_option("--k", k)->required();
    prove_cmd->add_option("--theorem", theorem, "1 or 2")->required();
    prove_cmd->add_flag("--force", force, "skip the case-regime check");
    prove_cmd->add_option("--transcript-out", transcript_out,
                          "write the step transcript to this file");
    prove_cmd->add_option("--json-out", json_out, "write the JSON transcript");

    auto* plot_cmd = app.add_subcommand("plot-data", "CSV of bound and achievable "
                                                     "curves for plotting");
    plot_cmd->add_option("--n", n)->required();
    plot_cmd->add_option("--k", k)->required();
    plot_cmd->add_option("--step", step_text, "grid step as a rational (default 1/16)");

    auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded command and "
                                                    "compare outputs");
    replay_cmd->add_option("--record", record_path, "run record file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitOk;
        }
        err << e.what() << '\n';
        return kExitDomain;
    }

    std::ostringstream capture;
    int code = kExitOk;
    if (bounds_cmd->parsed()) {
        std::optional<Rational> m;
        if (!m_text.empty())
            m = parse_cli_rational(m_text);
        code = cmd_bounds(make_config(n, k), m, format, capture);
    } else if (sim_cmd->parsed()) {
        std::optional<int> t_opt;
        if (t >= 0)
            t_opt = t;
        code = cmd_simulate(make_config(n, k), scheme, t_opt, demand_text, seed,
                            file_bits, capture);
    } else if (lp_cmd->parsed()) {
        if (!verify_path.empty()) {
            code = cmd_lp_verify(verify_path, capture);
        } else {
            if (n == 0 || k == 0 || m_text.empty())
                throw DomainError("lp needs --n, --k and --m (or --verify FILE)");
            code = cmd_lp(make_config(n, k), parse_cli_rational(m_text), demands_text,
                          file_symmetry, no_symmetry, cap, emit_certificate, capture);
        }
    } else if (prove_cmd->parsed()) {
        if (theorem != 1 && theorem != 2)
            throw DomainError("--theorem must be 1 or 2");
        code = cmd_prove(make_config(n, k), theorem, force, transcript_out, json_out,
                         capture);
    } else if (plot_cmd->parsed()) {
        Rational step = step_text.empty() ? rat(1, 16) : parse_cli_rational(step_text);
        code = cmd_plotdata(make_config(n, k), step, capture);
    } else if (replay_cmd->parsed()) {
        return cmd_replay(record_path, out, err);
    }

    out << capture.str();
    if (!run_record.empty())
        write_run_record(run_record, args, capture.str());
    return code;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(args, out, err);
    } catch (const LpError& e) {
        err << "lp error: " << e.what() << '\n';
        return kExitLp;
    } catch (const ChainError& e) {
        err << "verification error: " << e.what() << '\n';
        return kExitVerification;
    } catch (const StepError& e) {
        err << "verification error: " << e.what() << '\n';
        return kExitVerification;
    } catch (const CertificateError& e) {
        err << "verification error: " << e.what() << '\n';
        return kExitVerification;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace cachekit
