// Command-line front end: density evaluation, convergence checking against
// net-spec documents, witness search, and the property suite.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stnets/parser.hpp"
#include "stnets/suite.hpp"

using namespace stnets;

namespace {

int verdict_exit(const Verdict& v) { return v.accepted() ? 0 : 1; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

HorizonSchedule schedule_for(std::uint64_t horizon, const std::vector<std::uint64_t>& explicit_pts) {
    if (!explicit_pts.empty()) {
        HorizonSchedule s = explicit_pts;
        std::sort(s.begin(), s.end());
        return s;
    }
    HorizonSchedule s;
    for (std::uint64_t h : default_schedule())
        if (h < horizon) s.push_back(h);
    s.push_back(horizon);
    return s;
}

int cmd_density(const std::string& expr_text, std::uint64_t horizon,
                const std::vector<std::uint64_t>& schedule_pts) {
    SetExprPtr s = parse_set_expr(expr_text);
    std::cout << to_string(density(*s, schedule_for(horizon, schedule_pts))) << "\n";
    return 0;
}

MeasurePtr resolve_measure(const std::string& flag, const NetSpecDocument& doc) {
    if (!flag.empty()) return measure_by_name(flag);
    if (doc.measure_name) return measure_by_name(*doc.measure_name);
    return measure_by_name("periodic-density");
}

int cmd_check(const std::string& path, const std::string& claim, const std::string& measure_flag,
              std::uint64_t horizon) {
    NetSpecDocument doc = parse_netspec(slurp(path));
    if (claim == "order") {
        if (!doc.order_limit || !doc.order_dominating)
            raise(ErrorCode::InvalidArgument,
                  "order claim needs order_limit and order_dominating_tail");
        Verdict v = check_order_conv(doc.net, *doc.order_limit, *doc.order_dominating, horizon);
        std::cout << to_string(v) << "\n";
        return verdict_exit(v);
    }
    if (claim == "st") {
        if (!doc.st_limit || !doc.st_witness)
            raise(ErrorCode::InvalidArgument, "st claim needs st_limit, st_delta and st_p_tail");
        MeasurePtr mu = resolve_measure(measure_flag, doc);
        Verdict v = check_st_order_conv(doc.net, *doc.st_limit, *doc.st_witness, *mu, horizon);
        std::cout << to_string(v) << "\n";
        if (!v.accepted()) {
            if (auto exc = exceptional_set(doc.net, *doc.st_limit, doc.st_witness->p, horizon)) {
                std::cout << "exceptional set: " << to_string(**exc);
                if (mu->in_field(*exc))
                    std::cout << " with " << mu->name() << " " << to_string(mu->eval(*exc));
                std::cout << "\n";
            }
        }
        return verdict_exit(v);
    }
    if (claim == "ru") {
        if (!doc.ru_limit || !doc.ru_regulator)
            raise(ErrorCode::InvalidArgument, "ru claim needs ru_limit and ru_regulator");
        Verdict v = ru_check(doc.net, *doc.ru_limit, *doc.ru_regulator,
                             std::min<std::uint64_t>(horizon, 64));
        std::cout << to_string(v) << "\n";
        return verdict_exit(v);
    }
    raise(ErrorCode::InvalidArgument, "claim must be order, st or ru");
}

int cmd_witness_search(const std::string& path, const std::string& measure_flag,
                       const std::string& templates_csv, std::uint64_t horizon) {
    NetSpecDocument doc = parse_netspec(slurp(path));
    if (!doc.st_limit)
        raise(ErrorCode::InvalidArgument, "witness search needs st_limit in the document");
    MeasurePtr mu = resolve_measure(measure_flag, doc);

    WitnessTemplates tpl;
    if (!templates_csv.empty()) {
        tpl.const_zero = templates_csv.find("const") != std::string::npos;
        tpl.harmonic = templates_csv.find("harmonic") != std::string::npos;
        tpl.geometric = templates_csv.find("geometric") != std::string::npos;
    }
    auto w = witness_search(doc.net, *doc.st_limit, *mu, tpl, horizon);
    if (!w) {
        std::cout << "NotFound (templates exhausted)\n";
        return 1;
    }
    std::cout << "st_delta: " << to_string(*w->delta) << "\n";
    try {
        std::cout << "st_p_tail: " << print_tail(*w->p.tail) << "\n";
    } catch (const Error&) {
        std::cout << "# dominating tail has no grammar form; internal shape below\n"
                  << "# " << to_string(*w->p.tail) << "\n";
    }
    if (!w->p.prefix.empty()) {
        std::cout << "st_p_prefix: ";
        for (std::size_t i = 0; i < w->p.prefix.size(); ++i)
            std::cout << (i ? "; " : "") << to_string(w->p.prefix[i]);
        std::cout << "\n";
    }
    return 0;
}

int cmd_suite(std::uint64_t seed, std::uint64_t trials, std::uint64_t horizon,
              const std::string& format, const std::string& out_path, bool serial,
              bool skip_corrupted) {
    SuiteConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    cfg.horizon = horizon;
    cfg.parallel = !serial;
    cfg.include_corrupted_measure_demo = !skip_corrupted;
    SuiteReport rep = run_all(cfg);
    std::string text = format == "structured" ? report_to_json(rep) : report_to_text(rep);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 2;
        }
    }
    return rep.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification tools for statistical convergence of nets in Riesz spaces"};
    app.require_subcommand(1);

    std::string expr, path, claim, measure, templates_csv, format = "text", out_path;
    std::uint64_t horizon = 1u << 20, check_horizon = 512, seed = 42, trials = 500,
                  suite_horizon = 512;
    std::vector<std::uint64_t> schedule_pts;
    bool serial = false, skip_corrupted = false;

    auto* density_cmd = app.add_subcommand("density", "evaluate the asymptotic density of a set");
    density_cmd->add_option("expr", expr, "set expression, e.g. ap(2,2)")->required();
    density_cmd->add_option("--horizon", horizon, "largest prefix length sampled");
    density_cmd->add_option("--schedule", schedule_pts, "explicit prefix lengths")
        ->delimiter(',');

    auto* check_cmd = app.add_subcommand("check", "check a convergence claim in a net-spec file");
    check_cmd->add_option("file", path, "net-spec document")->required();
    check_cmd->add_option("--claim", claim, "order | st | ru")->required();
    check_cmd->add_option("--measure", measure, "directed set measure name");
    check_cmd->add_option("--horizon", check_horizon, "explicit scan horizon");

    auto* search_cmd =
        app.add_subcommand("witness-search", "search template witnesses for an st claim");
    search_cmd->add_option("file", path, "net-spec document")->required();
    search_cmd->add_option("--measure", measure, "directed set measure name");
    search_cmd->add_option("--templates", templates_csv,
                           "subset of const,harmonic,geometric (default all)");
    search_cmd->add_option("--horizon", check_horizon, "explicit scan horizon");

    auto* suite_cmd = app.add_subcommand("suite", "run the full property suite");
    suite_cmd->add_option("--seed", seed, "PRNG seed");
    suite_cmd->add_option("--trials", trials, "trials per property");
    suite_cmd->add_option("--horizon", suite_horizon, "checker scan horizon");
    suite_cmd->add_option("--format", format, "text | structured")
        ->check(CLI::IsMember({"text", "structured"}));
    suite_cmd->add_option("--out", out_path, "write the report to a file");
    suite_cmd->add_flag("--serial", serial, "disable parallel trials");
    suite_cmd->add_flag("--skip-corrupted-demo", skip_corrupted,
                        "skip the corrupted-measure demonstration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*density_cmd) return cmd_density(expr, horizon, schedule_pts);
        if (*check_cmd) return cmd_check(path, claim, measure, check_horizon);
        if (*search_cmd) return cmd_witness_search(path, measure, templates_csv, check_horizon);
        if (*suite_cmd) return cmd_suite(seed, trials, suite_horizon, format, out_path, serial,
                                         skip_corrupted);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
