// residue-lab: exact-arithmetic verification of Collatz step-count and
// residue identities. Every verdict is an integer (or certified-enclosure)
// comparison; floating point only ever appears in display strings.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <resilab/analysis.hpp>
#include <resilab/exact.hpp>
#include <resilab/scanner.hpp>
#include <resilab/trajectory.hpp>

namespace {

using nlohmann::json;
using namespace resilab;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;      // operational errors: bad args, budget, IO
constexpr int kExitViolation = 2;  // a verified claim failed

std::uint64_t budget_from_env() {
    const char* env = std::getenv("RESIDUE_LAB_BUDGET");
    if (env == nullptr || *env == '\0') return kDefaultStepBudget;
    const Int parsed = parse_decimal(env);
    if (parsed < 1 || !parsed.fits_ulong_p()) {
        throw std::invalid_argument("RESIDUE_LAB_BUDGET must be a positive integer");
    }
    return parsed.get_ui();
}

Int parse_n(const std::string& s) {
    const Int n = parse_decimal(s);
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    return n;
}

json residue_json(const ResidueTriple& r) {
    return json{{"e", r.e}, {"o", r.o}, {"n_odd", to_decimal(r.n_odd)}};
}

int cmd_stats(const std::string& n_str, std::uint64_t budget, bool as_json) {
    const Int n = parse_n(n_str);
    const StepCounts c = trajectory_stats(n, budget);
    const FormulaCheck f = predict_all(n, c);
    if (as_json) {
        json j{{"n", to_decimal(n)}, {"d", c.total}, {"o", c.odd}, {"e", c.even},
               {"all_match", f.all_match()}};
        j["predicted"] = f.predicted;
        j["matches"] = f.matches;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "N = " << to_decimal(n) << '\n'
                  << "D = " << c.total << "  O = " << c.odd << "  E = " << c.even << '\n'
                  << "formula predictions:\n";
        for (std::size_t i = 0; i < 6; ++i) {
            std::cout << "  " << kFormulaNames[i] << " = " << f.predicted[i] << "  "
                      << (f.matches[i] ? "ok" : "MISMATCH") << '\n';
        }
    }
    return f.all_match() ? kExitOk : kExitViolation;
}

int cmd_residue(const std::string& n_str, unsigned digits, std::uint64_t budget, bool as_json) {
    const Int n = parse_n(n_str);
    const ResidueTriple r = residue_of(n, budget);
    const std::string dec = residue_decimal(r, digits);
    if (as_json) {
        json j{{"n", to_decimal(n)}, {"res", residue_json(r)}, {"decimal", dec}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "N = " << to_decimal(n) << '\n'
                  << "Res = 2^" << r.e << " / (3^" << r.o << " * " << to_decimal(r.n_odd) << ")\n"
                  << "decimal (" << digits << " digits, truncated) = " << dec << '\n';
    }
    return kExitOk;
}

int cmd_branch(const std::string& n_str, std::uint64_t budget, bool as_json) {
    const Int n = parse_n(n_str);
    const OddBranch b = odd_branch(n, budget);
    if (as_json) {
        json values = json::array(), divisions = json::array();
        for (const Int& v : b.values) values.push_back(to_decimal(v));
        for (const auto d : b.divisions) divisions.push_back(d);
        std::cout << json{{"n", to_decimal(n)}, {"values", values}, {"divisions", divisions}}.dump(2)
                  << '\n';
    } else {
        std::cout << "N = " << to_decimal(n) << '\n';
        if (b.empty()) {
            std::cout << "odd branch: empty (power of two)\n";
        } else {
            std::cout << "values:   ";
            for (const Int& v : b.values) std::cout << ' ' << to_decimal(v);
            std::cout << "\ndivisions:";
            for (const auto d : b.divisions) std::cout << ' ' << d;
            std::cout << '\n';
        }
    }
    return kExitOk;
}

void print_report(const ScanReport& rep, const CheckSet& checks) {
    std::cout << "scanned [" << to_decimal(rep.start()) << ", " << to_decimal(rep.end()) << "]: "
              << rep.count_checked << " numbers, " << rep.violations.size() << " violations\n";
    std::cout << "checks:";
    for (const auto& name : checks.names()) std::cout << ' ' << name;
    std::cout << '\n';
    if (rep.max_residue) {
        std::cout << "max residue = " << residue_decimal(rep.max_residue->res, 12) << " at N = "
                  << to_decimal(rep.max_residue->n) << '\n';
    }
    if (rep.min_residue) {
        std::cout << "min residue = " << residue_decimal(rep.min_residue->res, 12) << " at N = "
                  << to_decimal(rep.min_residue->n) << '\n';
    }
    std::cout << "residues in [1, 1.26): " << (rep.residues_in_1_126() ? "yes" : "no") << '\n';
    for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i) {
        const auto& v = rep.violations[i];
        std::cout << "VIOLATION [" << v.check << "] N=" << to_decimal(v.n) << ": " << v.detail << '\n';
    }
    if (rep.violations.size() > 20) {
        std::cout << "... " << (rep.violations.size() - 20) << " more violations\n";
    }
    std::cout << "duration: " << rep.duration_ms << " ms\n";
}

int cmd_verify(const ScanConfig& cfg, bool as_json) {
    const ScanReport rep = run_scan(cfg);
    if (as_json) {
        std::cout << rep.to_json(true).dump(2) << '\n';
    } else {
        print_report(rep, cfg.checks);
    }
    return rep.violations.empty() ? kExitOk : kExitViolation;
}

int cmd_max_residue(const ScanConfig& cfg, bool as_json) {
    const MaxResidue m = find_max_residue(cfg);
    if (as_json) {
        std::cout << json{{"n", to_decimal(m.n)}, {"res", residue_json(m.res)},
                          {"decimal", m.decimal}}.dump(2)
                  << '\n';
    } else {
        std::cout << "max residue in [" << to_decimal(cfg.start) << ", " << to_decimal(cfg.end)
                  << "]: N = " << to_decimal(m.n) << '\n'
                  << "Res = 2^" << m.res.e << " / (3^" << m.res.o << " * " << to_decimal(m.res.n_odd)
                  << ") = " << m.decimal << '\n';
    }
    return kExitOk;
}

struct BoundsSelection {
    std::uint64_t lemma4_max = 0;   // 0 = not selected
    std::uint64_t lemma5_max = 0;
    bool theorem2_claim = false;
    bool constants = false;
};

int cmd_bounds(BoundsSelection sel, const PrecisionConfig& prec, bool as_json) {
    // With no explicit selection, run the whole battery at default caps.
    if (sel.lemma4_max == 0 && sel.lemma5_max == 0 && !sel.theorem2_claim && !sel.constants) {
        sel = {10000, 1000, true, true};
    }

    struct Row {
        std::string name;
        std::string range;
        Verdict verdict;
        std::string detail;
    };
    std::vector<Row> rows;

    const auto fold = [](const std::vector<CheckOutcome>& outs) {
        Verdict worst = Verdict::Pass;
        std::string note = "all pass (" + std::to_string(outs.size()) + " cases)";
        for (const auto& o : outs) {
            if (o.failed()) return std::make_pair(Verdict::Fail, o.check + "[" + o.subject + "]: " + o.detail);
            if (o.verdict == Verdict::Inconclusive && worst == Verdict::Pass) {
                worst = Verdict::Inconclusive;
                note = o.check + "[" + o.subject + "] inconclusive: " + o.detail;
            }
        }
        return std::make_pair(worst, note);
    };

    if (sel.lemma4_max > 0) {
        const auto [v, note] = fold(lemma4_range(1, sel.lemma4_max, prec));
        rows.push_back({"lemma4 harmonic sandwich", "n in [1," + std::to_string(sel.lemma4_max) + "]", v, note});
    }
    if (sel.lemma5_max > 0) {
        const auto [v, note] = fold(lemma5_range(1, sel.lemma5_max, prec));
        rows.push_back({"lemma5 restricted sum", "m in [1," + std::to_string(sel.lemma5_max) + "]", v, note});
    }
    if (sel.theorem2_claim) {
        const auto [v, note] = fold(theorem2_claim_range(20, 1252, prec));
        rows.push_back({"theorem2 product claim", "t in [20,1252]", v, note});
    }
    if (sel.constants) {
        const CheckOutcome c = theorem2_constant_check(prec);
        rows.push_back({"theorem2 constant", "-", c.verdict, c.detail});
        const CheckOutcome k = corollary_bound_check(prec);
        rows.push_back({"corollary residue bound", "-", k.verdict, k.detail});
    }

    bool any_fail = false;
    if (as_json) {
        json out = json::array();
        for (const auto& r : rows) {
            out.push_back({{"check", r.name}, {"range", r.range},
                           {"verdict", to_string(r.verdict)}, {"detail", r.detail}});
            if (r.verdict == Verdict::Fail) any_fail = true;
        }
        std::cout << out.dump(2) << '\n';
    } else {
        for (const auto& r : rows) {
            std::cout << r.name << " (" << r.range << "): " << to_string(r.verdict) << "\n    "
                      << r.detail << '\n';
            if (r.verdict == Verdict::Fail) any_fail = true;
        }
    }
    return any_fail ? kExitViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification of Collatz step-count and residue identities"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "structured output");

    std::uint64_t budget = 0;  // resolved after parse: flag > env > default

    std::string n_str;
    unsigned digits = 12;

    auto* stats = app.add_subcommand("stats", "step counts D/O/E and the six formula predictions");
    stats->add_option("N", n_str, "positive integer (decimal)")->required();
    stats->add_option("--budget", budget, "step budget override");

    auto* residue = app.add_subcommand("residue", "exact residue triple and truncated decimal");
    residue->add_option("N", n_str, "positive integer (decimal)")->required();
    residue->add_option("--digits", digits, "decimal digits (truncated)");
    residue->add_option("--budget", budget, "step budget override");

    auto* branch = app.add_subcommand("branch", "odd branch values and divisions");
    branch->add_option("N", n_str, "positive integer (decimal)")->required();
    branch->add_option("--budget", budget, "step budget override");

    std::string from_str = "1", to_str = "1", checks_str = "all";
    std::uint64_t chunk_size = 4096, cache_below = 0;
    unsigned workers = 1;
    std::string checkpoint_path, report_path;

    const auto add_range_options = [&](CLI::App* sub, bool with_checks) {
        sub->add_option("--from", from_str, "range start (decimal)")->required();
        sub->add_option("--to", to_str, "range end, inclusive (decimal)")->required();
        if (with_checks) {
            sub->add_option("--checks", checks_str,
                            "all, none, or comma list of lower,wrc,formulas,theorem2,product_form");
        }
        sub->add_option("--workers", workers, "concurrent chunk executors");
        sub->add_option("--chunk-size", chunk_size, "numbers per chunk");
        sub->add_option("--checkpoint", checkpoint_path, "checkpoint file (resume if present)");
        sub->add_option("--budget", budget, "step budget override");
        sub->add_option("--cache-below", cache_below, "cache odd stats below this threshold");
    };

    auto* verify = app.add_subcommand("verify", "run the enabled checks over a range");
    add_range_options(verify, true);
    verify->add_option("--report", report_path, "write per-N CSV (N,D,O,E,residue)");

    auto* maxres = app.add_subcommand("max-residue", "N attaining the maximum residue in a range");
    add_range_options(maxres, false);

    auto* bounds = app.add_subcommand("bounds", "numeric lemma/constant checks");
    BoundsSelection sel;
    unsigned bounds_digits = 50;
    bounds->add_option("--lemma4-max", sel.lemma4_max, "check the harmonic sandwich for n in [1,cap]");
    bounds->add_option("--lemma5-max", sel.lemma5_max, "check the restricted sum for m in [1,cap]");
    bounds->add_flag("--theorem2-claim", sel.theorem2_claim, "check the product claim for t in [20,1252]");
    bounds->add_flag("--constants", sel.constants, "check the limiting constants");
    bounds->add_option("--digits", bounds_digits, "working precision in decimal digits");

    // Let global flags like --json appear after the subcommand.
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (budget == 0) budget = budget_from_env();

        if (stats->parsed()) return cmd_stats(n_str, budget, as_json);
        if (residue->parsed()) {
            if (digits < 1) throw std::invalid_argument("--digits must be >= 1");
            return cmd_residue(n_str, digits, budget, as_json);
        }
        if (branch->parsed()) return cmd_branch(n_str, budget, as_json);

        if (verify->parsed() || maxres->parsed()) {
            ScanConfig cfg;
            cfg.start = parse_decimal(from_str);
            cfg.end = parse_decimal(to_str);
            cfg.chunk_size = chunk_size;
            cfg.workers = workers;
            cfg.checks = verify->parsed() ? CheckSet::parse(checks_str) : CheckSet::none();
            cfg.step_budget = budget;
            cfg.cache_below = cache_below;
            if (!checkpoint_path.empty()) cfg.checkpoint_path = checkpoint_path;
            if (!report_path.empty()) cfg.report_path = report_path;
            return verify->parsed() ? cmd_verify(cfg, as_json) : cmd_max_residue(cfg, as_json);
        }

        if (bounds->parsed()) {
            if (bounds->count("--lemma4-max") > 0 && sel.lemma4_max == 0) {
                throw std::invalid_argument("--lemma4-max must be >= 1");
            }
            if (bounds->count("--lemma5-max") > 0 && sel.lemma5_max == 0) {
                throw std::invalid_argument("--lemma5-max must be >= 1");
            }
            PrecisionConfig prec;
            prec.working_digits = bounds_digits;
            return cmd_bounds(sel, prec, as_json);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
