#include "vilenkin/decomposition.hpp"
#include "vilenkin/harness.hpp"
#include "vilenkin/serialization.hpp"
#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"
#include "vilenkin/verification.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

// Comma lists are parsed by hand so positional arguments never get eaten.
template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
    std::vector<T> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        try {
            if constexpr (std::is_integral_v<T>)
                out.push_back(static_cast<T>(std::stoll(item, &used)));
            else
                out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad " + what + " list '" + text + "'");
        }
        if (used != item.size())
            throw std::invalid_argument("bad " + what + " list '" + text + "'");
    }
    if (out.empty()) throw std::invalid_argument("bad " + what + " list '" + text + "'");
    return out;
}

std::vector<int> parse_radices(const std::string& text) { return parse_list<int>(text, "radix"); }

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

struct TransformArgs {
    std::string spec_text;
    std::string direction = "forward";
    std::string in_path;
    std::string out_path = "-";
    bool use_naive = false;
    bool check = false;
};

int run_transform(const TransformArgs& args) {
    const vilenkin::ValueFile file = vilenkin::value_file_from_json(load_json(args.in_path));
    if (!args.spec_text.empty() && parse_radices(args.spec_text) != file.radices)
        throw std::invalid_argument("--spec disagrees with the radices stored in " + args.in_path);
    const vilenkin::SystemSpec spec(file.radices);

    vilenkin::ValueFile out;
    out.radices = file.radices;
    double check_error = 0.0;
    if (args.direction == "forward") {
        if (file.kind != "signal")
            throw std::invalid_argument("forward transform expects a signal file");
        const vilenkin::Signal f{file.values};
        const vilenkin::Spectrum fast = args.use_naive ? vilenkin::naive_forward(f, spec)
                                                       : vilenkin::fast_forward(f, spec);
        if (args.check) {
            const vilenkin::Spectrum slow = vilenkin::naive_forward(f, spec);
            for (std::size_t i = 0; i < fast.coeffs.size(); ++i)
                check_error = std::max(check_error, std::abs(fast.coeffs[i] - slow.coeffs[i]));
            const vilenkin::Signal back = vilenkin::fast_inverse(fast, spec);
            for (std::size_t i = 0; i < back.values.size(); ++i)
                check_error = std::max(check_error, std::abs(back.values[i] - f.values[i]));
        }
        out.kind = "spectrum";
        out.values = fast.coeffs;
    } else {
        if (file.kind != "spectrum")
            throw std::invalid_argument("inverse transform expects a spectrum file");
        const vilenkin::Spectrum F{file.values};
        const vilenkin::Signal fast = args.use_naive ? vilenkin::naive_inverse(F, spec)
                                                     : vilenkin::fast_inverse(F, spec);
        if (args.check) {
            const vilenkin::Signal slow = vilenkin::naive_inverse(F, spec);
            for (std::size_t i = 0; i < fast.values.size(); ++i)
                check_error = std::max(check_error, std::abs(fast.values[i] - slow.values[i]));
            const vilenkin::Spectrum back = vilenkin::fast_forward(fast, spec);
            for (std::size_t i = 0; i < back.coeffs.size(); ++i)
                check_error = std::max(check_error, std::abs(back.coeffs[i] - F.coeffs[i]));
        }
        out.kind = "signal";
        out.values = fast.values;
    }
    write_text(args.out_path, vilenkin::value_file_to_json(out).dump(2) + "\n");
    if (args.check) {
        std::cerr << "cross-check max deviation " << check_error << "\n";
        if (!(check_error < 1e-10)) {
            std::cerr << "cross-check failed\n";
            return 1;
        }
    }
    return 0;
}

struct DecomposeArgs {
    std::string spec_text;
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::string format = "text";
    std::string out_path = "-";
};

int run_decompose(const DecomposeArgs& args) {
    const std::vector<int> radices = parse_radices(args.spec_text);
    const vilenkin::SystemSpec spec(radices);
    const vilenkin::IntervalZ seg{args.a, args.b};
    vilenkin::validate_interval(seg, spec);
    const vilenkin::Decomposition dec = vilenkin::decompose_interval(seg, spec);
    if (args.format == "text") {
        write_text(args.out_path, vilenkin::describe(dec, spec));
        return 0;
    }
    json doc;
    doc["radices"] = radices;
    doc["interval"] = {seg.a, seg.b};
    doc["top_level"] = dec.top_level;
    doc["leading_level"] = dec.leading_level;
    doc["pieces"] = json::array();
    for (const auto& piece : dec.pieces) {
        json row;
        row["kind"] = piece.kind == vilenkin::PieceKind::anchor   ? "anchor"
                      : piece.kind == vilenkin::PieceKind::start_run ? "start"
                                                                     : "end";
        row["level"] = piece.level;
        row["shift"] = piece.shift;
        row["range"] = {piece.range.a, piece.range.b};
        row["branches"] = piece.branches;
        doc["pieces"].push_back(std::move(row));
    }
    write_text(args.out_path, doc.dump(2) + "\n");
    return 0;
}

struct VerifyArgs {
    std::string spec_text;
    std::uint64_t seed = 1;
    int depth = 20;
    std::string format = "text";
    std::string inject_fault;
};

int run_verify(const VerifyArgs& args) {
    const vilenkin::SystemSpec spec(parse_radices(args.spec_text));
    vilenkin::ForwardFn forward;
    if (!args.inject_fault.empty()) {
        if (args.inject_fault != "transform-oracle")
            throw std::invalid_argument("no fault hook for suite '" + args.inject_fault + "'");
        forward = [](const vilenkin::Signal& f, const vilenkin::SystemSpec& s) {
            vilenkin::Spectrum F = vilenkin::fast_forward(f, s);
            F.coeffs[1] += 1e-3;  // deliberately wrong, the oracle suite must notice
            return F;
        };
    }
    const std::vector<vilenkin::SuiteResult> results =
        vilenkin::run_verification(spec, args.seed, args.depth, forward);
    int failures = 0;
    for (const auto& r : results) failures += r.passed ? 0 : 1;
    if (args.format == "json") {
        json doc;
        doc["radices"] = spec.radices();
        doc["seed"] = args.seed;
        doc["depth"] = args.depth;
        doc["failures"] = failures;
        doc["suites"] = json::array();
        for (const auto& r : results)
            doc["suites"].push_back(
                {{"suite", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "p = (";
        for (std::size_t i = 0; i < spec.radices().size(); ++i)
            std::cout << (i ? ", " : "") << spec.radices()[i];
        std::cout << "), seed " << args.seed << ", depth " << args.depth << "\n";
        for (const auto& r : results) {
            std::cout << (r.passed ? "[ ok ] " : "[FAIL] ") << r.name;
            if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
            std::cout << "\n";
        }
        std::cout << results.size() << " suites, " << failures << " failed\n";
    }
    return failures == 0 ? 0 : 1;
}

struct EstimateArgs {
    std::string config_path;
    std::string spec_text;
    std::string p_text;
    std::int64_t trials = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string target;
    std::string law;
    double scale = -1.0;
    std::int64_t min_intervals = -1;
    std::int64_t max_intervals = -1;
    std::int64_t adversarial = -1;
    int restarts = -1;
    std::string format = "json";
    std::string out_path = "-";
    std::string replay_path;
};

int run_replay(const std::string& path) {
    const json doc = load_json(path);
    std::vector<json> digests;
    if (doc.contains("rows")) {
        for (const auto& row : doc.at("rows")) digests.push_back(row.at("worst"));
    } else {
        digests.push_back(doc);
    }
    int mismatches = 0;
    for (const auto& digest : digests) {
        const vilenkin::ReplayOutcome outcome = vilenkin::replay_digest(digest);
        std::cout << "p=" << digest.at("exponent").get<double>()
                  << " target=" << digest.at("target").get<std::string>()
                  << " stored=" << outcome.stored << " recomputed=" << outcome.recomputed
                  << (outcome.exact_match() ? "  exact" : "  MISMATCH") << "\n";
        if (!outcome.exact_match()) ++mismatches;
    }
    return mismatches == 0 ? 0 : 1;
}

int run_estimate(const EstimateArgs& args) {
    if (!args.replay_path.empty()) return run_replay(args.replay_path);

    vilenkin::TrialConfig cfg;
    if (!args.config_path.empty()) cfg = vilenkin::config_from_json(load_json(args.config_path));
    if (!args.spec_text.empty()) cfg.radices = parse_radices(args.spec_text);
    if (cfg.radices.empty())
        throw std::invalid_argument("estimate needs radices, via --spec or --config");
    if (!args.p_text.empty()) cfg.exponents = parse_list<double>(args.p_text, "exponent");
    if (args.trials >= 0) cfg.trials = args.trials;
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.target.empty()) cfg.target = vilenkin::target_from_name(args.target);
    if (!args.law.empty()) cfg.law.kind = vilenkin::law_from_name(args.law);
    if (args.scale >= 0.0) cfg.law.scale = args.scale;
    if (args.min_intervals >= 0) cfg.min_intervals = args.min_intervals;
    if (args.max_intervals >= 0) cfg.max_intervals = args.max_intervals;
    if (args.adversarial >= 0) {
        cfg.adversarial = true;
        cfg.adversarial_iterations = args.adversarial;
    }
    if (args.restarts >= 0) cfg.restarts = args.restarts;

    const vilenkin::TrialReport report = vilenkin::estimate_constant(cfg);
    if (args.format == "csv")
        write_text(args.out_path, vilenkin::report_to_csv(report));
    else
        write_text(args.out_path, vilenkin::report_to_json(report).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded Vilenkin systems: transforms, interval decompositions, ratio trials"};
    app.require_subcommand(1);

    TransformArgs targs;
    CLI::App* transform = app.add_subcommand("transform", "run the transform on a value file");
    transform->add_option("--spec", targs.spec_text, "radices, e.g. 2,3,2");
    transform->add_option("--direction", targs.direction, "forward or inverse")
        ->check(CLI::IsMember({"forward", "inverse"}));
    transform->add_option("--in", targs.in_path, "input value file")->required();
    transform->add_option("--out", targs.out_path, "output path, - for stdout");
    transform->add_flag("--naive", targs.use_naive, "use the quadratic reference path");
    transform->add_flag("--check", targs.check,
                        "cross-check fast against naive and round-trip, exit 1 on drift");

    DecomposeArgs dargs;
    CLI::App* decompose = app.add_subcommand("decompose", "decompose an index interval");
    decompose->add_option("--spec", dargs.spec_text, "radices, e.g. 2,3,2")->required();
    decompose->add_option("a", dargs.a, "left endpoint (inclusive)")->required();
    decompose->add_option("b", dargs.b, "right endpoint (exclusive)")->required();
    decompose->add_option("--format", dargs.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    decompose->add_option("--out", dargs.out_path, "output path, - for stdout");

    VerifyArgs vargs;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
    verify->add_option("--spec", vargs.spec_text, "radices, e.g. 2,3,2")->required();
    verify->add_option("--seed", vargs.seed, "sampling seed");
    verify->add_option("--depth", vargs.depth, "sampling effort for large systems")
        ->check(CLI::PositiveNumber);
    verify->add_option("--format", vargs.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--inject-fault", vargs.inject_fault,
                       "corrupt the named hook to prove the suites catch it");

    EstimateArgs eargs;
    CLI::App* estimate = app.add_subcommand("estimate", "run ratio trials and report statistics");
    estimate->add_option("--config", eargs.config_path, "trial config json");
    estimate->add_option("--spec", eargs.spec_text, "radices, e.g. 2,3,2,3");
    estimate->add_option("--p", eargs.p_text, "exponents, e.g. 1.1,1.5");
    estimate->add_option("--trials", eargs.trials, "random trials per exponent");
    estimate->add_option("--seed", eargs.seed, "master seed");
    estimate->add_option("--target", eargs.target, "rdf, hardy, or square-function");
    estimate->add_option("--law", eargs.law, "gaussian or unimodular coefficients");
    estimate->add_option("--scale", eargs.scale, "coefficient scale");
    estimate->add_option("--min-intervals", eargs.min_intervals, "fewest intervals per family");
    estimate->add_option("--max-intervals", eargs.max_intervals, "most intervals per family");
    estimate->add_option("--adversarial", eargs.adversarial,
                         "hill-climb iterations spread over the best trials");
    estimate->add_option("--restarts", eargs.restarts, "how many top trials to refine");
    estimate->add_option("--format", eargs.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    estimate->add_option("--out", eargs.out_path, "output path, - for stdout");
    estimate->add_option("--replay", eargs.replay_path,
                         "recheck the worst cases stored in a report or digest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    eargs.seed_set = estimate->count("--seed") > 0;

    try {
        if (*transform) return run_transform(targs);
        if (*decompose) return run_decompose(dargs);
        if (*verify) return run_verify(vargs);
        if (*estimate) return run_estimate(eargs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
